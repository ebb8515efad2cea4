#pragma once
// Compactly supported smooth potentials built from mollifier bumps.

#include <vector>

#include "hamadv/errors.hpp"

namespace hamadv {

/// One mollifier bump: amplitude * exp(-1/(1-u^2)) with u = (q-center)/radius
/// for |u| < 1, identically zero otherwise.
struct Bump {
    double center = 0.0;
    double radius = 1.0;
    double amplitude = 0.0;
};

/// Sum of mollifier bumps with 0 <= V(q) < 1/2 everywhere. V and its first
/// two derivatives are smooth across support endpoints and identically zero
/// outside the union of open supports.
class BumpPotential {
public:
    BumpPotential() = default;
    explicit BumpPotential(std::vector<Bump> bumps);

    const std::vector<Bump>& bumps() const { return bumps_; }
    bool empty() const { return bumps_.empty(); }

    double value(double q) const;
    double derivative(double q) const;
    double second_derivative(double q) const;

    /// (V, V', V'') truncated to max_order in {0, 1, 2}.
    std::vector<double> derivatives(double q, int max_order) const;

    /// Upper bound sum(amplitude_i * e^-1) on sup V; strictly below 1/2 by
    /// construction.
    double max_value_bound() const { return max_value_bound_; }

    /// True iff q lies outside every open bump support (V and all its
    /// derivatives are exactly zero there).
    bool outside_all_supports(double q) const;

private:
    std::vector<Bump> bumps_;
    double max_value_bound_ = 0.0;
};

} // namespace hamadv
