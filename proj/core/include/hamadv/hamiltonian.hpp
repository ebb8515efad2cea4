#pragma once
// Hamiltonian specifications with exact derivative evaluation.
//
// Every integrator in this project sees the Hamiltonian only through
// eval_derivative, which optionally appends each query to a tape. Evaluation
// is deterministic: identical inputs yield bit-identical outputs.

#include <memory>
#include <vector>

#include "hamadv/bump.hpp"
#include "hamadv/phase.hpp"

namespace hamadv {

enum class HamiltonianKind {
    free_particle,  // H = p^2/2, n = 1
    harmonic,       // H = (p^2 + w^2 q^2)/2, n = 1
    separable_bump, // H = p^2/2 + V(q), n = 1
    lift_single,    // H*(q,p) = H_inner(q1, p1), n >= 2
    lift_product,   // H*(q,p) = sum_i H_inner(q_i, p_i), n >= 2
};

const char* kind_name(HamiltonianKind k);

class HamiltonianSpec {
public:
    static HamiltonianSpec free_particle();
    static HamiltonianSpec harmonic(double omega);
    static HamiltonianSpec separable_bump(BumpPotential potential);
    static HamiltonianSpec lift_single(const HamiltonianSpec& inner, int n);
    static HamiltonianSpec lift_product(const HamiltonianSpec& inner, int n);

    HamiltonianKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_planar() const { return dim_ == 1; }
    bool is_lift() const {
        return kind_ == HamiltonianKind::lift_single || kind_ == HamiltonianKind::lift_product;
    }

    double omega() const { return omega_; }
    const BumpPotential& potential() const { return potential_; }
    const HamiltonianSpec& inner() const;

    /// Highest total derivative order with exact closed-form evaluation.
    static constexpr int max_supported_order = 2;

private:
    HamiltonianSpec() = default;

    HamiltonianKind kind_ = HamiltonianKind::free_particle;
    int dim_ = 1;
    double omega_ = 1.0;
    BumpPotential potential_;
    std::shared_ptr<const HamiltonianSpec> inner_;
};

/// Exact partial derivative d_alpha H at x; appends one QueryRecord when a
/// tape is supplied. Throws unsupported_order for |alpha| > 2 and
/// dimension_mismatch when alpha or x do not match the spec's dimension.
double eval_derivative(const HamiltonianSpec& spec, const MultiIndex& alpha, const PhasePoint& x,
                       QueryTape* tape = nullptr);

// Taped convenience evaluations. Gradients query the q-partials first, then
// the p-partials, in coordinate order; this order is part of the replay
// contract.
double hamiltonian_value(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape = nullptr);
std::vector<double> grad_q(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape = nullptr);
std::vector<double> grad_p(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape = nullptr);

/// Dense Hessian in variable order (q1..qn, p1..pn), row-major 2n x 2n,
/// queried row by row (upper triangle queried, mirrored by symmetry).
std::vector<double> hessian(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape = nullptr);

/// True iff both specs return bit-identical values for every (point, alpha)
/// on the tape. This is the observable agreement predicate used by the
/// replay checks.
bool agrees_on_tape(const HamiltonianSpec& spec_a, const HamiltonianSpec& spec_b, const QueryTape& tape);

} // namespace hamadv
