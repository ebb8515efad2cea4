#include "hamadv/bump.hpp"

#include <cmath>
#include <string>

namespace hamadv {

namespace {

// Peak value of exp(-1/(1-u^2)) at u = 0.
const double kMollifierPeak = std::exp(-1.0);

// phi(u) = exp(-1/(1-u^2)) on (-1,1); vanishes with all derivatives at the
// endpoints, so the early-out below is exact, not an approximation.
double mollifier(double u) {
    const double w = 1.0 - u * u;
    return std::exp(-1.0 / w);
}

// phi'(u) = -2u/(1-u^2)^2 * phi(u)
double mollifier_d1(double u) {
    const double w = 1.0 - u * u;
    return -2.0 * u / (w * w) * mollifier(u);
}

// phi''(u) = [ -2/w^2 - 8u^2/w^3 + 4u^2/w^4 ] * phi(u),  w = 1-u^2
double mollifier_d2(double u) {
    const double w = 1.0 - u * u;
    const double w2 = w * w;
    const double u2 = u * u;
    const double factor = -2.0 / w2 - 8.0 * u2 / (w2 * w) + 4.0 * u2 / (w2 * w2);
    return factor * mollifier(u);
}

} // namespace

BumpPotential::BumpPotential(std::vector<Bump> bumps) : bumps_(std::move(bumps)) {
    double bound = 0.0;
    for (const Bump& b : bumps_) {
        if (!(b.radius > 0.0) || !std::isfinite(b.radius))
            raise(Errc::validation_error, "bump radius must be positive and finite");
        if (!(b.amplitude >= 0.0) || !std::isfinite(b.amplitude))
            raise(Errc::validation_error, "bump amplitude must be non-negative and finite");
        if (!std::isfinite(b.center)) raise(Errc::validation_error, "bump center must be finite");
        bound += b.amplitude * kMollifierPeak;
    }
    if (!(bound < 0.5))
        raise(Errc::validation_error,
              "sum of bump amplitudes * e^-1 must stay below 1/2, got " + std::to_string(bound));
    max_value_bound_ = bound;
}

double BumpPotential::value(double q) const {
    double v = 0.0;
    for (const Bump& b : bumps_) {
        const double u = (q - b.center) / b.radius;
        if (std::fabs(u) < 1.0) v += b.amplitude * mollifier(u);
    }
    return v;
}

double BumpPotential::derivative(double q) const {
    double v = 0.0;
    for (const Bump& b : bumps_) {
        const double u = (q - b.center) / b.radius;
        if (std::fabs(u) < 1.0) v += b.amplitude * mollifier_d1(u) / b.radius;
    }
    return v;
}

double BumpPotential::second_derivative(double q) const {
    double v = 0.0;
    for (const Bump& b : bumps_) {
        const double u = (q - b.center) / b.radius;
        if (std::fabs(u) < 1.0) v += b.amplitude * mollifier_d2(u) / (b.radius * b.radius);
    }
    return v;
}

std::vector<double> BumpPotential::derivatives(double q, int max_order) const {
    if (max_order < 0 || max_order > 2)
        raise(Errc::unsupported_order, "bump derivatives support orders 0..2, got " + std::to_string(max_order));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(max_order) + 1);
    out.push_back(value(q));
    if (max_order >= 1) out.push_back(derivative(q));
    if (max_order >= 2) out.push_back(second_derivative(q));
    return out;
}

bool BumpPotential::outside_all_supports(double q) const {
    for (const Bump& b : bumps_) {
        if (std::fabs(q - b.center) < b.radius) return false;
    }
    return true;
}

} // namespace hamadv
