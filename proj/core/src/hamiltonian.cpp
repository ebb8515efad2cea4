#include "hamadv/hamiltonian.hpp"

#include <cmath>
#include <string>

namespace hamadv {

const char* kind_name(HamiltonianKind k) {
    switch (k) {
        case HamiltonianKind::free_particle: return "free_particle";
        case HamiltonianKind::harmonic: return "harmonic";
        case HamiltonianKind::separable_bump: return "separable_bump";
        case HamiltonianKind::lift_single: return "lift_single";
        case HamiltonianKind::lift_product: return "lift_product";
    }
    return "unknown";
}

HamiltonianSpec HamiltonianSpec::free_particle() {
    HamiltonianSpec s;
    s.kind_ = HamiltonianKind::free_particle;
    return s;
}

HamiltonianSpec HamiltonianSpec::harmonic(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        raise(Errc::validation_error, "harmonic omega must be positive and finite");
    HamiltonianSpec s;
    s.kind_ = HamiltonianKind::harmonic;
    s.omega_ = omega;
    return s;
}

HamiltonianSpec HamiltonianSpec::separable_bump(BumpPotential potential) {
    HamiltonianSpec s;
    s.kind_ = HamiltonianKind::separable_bump;
    s.potential_ = std::move(potential);
    return s;
}

namespace {

void check_liftable(const HamiltonianSpec& inner, int n) {
    if (n < 2) raise(Errc::validation_error, "lift dimension must be >= 2, got " + std::to_string(n));
    if (!inner.is_planar() || inner.is_lift())
        raise(Errc::validation_error, "lift inner spec must be planar");
}

} // namespace

HamiltonianSpec HamiltonianSpec::lift_single(const HamiltonianSpec& inner, int n) {
    check_liftable(inner, n);
    HamiltonianSpec s;
    s.kind_ = HamiltonianKind::lift_single;
    s.dim_ = n;
    s.inner_ = std::make_shared<HamiltonianSpec>(inner);
    return s;
}

HamiltonianSpec HamiltonianSpec::lift_product(const HamiltonianSpec& inner, int n) {
    check_liftable(inner, n);
    HamiltonianSpec s;
    s.kind_ = HamiltonianKind::lift_product;
    s.dim_ = n;
    s.inner_ = std::make_shared<HamiltonianSpec>(inner);
    return s;
}

const HamiltonianSpec& HamiltonianSpec::inner() const {
    if (!inner_) raise(Errc::validation_error, "spec has no inner component");
    return *inner_;
}

namespace {

// Planar kernels. alpha = (dq, dp) with dq + dp <= 2.
double eval_planar(const HamiltonianSpec& spec, int dq, int dp, double q, double p) {
    switch (spec.kind()) {
        case HamiltonianKind::free_particle:
            if (dq > 0) return 0.0;
            if (dp == 0) return 0.5 * p * p;
            if (dp == 1) return p;
            return 1.0; // dp == 2
        case HamiltonianKind::harmonic: {
            const double w2 = spec.omega() * spec.omega();
            if (dq == 0 && dp == 0) return 0.5 * (p * p + w2 * q * q);
            if (dq == 1 && dp == 0) return w2 * q;
            if (dq == 0 && dp == 1) return p;
            if (dq == 2 && dp == 0) return w2;
            if (dq == 0 && dp == 2) return 1.0;
            return 0.0; // mixed dq = dp = 1
        }
        case HamiltonianKind::separable_bump: {
            const BumpPotential& V = spec.potential();
            if (dq == 0 && dp == 0) return 0.5 * p * p + V.value(q);
            if (dq == 1 && dp == 0) return V.derivative(q);
            if (dq == 0 && dp == 1) return p;
            if (dq == 2 && dp == 0) return V.second_derivative(q);
            if (dq == 0 && dp == 2) return 1.0;
            return 0.0; // mixed
        }
        default:
            raise(Errc::validation_error, "eval_planar on a lifted spec");
    }
}

double eval_impl(const HamiltonianSpec& spec, const MultiIndex& alpha, const PhasePoint& x) {
    const int n = spec.dim();
    switch (spec.kind()) {
        case HamiltonianKind::free_particle:
        case HamiltonianKind::harmonic:
        case HamiltonianKind::separable_bump:
            return eval_planar(spec, alpha.alpha[0], alpha.alpha[1], x.q[0], x.p[0]);

        case HamiltonianKind::lift_single: {
            // H*(q,p) = H(q1, p1): zero for any derivative touching pairs >= 2.
            for (int i = 1; i < n; ++i)
                if (alpha.alpha[i] != 0 || alpha.alpha[n + i] != 0) return 0.0;
            return eval_planar(spec.inner(), alpha.alpha[0], alpha.alpha[n], x.q[0], x.p[0]);
        }

        case HamiltonianKind::lift_product: {
            // H*(q,p) = sum_i H(q_i, p_i). A derivative touching two distinct
            // pairs vanishes; one touched pair reduces to the inner planar
            // derivative at that pair.
            int touched = -1;
            for (int i = 0; i < n; ++i) {
                if (alpha.alpha[i] != 0 || alpha.alpha[n + i] != 0) {
                    if (touched >= 0 && touched != i) return 0.0;
                    touched = i;
                }
            }
            if (touched < 0) {
                double sum = 0.0; // fixed summation order i = 0..n-1
                for (int i = 0; i < n; ++i)
                    sum += eval_planar(spec.inner(), 0, 0, x.q[i], x.p[i]);
                return sum;
            }
            return eval_planar(spec.inner(), alpha.alpha[touched], alpha.alpha[n + touched],
                               x.q[touched], x.p[touched]);
        }
    }
    raise(Errc::validation_error, "unreachable hamiltonian kind");
}

} // namespace

double eval_derivative(const HamiltonianSpec& spec, const MultiIndex& alpha, const PhasePoint& x,
                       QueryTape* tape) {
    const int n = spec.dim();
    if (alpha.dim() != n || static_cast<int>(alpha.alpha.size()) != 2 * n)
        raise(Errc::dimension_mismatch, "multi-index length " + std::to_string(alpha.alpha.size()) +
                                            " does not match spec dimension " + std::to_string(n));
    if (x.dim() != n)
        raise(Errc::dimension_mismatch, "point dimension " + std::to_string(x.dim()) +
                                            " does not match spec dimension " + std::to_string(n));
    for (int a : alpha.alpha)
        if (a < 0) raise(Errc::validation_error, "multi-index orders must be non-negative");
    if (alpha.order() > HamiltonianSpec::max_supported_order)
        raise(Errc::unsupported_order,
              "derivative order " + std::to_string(alpha.order()) + " exceeds supported order 2");

    const double value = eval_impl(spec, alpha, x);
    if (tape) tape->append(x, alpha, value);
    return value;
}

double hamiltonian_value(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape) {
    return eval_derivative(spec, MultiIndex::value(spec.dim()), x, tape);
}

std::vector<double> grad_q(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape) {
    const int n = spec.dim();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = eval_derivative(spec, MultiIndex::partial_q(n, i), x, tape);
    return g;
}

std::vector<double> grad_p(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape) {
    const int n = spec.dim();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = eval_derivative(spec, MultiIndex::partial_p(n, i), x, tape);
    return g;
}

std::vector<double> hessian(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape* tape) {
    const int n = spec.dim();
    const int m = 2 * n;
    std::vector<double> h(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r) {
        for (int c = r; c < m; ++c) {
            MultiIndex a = MultiIndex::value(n);
            a.alpha[r] += 1;
            a.alpha[c] += 1;
            const double v = eval_derivative(spec, a, x, tape);
            h[static_cast<std::size_t>(r) * m + c] = v;
            h[static_cast<std::size_t>(c) * m + r] = v;
        }
    }
    return h;
}

bool agrees_on_tape(const HamiltonianSpec& spec_a, const HamiltonianSpec& spec_b,
                    const QueryTape& tape) {
    for (const QueryRecord& rec : tape.records()) {
        const double va = eval_derivative(spec_a, rec.alpha, rec.point);
        const double vb = eval_derivative(spec_b, rec.alpha, rec.point);
        if (!bits_equal(va, vb)) return false;
    }
    return true;
}

} // namespace hamadv
