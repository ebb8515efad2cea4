#include "hamadv/integrators.hpp"

#include <cfloat>
#include <cmath>

#include "hamadv/linalg.hpp"

namespace hamadv {

const char* method_name(Method m) {
    switch (m) {
        case Method::explicit_euler: return "explicit_euler";
        case Method::symplectic_euler: return "symplectic_euler";
        case Method::leapfrog: return "leapfrog";
        case Method::rk4: return "rk4";
        case Method::implicit_midpoint: return "implicit_midpoint";
        case Method::step_and_project: return "step_and_project";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    for (Method m : {Method::explicit_euler, Method::symplectic_euler, Method::leapfrog,
                     Method::rk4, Method::implicit_midpoint, Method::step_and_project}) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

bool method_is_explicit(Method m) {
    switch (m) {
        case Method::explicit_euler:
        case Method::symplectic_euler:
        case Method::leapfrog:
        case Method::rk4:
            return true;
        default:
            return false;
    }
}

int nominal_order(Method m, std::optional<Method> base) {
    switch (m) {
        case Method::explicit_euler: return 1;
        case Method::symplectic_euler: return 1;
        case Method::leapfrog: return 2;
        case Method::rk4: return 4;
        case Method::implicit_midpoint: return 2;
        case Method::step_and_project: return base ? nominal_order(*base) : 2;
    }
    return 1;
}

void validate(const IntegratorConfig& config) {
    if (!(config.solver_tol > 0.0)) raise(Errc::validation_error, "solver_tol must be > 0");
    if (config.max_iters < 1 && config.method != Method::implicit_midpoint)
        raise(Errc::validation_error, "max_iters must be >= 1");
    if (config.max_iters < 0) raise(Errc::validation_error, "max_iters must be >= 0");
    if (!(config.damping > 0.0) || config.damping > 1.0)
        raise(Errc::validation_error, "damping must lie in (0, 1]");
    if (config.method == Method::step_and_project) {
        if (!config.base) raise(Errc::validation_error, "step_and_project requires a base method");
        if (!method_is_explicit(*config.base))
            raise(Errc::validation_error, "step_and_project base must be an explicit method");
    } else if (config.base) {
        raise(Errc::validation_error, "base is only valid for step_and_project");
    }
}

std::string describe(const IntegratorConfig& config) {
    std::string s = method_name(config.method);
    if (config.base) s += std::string("(") + method_name(*config.base) + ")";
    return s;
}

const char* reason_name(UndefinedReason r) {
    switch (r) {
        case UndefinedReason::solver_diverged: return "solver_diverged";
        case UndefinedReason::max_iterations: return "max_iterations";
        case UndefinedReason::projection_failed: return "projection_failed";
        case UndefinedReason::gradient_vanishes: return "gradient_vanishes";
    }
    return "unknown";
}

const PhasePoint& StepResult::point() const {
    if (!point_) raise(Errc::map_undefined, std::string("step undefined: ") + reason_name(reason_));
    return *point_;
}

UndefinedReason StepResult::reason() const {
    if (point_) raise(Errc::validation_error, "reason() on a defined step");
    return reason_;
}

bool bits_equal(const StepResult& a, const StepResult& b) {
    if (a.is_defined() != b.is_defined()) return false;
    if (!a.is_defined()) return a.reason() == b.reason();
    return bits_equal(a.point(), b.point());
}

namespace {

PhasePoint euler_step(const HamiltonianSpec& spec, const PhasePoint& x, double dt, QueryTape& tape) {
    const int n = x.dim();
    const std::vector<double> gq = grad_q(spec, x, &tape);
    const std::vector<double> gp = grad_p(spec, x, &tape);
    PhasePoint y = x;
    for (int i = 0; i < n; ++i) {
        y.q[i] = x.q[i] + dt * gp[i];
        y.p[i] = x.p[i] - dt * gq[i];
    }
    return y;
}

// Kick with the q-gradient at (q, p), then drift with the p-gradient at the
// kicked momentum.
PhasePoint symplectic_euler_step(const HamiltonianSpec& spec, const PhasePoint& x, double dt,
                                 QueryTape& tape) {
    const int n = x.dim();
    const std::vector<double> gq = grad_q(spec, x, &tape);
    PhasePoint y = x;
    for (int i = 0; i < n; ++i) y.p[i] = x.p[i] - dt * gq[i];
    PhasePoint mid{x.q, y.p};
    const std::vector<double> gp = grad_p(spec, mid, &tape);
    for (int i = 0; i < n; ++i) y.q[i] = x.q[i] + dt * gp[i];
    return y;
}

// Kick-drift-kick.
PhasePoint leapfrog_step(const HamiltonianSpec& spec, const PhasePoint& x, double dt,
                         QueryTape& tape) {
    const int n = x.dim();
    const double half = 0.5 * dt;
    const std::vector<double> gq0 = grad_q(spec, x, &tape);
    PhasePoint half_kicked = x;
    for (int i = 0; i < n; ++i) half_kicked.p[i] = x.p[i] - half * gq0[i];
    const std::vector<double> gp = grad_p(spec, half_kicked, &tape);
    PhasePoint drifted = half_kicked;
    for (int i = 0; i < n; ++i) drifted.q[i] = x.q[i] + dt * gp[i];
    const std::vector<double> gq1 = grad_q(spec, drifted, &tape);
    PhasePoint y = drifted;
    for (int i = 0; i < n; ++i) y.p[i] = half_kicked.p[i] - half * gq1[i];
    return y;
}

struct Field {
    std::vector<double> dq; // dq/dt = dH/dp
    std::vector<double> dp; // dp/dt = -dH/dq
};

Field vector_field(const HamiltonianSpec& spec, const PhasePoint& x, QueryTape& tape) {
    Field f;
    const std::vector<double> gq = grad_q(spec, x, &tape);
    const std::vector<double> gp = grad_p(spec, x, &tape);
    f.dq = gp;
    f.dp.resize(gq.size());
    for (std::size_t i = 0; i < gq.size(); ++i) f.dp[i] = -gq[i];
    return f;
}

PhasePoint advance(const PhasePoint& x, const Field& f, double h) {
    PhasePoint y = x;
    for (std::size_t i = 0; i < x.q.size(); ++i) {
        y.q[i] = x.q[i] + h * f.dq[i];
        y.p[i] = x.p[i] + h * f.dp[i];
    }
    return y;
}

PhasePoint rk4_step(const HamiltonianSpec& spec, const PhasePoint& x, double dt, QueryTape& tape) {
    const int n = x.dim();
    const double half = 0.5 * dt;
    const Field k1 = vector_field(spec, x, tape);
    const Field k2 = vector_field(spec, advance(x, k1, half), tape);
    const Field k3 = vector_field(spec, advance(x, k2, half), tape);
    const Field k4 = vector_field(spec, advance(x, k3, dt), tape);
    PhasePoint y = x;
    for (int i = 0; i < n; ++i) {
        // (k1 + 2(k2+k3) + k4)/6 keeps the free-particle combination exact
        y.q[i] = x.q[i] + dt * ((k1.dq[i] + 2.0 * (k2.dq[i] + k3.dq[i]) + k4.dq[i]) / 6.0);
        y.p[i] = x.p[i] + dt * ((k1.dp[i] + 2.0 * (k2.dp[i] + k3.dp[i]) + k4.dp[i]) / 6.0);
    }
    return y;
}

PhasePoint midpoint_of(const PhasePoint& a, const PhasePoint& b) {
    PhasePoint m = a;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        m.q[i] = 0.5 * (a.q[i] + b.q[i]);
        m.p[i] = 0.5 * (a.p[i] + b.p[i]);
    }
    return m;
}

double max_norm_diff(const PhasePoint& a, const PhasePoint& b) { return max_abs_diff(a, b); }

StepResult implicit_midpoint_fixed_point(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                         const PhasePoint& x, double dt, QueryTape& tape) {
    PhasePoint y = x;
    for (int iter = 0;; ++iter) {
        const PhasePoint m = midpoint_of(x, y);
        const std::vector<double> gq = grad_q(spec, m, &tape);
        const std::vector<double> gp = grad_p(spec, m, &tape);
        PhasePoint g = x;
        for (int i = 0; i < x.dim(); ++i) {
            g.q[i] = x.q[i] + dt * gp[i];
            g.p[i] = x.p[i] - dt * gq[i];
        }
        if (!g.all_finite()) return StepResult::undefined(UndefinedReason::solver_diverged);
        const double residual = max_norm_diff(y, g);
        if (residual <= config.solver_tol) return StepResult::defined(y);
        if (iter >= config.max_iters) return StepResult::undefined(UndefinedReason::max_iterations);
        for (int i = 0; i < x.dim(); ++i) {
            y.q[i] = y.q[i] + config.damping * (g.q[i] - y.q[i]);
            y.p[i] = y.p[i] + config.damping * (g.p[i] - y.p[i]);
        }
    }
}

StepResult implicit_midpoint_newton(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                    const PhasePoint& x, double dt, QueryTape& tape) {
    const int n = x.dim();
    const int m2 = 2 * n;
    PhasePoint y = x;
    for (int iter = 0;; ++iter) {
        const PhasePoint mid = midpoint_of(x, y);
        const std::vector<double> gq = grad_q(spec, mid, &tape);
        const std::vector<double> gp = grad_p(spec, mid, &tape);
        // residual F(y) = y - x - dt J grad H(mid), variables ordered (q.., p..)
        std::vector<double> f(m2);
        for (int i = 0; i < n; ++i) {
            f[i] = y.q[i] - x.q[i] - dt * gp[i];
            f[n + i] = y.p[i] - x.p[i] + dt * gq[i];
        }
        double residual = 0.0;
        for (double v : f) residual = std::max(residual, std::fabs(v));
        if (!std::isfinite(residual)) return StepResult::undefined(UndefinedReason::solver_diverged);
        if (residual <= config.solver_tol) return StepResult::defined(y);
        if (iter >= config.max_iters) return StepResult::undefined(UndefinedReason::max_iterations);

        // F'(y) = I - (dt/2) J H''(mid)
        const std::vector<double> hess = hessian(spec, mid, &tape);
        Matrix jac = Matrix::identity(m2);
        const double s = 0.5 * dt;
        for (int c = 0; c < m2; ++c) {
            for (int i = 0; i < n; ++i) {
                // d(dq-row_i)/d var_c gets -dt/2 * d/dvar_c dH/dp_i
                jac.at(i, c) -= s * hess[static_cast<std::size_t>(n + i) * m2 + c];
                jac.at(n + i, c) += s * hess[static_cast<std::size_t>(i) * m2 + c];
            }
        }
        std::vector<double> delta = solve(std::move(jac), std::move(f));
        for (int i = 0; i < n; ++i) {
            y.q[i] -= delta[i];
            y.p[i] -= delta[n + i];
        }
        if (!y.all_finite()) return StepResult::undefined(UndefinedReason::solver_diverged);
    }
}

} // namespace

StepResult explicit_step(const IntegratorConfig& config, const HamiltonianSpec& spec,
                         const PhasePoint& x, double dt, QueryTape& tape) {
    validate(x);
    if (!(dt >= 0.0)) raise(Errc::validation_error, "dt must be >= 0");
    switch (config.method) {
        case Method::explicit_euler: return StepResult::defined(euler_step(spec, x, dt, tape));
        case Method::symplectic_euler:
            return StepResult::defined(symplectic_euler_step(spec, x, dt, tape));
        case Method::leapfrog: return StepResult::defined(leapfrog_step(spec, x, dt, tape));
        case Method::rk4: return StepResult::defined(rk4_step(spec, x, dt, tape));
        default: raise(Errc::validation_error, "explicit_step called with a non-explicit method");
    }
}

StepResult implicit_midpoint_step(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                  const PhasePoint& x, double dt, QueryTape& tape) {
    validate(x);
    if (!(dt >= 0.0)) raise(Errc::validation_error, "dt must be >= 0");
    if (config.solver == ImplicitSolver::newton)
        return implicit_midpoint_newton(config, spec, x, dt, tape);
    return implicit_midpoint_fixed_point(config, spec, x, dt, tape);
}

StepResult project_to_energy(const HamiltonianSpec& spec, const PhasePoint& y, double target_energy,
                             const IntegratorConfig& config, QueryTape& tape) {
    validate(y);
    const int n = y.dim();
    const std::vector<double> dq = grad_q(spec, y, &tape);
    const std::vector<double> dp = grad_p(spec, y, &tape);
    double norm_sq = 0.0;
    for (double v : dq) norm_sq += v * v;
    for (double v : dp) norm_sq += v * v;
    if (std::sqrt(norm_sq) < 1e-14)
        return StepResult::undefined(UndefinedReason::gradient_vanishes);

    const auto point_at = [&](double mu) {
        PhasePoint z = y;
        for (int i = 0; i < n; ++i) {
            z.q[i] = y.q[i] + mu * dq[i];
            z.p[i] = y.p[i] + mu * dp[i];
        }
        return z;
    };

    const double g0 = hamiltonian_value(spec, y, &tape) - target_energy;
    if (std::fabs(g0) <= config.solver_tol) return StepResult::defined(y); // zero correction

    const auto g_at = [&](double mu) { return hamiltonian_value(spec, point_at(mu), &tape) - target_energy; };

    // Scalar root find on g(mu) = H(y + mu grad H(y)) - E. The first-order
    // step -g0/|grad H|^2 sets the scale; expand it until the sign flips,
    // then drive the bracketed root to the rounding floor with Illinois
    // regula falsi so per-step energy residuals do not accumulate.
    const double floor_tol = 4.0 * DBL_EPSILON * (1.0 + std::fabs(target_energy));
    const double scale = -g0 / norm_sq;
    double mu_prev = 0.0, g_prev = g0;
    double mu_lo = 0.0, g_lo = 0.0, mu_hi = 0.0, g_hi = 0.0;
    bool bracketed = false;
    for (int k = 0; k < 48 && !bracketed; ++k) {
        const double mu_k = scale * std::ldexp(1.0, k); // scale * 2^k
        if (!std::isfinite(mu_k)) break;
        const double g_k = g_at(mu_k);
        if (!std::isfinite(g_k)) return StepResult::undefined(UndefinedReason::projection_failed);
        if (std::fabs(g_k) <= floor_tol) return StepResult::defined(point_at(mu_k));
        if ((g_k < 0.0) != (g0 < 0.0)) {
            mu_lo = mu_prev;
            g_lo = g_prev;
            mu_hi = mu_k;
            g_hi = g_k;
            bracketed = true;
        } else {
            mu_prev = mu_k;
            g_prev = g_k;
        }
    }
    if (!bracketed) return StepResult::undefined(UndefinedReason::projection_failed);

    double mu_best = std::fabs(g_lo) < std::fabs(g_hi) ? mu_lo : mu_hi;
    double g_best = std::fabs(g_lo) < std::fabs(g_hi) ? g_lo : g_hi;
    int side = 0;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        if (std::fabs(g_best) <= floor_tol) break;
        double cand = mu_hi - g_hi * (mu_hi - mu_lo) / (g_hi - g_lo);
        const double lo = std::min(mu_lo, mu_hi), hi = std::max(mu_lo, mu_hi);
        if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (mu_lo + mu_hi);
        const double g_cand = g_at(cand);
        if (!std::isfinite(g_cand)) return StepResult::undefined(UndefinedReason::projection_failed);
        if (std::fabs(g_cand) < std::fabs(g_best)) {
            mu_best = cand;
            g_best = g_cand;
        }
        if ((g_cand < 0.0) == (g_lo < 0.0)) {
            mu_lo = cand;
            g_lo = g_cand;
            if (side == -1) g_hi *= 0.5;
            side = -1;
        } else {
            mu_hi = cand;
            g_hi = g_cand;
            if (side == +1) g_lo *= 0.5;
            side = +1;
        }
        if (std::fabs(mu_hi - mu_lo) <= DBL_EPSILON * (std::fabs(mu_lo) + std::fabs(mu_hi)))
            break;
    }
    if (std::fabs(g_best) <= config.solver_tol) return StepResult::defined(point_at(mu_best));
    return StepResult::undefined(UndefinedReason::projection_failed);
}

StepResult step_and_project(const IntegratorConfig& config, const HamiltonianSpec& spec,
                            const PhasePoint& x, double dt, QueryTape& tape) {
    validate(config);
    if (config.method != Method::step_and_project)
        raise(Errc::validation_error, "step_and_project called with wrong method");
    const double target = hamiltonian_value(spec, x, &tape);
    IntegratorConfig base = config;
    base.method = *config.base;
    base.base.reset();
    const StepResult stepped = explicit_step(base, spec, x, dt, tape);
    if (!stepped.is_defined()) return stepped;
    return project_to_energy(spec, stepped.point(), target, config, tape);
}

StepResult step(const IntegratorConfig& config, const HamiltonianSpec& spec, const PhasePoint& x,
                double dt, QueryTape& tape) {
    validate(config);
    switch (config.method) {
        case Method::implicit_midpoint: return implicit_midpoint_step(config, spec, x, dt, tape);
        case Method::step_and_project: return step_and_project(config, spec, x, dt, tape);
        default: return explicit_step(config, spec, x, dt, tape);
    }
}

std::vector<StepResult> iterate(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                const PhasePoint& x0, double dt, int n_steps) {
    if (n_steps < 1) raise(Errc::validation_error, "n_steps must be >= 1");
    std::vector<StepResult> trajectory;
    trajectory.reserve(static_cast<std::size_t>(n_steps));
    PhasePoint x = x0;
    for (int k = 0; k < n_steps; ++k) {
        QueryTape tape;
        StepResult r = step(config, spec, x, dt, tape);
        const bool defined = r.is_defined();
        if (defined) x = r.point();
        trajectory.push_back(std::move(r));
        if (!defined) break;
    }
    return trajectory;
}

std::size_t tape_record_bound(const IntegratorConfig& config, int dim) {
    const std::size_t n = static_cast<std::size_t>(dim);
    const std::size_t grad = 2 * n;
    const std::size_t iters = static_cast<std::size_t>(config.max_iters) + 1;
    switch (config.method) {
        case Method::explicit_euler: return grad;
        case Method::symplectic_euler: return grad;
        case Method::leapfrog: return 3 * n;
        case Method::rk4: return 4 * grad;
        case Method::implicit_midpoint: {
            const std::size_t per_iter =
                config.solver == ImplicitSolver::newton ? grad + n * (2 * n + 1) : grad;
            return iters * per_iter;
        }
        case Method::step_and_project: {
            IntegratorConfig base = config;
            base.method = config.base.value_or(Method::leapfrog);
            base.base.reset();
            // H(x), base step, gradient at y, H(y), bracket expansion, then
            // one value query per refinement iteration
            return 1 + tape_record_bound(base, dim) + grad + 1 + 48 + iters;
        }
    }
    return 0;
}

} // namespace hamadv
