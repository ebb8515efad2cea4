#include "hamadv/exact_flows.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace hamadv {

namespace {

void require_planar(const PhasePoint& x) {
    validate(x);
    if (!x.is_planar()) raise(Errc::dimension_mismatch, "exact flows are planar");
}

// 15-point Kronrod rule with embedded 7-point Gauss rule (positive nodes).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
    double integral;
    double error;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) result_gauss += kWg[j / 2] * fsum;
    }
    result_kronrod *= half;
    result_gauss *= half;
    return {result_kronrod, std::fabs(result_kronrod - result_gauss)};
}

double adaptive_gk15(const std::function<double(double)>& f, double a, double b, double tol,
                     int depth) {
    const GkEstimate e = gk15(f, a, b);
    if (e.error <= tol || depth >= 48 || (b - a) <= DBL_EPSILON * (std::fabs(a) + std::fabs(b) + 1.0))
        return e.integral;
    const double mid = 0.5 * (a + b);
    return adaptive_gk15(f, a, mid, 0.5 * tol, depth + 1) +
           adaptive_gk15(f, mid, b, 0.5 * tol, depth + 1);
}

struct Interval {
    double lo;
    double hi;
};

// Open bump supports clipped to [q0, q1], merged, sorted.
std::vector<Interval> clipped_supports(const BumpPotential& potential, double q0, double q1) {
    std::vector<Interval> raw;
    for (const Bump& b : potential.bumps()) {
        const double lo = std::max(q0, b.center - b.radius);
        const double hi = std::min(q1, b.center + b.radius);
        if (lo < hi) raw.push_back({lo, hi});
    }
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> merged;
    for (const Interval& iv : raw) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

// Upper bound on V over [q0, q1]: only bumps whose support meets the
// interval can contribute.
double local_value_bound(const BumpPotential& potential, double q0, double q1) {
    const double peak = std::exp(-1.0);
    double bound = 0.0;
    for (const Bump& b : potential.bumps()) {
        if (b.center - b.radius < q1 && b.center + b.radius > q0) bound += b.amplitude * peak;
    }
    return bound;
}

void check_no_turning_point(double energy, double value_bound) {
    if (!(energy > 0.0) || !(energy >= (1.0 + kTurningPointMargin) * value_bound))
        raise(Errc::turning_point,
              "energy " + std::to_string(energy) + " does not clear potential bound " +
                  std::to_string(value_bound) + " by the required margin");
}

} // namespace

PhasePoint free_flow(const PhasePoint& x, double t) {
    require_planar(x);
    return PhasePoint::planar(x.q[0] + x.p[0] * t, x.p[0]);
}

PhasePoint harmonic_flow(const PhasePoint& x, double t, double omega) {
    require_planar(x);
    if (!(omega > 0.0)) raise(Errc::validation_error, "omega must be positive");
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    return PhasePoint::planar(x.q[0] * c + (x.p[0] / omega) * s, x.p[0] * c - omega * x.q[0] * s);
}

double time_of_flight(const BumpPotential& potential, double q0, double q1, double energy,
                      double quad_tol) {
    if (!(q1 >= q0)) raise(Errc::validation_error, "time_of_flight needs q1 >= q0");
    if (!(quad_tol > 0.0)) raise(Errc::validation_error, "quad_tol must be positive");
    if (q1 == q0) return 0.0;
    check_no_turning_point(energy, local_value_bound(potential, q0, q1));

    const double inv_free_speed = 1.0 / std::sqrt(2.0 * energy);
    const std::vector<Interval> supports = clipped_supports(potential, q0, q1);

    const auto integrand = [&](double x) { return 1.0 / std::sqrt(2.0 * (energy - potential.value(x))); };

    // V vanishes identically between supports, so those stretches integrate
    // in closed form; quadrature only ever sees smooth bump interiors.
    const double piece_tol = quad_tol / static_cast<double>(std::max<std::size_t>(1, supports.size()));
    double total = 0.0;
    double cursor = q0;
    for (const Interval& iv : supports) {
        if (iv.lo > cursor) total += (iv.lo - cursor) * inv_free_speed;
        total += adaptive_gk15(integrand, iv.lo, iv.hi, piece_tol, 0);
        cursor = iv.hi;
    }
    if (cursor < q1) total += (q1 - cursor) * inv_free_speed;
    return total;
}

namespace {

PhasePoint bump_flow_rightward(const BumpPotential& potential, const PhasePoint& x0, double t,
                               double quad_tol) {
    const double q0 = x0.q[0];
    const double p0 = x0.p[0];
    const double energy = 0.5 * p0 * p0 + potential.value(q0);
    check_no_turning_point(energy, potential.max_value_bound());

    const double free_speed = std::sqrt(2.0 * energy);
    const double q_free = q0 + t * free_speed;

    // Free motion is the fastest possible, so if no support meets
    // (q0, q_free) the trajectory never feels the potential.
    bool touches_support = false;
    for (const Bump& b : potential.bumps()) {
        if (b.center - b.radius < q_free && b.center + b.radius > q0) {
            touches_support = true;
            break;
        }
    }
    if (!touches_support) return PhasePoint::planar(q0 + t * free_speed, p0);

    // Invert F(q) = time_of_flight(q0 -> q) by safeguarded Illinois
    // regula falsi on the guaranteed bracket.
    double lo = q0;
    double g_lo = -t; // F(q0) = 0
    double hi = q0 + t * free_speed + 1.0;
    double g_hi = time_of_flight(potential, q0, hi, energy, quad_tol) - t;
    if (!(g_hi > 0.0)) raise(Errc::root_bracket_failure, "upper bracket did not overshoot");

    const double residual_tol = 10.0 * quad_tol;
    double q = lo;
    double g = g_lo;
    int side = 0;
    for (int iter = 0; iter < 200; ++iter) {
        double cand = hi - g_hi * (hi - lo) / (g_hi - g_lo);
        if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
        g = time_of_flight(potential, q0, cand, energy, quad_tol) - t;
        q = cand;
        if (std::fabs(g) <= residual_tol) break;
        if (g < 0.0) {
            lo = cand;
            g_lo = g;
            if (side == -1) g_hi *= 0.5;
            side = -1;
        } else {
            hi = cand;
            g_hi = g;
            if (side == +1) g_lo *= 0.5;
            side = +1;
        }
        if (hi - lo <= DBL_EPSILON * (std::fabs(hi) + 1.0)) {
            q = 0.5 * (lo + hi);
            g = time_of_flight(potential, q0, q, energy, quad_tol) - t;
            break;
        }
    }
    if (!(std::fabs(g) <= residual_tol))
        raise(Errc::root_bracket_failure,
              "time-of-flight inversion residual " + std::to_string(std::fabs(g)));

    const double p = std::sqrt(2.0 * (energy - potential.value(q)));
    return PhasePoint::planar(q, p);
}

} // namespace

PhasePoint bump_flow(const BumpPotential& potential, const PhasePoint& x0, double t,
                     double quad_tol) {
    require_planar(x0);
    if (!(t >= 0.0)) raise(Errc::validation_error, "bump_flow needs t >= 0");
    if (t == 0.0) return x0;
    const double p0 = x0.p[0];
    if (p0 == 0.0) raise(Errc::turning_point, "zero momentum start is not monotone motion");
    if (p0 > 0.0) return bump_flow_rightward(potential, x0, t, quad_tol);

    // Leftward motion: reflect q -> -q, flow rightward, reflect back.
    std::vector<Bump> reflected = potential.bumps();
    for (Bump& b : reflected) b.center = -b.center;
    const BumpPotential mirrored(std::move(reflected));
    const PhasePoint y =
        bump_flow_rightward(mirrored, PhasePoint::planar(-x0.q[0], -p0), t, quad_tol);
    return PhasePoint::planar(-y.q[0], -y.p[0]);
}

PhasePoint exact_flow(const HamiltonianSpec& spec, const PhasePoint& x, double t, double quad_tol) {
    switch (spec.kind()) {
        case HamiltonianKind::free_particle: return free_flow(x, t);
        case HamiltonianKind::harmonic: return harmonic_flow(x, t, spec.omega());
        case HamiltonianKind::separable_bump:
            if (spec.potential().empty()) return free_flow(x, t);
            return bump_flow(spec.potential(), x, t, quad_tol);
        default:
            raise(Errc::validation_error,
                  std::string("no exact flow for spec kind ") + kind_name(spec.kind()));
    }
}

} // namespace hamadv
