#include "hamadv/diagnostics.hpp"

#include <cmath>
#include <string>

#include "hamadv/parallel.hpp"

namespace hamadv {

PhaseMap step_map(IntegratorConfig config, HamiltonianSpec spec, double dt) {
    validate(config);
    return [config = std::move(config), spec = std::move(spec), dt](const PhasePoint& x) {
        QueryTape scratch;
        return step(config, spec, x, dt, scratch);
    };
}

PhaseMap exact_flow_map(HamiltonianSpec spec, double t, double quad_tol) {
    return [spec = std::move(spec), t, quad_tol](const PhasePoint& x) {
        return StepResult::defined(exact_flow(spec, x, t, quad_tol));
    };
}

namespace {

PhasePoint map_or_throw(const PhaseMap& map, const PhasePoint& x, Errc code) {
    StepResult r = map(x);
    if (!r.is_defined())
        raise(code, std::string("map undefined (") + reason_name(r.reason()) + ") at q0=" +
                        std::to_string(x.q[0]));
    return r.point();
}

// Variables ordered (q1..qn, p1..pn), matching gradient order.
Matrix central_difference_jacobian(const PhaseMap& map, const PhasePoint& x, double h) {
    const int n = x.dim();
    const int m = 2 * n;
    Matrix jac(m, m);
    for (int c = 0; c < m; ++c) {
        PhasePoint plus = x;
        PhasePoint minus = x;
        if (c < n) {
            plus.q[c] += h;
            minus.q[c] -= h;
        } else {
            plus.p[c - n] += h;
            minus.p[c - n] -= h;
        }
        const PhasePoint fp = map_or_throw(map, plus, Errc::stencil_undefined);
        const PhasePoint fm = map_or_throw(map, minus, Errc::stencil_undefined);
        const double scale = 1.0 / (2.0 * h);
        for (int r = 0; r < m; ++r) {
            const double vp = r < n ? fp.q[r] : fp.p[r - n];
            const double vm = r < n ? fm.q[r] : fm.p[r - n];
            jac.at(r, c) = (vp - vm) * scale;
        }
    }
    return jac;
}

} // namespace

JacobianReport jacobian(const PhaseMap& map, const PhasePoint& x, double h) {
    validate(x);
    if (!(h > 0.0)) raise(Errc::validation_error, "fd step must be positive");
    const Matrix coarse = central_difference_jacobian(map, x, h);
    const Matrix fine = central_difference_jacobian(map, x, 0.5 * h);
    double err = 0.0;
    for (std::size_t i = 0; i < coarse.a.size(); ++i)
        err = std::max(err, std::fabs(coarse.a[i] - fine.a[i]));
    JacobianReport report;
    report.determinant = determinant(coarse);
    report.matrix = coarse;
    report.fd_step = h;
    report.error_estimate = err;
    return report;
}

namespace {

double shoelace(const std::vector<PhasePoint>& poly) {
    double area2 = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        area2 += poly[i].q[0] * poly[j].p[0] - poly[j].q[0] * poly[i].p[0];
    }
    return 0.5 * area2;
}

} // namespace

double polygon_area_ratio(const PhaseMap& map, const std::vector<PhasePoint>& polygon,
                          int refinement) {
    if (polygon.size() < 3) raise(Errc::degenerate_polygon, "polygon needs at least 3 vertices");
    if (refinement < 1) raise(Errc::validation_error, "refinement must be >= 1");
    for (const PhasePoint& v : polygon)
        if (!v.is_planar()) raise(Errc::dimension_mismatch, "polygon vertices must be planar");

    std::vector<PhasePoint> refined;
    refined.reserve(polygon.size() * static_cast<std::size_t>(refinement));
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PhasePoint& a = polygon[i];
        const PhasePoint& b = polygon[(i + 1) % n];
        for (int j = 0; j < refinement; ++j) {
            const double s = static_cast<double>(j) / refinement;
            refined.push_back(
                PhasePoint::planar(a.q[0] + s * (b.q[0] - a.q[0]), a.p[0] + s * (b.p[0] - a.p[0])));
        }
    }

    const double source_area = shoelace(refined);
    if (std::fabs(source_area) < 1e-15)
        raise(Errc::degenerate_polygon, "source polygon area below 1e-15");

    std::vector<PhasePoint> image;
    image.reserve(refined.size());
    for (const PhasePoint& v : refined) image.push_back(map_or_throw(map, v, Errc::stencil_undefined));
    return shoelace(image) / source_area;
}

EnergyDriftReport energy_drift(const PhaseMap& map, const HamiltonianSpec& spec,
                               const PhasePoint& x0, int n_steps) {
    if (n_steps < 1) raise(Errc::validation_error, "n_steps must be >= 1");
    EnergyDriftReport report;
    const double e0 = hamiltonian_value(spec, x0);
    PhasePoint x = x0;
    for (int k = 0; k < n_steps; ++k) {
        StepResult r = map(x);
        if (!r.is_defined()) {
            report.undefined_encountered = true;
            return report;
        }
        x = r.point();
        report.max_drift = std::max(report.max_drift, std::fabs(hamiltonian_value(spec, x) - e0));
        report.steps_completed = k + 1;
    }
    return report;
}

TranslationReport measure_translation_constant(const PhaseMap& map,
                                               const std::vector<double>& q_samples, double dt) {
    if (!(dt > 0.0)) raise(Errc::validation_error, "dt must be positive");
    if (q_samples.empty()) raise(Errc::validation_error, "need at least one sample");
    TranslationReport report;
    report.c_samples.reserve(q_samples.size());
    double lo = 0.0, hi = 0.0, sum = 0.0;
    bool first = true;
    for (double q : q_samples) {
        const PhasePoint out = map_or_throw(map, PhasePoint::planar(q, 1.0), Errc::map_undefined);
        const double c = (out.q[0] - q) / dt;
        report.c_samples.push_back(c);
        report.p_deviation = std::max(report.p_deviation, std::fabs(out.p[0] - 1.0));
        sum += c;
        if (first) {
            lo = hi = c;
            first = false;
        } else {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    report.c_mean = sum / static_cast<double>(q_samples.size());
    report.c_spread = hi - lo;
    return report;
}

ConsistencyReport consistency_probe(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                    const PhasePoint& x, const std::vector<double>& dt_sequence) {
    if (dt_sequence.empty()) raise(Errc::validation_error, "dt sequence must be non-empty");
    for (std::size_t i = 0; i < dt_sequence.size(); ++i) {
        if (!(dt_sequence[i] >= 1e-6))
            raise(Errc::validation_error, "dt sequence entries must be >= 1e-6");
        if (i > 0 && !(dt_sequence[i] < dt_sequence[i - 1]))
            raise(Errc::validation_error, "dt sequence must be strictly decreasing");
    }
    ConsistencyReport report;
    report.dts = dt_sequence;
    for (double dt : dt_sequence) {
        QueryTape scratch;
        StepResult r = step(config, spec, x, dt, scratch);
        if (!r.is_defined())
            raise(Errc::map_undefined, std::string("step undefined at dt=") + std::to_string(dt));
        const double err = distance(exact_flow(spec, x, dt), r.point());
        report.errors.push_back(err);
        report.ratios.push_back(err / dt);
    }

    const std::size_t n = report.ratios.size();
    bool monotone = true;
    const std::size_t tail = std::min<std::size_t>(3, n);
    for (std::size_t i = n - tail; i + 1 < n; ++i)
        if (!(report.ratios[i + 1] <= report.ratios[i])) monotone = false;

    // 10x shrink of the one-step error from first to last dt, with an
    // absolute floor for methods that are exact on this spec.
    double scale = 0.0;
    for (double v : x.q) scale += v * v;
    for (double v : x.p) scale += v * v;
    const double floor = 1e-13 * (1.0 + std::sqrt(scale));
    const bool shrinks = report.errors.back() < 0.1 * report.errors.front() ||
                         report.errors.back() <= floor;
    report.passed = monotone && shrinks;

    bool fittable = n >= 2;
    for (double r : report.ratios)
        if (!(r > 0.0)) fittable = false;
    report.fitted_order =
        fittable ? fit_loglog_slope(report.dts, report.ratios) : std::nan("");
    return report;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        raise(Errc::validation_error, "slope fit needs two equal-length samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        const double ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ContinuityReport continuity_scan(const PhaseMap& map, double q_lo, double q_hi, double p,
                                 double delta, int threads) {
    if (!(q_hi > q_lo)) raise(Errc::validation_error, "scan needs q_hi > q_lo");
    if (!(delta > 0.0)) raise(Errc::validation_error, "delta must be positive");
    constexpr std::int64_t kMaxSamples = 4'000'000;
    std::int64_t count = static_cast<std::int64_t>(std::floor((q_hi - q_lo) / delta)) + 1;
    if (count < 2) count = 2;
    if (count > kMaxSamples) count = kMaxSamples;
    const double stride = (q_hi - q_lo) / static_cast<double>(count - 1);

    std::vector<double> out_q(count), out_p(count);
    std::vector<unsigned char> ok(count, 0);
    parallel_for(count, threads, [&](std::int64_t i) {
        const double q = q_lo + static_cast<double>(i) * stride;
        StepResult r = map(PhasePoint::planar(q, p));
        if (r.is_defined()) {
            out_q[i] = r.point().q[0];
            out_p[i] = r.point().p[0];
            ok[i] = 1;
        }
    });

    ContinuityReport report;
    report.delta = stride;
    report.samples = count;
    for (std::int64_t i = 0; i + 1 < count; ++i) {
        if (!ok[i] || !ok[i + 1]) {
            if (!ok[i]) ++report.undefined_points;
            continue;
        }
        const double dq = out_q[i + 1] - out_q[i];
        const double dp = out_p[i + 1] - out_p[i];
        report.max_local_lipschitz =
            std::max(report.max_local_lipschitz, std::sqrt(dq * dq + dp * dp) / stride);
    }
    if (count >= 1 && !ok[count - 1]) ++report.undefined_points;
    return report;
}

} // namespace hamadv
