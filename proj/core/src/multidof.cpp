#include "hamadv/multidof.hpp"

#include <cmath>
#include <string>

namespace hamadv {

const char* lift_kind_name(LiftKind k) {
    return k == LiftKind::single ? "single" : "product";
}

HamiltonianSpec lift(const HamiltonianSpec& planar, LiftKind kind, int n) {
    return kind == LiftKind::single ? HamiltonianSpec::lift_single(planar, n)
                                    : HamiltonianSpec::lift_product(planar, n);
}

PhasePoint embed(const PhasePoint& planar, LiftKind kind, int n) {
    if (!planar.is_planar()) raise(Errc::dimension_mismatch, "embed needs a planar point");
    PhasePoint x;
    if (kind == LiftKind::single) {
        x.q.assign(n, 0.0);
        x.p.assign(n, 0.0);
        x.q[0] = planar.q[0];
        x.p[0] = planar.p[0];
    } else {
        x.q.assign(n, planar.q[0]);
        x.p.assign(n, planar.p[0]);
    }
    return x;
}

UntouchedReport check_condition_untouched(const PhaseMap& map,
                                          std::span<const PhasePoint> samples) {
    UntouchedReport report;
    for (const PhasePoint& x : samples) {
        StepResult r = map(x);
        if (!r.is_defined())
            raise(Errc::map_undefined, std::string("step undefined: ") + reason_name(r.reason()));
        const PhasePoint& y = r.point();
        for (int i = 1; i < x.dim(); ++i) {
            report.max_deviation = std::max(report.max_deviation, std::fabs(y.q[i] - x.q[i]));
            report.max_deviation = std::max(report.max_deviation, std::fabs(y.p[i] - x.p[i]));
        }
        ++report.samples;
    }
    return report;
}

UntouchedReport check_condition_untouched(const IntegratorConfig& config,
                                          const HamiltonianSpec& lifted,
                                          std::span<const PhasePoint> samples, double dt) {
    if (lifted.kind() != HamiltonianKind::lift_single)
        raise(Errc::validation_error, "condition check needs a single lift");
    return check_condition_untouched(step_map(config, lifted, dt), samples);
}

ProductReport check_condition_product(const IntegratorConfig& config,
                                      const HamiltonianSpec& lifted,
                                      std::span<const PhasePoint> samples, double dt) {
    if (lifted.kind() != HamiltonianKind::lift_product)
        raise(Errc::validation_error, "condition check needs a product lift");
    ProductReport report;
    const int n = lifted.dim();
    const HamiltonianSpec& inner = lifted.inner();
    for (const PhasePoint& x : samples) {
        QueryTape scratch;
        StepResult r = step(config, lifted, x, dt, scratch);
        if (!r.is_defined())
            raise(Errc::map_undefined, std::string("lifted step undefined: ") + reason_name(r.reason()));
        const PhasePoint& y = r.point();
        for (int i = 0; i < n; ++i) {
            QueryTape planar_tape;
            StepResult ri =
                step(config, inner, PhasePoint::planar(x.q[i], x.p[i]), dt, planar_tape);
            if (!ri.is_defined())
                raise(Errc::map_undefined,
                      std::string("planar step undefined: ") + reason_name(ri.reason()));
            report.max_cross_deviation =
                std::max(report.max_cross_deviation, std::fabs(y.q[i] - ri.point().q[0]));
            report.max_cross_deviation =
                std::max(report.max_cross_deviation, std::fabs(y.p[i] - ri.point().p[0]));
        }
        ++report.samples;
    }
    return report;
}

PlanarIntegrator reduce_to_planar(const IntegratorConfig& config, LiftKind kind, int n) {
    validate(config);
    if (n < 2) raise(Errc::validation_error, "reduction needs n >= 2");
    PlanarIntegrator integ;
    integ.description = std::string(lift_kind_name(kind)) + "_lift(n=" + std::to_string(n) + ") " +
                        describe(config);
    integ.run = [config, kind, n](const HamiltonianSpec& planar, const PhasePoint& x, double dt,
                                  QueryTape& tape) {
        const HamiltonianSpec lifted_spec_ = lift(planar, kind, n);
        StepResult r = step(config, lifted_spec_, embed(x, kind, n), dt, tape);
        if (!r.is_defined()) return r;
        return StepResult::defined(PhasePoint::planar(r.point().q[0], r.point().p[0]));
    };
    integ.lifted_spec = [kind, n](const HamiltonianSpec& planar) { return lift(planar, kind, n); };
    return integ;
}

BlockJacobianReport jacobian_block_report(const PhaseMap& map, const PhasePoint& x, double h,
                                          BlockPattern pattern) {
    validate(x);
    if (!(h > 0.0)) raise(Errc::validation_error, "fd step must be positive");
    const int n = x.dim();
    const int m = 2 * n;

    // Central differences in interleaved variable order (q1,p1,...,qn,pn).
    Matrix jac(m, m);
    for (int c = 0; c < m; ++c) {
        const int pair = c / 2;
        const bool is_p = (c % 2) == 1;
        PhasePoint plus = x;
        PhasePoint minus = x;
        if (is_p) {
            plus.p[pair] += h;
            minus.p[pair] -= h;
        } else {
            plus.q[pair] += h;
            minus.q[pair] -= h;
        }
        StepResult rp = map(plus);
        StepResult rm = map(minus);
        if (!rp.is_defined() || !rm.is_defined())
            raise(Errc::stencil_undefined, "stencil point undefined in block jacobian");
        const double scale = 1.0 / (2.0 * h);
        for (int r = 0; r < m; ++r) {
            const int rpair = r / 2;
            const bool rp_is_p = (r % 2) == 1;
            const double vp = rp_is_p ? rp.point().p[rpair] : rp.point().q[rpair];
            const double vm = rp_is_p ? rm.point().p[rpair] : rm.point().q[rpair];
            jac.at(r, c) = (vp - vm) * scale;
        }
    }

    BlockJacobianReport report;
    report.pattern = pattern;
    report.fd_step = h;
    for (int i = 0; i < n; ++i) {
        Matrix block(2, 2);
        block.at(0, 0) = jac.at(2 * i, 2 * i);
        block.at(0, 1) = jac.at(2 * i, 2 * i + 1);
        block.at(1, 0) = jac.at(2 * i + 1, 2 * i);
        block.at(1, 1) = jac.at(2 * i + 1, 2 * i + 1);
        report.block_dets.push_back(determinant(block));
    }

    double off = 0.0;
    if (pattern == BlockPattern::product) {
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                if (r / 2 != c / 2) off = std::max(off, std::fabs(jac.at(r, c)));
    } else {
        // untouched rows must read zero against (q1,p1) and identity
        // against themselves
        for (int r = 2; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                const double expected = (r == c) ? 1.0 : 0.0;
                if (c < 2)
                    off = std::max(off, std::fabs(jac.at(r, c)));
                else
                    off = std::max(off, std::fabs(jac.at(r, c) - expected));
            }
        }
    }
    report.off_block_norm = off;
    report.jacobian = std::move(jac);
    return report;
}

} // namespace hamadv
