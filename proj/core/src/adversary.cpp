#include "hamadv/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hamadv/exact_flows.hpp"
#include "hamadv/parallel.hpp"

namespace hamadv {

void validate(const ConstructionParams& params) {
    if (!(params.dt > 0.0)) raise(Errc::validation_error, "dt must be positive");
    if (!(params.lambda > 0.0) || !(params.lambda < 0.5))
        raise(Errc::validation_error, "lambda must lie in (0, 1/2)");
    if (params.exclusion_radius && !(*params.exclusion_radius > 0.0))
        raise(Errc::validation_error, "exclusion_radius must be positive");
    if (params.sweep.q_count < 1 || params.sweep.p_count < 1)
        raise(Errc::validation_error, "sweep grid counts must be >= 1");
    if (!(params.sweep.p_max >= params.sweep.p_min))
        raise(Errc::validation_error, "sweep p range is inverted");
    if (!(params.fd_step > 0.0)) raise(Errc::validation_error, "fd_step must be positive");
    if (!(params.quad_tol > 0.0)) raise(Errc::validation_error, "quad_tol must be positive");
    if (!(params.continuity_delta > 0.0))
        raise(Errc::validation_error, "continuity_delta must be positive");
}

const char* failed_property_name(FailedProperty p) {
    switch (p) {
        case FailedProperty::undefinedness: return "undefinedness";
        case FailedProperty::energy_violated: return "energy_violated";
        case FailedProperty::volume_violated: return "volume_violated";
        case FailedProperty::flow_mismatch_only: return "flow_mismatch_only";
        case FailedProperty::none_detected: return "none_detected";
    }
    return "unknown";
}

PlanarIntegrator direct_integrator(IntegratorConfig config) {
    validate(config);
    PlanarIntegrator integ;
    integ.description = describe(config);
    integ.run = [config](const HamiltonianSpec& spec, const PhasePoint& x, double dt,
                         QueryTape& tape) { return step(config, spec, x, dt, tape); };
    integ.lifted_spec = [](const HamiltonianSpec& spec) { return spec; };
    return integ;
}

std::pair<StepResult, QueryTape> run_traced(const IntegratorConfig& config,
                                            const HamiltonianSpec& spec, const PhasePoint& x,
                                            double dt) {
    QueryTape tape;
    StepResult r = step(config, spec, x, dt, tape);
    return {std::move(r), std::move(tape)};
}

double measure_c(const PhaseMap& map, double dt) {
    if (!(dt > 0.0)) raise(Errc::validation_error, "dt must be positive");
    StepResult r = map(PhasePoint::planar(0.0, 1.0));
    if (!r.is_defined())
        raise(Errc::map_undefined, std::string("step undefined at (0,1): ") + reason_name(r.reason()));
    const PhasePoint& out = r.point();
    if (std::fabs(out.p[0] - 1.0) > 1e-12)
        raise(Errc::energy_not_conserved,
              "output momentum " + std::to_string(out.p[0]) + " leaves the p=1 level line");
    const double c = out.q[0] / dt;
    if (!(c > 0.0)) raise(Errc::nonpositive_c, "measured c = " + std::to_string(c));
    return c;
}

double measure_c(const IntegratorConfig& config, double dt) {
    return measure_c(step_map(config, HamiltonianSpec::free_particle(), dt), dt);
}

double select_q0(const QueryTape& tape0, double c, double dt, double margin) {
    double m = c * dt;
    for (const QueryRecord& rec : tape0.records())
        for (double q : rec.point.q) m = std::max(m, q);
    return m + margin;
}

BumpPotential construct_adversarial_potential(double interval_lo, double interval_hi,
                                              const std::vector<double>& excluded_qs, double lambda,
                                              double exclusion_radius) {
    if (!(interval_hi > interval_lo)) raise(Errc::validation_error, "interval length must be positive");
    if (!(lambda > 0.0) || !(lambda < 0.5)) raise(Errc::validation_error, "lambda must lie in (0, 1/2)");
    if (!(exclusion_radius > 0.0)) raise(Errc::validation_error, "exclusion_radius must be positive");

    // Forbidden zones: exclusion neighborhoods clipped to the interval.
    std::vector<std::pair<double, double>> zones;
    for (double x : excluded_qs) {
        const double lo = std::max(interval_lo, x - exclusion_radius);
        const double hi = std::min(interval_hi, x + exclusion_radius);
        if (lo < hi) zones.emplace_back(lo, hi);
    }
    std::sort(zones.begin(), zones.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& z : zones) {
        if (!merged.empty() && z.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, z.second);
        else
            merged.push_back(z);
    }

    // Largest open gap, leftmost on ties.
    double best_lo = 0.0, best_hi = 0.0, best_len = -1.0;
    double cursor = interval_lo;
    for (const auto& z : merged) {
        if (z.first - cursor > best_len) {
            best_len = z.first - cursor;
            best_lo = cursor;
            best_hi = z.first;
        }
        cursor = std::max(cursor, z.second);
    }
    if (interval_hi - cursor > best_len) {
        best_len = interval_hi - cursor;
        best_lo = cursor;
        best_hi = interval_hi;
    }

    if (best_len < 4.0 * exclusion_radius)
        raise(Errc::no_room_for_bump, "largest free gap " + std::to_string(best_len) +
                                          " is below 4 x exclusion radius " +
                                          std::to_string(exclusion_radius));

    Bump bump;
    bump.center = 0.5 * (best_lo + best_hi);
    bump.radius = 0.45 * (best_hi - best_lo);
    bump.amplitude = lambda;
    return BumpPotential({bump});
}

namespace {

std::string point_str(const PhasePoint& x) {
    std::ostringstream os;
    os << "(q=" << x.q[0];
    for (std::size_t i = 1; i < x.q.size(); ++i) os << "," << x.q[i];
    os << ", p=" << x.p[0];
    for (std::size_t i = 1; i < x.p.size(); ++i) os << "," << x.p[i];
    os << ")";
    return os.str();
}

struct SweepCell {
    bool defined = false;
    UndefinedReason reason = UndefinedReason::solver_diverged;
    DetSample det;
    double energy_error = 0.0;
};

// One grid cell: step the point, measure its energy error, and take the
// finite-difference Jacobian if the whole stencil is defined.
SweepCell sweep_cell(const PhaseMap& map, const HamiltonianSpec& spec, const PhasePoint& x,
                     double fd_step) {
    SweepCell cell;
    StepResult r = map(x);
    if (!r.is_defined()) {
        cell.reason = r.reason();
        return cell;
    }
    cell.defined = true;
    cell.energy_error = std::fabs(hamiltonian_value(spec, r.point()) - hamiltonian_value(spec, x));
    UndefinedReason stencil_reason = UndefinedReason::solver_diverged;
    const PhaseMap probed = [&map, &stencil_reason](const PhasePoint& y) {
        StepResult s = map(y);
        if (!s.is_defined()) stencil_reason = s.reason();
        return s;
    };
    try {
        const JacobianReport jr = jacobian(probed, x, fd_step);
        cell.det.x = x;
        cell.det.det = jr.determinant;
        cell.det.det_err = jr.error_estimate;
    } catch (const Error& e) {
        if (e.code() != Errc::stencil_undefined) throw;
        cell.defined = false;
        cell.reason = stencil_reason;
    }
    return cell;
}

} // namespace

Certificate generate_certificate(const PlanarIntegrator& integrator,
                                 const ConstructionParams& params) {
    validate(params);
    Certificate cert;
    cert.integrator = integrator.description;
    cert.params = params;
    const double dt = params.dt;
    const HamiltonianSpec free = HamiltonianSpec::free_particle();

    try {
        // (a) trace at the origin and measure the translation constant
        QueryTape tape0;
        StepResult r0 = integrator.run(free, PhasePoint::planar(0.0, 1.0), dt, tape0);
        if (!r0.is_defined())
            raise(Errc::map_undefined,
                  std::string("step undefined at (0,1): ") + reason_name(r0.reason()));
        cert.output_at_origin = r0.point();
        if (std::fabs(cert.output_at_origin.p[0] - 1.0) > 1e-12)
            raise(Errc::energy_not_conserved, "output momentum " +
                                                  std::to_string(cert.output_at_origin.p[0]) +
                                                  " leaves the p=1 level line at the origin");
        cert.c = cert.output_at_origin.q[0] / dt;
        if (!(cert.c > 0.0)) raise(Errc::nonpositive_c, "measured c = " + std::to_string(cert.c));
        cert.tape0 = tape0;

        // (b) interval start past everything the integrator looked at
        const double margin = params.q0_margin.value_or(cert.c * dt);
        cert.q0 = select_q0(tape0, cert.c, dt, margin);

        // (c) trace at (q0, 1)
        QueryTape tape1;
        StepResult r1 = integrator.run(free, PhasePoint::planar(cert.q0, 1.0), dt, tape1);
        if (!r1.is_defined())
            raise(Errc::map_undefined,
                  std::string("step undefined at (q0,1): ") + reason_name(r1.reason()));
        cert.output_at_q0 = r1.point();
        cert.tape1 = tape1;

        // (d) bump inside [q0, q0 + c dt] avoiding every traced coordinate
        const double exclusion = params.exclusion_radius.value_or(dt / 100.0);
        cert.potential = construct_adversarial_potential(
            cert.q0, cert.q0 + cert.c * dt, tape1.q_coordinates(), params.lambda, exclusion);
        const HamiltonianSpec bumped = HamiltonianSpec::separable_bump(cert.potential);

        // (e) agreement and bit-identical replay on the modified Hamiltonian
        const HamiltonianSpec queried_free = integrator.lifted_spec(free);
        const HamiltonianSpec queried_bumped = integrator.lifted_spec(bumped);
        cert.agrees_tape0 = agrees_on_tape(queried_free, queried_bumped, tape0);
        cert.agrees_tape1 = agrees_on_tape(queried_free, queried_bumped, tape1);

        QueryTape replay0;
        StepResult b0 = integrator.run(bumped, PhasePoint::planar(0.0, 1.0), dt, replay0);
        cert.output_at_origin_match =
            b0.is_defined() && bits_equal(b0.point(), cert.output_at_origin);
        QueryTape replay1;
        StepResult b1 = integrator.run(bumped, PhasePoint::planar(cert.q0, 1.0), dt, replay1);
        cert.output_at_q0_match = b1.is_defined() && bits_equal(b1.point(), cert.output_at_q0);

        // (f) exact flow comparison at time c dt
        cert.exact_flow_at_q0 =
            bump_flow(cert.potential, PhasePoint::planar(cert.q0, 1.0), cert.c * dt, params.quad_tol);
        cert.mismatch = distance(cert.output_at_q0, cert.exact_flow_at_q0);
        cert.mismatch_lower_bound = cert.c * dt - (cert.exact_flow_at_q0.q[0] - cert.q0);

        // (g) determinant + energy sweep over a window around the bump
        const PhaseMap bumped_map = [&integrator, bumped, dt](const PhasePoint& x) {
            QueryTape scratch;
            return integrator.run(bumped, x, dt, scratch);
        };
        const double q_lo = cert.q0 - cert.c * dt;
        const double q_hi = cert.q0 + 2.0 * cert.c * dt;
        const int nq = params.sweep.q_count;
        const int np = params.sweep.p_count;
        const std::int64_t cells = static_cast<std::int64_t>(nq) * np;
        std::vector<SweepCell> sweep(cells);
        parallel_for(cells, params.threads, [&](std::int64_t idx) {
            const int iq = static_cast<int>(idx % nq);
            const int ip = static_cast<int>(idx / nq);
            const double q = nq == 1 ? q_lo : q_lo + (q_hi - q_lo) * iq / (nq - 1);
            const double p = np == 1 ? params.sweep.p_min
                                     : params.sweep.p_min +
                                           (params.sweep.p_max - params.sweep.p_min) * ip / (np - 1);
            sweep[idx] = sweep_cell(bumped_map, bumped, PhasePoint::planar(q, p), params.fd_step);
        });
        cert.energy_violations.samples = static_cast<int>(cells);
        for (std::int64_t idx = 0; idx < cells; ++idx) {
            const SweepCell& cell = sweep[idx];
            const int iq = static_cast<int>(idx % nq);
            const int ip = static_cast<int>(idx / nq);
            const double q = nq == 1 ? q_lo : q_lo + (q_hi - q_lo) * iq / (nq - 1);
            const double p = np == 1 ? params.sweep.p_min
                                     : params.sweep.p_min +
                                           (params.sweep.p_max - params.sweep.p_min) * ip / (np - 1);
            if (!cell.defined) {
                cert.sweep_undefined.push_back({PhasePoint::planar(q, p), cell.reason});
                continue;
            }
            cert.det_sweep.push_back(cell.det);
            if (cell.energy_error > cert.energy_violations.max_error) {
                cert.energy_violations.max_error = cell.energy_error;
                cert.energy_violations.argmax = PhasePoint::planar(q, p);
            }
            if (cell.energy_error > params.thresholds.energy_tol)
                ++cert.energy_violations.count_above_tol;
        }

        // continuity evidence across the bump support at p = 1
        const Bump& bump = cert.potential.bumps().front();
        cert.continuity = continuity_scan(bumped_map, bump.center - bump.radius,
                                          bump.center + bump.radius, 1.0, params.continuity_delta,
                                          params.threads);

        // (h)
        cert.verdict = evaluate_verdict(cert, params.thresholds);
    } catch (const Error& e) {
        switch (e.code()) {
            case Errc::map_undefined:
            case Errc::energy_not_conserved:
            case Errc::nonpositive_c:
            case Errc::no_room_for_bump:
            case Errc::turning_point:
            case Errc::root_bracket_failure:
                cert.abort = AbortInfo{e.code(), e.what()};
                return cert;
            default:
                throw;
        }
    }
    return cert;
}

Certificate generate_certificate(const IntegratorConfig& config, const ConstructionParams& params) {
    return generate_certificate(direct_integrator(config), params);
}

Verdict evaluate_verdict(const Certificate& certificate, const VerdictThresholds& thresholds) {
    if (!certificate.complete())
        raise(Errc::incomplete_certificate,
              "certificate aborted: " + certificate.abort->message);

    if (!certificate.sweep_undefined.empty()) {
        const SweepUndefined& u = certificate.sweep_undefined.front();
        return {FailedProperty::undefinedness,
                "step undefined (" + std::string(reason_name(u.reason)) + ") at " + point_str(u.x)};
    }
    if (certificate.energy_violations.max_error > thresholds.energy_tol) {
        std::ostringstream os;
        os << "max energy error " << certificate.energy_violations.max_error << " at "
           << point_str(certificate.energy_violations.argmax) << " over "
           << certificate.energy_violations.samples << " sweep points";
        return {FailedProperty::energy_violated, os.str()};
    }
    for (const DetSample& s : certificate.det_sweep) {
        if (std::fabs(s.det - 1.0) > thresholds.det_tol && s.det_err < thresholds.det_tol / 10.0) {
            std::ostringstream os;
            os << "jacobian determinant " << s.det << " (fd error " << s.det_err << ") at "
               << point_str(s.x);
            return {FailedProperty::volume_violated, os.str()};
        }
    }
    if (certificate.mismatch > thresholds.mismatch_tol) {
        std::ostringstream os;
        os << "output at (q0,1) differs from the exact flow by " << certificate.mismatch
           << " (lower bound " << certificate.mismatch_lower_bound << ")";
        return {FailedProperty::flow_mismatch_only, os.str()};
    }
    return {FailedProperty::none_detected, ""};
}

} // namespace hamadv
