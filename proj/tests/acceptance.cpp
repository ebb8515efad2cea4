// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Runs the full-scale versions of the checks the unit tests cover
// at desk scale.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hamadv/adversary.hpp"
#include "hamadv/diagnostics.hpp"
#include "hamadv/exact_flows.hpp"
#include "hamadv/multidof.hpp"
#include "hamadv/rng.hpp"
#include "hamadv/scenario.hpp"

using namespace hamadv;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
};

IntegratorConfig make(Method m, std::optional<Method> base = std::nullopt) {
    IntegratorConfig c;
    c.method = m;
    if (m == Method::step_and_project) c.base = base.value_or(Method::leapfrog);
    return c;
}

std::vector<IntegratorConfig> shipped_methods() {
    return {make(Method::explicit_euler), make(Method::symplectic_euler), make(Method::leapfrog),
            make(Method::rk4),            make(Method::implicit_midpoint),
            make(Method::step_and_project)};
}

const HamiltonianSpec kFree = HamiltonianSpec::free_particle();
const HamiltonianSpec kHarmonic = HamiltonianSpec::harmonic(1.0);

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Tape-agreement replay: 6 methods x 50 trials, bump placed outside every
//    taped q-coordinate, outputs bit-identical. Zero tolerance.
Check criterion_1() {
    Check c;
    Rng rng(1001);
    for (const IntegratorConfig& cfg : shipped_methods()) {
        for (int trial = 0; trial < 50 && c.ok; ++trial) {
            const PhasePoint x = PhasePoint::planar(rng.uniform(-1, 1), rng.uniform(0.5, 1.5));
            const double dt = rng.uniform(0.01, 0.2);
            QueryTape tape;
            StepResult base = step(cfg, kFree, x, dt, tape);
            c.require(base.is_defined(), describe(cfg) + " base step undefined");
            if (!c.ok) break;

            double lo = x.q[0], hi = x.q[0];
            for (double q : tape.q_coordinates()) {
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
            const double radius = rng.uniform(0.05, 0.3);
            const double gap = rng.uniform(0.01, 1.0);
            const double amplitude = rng.uniform(0.05, 1.0);
            const bool right = (rng.next() & 1) != 0;
            const double center = right ? hi + gap + radius : lo - gap - radius;
            const HamiltonianSpec bumped =
                HamiltonianSpec::separable_bump(BumpPotential({Bump{center, radius, amplitude}}));

            c.require(agrees_on_tape(kFree, bumped, tape), describe(cfg) + " tape agreement failed");
            QueryTape replay_tape;
            StepResult replay = step(cfg, bumped, x, dt, replay_tape);
            c.require(replay.is_defined() && bits_equal(replay.point(), base.point()),
                      describe(cfg) + " replay not bit-identical at trial " + std::to_string(trial));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 2. Symplecticity: leapfrog, symplectic euler, implicit midpoint on the
//    harmonic and bump specs, |det - 1| <= 1e-5 with fd step 1e-5 at 100
//    random points.
Check criterion_2() {
    Check c;
    const HamiltonianSpec bump = HamiltonianSpec::separable_bump(
        BumpPotential({Bump{0.0, 0.4, 0.3}}));
    for (Method m : {Method::symplectic_euler, Method::leapfrog, Method::implicit_midpoint}) {
        for (int which = 0; which < 2; ++which) {
            const HamiltonianSpec& spec = which == 0 ? kHarmonic : bump;
            const double dt = which == 0 ? 0.1 : 0.02;
            const PhaseMap map = step_map(make(m), spec, dt);
            Rng rng(2000 + static_cast<int>(m));
            for (int k = 0; k < 100 && c.ok; ++k) {
                const PhasePoint x =
                    which == 0 ? PhasePoint::planar(rng.uniform(-2, 2), rng.uniform(-2, 2))
                               : PhasePoint::planar(rng.uniform(-0.45, 0.45), rng.uniform(0.8, 1.2));
                const JacobianReport jr = jacobian(map, x, 1e-5);
                c.require(std::fabs(jr.determinant - 1.0) <= 1e-5,
                          std::string(method_name(m)) + (which == 0 ? " harmonic" : " bump") +
                              " det " + fmt(jr.determinant) + " at q=" + fmt(x.q[0]) +
                              " p=" + fmt(x.p[0]));
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. Step-and-project energy over 1000 steps on harmonic and bump specs.
Check criterion_3() {
    Check c;
    const HamiltonianSpec bump = HamiltonianSpec::separable_bump(
        BumpPotential({Bump{0.0, 0.4, 0.3}}));
    const IntegratorConfig sp = make(Method::step_and_project);
    {
        const EnergyDriftReport r =
            energy_drift(step_map(sp, kHarmonic, 0.05), kHarmonic, PhasePoint::planar(1, 0), 1000);
        c.require(!r.undefined_encountered && r.steps_completed == 1000,
                  "harmonic trajectory truncated");
        c.require(r.max_drift <= 1e-12, "harmonic drift " + fmt(r.max_drift));
    }
    {
        const EnergyDriftReport r =
            energy_drift(step_map(sp, bump, 0.05), bump, PhasePoint::planar(-1.0, 1.1), 1000);
        c.require(!r.undefined_encountered && r.steps_completed == 1000,
                  "bump trajectory truncated");
        c.require(r.max_drift <= 1e-12, "bump drift " + fmt(r.max_drift));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 4. Exact bump-flow oracle on 20 random admissible potentials: inversion
//    residual, energy conservation, group law, and the strict lag behind the
//    free flow wherever the potential is positive on the traversed interval.
Check criterion_4() {
    Check c;
    Rng rng(4004);
    const double peak = std::exp(-1.0);
    for (int trial = 0; trial < 20 && c.ok; ++trial) {
        const int nb = rng.uniform_int(1, 3);
        const double p0 = rng.uniform(0.9, 1.4);
        const double budget = std::min(0.45, 0.8 * 0.5 * p0 * p0);
        std::vector<double> weights;
        double weight_total = 0.0;
        for (int i = 0; i < nb; ++i) {
            weights.push_back(rng.uniform(0.2, 1.0));
            weight_total += weights.back();
        }
        std::vector<Bump> bumps;
        for (int i = 0; i < nb; ++i)
            bumps.push_back(Bump{rng.uniform(-1.5, 1.5), rng.uniform(0.05, 0.5),
                                 budget * weights[i] / weight_total / peak});
        const BumpPotential v(bumps);
        const PhasePoint x0 = PhasePoint::planar(rng.uniform(-3.0, -2.0), p0);
        const double energy = 0.5 * p0 * p0 + v.value(x0.q[0]);
        const double t = rng.uniform(0.3, 3.0);

        const PhasePoint out = bump_flow(v, x0, t, 1e-12);
        const double residual = std::fabs(time_of_flight(v, x0.q[0], out.q[0], energy, 1e-12) - t);
        c.require(residual <= 1e-10, "inversion residual " + fmt(residual));

        const double e_out = 0.5 * out.p[0] * out.p[0] + v.value(out.q[0]);
        c.require(std::fabs(e_out - energy) <= 1e-10, "energy error " + fmt(e_out - energy));

        const double s1 = rng.uniform(0.1, 1.5), s2 = rng.uniform(0.1, 1.5);
        const PhasePoint two_leg = bump_flow(v, bump_flow(v, x0, s1, 1e-12), s2, 1e-12);
        const PhasePoint one_leg = bump_flow(v, x0, s1 + s2, 1e-12);
        c.require(distance(two_leg, one_leg) <= 1e-9,
                  "group property error " + fmt(distance(two_leg, one_leg)));

        // strict lag from a unit-momentum start whenever the traversed
        // interval meets a support
        double support_hi = -1e300;
        for (const Bump& b : v.bumps()) support_hi = std::max(support_hi, b.center + b.radius);
        const PhasePoint unit_start = PhasePoint::planar(-3.5, 1.0);
        const double t_cross = (support_hi - unit_start.q[0]) + 1.0;
        const PhasePoint lagged = bump_flow(v, unit_start, t_cross, 1e-12);
        c.require(lagged.q[0] < unit_start.q[0] + t_cross, "no strict lag across the bumps");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 5. Adversarial construction end to end: certificates for step-and-project
//    over leapfrog and rk4 at dt in {0.05, 0.1}, then again with the bump
//    amplitude halved.
Check criterion_5() {
    Check c;
    for (Method base : {Method::leapfrog, Method::rk4}) {
        for (double dt : {0.05, 0.1}) {
            for (double lambda : {0.25, 0.125}) {
                ConstructionParams params;
                params.dt = dt;
                params.lambda = lambda;
                const Certificate cert =
                    generate_certificate(make(Method::step_and_project, base), params);
                const std::string label = std::string(method_name(base)) + " dt=" + fmt(dt) +
                                          " lambda=" + fmt(lambda);
                c.require(cert.complete(), label + " aborted");
                if (!cert.complete()) continue;
                c.require(cert.output_at_origin_match, label + " origin outputs differ");
                c.require(cert.output_at_q0_match, label + " q0 outputs differ");
                c.require(cert.agrees_tape0 && cert.agrees_tape1, label + " tape agreement failed");
                const double lower = cert.mismatch_lower_bound - 1e-9;
                c.require(lower > 0.0, label + " lower bound not positive: " + fmt(lower));
                c.require(cert.mismatch >= lower,
                          label + " mismatch " + fmt(cert.mismatch) + " below " + fmt(lower));
                const bool named = cert.verdict.failed_property == FailedProperty::energy_violated ||
                                   cert.verdict.failed_property == FailedProperty::volume_violated ||
                                   cert.verdict.failed_property == FailedProperty::flow_mismatch_only;
                c.require(named, label + " verdict " +
                                     failed_property_name(cert.verdict.failed_property));
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// 6. Translation constant on the free particle: c = 1 exactly, zero spread,
//    p deviation <= 1e-12 over q in {-5, 0, 1, 5, 100}. dt is dyadic so the
//    translated positions are exact in binary floating point.
Check criterion_6() {
    Check c;
    const std::vector<double> samples = {-5.0, 0.0, 1.0, 5.0, 100.0};
    const double dt = 0.125;
    for (const IntegratorConfig& cfg : shipped_methods()) {
        const TranslationReport r =
            measure_translation_constant(step_map(cfg, kFree, dt), samples, dt);
        c.require(r.c_spread == 0.0, describe(cfg) + " spread " + fmt(r.c_spread));
        c.require(r.c_mean == 1.0, describe(cfg) + " c " + fmt(r.c_mean));
        for (double ci : r.c_samples) c.require(ci == 1.0, describe(cfg) + " sample c " + fmt(ci));
        c.require(r.p_deviation <= 1e-12, describe(cfg) + " p deviation " + fmt(r.p_deviation));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. Consistency probe passes for all six methods on the free particle at
//    (0,1) and the harmonic oscillator at (1,0); fitted order within 0.3 of
//    nominal on the harmonic ratios.
Check criterion_7() {
    Check c;
    const std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    for (const IntegratorConfig& cfg : shipped_methods()) {
        const ConsistencyReport on_free =
            consistency_probe(cfg, kFree, PhasePoint::planar(0, 1), dts);
        c.require(on_free.passed, describe(cfg) + " failed the probe on the free particle");

        const ConsistencyReport on_harmonic =
            consistency_probe(cfg, kHarmonic, PhasePoint::planar(1, 0), dts);
        c.require(on_harmonic.passed, describe(cfg) + " failed the probe on the harmonic");
        const int order = nominal_order(cfg.method, cfg.base);
        c.require(std::isfinite(on_harmonic.fitted_order) &&
                      std::fabs(on_harmonic.fitted_order - order) <= 0.3,
                  describe(cfg) + " fitted order " + fmt(on_harmonic.fitted_order) + " vs nominal " +
                      std::to_string(order));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 8. Lifted pipeline: reduced integrators feed the adversary; condition 1 is
//    exactly zero for explicit methods on single lifts; componentwise
//    equality for product lifts; block-jacobian off-pattern norm <= 1e-7.
Check criterion_8() {
    Check c;
    Rng rng(8008);

    for (LiftKind kind : {LiftKind::single, LiftKind::product}) {
        const int n = kind == LiftKind::single ? 2 : 3;
        ConstructionParams params;
        params.dt = 0.1;
        const Certificate cert =
            generate_certificate(reduce_to_planar(make(Method::step_and_project), kind, n), params);
        const std::string label = std::string(lift_kind_name(kind)) + " n=" + std::to_string(n);
        c.require(cert.complete(), label + " certificate aborted");
        if (cert.complete()) {
            c.require(cert.verdict.failed_property != FailedProperty::none_detected,
                      label + " certificate found nothing");
            c.require(cert.output_at_origin_match && cert.output_at_q0_match,
                      label + " replay mismatch");
        }
    }

    for (Method m : {Method::explicit_euler, Method::symplectic_euler, Method::leapfrog, Method::rk4}) {
        for (const HamiltonianSpec& inner : {kFree, kHarmonic}) {
            const HamiltonianSpec lifted = lift(inner, LiftKind::single, 2);
            std::vector<PhasePoint> samples;
            for (int k = 0; k < 8; ++k)
                samples.push_back(PhasePoint{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                             {rng.uniform(0.5, 1.5), rng.uniform(-1, 1)}});
            const UntouchedReport r = check_condition_untouched(make(m), lifted, samples, 0.1);
            c.require(r.max_deviation == 0.0,
                      std::string(method_name(m)) + " untouched deviation " + fmt(r.max_deviation));
        }
    }

    for (Method m : {Method::leapfrog, Method::rk4}) {
        const HamiltonianSpec lifted = lift(kHarmonic, LiftKind::product, 3);
        std::vector<PhasePoint> samples;
        for (int k = 0; k < 8; ++k)
            samples.push_back(PhasePoint{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                         {rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5),
                                          rng.uniform(0.5, 1.5)}});
        const ProductReport r = check_condition_product(make(m), lifted, samples, 0.1);
        c.require(r.max_cross_deviation <= 1e-14,
                  std::string(method_name(m)) + " cross deviation " + fmt(r.max_cross_deviation));
    }

    {
        const BlockJacobianReport product_blocks = jacobian_block_report(
            step_map(make(Method::leapfrog), lift(kHarmonic, LiftKind::product, 2), 0.1),
            PhasePoint{{0.4, -0.3}, {1.0, 0.9}}, 1e-5, BlockPattern::product);
        c.require(product_blocks.off_block_norm <= 1e-7,
                  "product off-pattern norm " + fmt(product_blocks.off_block_norm));
        const BlockJacobianReport single_blocks = jacobian_block_report(
            step_map(make(Method::leapfrog), lift(kFree, LiftKind::single, 2), 0.1),
            PhasePoint{{0.2, 0.5}, {1.0, 0.7}}, 1e-5, BlockPattern::single);
        c.require(single_blocks.off_block_norm <= 1e-7,
                  "single off-pattern norm " + fmt(single_blocks.off_block_norm));
    }
    return c;
}

// ---------------------------------------------------------------------------
// 9. Determinism: CLI scenarios run twice produce byte-identical report.json.
Check criterion_9() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "hamadv_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const auto run_cli = [&](const std::string& args) {
        const std::string cmd = std::string(HAMADV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    const char* adversary_cfg = R"({
      "command": "adversary",
      "integrator": {"method": "step_and_project", "base": "leapfrog"},
      "hamiltonian": {"variant": "free_particle"},
      "dt": 0.1,
      "parameters": {"sweep": {"q_count": 24, "p_count": 6}, "continuity_delta": 1e-6}
    })";
    const char* integrate_cfg = R"({
      "command": "integrate",
      "integrator": {"method": "rk4"},
      "hamiltonian": {"variant": "harmonic", "omega": 1.0},
      "dt": 0.05,
      "parameters": {"n_steps": 200, "x0": {"q": [1.0], "p": [0.0]}}
    })";

    {
        std::ofstream out(dir / "adversary.json");
        out << adversary_cfg;
    }
    {
        std::ofstream out(dir / "integrate.json");
        out << integrate_cfg;
    }

    const int a1 = run_cli("adversary --config " + (dir / "adversary.json").string() + " --out " +
                           (dir / "a1").string() + " --threads 1");
    const int a2 = run_cli("adversary --config " + (dir / "adversary.json").string() + " --out " +
                           (dir / "a2").string() + " --threads 2");
    c.require(a1 == 2 && a2 == 2, "adversary exit codes " + std::to_string(a1) + "/" + std::to_string(a2));
    c.require(slurp(dir / "a1" / "report.json") == slurp(dir / "a2" / "report.json"),
              "adversary reports differ");
    c.require(slurp(dir / "a1" / "sweep.csv") == slurp(dir / "a2" / "sweep.csv"),
              "adversary sweeps differ");

    const int i1 = run_cli("integrate --config " + (dir / "integrate.json").string() + " --out " +
                           (dir / "i1").string());
    const int i2 = run_cli("integrate --config " + (dir / "integrate.json").string() + " --out " +
                           (dir / "i2").string());
    c.require(i1 == 0 && i2 == 0, "integrate exit codes");
    c.require(slurp(dir / "i1" / "report.json") == slurp(dir / "i2" / "report.json"),
              "integrate reports differ");
    return c;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"tape-agreement replay, 6 methods x 50 trials, bit-identical", criterion_1},
        {"symplecticity |det-1| <= 1e-5 on harmonic and bump specs", criterion_2},
        {"step-and-project energy drift <= 1e-12 over 1000 steps", criterion_3},
        {"exact bump-flow oracle: residual, energy, group law, strict lag", criterion_4},
        {"adversarial certificates for step-and-project leapfrog/rk4", criterion_5},
        {"translation constant c = 1 exactly with zero spread", criterion_6},
        {"consistency probe and convergence order for all 6 methods", criterion_7},
        {"lifted pipeline: conditions, block structure, reduced adversary", criterion_8},
        {"CLI determinism: byte-identical reports", criterion_9},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        if (result.ok) {
            std::printf("PASS  criterion %zu: %s\n", i + 1, criteria[i].first.c_str());
        } else {
            std::printf("FAIL  criterion %zu: %s — %s\n", i + 1, criteria[i].first.c_str(),
                        result.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
