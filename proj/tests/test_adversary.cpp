#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hamadv/adversary.hpp"
#include "hamadv/exact_flows.hpp"
#include "hamadv/report_json.hpp"

using namespace hamadv;

namespace {

const HamiltonianSpec kFree = HamiltonianSpec::free_particle();

IntegratorConfig make(Method m) {
    IntegratorConfig c;
    c.method = m;
    if (m == Method::step_and_project) c.base = Method::leapfrog;
    return c;
}

// Reduced sweep + coarse continuity scan keep unit tests quick; the
// acceptance suite runs the full defaults.
ConstructionParams quick_params(double dt) {
    ConstructionParams p;
    p.dt = dt;
    p.sweep.q_count = 16;
    p.sweep.p_count = 4;
    p.continuity_delta = 1e-5;
    return p;
}

} // namespace

TEST_CASE("run_traced reports the stage structure of each method") {
    SUBCASE("rk4 queries eight gradients at four stage points") {
        auto [r, tape] = run_traced(make(Method::rk4), kFree, PhasePoint::planar(0, 1), 0.1);
        REQUIRE(r.is_defined());
        REQUIRE(tape.size() == 8);
        const auto qs = tape.q_coordinates();
        CHECK(qs[0] == 0.0);
        CHECK(qs[2] == 0.05); // second stage sits at the half step
        CHECK(qs[6] == 0.1);  // fourth stage at the full step
    }

    SUBCASE("explicit euler queries only the step point") {
        auto [r, tape] = run_traced(make(Method::explicit_euler), kFree, PhasePoint::planar(0, 1), 0.1);
        REQUIRE(r.is_defined());
        REQUIRE(tape.size() == 2);
        for (const QueryRecord& rec : tape.records()) CHECK(rec.point.q[0] == 0.0);
    }

    SUBCASE("implicit midpoint tapes its verification queries") {
        auto [r, tape] = run_traced(make(Method::implicit_midpoint), kFree, PhasePoint::planar(0, 1), 0.1);
        REQUIRE(r.is_defined());
        CHECK(r.point().q[0] == 0.1);
        CHECK(r.point().p[0] == 1.0);
        bool saw_midpoint = false;
        for (double q : tape.q_coordinates())
            if (q == 0.05) saw_midpoint = true;
        CHECK(saw_midpoint);
    }
}

TEST_CASE("measure_c") {
    SUBCASE("every shipped method translates with c = 1 on the free particle") {
        for (Method m : {Method::explicit_euler, Method::symplectic_euler, Method::leapfrog,
                         Method::rk4, Method::implicit_midpoint, Method::step_and_project}) {
            CHECK(measure_c(make(m), 0.1) == 1.0);
        }
    }

    SUBCASE("constructed half-speed translation") {
        const double dt = 0.1;
        const PhaseMap half_speed = [dt](const PhasePoint& x) {
            return StepResult::defined(PhasePoint::planar(x.q[0] + 0.5 * dt, x.p[0]));
        };
        CHECK(measure_c(half_speed, dt) == doctest::Approx(0.5).epsilon(1e-14));
    }

    SUBCASE("a map leaving the level line is energy_not_conserved") {
        const PhaseMap drift = [](const PhasePoint& x) {
            return StepResult::defined(PhasePoint::planar(x.q[0], 1.1));
        };
        try {
            measure_c(drift, 0.1);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::energy_not_conserved);
        }
    }

    SUBCASE("a frozen map yields nonpositive c") {
        const PhaseMap frozen = [](const PhasePoint& x) { return StepResult::defined(x); };
        try {
            measure_c(frozen, 0.1);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::nonpositive_c);
        }
    }
}

TEST_CASE("select_q0 rule applications") {
    QueryTape tape;
    tape.append(PhasePoint::planar(0.0, 1.0), MultiIndex::planar(1, 0), 0.0);
    tape.append(PhasePoint::planar(0.05, 1.0), MultiIndex::planar(1, 0), 0.0);
    CHECK(select_q0(tape, 1.0, 0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-15));

    const QueryTape empty;
    CHECK(select_q0(empty, 1.0, 0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-15));

    QueryTape far;
    far.append(PhasePoint::planar(7.3, 1.0), MultiIndex::planar(0, 1), 1.0);
    CHECK(select_q0(far, 1.0, 0.1, 0.1) == doctest::Approx(7.4).epsilon(1e-15));
}

TEST_CASE("construct_adversarial_potential") {
    SUBCASE("no exclusions: bump centered in the interval") {
        const BumpPotential v = construct_adversarial_potential(0.2, 0.3, {}, 0.25, 0.001);
        REQUIRE(v.bumps().size() == 1);
        CHECK(v.bumps()[0].center == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(v.bumps()[0].radius == doctest::Approx(0.045).epsilon(1e-12));
        CHECK(v.bumps()[0].amplitude == 0.25);
    }

    SUBCASE("one excluded point splits the interval; leftmost largest gap wins") {
        const BumpPotential v = construct_adversarial_potential(0.2, 0.3, {0.25}, 0.25, 0.001);
        REQUIRE(v.bumps().size() == 1);
        CHECK(v.bumps()[0].center == doctest::Approx(0.2245).epsilon(1e-12));
        CHECK(v.bumps()[0].radius == doctest::Approx(0.45 * 0.049).epsilon(1e-12));
    }

    SUBCASE("crowded exclusions leave no room") {
        std::vector<double> crowded;
        for (int i = 0; i <= 100; ++i) crowded.push_back(0.2 + 0.001 * i);
        try {
            construct_adversarial_potential(0.2, 0.3, crowded, 0.25, 0.001);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::no_room_for_bump);
        }
    }

    SUBCASE("the potential vanishes on a neighborhood of every excluded point") {
        const std::vector<double> excluded = {0.21, 0.234, 0.27, 0.299};
        const BumpPotential v = construct_adversarial_potential(0.2, 0.3, excluded, 0.3, 0.002);
        for (double x : excluded) {
            CHECK(v.value(x) == 0.0);
            CHECK(v.outside_all_supports(x - 0.0019));
            CHECK(v.outside_all_supports(x + 0.0019));
        }
        // and outside the interval
        CHECK(v.value(0.1999) == 0.0);
        CHECK(v.value(0.3001) == 0.0);
    }
}

TEST_CASE("certificate for step-and-project leapfrog") {
    const Certificate cert = generate_certificate(make(Method::step_and_project), quick_params(0.1));
    REQUIRE(cert.complete());
    CHECK(cert.c == 1.0);
    CHECK(cert.q0 == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(cert.agrees_tape0);
    CHECK(cert.agrees_tape1);
    CHECK(cert.output_at_origin_match);
    CHECK(cert.output_at_q0_match);
    CHECK(cert.mismatch > 0.0);
    CHECK(cert.mismatch >= cert.mismatch_lower_bound - 1e-9);
    CHECK(cert.mismatch_lower_bound > 0.0);
    const bool named = cert.verdict.failed_property == FailedProperty::energy_violated ||
                       cert.verdict.failed_property == FailedProperty::volume_violated ||
                       cert.verdict.failed_property == FailedProperty::flow_mismatch_only;
    CHECK(named);
    CHECK(cert.sweep_undefined.empty());

    // the integrator really is exact on the free particle at (q0, 1)
    CHECK(cert.output_at_q0.q[0] == doctest::Approx(cert.q0 + 0.1).epsilon(1e-14));
    // and the exact flow of the modified Hamiltonian lags strictly behind
    CHECK(cert.exact_flow_at_q0.q[0] < cert.output_at_q0.q[0]);
}

TEST_CASE("explicit euler certificate names the energy violation") {
    const Certificate cert = generate_certificate(make(Method::explicit_euler), quick_params(0.1));
    REQUIRE(cert.complete());
    CHECK(cert.verdict.failed_property == FailedProperty::energy_violated);
    CHECK(cert.energy_violations.max_error > 1e-10);
}

TEST_CASE("plain leapfrog (symplectic, not energy-conserving) is caught on energy") {
    const Certificate cert = generate_certificate(make(Method::leapfrog), quick_params(0.1));
    REQUIRE(cert.complete());
    CHECK(cert.verdict.failed_property == FailedProperty::energy_violated);
}

TEST_CASE("a free-flow map that ignores the Hamiltonian entirely") {
    PlanarIntegrator oracle_thief;
    oracle_thief.description = "exact free flow, no queries";
    oracle_thief.run = [](const HamiltonianSpec&, const PhasePoint& x, double dt, QueryTape&) {
        return StepResult::defined(free_flow(x, dt));
    };
    oracle_thief.lifted_spec = [](const HamiltonianSpec& spec) { return spec; };

    const Certificate cert = generate_certificate(oracle_thief, quick_params(0.1));
    REQUIRE(cert.complete());
    CHECK(cert.tape0.empty());
    CHECK(cert.agrees_tape0); // vacuous agreement
    CHECK(cert.output_at_origin_match);
    // it flows the wrong Hamiltonian, so it cannot conserve the bumped energy
    CHECK(cert.verdict.failed_property == FailedProperty::energy_violated);
}

TEST_CASE("verdict priority order") {
    Certificate cert = generate_certificate(make(Method::step_and_project), quick_params(0.1));
    REQUIRE(cert.complete());
    const VerdictThresholds t = cert.params.thresholds;

    SUBCASE("an undefined sweep point dominates") {
        cert.sweep_undefined.push_back(
            {PhasePoint::planar(0.25, 1.0), UndefinedReason::max_iterations});
        CHECK(evaluate_verdict(cert, t).failed_property == FailedProperty::undefinedness);
    }

    SUBCASE("energy beats volume and mismatch") {
        cert.energy_violations.max_error = 1.0;
        cert.energy_violations.argmax = PhasePoint::planar(0.25, 1.0);
        CHECK(evaluate_verdict(cert, t).failed_property == FailedProperty::energy_violated);
    }

    SUBCASE("clean sweeps leave the flow mismatch as the verdict") {
        cert.energy_violations.max_error = 0.0;
        for (DetSample& s : cert.det_sweep) {
            s.det = 1.0;
            s.det_err = 0.0;
        }
        REQUIRE(cert.mismatch > t.mismatch_tol);
        CHECK(evaluate_verdict(cert, t).failed_property == FailedProperty::flow_mismatch_only);
    }

    SUBCASE("a localized determinant deviation is volume violation") {
        cert.energy_violations.max_error = 0.0;
        REQUIRE_FALSE(cert.det_sweep.empty());
        cert.det_sweep[0].det = 1.5;
        cert.det_sweep[0].det_err = 1e-9;
        CHECK(evaluate_verdict(cert, t).failed_property == FailedProperty::volume_violated);
    }

    SUBCASE("an incomplete certificate cannot be judged") {
        Certificate aborted;
        aborted.abort = AbortInfo{Errc::no_room_for_bump, "test"};
        CHECK_THROWS_AS(evaluate_verdict(aborted, t), Error);
    }
}

TEST_CASE("scaling the bump amplitude down regenerates a valid certificate") {
    ConstructionParams params = quick_params(0.1);
    const Certificate cert = generate_certificate(make(Method::step_and_project), params);
    REQUIRE(cert.complete());

    ConstructionParams scaled = params;
    scaled.lambda = 0.5 * params.lambda;
    const Certificate cert2 = generate_certificate(make(Method::step_and_project), scaled);
    REQUIRE(cert2.complete());
    CHECK(cert2.potential.bumps()[0].amplitude == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(cert2.potential.bumps()[0].center == cert.potential.bumps()[0].center);
    CHECK(cert2.agrees_tape0);
    CHECK(cert2.agrees_tape1);
    CHECK(cert2.output_at_origin_match);
    CHECK(cert2.output_at_q0_match);
    CHECK(cert2.mismatch > 0.0);
    CHECK(cert2.mismatch < cert.mismatch); // weaker bump, smaller lag
}

TEST_CASE("certificates are deterministic") {
    const ConstructionParams params = quick_params(0.05);
    const Certificate a = generate_certificate(make(Method::step_and_project), params);
    const Certificate b = generate_certificate(make(Method::step_and_project), params);
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("construction failures abort into a diagnostic certificate") {
    PlanarIntegrator sideways;
    sideways.description = "leaves the level line";
    sideways.run = [](const HamiltonianSpec&, const PhasePoint& x, double, QueryTape&) {
        return StepResult::defined(PhasePoint::planar(x.q[0], 1.5));
    };
    sideways.lifted_spec = [](const HamiltonianSpec& spec) { return spec; };
    const Certificate cert = generate_certificate(sideways, quick_params(0.1));
    REQUIRE_FALSE(cert.complete());
    CHECK(cert.abort->code == Errc::energy_not_conserved);
    CHECK_THROWS_AS(evaluate_verdict(cert, VerdictThresholds{}), Error);
}
