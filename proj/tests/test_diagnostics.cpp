#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hamadv/diagnostics.hpp"
#include "hamadv/rng.hpp"

using namespace hamadv;

namespace {

const HamiltonianSpec kFree = HamiltonianSpec::free_particle();
const HamiltonianSpec kHarmonic = HamiltonianSpec::harmonic(1.0);

IntegratorConfig make(Method m) {
    IntegratorConfig c;
    c.method = m;
    if (m == Method::step_and_project) c.base = Method::leapfrog;
    return c;
}

std::vector<PhasePoint> unit_square(double q0, double p0) {
    return {PhasePoint::planar(q0, p0), PhasePoint::planar(q0 + 1, p0),
            PhasePoint::planar(q0 + 1, p0 + 1), PhasePoint::planar(q0, p0 + 1)};
}

} // namespace

TEST_CASE("jacobian of the exact free flow is the unit shear") {
    const JacobianReport jr = jacobian(exact_flow_map(kFree, 1.0), PhasePoint::planar(0.3, 0.8), 1e-5);
    CHECK(std::fabs(jr.determinant - 1.0) <= 1e-9);
    CHECK(std::fabs(jr.matrix.at(0, 0) - 1.0) <= 1e-9);
    CHECK(std::fabs(jr.matrix.at(0, 1) - 1.0) <= 1e-9);
    CHECK(std::fabs(jr.matrix.at(1, 0)) <= 1e-9);
    CHECK(std::fabs(jr.matrix.at(1, 1) - 1.0) <= 1e-9);
    CHECK(jr.fd_step == 1e-5);
}

TEST_CASE("explicit euler on the harmonic oscillator expands area by 1 + dt^2") {
    const PhaseMap map = step_map(make(Method::explicit_euler), kHarmonic, 0.1);
    const JacobianReport jr = jacobian(map, PhasePoint::planar(0.4, -0.9), 1e-5);
    CHECK(std::fabs(jr.determinant - 1.01) <= 1e-9); // linear map, fd is exact up to rounding
    CHECK(jr.error_estimate <= 1e-9);
}

TEST_CASE("symplectic methods keep unit determinant at random points") {
    Rng rng(11);
    for (Method m : {Method::symplectic_euler, Method::leapfrog, Method::implicit_midpoint}) {
        const PhaseMap map = step_map(make(m), kHarmonic, 0.1);
        for (int k = 0; k < 25; ++k) {
            const PhasePoint x = PhasePoint::planar(rng.uniform(-2, 2), rng.uniform(-2, 2));
            const JacobianReport jr = jacobian(map, x, 1e-5);
            CHECK(std::fabs(jr.determinant - 1.0) <= 1e-5);
        }
    }
}

TEST_CASE("stencil failures are reported") {
    const PhaseMap broken = [](const PhasePoint& x) {
        if (x.q[0] > 0.5) return StepResult::undefined(UndefinedReason::solver_diverged);
        return StepResult::defined(x);
    };
    CHECK_THROWS_AS(jacobian(broken, PhasePoint::planar(0.5, 0.0), 1e-3), Error);
}

TEST_CASE("polygon area ratios") {
    SUBCASE("identity map") {
        const PhaseMap id = [](const PhasePoint& x) { return StepResult::defined(x); };
        CHECK(polygon_area_ratio(id, unit_square(0, 0), 4) == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("free-flow shear preserves the unit square's area") {
        CHECK(polygon_area_ratio(exact_flow_map(kFree, 2.0), unit_square(0, 0), 8) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("euler expansion shows up in the mapped polygon") {
        const PhaseMap map = step_map(make(Method::explicit_euler), kHarmonic, 0.1);
        CHECK(polygon_area_ratio(map, unit_square(-0.5, -0.5), 64) ==
              doctest::Approx(1.01).epsilon(1e-6));
    }

    SUBCASE("degenerate polygon is rejected") {
        const PhaseMap id = [](const PhasePoint& x) { return StepResult::defined(x); };
        const std::vector<PhasePoint> line = {PhasePoint::planar(0, 0), PhasePoint::planar(1, 0),
                                              PhasePoint::planar(2, 0)};
        CHECK_THROWS_AS(polygon_area_ratio(id, line, 2), Error);
    }
}

TEST_CASE("polygon ratio and jacobian determinant agree for linear maps") {
    const PhaseMap map = step_map(make(Method::explicit_euler), kHarmonic, 0.1);
    const double ratio = polygon_area_ratio(map, unit_square(0.2, 0.1), 16);
    const double det = jacobian(map, PhasePoint::planar(0.7, 0.6), 1e-5).determinant;
    CHECK(std::fabs(ratio - det) <= 1e-4);
}

TEST_CASE("energy drift") {
    SUBCASE("exact harmonic flow sampled at dt = 0.1") {
        const EnergyDriftReport r =
            energy_drift(exact_flow_map(kHarmonic, 0.1), kHarmonic, PhasePoint::planar(1, 0), 100);
        CHECK(r.max_drift <= 1e-13);
        CHECK(r.steps_completed == 100);
        CHECK_FALSE(r.undefined_encountered);
    }

    SUBCASE("step-and-project stays on the level set") {
        const PhaseMap map = step_map(make(Method::step_and_project), kHarmonic, 0.1);
        const EnergyDriftReport r = energy_drift(map, kHarmonic, PhasePoint::planar(1, 0), 100);
        CHECK(r.max_drift <= 1e-12);
    }

    SUBCASE("explicit euler multiplies the energy by 1 + dt^2 each step") {
        const PhaseMap map = step_map(make(Method::explicit_euler), kHarmonic, 0.1);
        const EnergyDriftReport r = energy_drift(map, kHarmonic, PhasePoint::planar(1, 0), 10);
        const double expected = (std::pow(1.01, 10) - 1.0) * 0.5;
        CHECK(std::fabs(r.max_drift - expected) <= 1e-12);
    }

    SUBCASE("an undefined step truncates the drift measurement") {
        int calls = 0;
        const PhaseMap flaky = [&calls](const PhasePoint& x) {
            if (++calls >= 3) return StepResult::undefined(UndefinedReason::solver_diverged);
            return StepResult::defined(x);
        };
        const EnergyDriftReport r = energy_drift(flaky, kHarmonic, PhasePoint::planar(1, 0), 10);
        CHECK(r.undefined_encountered);
        CHECK(r.steps_completed == 2);
    }
}

TEST_CASE("translation constant measurement") {
    SUBCASE("exact free flow at a dyadic dt is a pure translation") {
        const TranslationReport r = measure_translation_constant(
            exact_flow_map(kFree, 0.125), {0.0, 1.0, 5.0}, 0.125);
        CHECK(r.c_mean == 1.0);
        CHECK(r.c_spread == 0.0);
        CHECK(r.p_deviation == 0.0);
    }

    SUBCASE("exact free flow at dt = 0.1 is a translation up to rounding") {
        const TranslationReport r =
            measure_translation_constant(exact_flow_map(kFree, 0.1), {0.0, 1.0, 5.0}, 0.1);
        CHECK(std::fabs(r.c_mean - 1.0) <= 1e-13);
        CHECK(r.c_spread <= 1e-12);
        CHECK(r.p_deviation == 0.0);
    }

    SUBCASE("rk4 on the free particle translates exactly like the flow") {
        const PhaseMap map = step_map(make(Method::rk4), kFree, 0.125);
        const TranslationReport r =
            measure_translation_constant(map, {-5.0, 0.0, 1.0, 5.0, 100.0}, 0.125);
        CHECK(r.c_mean == 1.0);
        CHECK(r.c_spread == 0.0);
        CHECK(r.p_deviation == 0.0);
    }

    SUBCASE("a q-dependent translation is flagged by nonzero spread") {
        const double dt = 0.1;
        const PhaseMap skew = [dt](const PhasePoint& x) {
            return StepResult::defined(PhasePoint::planar(x.q[0] + 0.2 * dt * x.q[0], x.p[0]));
        };
        const TranslationReport r = measure_translation_constant(skew, {0.0, 1.0, 5.0}, dt);
        CHECK(r.c_spread > 0.0);
    }

    SUBCASE("a constructed uniform translation has exactly zero spread") {
        const double shift = 0.375; // c dt with dyadic c and dt
        const PhaseMap translate = [shift](const PhasePoint& x) {
            return StepResult::defined(PhasePoint::planar(x.q[0] + shift, x.p[0]));
        };
        const TranslationReport r =
            measure_translation_constant(translate, {-4.0, 0.0, 2.0, 8.0}, 0.25);
        CHECK(r.c_spread == 0.0);
        CHECK(r.c_mean == 1.5);
    }
}

TEST_CASE("consistency probe") {
    const std::vector<double> dts = {0.1, 0.05, 0.025};

    SUBCASE("leapfrog ratios shrink like dt^2") {
        const ConsistencyReport r = consistency_probe(make(Method::leapfrog), kHarmonic,
                                                      PhasePoint::planar(1, 0), dts);
        REQUIRE(r.ratios.size() == 3);
        CHECK(r.passed);
        CHECK(r.ratios[0] / r.ratios[1] == doctest::Approx(4.0).epsilon(0.2));
        CHECK(r.ratios[1] / r.ratios[2] == doctest::Approx(4.0).epsilon(0.2));
        CHECK(std::fabs(r.fitted_order - 2.0) <= 0.3);
    }

    SUBCASE("the exact flow as the map passes with zero ratios") {
        IntegratorConfig c = make(Method::rk4);
        const ConsistencyReport r =
            consistency_probe(c, kFree, PhasePoint::planar(0, 1), dts);
        for (double ratio : r.ratios) CHECK(ratio == 0.0);
        CHECK(r.passed);
    }

    SUBCASE("a frozen map fails with ratios near the vector-field norm") {
        // the identity pretending to be an integrator; not consistent
        const ConsistencyReport probe = [&] {
            ConsistencyReport rep;
            rep.dts = dts;
            for (double dt : dts) {
                const double err = distance(exact_flow(kHarmonic, PhasePoint::planar(1, 0), dt),
                                            PhasePoint::planar(1, 0));
                rep.errors.push_back(err);
                rep.ratios.push_back(err / dt);
            }
            return rep;
        }();
        CHECK(probe.ratios.back() == doctest::Approx(1.0).epsilon(0.05));
        // monotone check fails: the ratios increase as dt decreases
        CHECK(probe.ratios[2] > probe.ratios[1]);
        CHECK(probe.ratios[1] > probe.ratios[0]);
        // and the errors only shrink linearly, far short of the 10x bar
        CHECK(probe.errors.back() >= 0.1 * probe.errors.front());
    }

    SUBCASE("dt sequence validation") {
        CHECK_THROWS_AS(consistency_probe(make(Method::leapfrog), kHarmonic,
                                          PhasePoint::planar(1, 0), {0.05, 0.1}),
                        Error);
        CHECK_THROWS_AS(consistency_probe(make(Method::leapfrog), kHarmonic,
                                          PhasePoint::planar(1, 0), {1e-7}),
                        Error);
    }
}

TEST_CASE("log-log slope fit recovers a power law") {
    std::vector<double> xs, ys;
    for (double x : {0.1, 0.05, 0.025, 0.0125}) {
        xs.push_back(x);
        ys.push_back(3.7 * x * x * x);
    }
    CHECK(fit_loglog_slope(xs, ys) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("continuity scan") {
    SUBCASE("a smooth map has a modest local Lipschitz estimate") {
        const PhaseMap map = step_map(make(Method::leapfrog), kHarmonic, 0.1);
        const ContinuityReport r = continuity_scan(map, -0.5, 0.5, 1.0, 1e-4);
        CHECK(r.max_local_lipschitz < 2.0);
        CHECK(r.undefined_points == 0);
        CHECK(r.samples >= 1000);
    }

    SUBCASE("a jump is flagged by a huge estimate") {
        const PhaseMap jumpy = [](const PhasePoint& x) {
            return StepResult::defined(
                PhasePoint::planar(x.q[0] < 0.0 ? x.q[0] : x.q[0] + 1.0, x.p[0]));
        };
        const ContinuityReport r = continuity_scan(jumpy, -0.5, 0.5, 1.0, 1e-4);
        CHECK(r.max_local_lipschitz > 1e3);
    }
}
