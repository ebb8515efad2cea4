#pragma once
// Quantitative probes for the conservation properties under test: Jacobian
// determinants (volume), polygon area ratios, energy drift, the translation
// constant on the p = 1 level line, and the consistency probe.

#include <cstdint>
#include <functional>
#include <vector>

#include "hamadv/exact_flows.hpp"
#include "hamadv/integrators.hpp"
#include "hamadv/linalg.hpp"

namespace hamadv {

/// A phase map under measurement; Undefined outcomes are in-band.
using PhaseMap = std::function<StepResult(const PhasePoint&)>;

/// One integrator step as a phase map (fresh scratch tape per call).
PhaseMap step_map(IntegratorConfig config, HamiltonianSpec spec, double dt);

/// Exact time-t flow as a phase map (always Defined).
PhaseMap exact_flow_map(HamiltonianSpec spec, double t, double quad_tol = 1e-12);

/// Central-difference Jacobian in variable order (q1..qn, p1..pn), with its
/// determinant and an h-vs-h/2 error estimate.
struct JacobianReport {
    Matrix matrix;
    double determinant = 0.0;
    double fd_step = 0.0;
    double error_estimate = 0.0;
};

JacobianReport jacobian(const PhaseMap& map, const PhasePoint& x, double h);

/// Shoelace area of the mapped refined polygon divided by the source area.
/// Planar; each edge is subdivided `refinement` times before mapping.
double polygon_area_ratio(const PhaseMap& map, const std::vector<PhasePoint>& polygon,
                          int refinement);

struct EnergyDriftReport {
    double max_drift = 0.0;
    int steps_completed = 0;
    bool undefined_encountered = false;
};

/// Max |H(x_k) - H(x_0)| along the trajectory of `map`; stops at the first
/// Undefined point and flags it.
EnergyDriftReport energy_drift(const PhaseMap& map, const HamiltonianSpec& spec,
                               const PhasePoint& x0, int n_steps);

/// Per-sample translation constants c_i = (q_out - q)/dt measured on the
/// p = 1 line. A map that is a time-rescaled free flow has c_spread = 0.
struct TranslationReport {
    double c_mean = 0.0;
    double c_spread = 0.0;    // max - min over samples
    double p_deviation = 0.0; // max |p_out - 1|
    std::vector<double> c_samples;
};

TranslationReport measure_translation_constant(const PhaseMap& map,
                                               const std::vector<double>& q_samples, double dt);

/// Ratios ||S^dt(x) - Phi(x)|| / dt over a decreasing dt sequence. The probe
/// passes when the ratios are non-increasing over the last three entries and
/// the one-step errors shrink by 10x from first to last (or sit at the
/// rounding floor, as they do for methods that are exact on the spec).
struct ConsistencyReport {
    std::vector<double> dts;
    std::vector<double> ratios;
    std::vector<double> errors;
    bool passed = false;
    double fitted_order = 0.0; // log-log slope of ratio vs dt; NaN if not fittable
};

ConsistencyReport consistency_probe(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                    const PhasePoint& x, const std::vector<double>& dt_sequence);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Largest local Lipschitz estimate of the map sampled at resolution delta
/// along the line p = const, q in [q_lo, q_hi]. Reports evidence only; it can
/// falsify continuity at that resolution, never certify it.
struct ContinuityReport {
    double delta = 0.0;
    double max_local_lipschitz = 0.0;
    std::int64_t samples = 0;
    int undefined_points = 0;
};

ContinuityReport continuity_scan(const PhaseMap& map, double q_lo, double q_hi, double p,
                                 double delta, int threads = 1);

} // namespace hamadv
