#pragma once
// Constructive adversary: given any taped integrator that is exact and
// energy-conserving on the free particle, build a bump Hamiltonian whose
// exact flow the integrator provably cannot match while staying defined,
// continuous, energy-conserving and volume-conserving — and emit the full
// evidence bundle.
//
// Construction outline (all stages recorded in the Certificate):
//   (a) trace one step at (0,1) on the free particle, measure the
//       translation constant c;
//   (b) pick q0 past every traced q-coordinate;
//   (c) trace one step at (q0,1), collecting the points the integrator
//       looked at there;
//   (d) fit a mollifier bump inside [q0, q0 + c dt] avoiding an exclusion
//       neighborhood of every traced coordinate;
//   (e) verify tape agreement and bit-identical replay on the modified
//       Hamiltonian;
//   (f) compare the integrator's output at (q0,1) against the exact bump
//       flow at time c dt;
//   (g) sweep Jacobian determinants and energy errors of the modified step
//       over a window around the bump;
//   (h) name the violated property.

#include <optional>
#include <string>
#include <vector>

#include "hamadv/diagnostics.hpp"
#include "hamadv/integrators.hpp"

namespace hamadv {

struct SweepGrid {
    int q_count = 64;
    int p_count = 16;
    double p_min = 0.9;
    double p_max = 1.1;
};

struct VerdictThresholds {
    double energy_tol = 1e-10;
    double det_tol = 1e-4;
    double mismatch_tol = 1e-6;
};

struct ConstructionParams {
    double dt = 0.1;
    double lambda = 0.25;                    // bump amplitude, in (0, 1/2)
    std::optional<double> exclusion_radius;  // default dt/100
    std::optional<double> q0_margin;         // default c*dt
    SweepGrid sweep;
    VerdictThresholds thresholds;
    double fd_step = 1e-5;
    double quad_tol = 1e-12;
    double continuity_delta = 1e-7;
    bool full_tapes = false; // emit full tape records in reports
    int threads = 1;
};

void validate(const ConstructionParams& params);

enum class FailedProperty {
    undefinedness,
    energy_violated,
    volume_violated,
    flow_mismatch_only,
    none_detected,
};

const char* failed_property_name(FailedProperty p);

struct Verdict {
    FailedProperty failed_property = FailedProperty::none_detected;
    std::string evidence;
};

struct EnergySweepSummary {
    double max_error = 0.0;
    PhasePoint argmax;
    int count_above_tol = 0;
    int samples = 0;
};

struct DetSample {
    PhasePoint x;
    double det = 0.0;
    double det_err = 0.0;
};

struct SweepUndefined {
    PhasePoint x;
    UndefinedReason reason;
};

struct AbortInfo {
    Errc code;
    std::string message;
};

struct Certificate {
    std::string integrator;
    ConstructionParams params;

    QueryTape tape0;
    PhasePoint output_at_origin;
    double c = 0.0;
    double q0 = 0.0;
    QueryTape tape1;
    PhasePoint output_at_q0;
    BumpPotential potential;

    bool agrees_tape0 = false;
    bool agrees_tape1 = false;
    bool output_at_origin_match = false;
    bool output_at_q0_match = false;

    PhasePoint exact_flow_at_q0;
    double mismatch = 0.0;
    double mismatch_lower_bound = 0.0; // c dt - (exact position - q0)

    EnergySweepSummary energy_violations;
    std::vector<DetSample> det_sweep;
    std::vector<SweepUndefined> sweep_undefined;
    ContinuityReport continuity;

    Verdict verdict;
    std::optional<AbortInfo> abort;

    bool complete() const { return !abort.has_value(); }
};

/// An integrator under adversarial test. `run` steps a planar problem; a
/// reduced multi-degree-of-freedom integrator lifts internally, in which case
/// the tape holds lifted points and `lifted_spec` maps a planar Hamiltonian
/// to the spec those records actually queried.
struct PlanarIntegrator {
    std::function<StepResult(const HamiltonianSpec& planar, const PhasePoint& x, double dt,
                             QueryTape& tape)>
        run;
    std::function<HamiltonianSpec(const HamiltonianSpec& planar)> lifted_spec;
    std::string description;
};

PlanarIntegrator direct_integrator(IntegratorConfig config);

/// One traced step: the result plus the complete tape of that step.
std::pair<StepResult, QueryTape> run_traced(const IntegratorConfig& config,
                                            const HamiltonianSpec& spec, const PhasePoint& x,
                                            double dt);

/// Translation constant on the free particle: c = q_out/dt measured at (0,1).
/// Throws energy_not_conserved if |p_out - 1| > 1e-12, nonpositive_c if
/// c <= 0, map_undefined if the step is undefined.
double measure_c(const PhaseMap& map, double dt);
double measure_c(const IntegratorConfig& config, double dt);

/// Deterministic interval start: past c dt and every taped q-coordinate,
/// plus margin.
double select_q0(const QueryTape& tape0, double c, double dt, double margin);

/// Single mollifier bump centered in the largest gap of [interval_lo,
/// interval_hi] minus exclusion neighborhoods of the excluded coordinates;
/// radius 0.45x the gap, amplitude lambda. Throws no_room_for_bump when the
/// largest gap is below 4x the exclusion radius.
BumpPotential construct_adversarial_potential(double interval_lo, double interval_hi,
                                              const std::vector<double>& excluded_qs, double lambda,
                                              double exclusion_radius);

Certificate generate_certificate(const PlanarIntegrator& integrator,
                                 const ConstructionParams& params);
Certificate generate_certificate(const IntegratorConfig& config, const ConstructionParams& params);

/// Priority order: Undefinedness, then energy, then a localized determinant
/// deviation, then the flow mismatch alone (the translation-constant
/// contradiction, conclusive even when the determinant sweep is quiet).
Verdict evaluate_verdict(const Certificate& certificate, const VerdictThresholds& thresholds);

} // namespace hamadv
