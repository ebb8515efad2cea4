#pragma once
// Scenario configs and the batch runner behind the CLI: parse a JSON config,
// run one pipeline, write report.json (and sweep.csv where applicable).
//
// Exit codes: 0 clean, 2 when a certificate's verdict names a violated
// property, 1 on operational errors (which are still serialized into
// report.json when the output directory is writable).

#include <cstdint>
#include <string>

#include "hamadv/multidof.hpp"
#include "hamadv/report_json.hpp"

namespace hamadv {

struct GridSpec {
    double q_min = -1.0;
    double q_max = 1.0;
    int q_count = 16;
    double p_min = 0.5;
    double p_max = 1.5;
    int p_count = 8;
};

struct IntegrateParams {
    int n_steps = 100;
    std::optional<PhasePoint> x0;
};

struct DiagnoseParams {
    GridSpec grid;
    double fd_step = 1e-5;
    int n_steps = 100;
    std::optional<PhasePoint> x0;
};

struct MultidofParams {
    LiftKind kind = LiftKind::single;
    int n = 2;
    int samples = 8;
    GridSpec box;
    ConstructionParams adversary;
};

struct ScenarioConfig {
    std::string command; // integrate | diagnose | adversary | multidof
    IntegratorConfig integrator;
    HamiltonianSpec hamiltonian = HamiltonianSpec::free_particle();
    double dt = 0.1;
    std::string output_dir = ".";
    std::uint64_t seed = 0;

    // parameters of the active command, defaults filled
    IntegrateParams integrate;
    DiagnoseParams diagnose;
    ConstructionParams adversary;
    MultidofParams multidof;
};

/// Strict parse: unknown keys rejected by name, defaults filled, invariants
/// checked. Throws Error(parse_error) on malformed JSON and
/// Error(validation_error) naming the offending field.
ScenarioConfig parse_config(const std::string& text);

struct ScenarioResult {
    int exit_code = 0;
    Json report;
    std::vector<std::string> files_written;
};

/// Runs the scenario and writes its report files under the output directory
/// (out_override, when non-empty, wins over config.output_dir). Reports are
/// byte-identical for identical configs regardless of thread count.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_override = "",
                            int threads = 1);

} // namespace hamadv
