#pragma once
// JSON encodings for specs, configs, reports and certificates. Round-trips
// are lossless: doubles are emitted with shortest-exact decimal digits and
// parse back to the identical bit pattern.

#include <string>

#include <json.hpp>

#include "hamadv/adversary.hpp"
#include "hamadv/diagnostics.hpp"
#include "hamadv/hamiltonian.hpp"
#include "hamadv/integrators.hpp"
#include "hamadv/multidof.hpp"

namespace hamadv {

using Json = nlohmann::json;

Json to_json(const PhasePoint& x);
PhasePoint phase_point_from_json(const Json& j);

Json to_json(const BumpPotential& potential);
BumpPotential bump_potential_from_json(const Json& j);

Json to_json(const HamiltonianSpec& spec);
HamiltonianSpec spec_from_json(const Json& j);

Json to_json(const IntegratorConfig& config);
IntegratorConfig integrator_config_from_json(const Json& j);

Json to_json(const QueryTape& tape, bool full_records);
Json to_json(const JacobianReport& report);
Json to_json(const TranslationReport& report);
Json to_json(const ConsistencyReport& report);
Json to_json(const EnergyDriftReport& report);
Json to_json(const ContinuityReport& report);
Json to_json(const Verdict& verdict);
Json to_json(const ConstructionParams& params);
Json to_json(const Certificate& certificate);
Json to_json(const UntouchedReport& report);
Json to_json(const ProductReport& report);
Json to_json(const BlockJacobianReport& report);

/// det-sweep CSV with 17-significant-digit decimals; columns q, p, det, det_err.
std::string det_sweep_csv(const std::vector<DetSample>& sweep);

} // namespace hamadv
