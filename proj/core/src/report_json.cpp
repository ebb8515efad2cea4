#include "hamadv/report_json.hpp"

#include <cstdio>

namespace hamadv {

namespace {

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            raise(Errc::validation_error, "unknown key \"" + it.key() + "\" in " + where);
    }
}

double number_field(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) raise(Errc::validation_error, "missing \"" + std::string(key) + "\" in " + where);
    const Json& v = j.at(key);
    if (!v.is_number()) raise(Errc::validation_error, "\"" + std::string(key) + "\" must be a number in " + where);
    return v.get<double>();
}

} // namespace

Json to_json(const PhasePoint& x) { return Json{{"q", x.q}, {"p", x.p}}; }

PhasePoint phase_point_from_json(const Json& j) {
    require_keys(j, {"q", "p"}, "phase point");
    PhasePoint x;
    x.q = j.at("q").get<std::vector<double>>();
    x.p = j.at("p").get<std::vector<double>>();
    validate(x);
    return x;
}

Json to_json(const BumpPotential& potential) {
    Json bumps = Json::array();
    for (const Bump& b : potential.bumps())
        bumps.push_back(Json{{"center", b.center}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    return bumps;
}

BumpPotential bump_potential_from_json(const Json& j) {
    if (!j.is_array()) raise(Errc::validation_error, "bumps must be an array");
    std::vector<Bump> bumps;
    for (const Json& e : j) {
        require_keys(e, {"center", "radius", "amplitude"}, "bump");
        bumps.push_back(Bump{number_field(e, "center", "bump"), number_field(e, "radius", "bump"),
                             number_field(e, "amplitude", "bump")});
    }
    return BumpPotential(std::move(bumps));
}

Json to_json(const HamiltonianSpec& spec) {
    Json j{{"variant", kind_name(spec.kind())}};
    switch (spec.kind()) {
        case HamiltonianKind::free_particle: break;
        case HamiltonianKind::harmonic: j["omega"] = spec.omega(); break;
        case HamiltonianKind::separable_bump: j["bumps"] = to_json(spec.potential()); break;
        case HamiltonianKind::lift_single:
        case HamiltonianKind::lift_product:
            j["n"] = spec.dim();
            j["inner"] = to_json(spec.inner());
            break;
    }
    return j;
}

HamiltonianSpec spec_from_json(const Json& j) {
    if (!j.is_object()) raise(Errc::validation_error, "hamiltonian must be an object");
    if (!j.contains("variant")) raise(Errc::validation_error, "hamiltonian needs a \"variant\"");
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "free_particle") {
        require_keys(j, {"variant"}, "hamiltonian");
        return HamiltonianSpec::free_particle();
    }
    if (variant == "harmonic") {
        require_keys(j, {"variant", "omega"}, "hamiltonian");
        return HamiltonianSpec::harmonic(number_field(j, "omega", "hamiltonian"));
    }
    if (variant == "separable_bump") {
        require_keys(j, {"variant", "bumps"}, "hamiltonian");
        if (!j.contains("bumps")) raise(Errc::validation_error, "separable_bump needs \"bumps\"");
        return HamiltonianSpec::separable_bump(bump_potential_from_json(j.at("bumps")));
    }
    if (variant == "lift_single" || variant == "lift_product") {
        require_keys(j, {"variant", "n", "inner"}, "hamiltonian");
        if (!j.contains("n") || !j.at("n").is_number_integer())
            raise(Errc::validation_error, "lift needs integer \"n\"");
        if (!j.contains("inner")) raise(Errc::validation_error, "lift needs \"inner\"");
        const HamiltonianSpec inner = spec_from_json(j.at("inner"));
        const int n = j.at("n").get<int>();
        return variant == "lift_single" ? HamiltonianSpec::lift_single(inner, n)
                                        : HamiltonianSpec::lift_product(inner, n);
    }
    raise(Errc::validation_error, "unknown hamiltonian variant \"" + variant + "\"");
}

Json to_json(const IntegratorConfig& config) {
    Json j{{"method", method_name(config.method)},
           {"solver_tol", config.solver_tol},
           {"max_iters", config.max_iters}};
    if (config.base) j["base"] = method_name(*config.base);
    if (config.method == Method::implicit_midpoint) {
        j["solver"] = config.solver == ImplicitSolver::newton ? "newton" : "fixed_point";
        j["damping"] = config.damping;
    }
    return j;
}

IntegratorConfig integrator_config_from_json(const Json& j) {
    if (!j.is_object()) raise(Errc::validation_error, "integrator must be an object");
    require_keys(j, {"method", "base", "solver_tol", "max_iters", "solver", "damping"}, "integrator");
    IntegratorConfig config;
    if (!j.contains("method")) raise(Errc::validation_error, "integrator needs a \"method\"");
    const std::string name = j.at("method").get<std::string>();
    const auto m = method_from_name(name);
    if (!m) raise(Errc::validation_error, "unknown method \"" + name + "\"");
    config.method = *m;
    if (j.contains("base")) {
        const std::string base_name = j.at("base").get<std::string>();
        const auto b = method_from_name(base_name);
        if (!b) raise(Errc::validation_error, "unknown base method \"" + base_name + "\"");
        config.base = *b;
    }
    if (j.contains("solver_tol")) config.solver_tol = number_field(j, "solver_tol", "integrator");
    if (j.contains("max_iters")) {
        if (!j.at("max_iters").is_number_integer())
            raise(Errc::validation_error, "\"max_iters\" must be an integer");
        config.max_iters = j.at("max_iters").get<int>();
    }
    if (j.contains("solver")) {
        const std::string s = j.at("solver").get<std::string>();
        if (s == "newton")
            config.solver = ImplicitSolver::newton;
        else if (s == "fixed_point")
            config.solver = ImplicitSolver::fixed_point;
        else
            raise(Errc::validation_error, "unknown solver \"" + s + "\"");
    }
    if (j.contains("damping")) config.damping = number_field(j, "damping", "integrator");
    validate(config);
    return config;
}

Json to_json(const QueryTape& tape, bool full_records) {
    Json j;
    j["length"] = tape.size();
    j["q_coordinates"] = tape.q_coordinates();
    if (full_records) {
        Json records = Json::array();
        for (const QueryRecord& r : tape.records())
            records.push_back(Json{{"point", to_json(r.point)}, {"alpha", r.alpha.alpha},
                                   {"value", r.value}});
        j["records"] = std::move(records);
    }
    return j;
}

Json to_json(const JacobianReport& report) {
    Json rows = Json::array();
    for (int r = 0; r < report.matrix.rows; ++r) {
        Json row = Json::array();
        for (int c = 0; c < report.matrix.cols; ++c) row.push_back(report.matrix.at(r, c));
        rows.push_back(std::move(row));
    }
    return Json{{"matrix", std::move(rows)},
                {"determinant", report.determinant},
                {"fd_step", report.fd_step},
                {"error_estimate", report.error_estimate}};
}

Json to_json(const TranslationReport& report) {
    return Json{{"c_mean", report.c_mean},
                {"c_spread", report.c_spread},
                {"p_deviation", report.p_deviation},
                {"c_samples", report.c_samples}};
}

Json to_json(const ConsistencyReport& report) {
    Json j{{"dts", report.dts},
           {"ratios", report.ratios},
           {"errors", report.errors},
           {"passed", report.passed}};
    if (std::isnan(report.fitted_order))
        j["fitted_order"] = nullptr;
    else
        j["fitted_order"] = report.fitted_order;
    return j;
}

Json to_json(const EnergyDriftReport& report) {
    return Json{{"max_drift", report.max_drift},
                {"steps_completed", report.steps_completed},
                {"undefined_encountered", report.undefined_encountered}};
}

Json to_json(const ContinuityReport& report) {
    return Json{{"delta", report.delta},
                {"max_local_lipschitz", report.max_local_lipschitz},
                {"samples", report.samples},
                {"undefined_points", report.undefined_points},
                {"falsified_at_resolution", false}};
}

Json to_json(const Verdict& verdict) {
    return Json{{"failed_property", failed_property_name(verdict.failed_property)},
                {"evidence", verdict.evidence}};
}

Json to_json(const ConstructionParams& params) {
    Json j{{"dt", params.dt},
           {"lambda", params.lambda},
           {"sweep", Json{{"q_count", params.sweep.q_count},
                          {"p_count", params.sweep.p_count},
                          {"p_min", params.sweep.p_min},
                          {"p_max", params.sweep.p_max}}},
           {"thresholds", Json{{"energy_tol", params.thresholds.energy_tol},
                               {"det_tol", params.thresholds.det_tol},
                               {"mismatch_tol", params.thresholds.mismatch_tol}}},
           {"fd_step", params.fd_step},
           {"quad_tol", params.quad_tol},
           {"continuity_delta", params.continuity_delta},
           {"full_tapes", params.full_tapes}};
    if (params.exclusion_radius) j["exclusion_radius"] = *params.exclusion_radius;
    if (params.q0_margin) j["q0_margin"] = *params.q0_margin;
    return j;
}

Json to_json(const Certificate& certificate) {
    Json j;
    j["integrator"] = certificate.integrator;
    j["params"] = to_json(certificate.params);
    if (!certificate.complete()) {
        j["status"] = "aborted";
        j["abort"] = Json{{"error", errc_name(certificate.abort->code)},
                          {"message", certificate.abort->message}};
        return j;
    }
    j["status"] = "complete";
    j["c"] = certificate.c;
    j["q0"] = certificate.q0;
    j["potential"] = to_json(certificate.potential);
    j["tape0"] = to_json(certificate.tape0, certificate.params.full_tapes);
    j["tape1"] = to_json(certificate.tape1, certificate.params.full_tapes);
    j["output_at_origin"] = to_json(certificate.output_at_origin);
    j["output_at_q0"] = to_json(certificate.output_at_q0);
    j["exact_flow_at_q0"] = to_json(certificate.exact_flow_at_q0);
    j["agrees_tape0"] = certificate.agrees_tape0;
    j["agrees_tape1"] = certificate.agrees_tape1;
    j["output_at_origin_match"] = certificate.output_at_origin_match;
    j["output_at_q0_match"] = certificate.output_at_q0_match;
    j["mismatch"] = certificate.mismatch;
    j["mismatch_lower_bound"] = certificate.mismatch_lower_bound;
    j["energy_sweep"] = Json{{"max_error", certificate.energy_violations.max_error},
                             {"argmax", certificate.energy_violations.samples > 0
                                            ? to_json(certificate.energy_violations.argmax)
                                            : Json()},
                             {"count_above_tol", certificate.energy_violations.count_above_tol},
                             {"samples", certificate.energy_violations.samples}};
    Json det = Json::array();
    for (const DetSample& s : certificate.det_sweep)
        det.push_back(Json{{"q", s.x.q[0]}, {"p", s.x.p[0]}, {"det", s.det}, {"det_err", s.det_err}});
    j["det_sweep"] = std::move(det);
    Json undef = Json::array();
    for (const SweepUndefined& u : certificate.sweep_undefined)
        undef.push_back(Json{{"point", to_json(u.x)}, {"reason", reason_name(u.reason)}});
    j["sweep_undefined"] = std::move(undef);
    j["continuity"] = to_json(certificate.continuity);
    j["verdict"] = to_json(certificate.verdict);
    return j;
}

Json to_json(const UntouchedReport& report) {
    return Json{{"max_deviation", report.max_deviation}, {"samples", report.samples}};
}

Json to_json(const ProductReport& report) {
    return Json{{"max_cross_deviation", report.max_cross_deviation}, {"samples", report.samples}};
}

Json to_json(const BlockJacobianReport& report) {
    Json rows = Json::array();
    for (int r = 0; r < report.jacobian.rows; ++r) {
        Json row = Json::array();
        for (int c = 0; c < report.jacobian.cols; ++c) row.push_back(report.jacobian.at(r, c));
        rows.push_back(std::move(row));
    }
    return Json{{"block_dets", report.block_dets},
                {"off_block_norm", report.off_block_norm},
                {"pattern", report.pattern == BlockPattern::single ? "single" : "product"},
                {"jacobian", std::move(rows)},
                {"fd_step", report.fd_step}};
}

std::string det_sweep_csv(const std::vector<DetSample>& sweep) {
    std::string out = "q,p,det,det_err\n";
    char buf[160];
    for (const DetSample& s : sweep) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.x.q[0], s.x.p[0], s.det,
                      s.det_err);
        out += buf;
    }
    return out;
}

} // namespace hamadv
