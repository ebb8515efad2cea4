#include "hamadv/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hamadv/parallel.hpp"
#include "hamadv/rng.hpp"

namespace hamadv {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) raise(Errc::validation_error, "unknown key \"" + it.key() + "\" in " + where);
    }
}

double get_number(const Json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        raise(Errc::validation_error, "\"" + std::string(key) + "\" must be a number in " + where);
    return j.at(key).get<double>();
}

int get_int(const Json& j, const char* key, int fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        raise(Errc::validation_error, "\"" + std::string(key) + "\" must be an integer in " + where);
    return j.at(key).get<int>();
}

bool get_bool(const Json& j, const char* key, bool fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean())
        raise(Errc::validation_error, "\"" + std::string(key) + "\" must be a boolean in " + where);
    return j.at(key).get<bool>();
}

GridSpec parse_grid(const Json& j, GridSpec defaults, const std::string& where) {
    reject_unknown(j, {"q_min", "q_max", "q_count", "p_min", "p_max", "p_count"}, where);
    GridSpec g = defaults;
    g.q_min = get_number(j, "q_min", g.q_min, where);
    g.q_max = get_number(j, "q_max", g.q_max, where);
    g.q_count = get_int(j, "q_count", g.q_count, where);
    g.p_min = get_number(j, "p_min", g.p_min, where);
    g.p_max = get_number(j, "p_max", g.p_max, where);
    g.p_count = get_int(j, "p_count", g.p_count, where);
    if (g.q_count < 1 || g.p_count < 1)
        raise(Errc::validation_error, where + ": grid counts must be >= 1");
    if (!(g.q_max >= g.q_min) || !(g.p_max >= g.p_min))
        raise(Errc::validation_error, where + ": grid ranges are inverted");
    return g;
}

std::optional<PhasePoint> parse_x0(const Json& j, const HamiltonianSpec& spec,
                                   const std::string& where) {
    if (!j.contains("x0")) return std::nullopt;
    PhasePoint x = phase_point_from_json(j.at("x0"));
    if (x.dim() != spec.dim())
        raise(Errc::validation_error, where + ": x0 dimension does not match the hamiltonian");
    return x;
}

ConstructionParams parse_adversary_params(const Json& j, double dt, const std::string& where) {
    reject_unknown(j,
                   {"lambda", "exclusion_radius", "q0_margin", "sweep", "thresholds", "fd_step",
                    "quad_tol", "continuity_delta", "full_tapes"},
                   where);
    ConstructionParams params;
    params.dt = dt;
    params.lambda = get_number(j, "lambda", params.lambda, where);
    if (j.contains("exclusion_radius"))
        params.exclusion_radius = get_number(j, "exclusion_radius", 0.0, where);
    if (j.contains("q0_margin")) params.q0_margin = get_number(j, "q0_margin", 0.0, where);
    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        reject_unknown(s, {"q_count", "p_count", "p_min", "p_max"}, where + ".sweep");
        params.sweep.q_count = get_int(s, "q_count", params.sweep.q_count, where);
        params.sweep.p_count = get_int(s, "p_count", params.sweep.p_count, where);
        params.sweep.p_min = get_number(s, "p_min", params.sweep.p_min, where);
        params.sweep.p_max = get_number(s, "p_max", params.sweep.p_max, where);
    }
    if (j.contains("thresholds")) {
        const Json& t = j.at("thresholds");
        reject_unknown(t, {"energy_tol", "det_tol", "mismatch_tol"}, where + ".thresholds");
        params.thresholds.energy_tol = get_number(t, "energy_tol", params.thresholds.energy_tol, where);
        params.thresholds.det_tol = get_number(t, "det_tol", params.thresholds.det_tol, where);
        params.thresholds.mismatch_tol =
            get_number(t, "mismatch_tol", params.thresholds.mismatch_tol, where);
    }
    params.fd_step = get_number(j, "fd_step", params.fd_step, where);
    params.quad_tol = get_number(j, "quad_tol", params.quad_tol, where);
    params.continuity_delta = get_number(j, "continuity_delta", params.continuity_delta, where);
    params.full_tapes = get_bool(j, "full_tapes", params.full_tapes, where);
    validate(params);
    return params;
}

Json grid_to_json(const GridSpec& g) {
    return Json{{"q_min", g.q_min}, {"q_max", g.q_max}, {"q_count", g.q_count},
                {"p_min", g.p_min}, {"p_max", g.p_max}, {"p_count", g.p_count}};
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        raise(Errc::parse_error, e.what());
    }
    if (!j.is_object()) raise(Errc::parse_error, "config must be a JSON object");
    reject_unknown(j, {"command", "integrator", "hamiltonian", "dt", "parameters", "output_dir", "seed"},
                   "config");

    ScenarioConfig config;
    if (!j.contains("command")) raise(Errc::validation_error, "config needs a \"command\"");
    config.command = j.at("command").get<std::string>();
    if (config.command != "integrate" && config.command != "diagnose" &&
        config.command != "adversary" && config.command != "multidof")
        raise(Errc::validation_error, "unknown command \"" + config.command + "\"");

    if (!j.contains("integrator")) raise(Errc::validation_error, "config needs an \"integrator\"");
    config.integrator = integrator_config_from_json(j.at("integrator"));

    if (!j.contains("hamiltonian")) raise(Errc::validation_error, "config needs a \"hamiltonian\"");
    config.hamiltonian = spec_from_json(j.at("hamiltonian"));

    if (!j.contains("dt")) raise(Errc::validation_error, "config needs \"dt\"");
    if (!j.at("dt").is_number()) raise(Errc::validation_error, "\"dt\" must be a number");
    config.dt = j.at("dt").get<double>();
    if (!(config.dt > 0.0) || !std::isfinite(config.dt))
        raise(Errc::validation_error, "\"dt\" must be positive and finite");

    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            raise(Errc::validation_error, "\"seed\" must be an integer");
        config.seed = j.at("seed").get<std::uint64_t>();
    }

    const Json params = j.contains("parameters") ? j.at("parameters") : Json::object();
    if (!params.is_object()) raise(Errc::validation_error, "\"parameters\" must be an object");

    if (config.command == "integrate") {
        reject_unknown(params, {"n_steps", "x0"}, "integrate parameters");
        config.integrate.n_steps = get_int(params, "n_steps", 100, "integrate parameters");
        if (config.integrate.n_steps < 1)
            raise(Errc::validation_error, "\"n_steps\" must be >= 1");
        config.integrate.x0 = parse_x0(params, config.hamiltonian, "integrate parameters");
    } else if (config.command == "diagnose") {
        reject_unknown(params, {"grid", "fd_step", "n_steps", "x0"}, "diagnose parameters");
        if (!config.hamiltonian.is_planar())
            raise(Errc::validation_error, "diagnose requires a planar hamiltonian");
        if (params.contains("grid"))
            config.diagnose.grid = parse_grid(params.at("grid"), GridSpec{}, "diagnose grid");
        config.diagnose.fd_step = get_number(params, "fd_step", 1e-5, "diagnose parameters");
        if (!(config.diagnose.fd_step > 0.0))
            raise(Errc::validation_error, "\"fd_step\" must be positive");
        config.diagnose.n_steps = get_int(params, "n_steps", 100, "diagnose parameters");
        if (config.diagnose.n_steps < 1) raise(Errc::validation_error, "\"n_steps\" must be >= 1");
        config.diagnose.x0 = parse_x0(params, config.hamiltonian, "diagnose parameters");
    } else if (config.command == "adversary") {
        if (config.hamiltonian.kind() != HamiltonianKind::free_particle)
            raise(Errc::validation_error,
                  "the adversary construction starts from the free particle; set "
                  "hamiltonian.variant = \"free_particle\"");
        config.adversary = parse_adversary_params(params, config.dt, "adversary parameters");
    } else { // multidof
        reject_unknown(params, {"kind", "n", "samples", "box", "adversary"}, "multidof parameters");
        if (!config.hamiltonian.is_planar())
            raise(Errc::validation_error, "multidof takes the planar inner hamiltonian");
        if (!params.contains("kind"))
            raise(Errc::validation_error, "multidof parameters need \"kind\"");
        const std::string kind = params.at("kind").get<std::string>();
        if (kind == "single")
            config.multidof.kind = LiftKind::single;
        else if (kind == "product")
            config.multidof.kind = LiftKind::product;
        else
            raise(Errc::validation_error, "unknown lift kind \"" + kind + "\"");
        config.multidof.n = get_int(params, "n", 2, "multidof parameters");
        if (config.multidof.n < 2) raise(Errc::validation_error, "\"n\" must be >= 2");
        config.multidof.samples = get_int(params, "samples", 8, "multidof parameters");
        if (config.multidof.samples < 1) raise(Errc::validation_error, "\"samples\" must be >= 1");
        if (params.contains("box"))
            config.multidof.box = parse_grid(params.at("box"), GridSpec{}, "multidof box");
        config.multidof.adversary = parse_adversary_params(
            params.contains("adversary") ? params.at("adversary") : Json::object(), config.dt,
            "multidof adversary parameters");
    }
    return config;
}

namespace {

PhasePoint default_x0(const HamiltonianSpec& spec) {
    PhasePoint x;
    x.q.assign(spec.dim(), 0.0);
    x.p.assign(spec.dim(), 1.0);
    return x;
}

Json parameters_echo(const ScenarioConfig& config) {
    if (config.command == "integrate") {
        Json j{{"n_steps", config.integrate.n_steps}};
        j["x0"] = to_json(config.integrate.x0 ? *config.integrate.x0 : default_x0(config.hamiltonian));
        return j;
    }
    if (config.command == "diagnose") {
        Json j{{"grid", grid_to_json(config.diagnose.grid)},
               {"fd_step", config.diagnose.fd_step},
               {"n_steps", config.diagnose.n_steps}};
        j["x0"] = to_json(config.diagnose.x0 ? *config.diagnose.x0 : default_x0(config.hamiltonian));
        return j;
    }
    if (config.command == "adversary") return to_json(config.adversary);
    Json j{{"kind", lift_kind_name(config.multidof.kind)},
           {"n", config.multidof.n},
           {"samples", config.multidof.samples},
           {"box", grid_to_json(config.multidof.box)},
           {"adversary", to_json(config.multidof.adversary)}};
    return j;
}

Json run_integrate(const ScenarioConfig& config) {
    const PhasePoint x0 = config.integrate.x0 ? *config.integrate.x0 : default_x0(config.hamiltonian);
    const std::vector<StepResult> trajectory =
        iterate(config.integrator, config.hamiltonian, x0, config.dt, config.integrate.n_steps);
    Json points = Json::array();
    const double e0 = hamiltonian_value(config.hamiltonian, x0);
    double drift = 0.0;
    Json undefined_reason;
    for (const StepResult& r : trajectory) {
        if (!r.is_defined()) {
            undefined_reason = reason_name(r.reason());
            break;
        }
        points.push_back(to_json(r.point()));
        drift = std::max(drift, std::fabs(hamiltonian_value(config.hamiltonian, r.point()) - e0));
    }
    return Json{{"trajectory", std::move(points)},
                {"steps_completed", undefined_reason.is_null()
                                        ? trajectory.size()
                                        : trajectory.size() - 1},
                {"undefined_reason", undefined_reason},
                {"energy_drift", drift}};
}

struct DiagnoseOutput {
    Json payload;
    std::vector<DetSample> sweep;
};

DiagnoseOutput run_diagnose(const ScenarioConfig& config, int threads) {
    const DiagnoseParams& params = config.diagnose;
    const PhaseMap map = step_map(config.integrator, config.hamiltonian, config.dt);

    const int nq = params.grid.q_count;
    const int np = params.grid.p_count;
    const std::int64_t cells = static_cast<std::int64_t>(nq) * np;
    std::vector<DetSample> samples(cells);
    std::vector<unsigned char> defined(cells, 0);
    parallel_for(cells, threads, [&](std::int64_t idx) {
        const int iq = static_cast<int>(idx % nq);
        const int ip = static_cast<int>(idx / nq);
        const double q = nq == 1 ? params.grid.q_min
                                 : params.grid.q_min +
                                       (params.grid.q_max - params.grid.q_min) * iq / (nq - 1);
        const double p = np == 1 ? params.grid.p_min
                                 : params.grid.p_min +
                                       (params.grid.p_max - params.grid.p_min) * ip / (np - 1);
        const PhasePoint x = PhasePoint::planar(q, p);
        try {
            const JacobianReport jr = jacobian(map, x, params.fd_step);
            samples[idx] = DetSample{x, jr.determinant, jr.error_estimate};
            defined[idx] = 1;
        } catch (const Error& e) {
            if (e.code() != Errc::stencil_undefined) throw;
        }
    });

    DiagnoseOutput out;
    double max_dev = 0.0;
    double max_err = 0.0;
    PhasePoint argmax = PhasePoint::planar(params.grid.q_min, params.grid.p_min);
    int undefined_points = 0;
    for (std::int64_t idx = 0; idx < cells; ++idx) {
        if (!defined[idx]) {
            ++undefined_points;
            continue;
        }
        const DetSample& s = samples[idx];
        out.sweep.push_back(s);
        if (std::fabs(s.det - 1.0) > max_dev) {
            max_dev = std::fabs(s.det - 1.0);
            argmax = s.x;
        }
        max_err = std::max(max_err, s.det_err);
    }

    const PhasePoint x0 = params.x0 ? *params.x0 : default_x0(config.hamiltonian);
    const EnergyDriftReport drift = energy_drift(map, config.hamiltonian, x0, params.n_steps);

    out.payload = Json{{"det_summary", Json{{"max_abs_det_minus_one", max_dev},
                                            {"argmax", to_json(argmax)},
                                            {"max_det_err", max_err},
                                            {"samples", out.sweep.size()},
                                            {"undefined_points", undefined_points}}},
                       {"energy_drift", to_json(drift)}};
    return out;
}

struct MultidofOutput {
    Json payload;
    const Certificate* certificate = nullptr; // lifetime owned by caller
};

Json run_multidof(const ScenarioConfig& config, int threads, Certificate& cert_out) {
    const MultidofParams& params = config.multidof;
    const HamiltonianSpec lifted = lift(config.hamiltonian, params.kind, params.n);

    // seeded sample points in the box
    Rng rng(config.seed);
    std::vector<PhasePoint> samples;
    samples.reserve(static_cast<std::size_t>(params.samples));
    for (int k = 0; k < params.samples; ++k) {
        PhasePoint x;
        x.q.resize(params.n);
        x.p.resize(params.n);
        for (int i = 0; i < params.n; ++i) x.q[i] = rng.uniform(params.box.q_min, params.box.q_max);
        for (int i = 0; i < params.n; ++i) x.p[i] = rng.uniform(params.box.p_min, params.box.p_max);
        samples.push_back(std::move(x));
    }

    Json condition;
    if (params.kind == LiftKind::single) {
        condition = to_json(
            check_condition_untouched(config.integrator, lifted, samples, config.dt));
    } else {
        condition =
            to_json(check_condition_product(config.integrator, lifted, samples, config.dt));
    }

    const PhaseMap lifted_map = step_map(config.integrator, lifted, config.dt);
    const BlockJacobianReport blocks =
        jacobian_block_report(lifted_map, samples.front(), config.multidof.adversary.fd_step,
                              params.kind == LiftKind::single ? BlockPattern::single
                                                              : BlockPattern::product);

    ConstructionParams adv = params.adversary;
    adv.threads = threads;
    cert_out = generate_certificate(reduce_to_planar(config.integrator, params.kind, params.n), adv);

    return Json{{"kind", lift_kind_name(params.kind)},
                {"n", params.n},
                {"condition", std::move(condition)},
                {"block_jacobian", to_json(blocks)},
                {"certificate", to_json(cert_out)}};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) raise(Errc::io_error, "failed writing " + path.string());
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_override,
                            int threads) {
    ScenarioResult result;
    const std::filesystem::path out_dir =
        out_override.empty() ? std::filesystem::path(config.output_dir)
                             : std::filesystem::path(out_override);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        raise(Errc::io_error, "output directory " + out_dir.string() + " is not writable");
    }

    Json report{{"command", config.command},
                {"config", Json{{"command", config.command},
                                {"integrator", to_json(config.integrator)},
                                {"hamiltonian", to_json(config.hamiltonian)},
                                {"dt", config.dt},
                                {"parameters", parameters_echo(config)},
                                {"seed", config.seed}}}};

    std::string csv;
    try {
        if (config.command == "integrate") {
            report["report"] = run_integrate(config);
        } else if (config.command == "diagnose") {
            DiagnoseOutput out = run_diagnose(config, threads);
            report["report"] = std::move(out.payload);
            csv = det_sweep_csv(out.sweep);
        } else if (config.command == "adversary") {
            ConstructionParams params = config.adversary;
            params.threads = threads;
            const Certificate cert = generate_certificate(config.integrator, params);
            report["report"] = to_json(cert);
            if (cert.complete()) {
                csv = det_sweep_csv(cert.det_sweep);
                result.exit_code =
                    cert.verdict.failed_property == FailedProperty::none_detected ? 0 : 2;
            } else {
                result.exit_code = 1;
            }
        } else if (config.command == "multidof") {
            Certificate cert;
            report["report"] = run_multidof(config, threads, cert);
            if (cert.complete()) {
                csv = det_sweep_csv(cert.det_sweep);
                result.exit_code =
                    cert.verdict.failed_property == FailedProperty::none_detected ? 0 : 2;
            } else {
                result.exit_code = 1;
            }
        }
    } catch (const Error& e) {
        report["report"] = nullptr;
        report["error"] = Json{{"code", errc_name(e.code())}, {"message", e.what()}};
        result.exit_code = 1;
    }

    const std::filesystem::path report_path = out_dir / "report.json";
    write_file(report_path, report.dump(2) + "\n");
    result.files_written.push_back(report_path.string());
    if (!csv.empty()) {
        const std::filesystem::path csv_path = out_dir / "sweep.csv";
        write_file(csv_path, csv);
        result.files_written.push_back(csv_path.string());
    }
    result.report = std::move(report);
    return result;
}

} // namespace hamadv
