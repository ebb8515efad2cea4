// hamadv — batch front-end for the Hamiltonian integrator verification
// toolkit. One scenario per invocation:
//
//   hamadv <integrate|diagnose|adversary|multidof> --config <file> [--out <dir>] [--threads N]
//
// Exit codes: 0 clean, 2 when a certificate's verdict names a violated
// property, 1 on operational errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hamadv/scenario.hpp"

namespace {

int default_threads() {
    if (const char* env = std::getenv("HAMADV_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) hamadv::raise(hamadv::Errc::io_error, "cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hamadv — verification toolkit for Hamiltonian ODE integrators"};
    app.require_subcommand(1);
    app.footer("sweep.csv columns: q, p, det, det_err (17 significant digits).\n"
               "HAMADV_THREADS is the fallback when --threads is not given.");

    std::string config_path;
    std::string out_dir;
    int threads = default_threads();

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario config JSON file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config output_dir)");
        sub->add_option("--threads", threads, "sweep worker threads (default: cores)");
    };

    add_common(app.add_subcommand("integrate", "run a trajectory and report it"));
    add_common(app.add_subcommand("diagnose", "sweep Jacobian determinants and energy drift"));
    add_common(app.add_subcommand("adversary",
                                  "construct an adversarial bump Hamiltonian and certify the "
                                  "violated property"));
    add_common(app.add_subcommand("multidof", "lifted condition checks plus the reduced adversary"));

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        hamadv::ScenarioConfig config = hamadv::parse_config(read_file(config_path));
        if (config.command != command)
            hamadv::raise(hamadv::Errc::validation_error,
                          "config command \"" + config.command + "\" does not match subcommand \"" +
                              command + "\"");
        const hamadv::ScenarioResult result = hamadv::run_scenario(config, out_dir, threads);
        for (const std::string& f : result.files_written) std::cout << f << "\n";
        return result.exit_code;
    } catch (const hamadv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
