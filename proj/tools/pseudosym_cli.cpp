// Command-line front end: pseudosym <command> [options]

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pseudosym/commands.hpp"

int main(int argc, char** argv)
{
    using pseudosym::RunConfig;

    CLI::App app{"Symplecticity defect of fixed-point-iterated Symplectic Euler and Stormer-Verlet schemes"};
    app.require_subcommand(1);
    // -h would collide with the step-size flag --h.
    app.set_help_flag("--help", "Print this help message and exit");

    std::string config_path;
    bool full_scale = false;
    // Flag values are kept as text and applied through the same parser as
    // config files, after the file.
    std::map<std::string, std::string> overrides;
    const std::pair<const char*, const char*> value_flags[] = {
        {"out", "Output CSV path (default: standard output)"},
        {"hamiltonian", "quadratic | tokamak | harmonic"},
        {"scheme", "p-implicit | q-implicit | sv-pq | sv-qp | linear-implicit | exact-se"},
        {"N", "Degrees of freedom (quadratic, harmonic)"},
        {"M", "Fixed-point iterations (single value)"},
        {"M1", "Iterations of the first Stormer-Verlet half step"},
        {"M2", "Iterations of the second Stormer-Verlet half step"},
        {"h", "Step size (T0 units for the tokamak)"},
        {"steps", "Number of steps"},
        {"stride", "Sampling stride"},
        {"h-min", "Smallest step size of a sweep"},
        {"h-max", "Largest step size of a sweep"},
        {"h-count", "Number of log-spaced step sizes"},
        {"jobs", "Worker threads for sweeps (0: all)"},
    };

    const std::map<std::string, std::string> descriptions{
        {"trajectory", "Integrate one trajectory and write states and energies"},
        {"defect-sweep", "Defect norms over a step-size grid, with log-log fits"},
        {"jtilde", "Print (D Phi)^T J (D Phi) for one step"},
        {"energy-drift", "Long-run energy error of the tokamak schemes"},
        {"optimality", "Compare measured quadratic-model blocks with the closed form"},
        {"sv-orders", "Fitted decay orders of the Stormer-Verlet perturbation blocks"},
        {"volume", "det D Phi against det A over a step-size grid"},
        {"selftest", "Quick internal consistency checks"},
    };
    for (const auto& name : pseudosym::command_names()) {
        const auto d = descriptions.find(std::string(name));
        CLI::App* sub = app.add_subcommand(std::string(name), d == descriptions.end() ? "" : d->second);
        sub->add_option("--config", config_path, "key = value config file");
        for (const auto& [flag, help] : value_flags) {
            sub->add_option_function<std::string>(
                std::string("--") + flag,
                [&overrides, key = std::string(flag)](const std::string& v) { overrides[key] = v; }, help);
        }
        sub->add_flag("--full-scale", full_scale, "Long energy drift run (3e6 steps)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = pseudosym::load_config_file(config_path);
        }
        for (const auto& [flag, value] : overrides) {
            std::string key = flag;
            for (char& c : key) {
                if (c == '-') c = '_';
            }
            pseudosym::apply_setting(cfg, key, value);
        }
        if (full_scale) cfg.full_scale = true;
    } catch (const pseudosym::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    return pseudosym::run_command(command, cfg, std::cout, std::cerr);
}
