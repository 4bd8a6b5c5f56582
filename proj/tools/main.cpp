#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "msteer/config.hpp"
#include "msteer/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"moment-space steering of agent ensembles"};
    std::string config_path;
    app.add_option("config", config_path, "run configuration file (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<int> nodes;
    std::optional<int> order;
    bool check = false;
    app.add_option("--seed", seed, "override the master seed");
    app.add_option("--output", output, "override the output directory");
    app.add_option("--nodes", nodes, "override the quadrature node count");
    app.add_option("--order", order, "override the moment order n");
    app.add_flag("--check", check, "plan only: probe feasibility without realizing densities");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream f(config_path);
        if (!f) {
            throw msteer::Error(msteer::ErrorCode::IoError, "cannot read " + config_path);
        }
        std::stringstream buffer;
        buffer << f.rdbuf();
        msteer::RunConfig cfg = msteer::parse_config(buffer.str());
        if (seed) {
            cfg.seed = *seed;
        }
        if (output) {
            cfg.output = *output;
        }
        if (nodes) {
            cfg.nodes = *nodes;
        }
        if (order) {
            cfg.order = *order;
        }
        cfg.check_only = check;

        const msteer::RunArtifacts artifacts = msteer::run(cfg);

        std::ifstream report(artifacts.directory / "report.txt");
        std::cout << report.rdbuf();
        std::cout << "artifacts: " << artifacts.directory.string() << " ("
                  << artifacts.files.size() << " files)\n";
        return 0;
    } catch (const msteer::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return msteer::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
