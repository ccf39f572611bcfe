#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lcrl/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation lab for continuous-time episodic RL with linear-convex models"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {"pege-run",        "regret-scan", "gap-scan",
                                                  "concentration",   "incomplete-demo", "orlicz",
                                                  "riccati-check",   "hjb-check"};

    std::string config_path;
    std::string out_dir = "out";
    int seeds_override = 0;
    int threads = 1;

    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "path to the experiment JSON config")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seeds", seeds_override, "override the seed count (base kept from config)");
        sub->add_option("--threads", threads, "worker threads for seed fan-out");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string chosen = app.get_subcommands().front()->get_name();

    try {
        lcrl::ExperimentConfig cfg = lcrl::load_experiment_config(config_path);
        if (cfg.experiment != chosen)
            throw std::invalid_argument("config declares experiment '" + cfg.experiment +
                                        "' but subcommand is '" + chosen + "'");
        if (seeds_override > 0) {
            std::uint64_t base = cfg.seeds.front();
            cfg.seeds.clear();
            for (int i = 0; i < seeds_override; ++i) cfg.seeds.push_back(base + i);
            cfg.resolved["seeds"] = cfg.seeds;
            cfg.hash = lcrl::config_hash_hex(cfg.resolved);
        }
        nlohmann::json summary = lcrl::write_experiment_outputs(cfg, out_dir, threads);
        std::cout << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
