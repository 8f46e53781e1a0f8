// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - link-level simulation toolkit for cell-free massive MIMO
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cfmimo/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

int run_scenario(cfmimo::ExperimentConfig cfg, const std::string& out, const std::string& cdf) {
    using namespace cfmimo;
    if (!out.empty()) cfg.out_path = out;
    ResultTable table = run_experiment(cfg, cfg.out_path, 10, true);
    write_file(cfg.out_path, csv_string(table));
    std::fprintf(stderr, "wrote %s (%zu rows)\n", cfg.out_path.c_str(), table.rows.size());
    const std::string metric = !cdf.empty() ? cdf : cfg.cdf_metric;
    if (!metric.empty()) {
        const std::string path = cfg.out_path + "." + metric + ".cdf";
        emit_cdf(table, metric, path);
        std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
    if (cfg.scenario == Scenario::LEMMAS) {
        for (const auto& r : table.rows)
            std::printf("%-24s statistic=%-14.6g target=%-14.6g tol=%-12.4g %s\n",
                        r.scheme.c_str(), r.values[0], r.values[1], r.values[2],
                        r.values[3] > 0.5 ? "pass" : "FAIL");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfsim - cell-free massive MIMO link-level simulator"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_path, cdf_metric;
    long trials = -1;
    int seeds = -1, workers = -1;
    long long master_seed = -1;

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", config_path, "config file (key = value text, or .json)");
        sc->add_option("--preset", preset_name, "figure preset: fig4 fig6 fig8 fig9 fig10");
        sc->add_option("--trials", trials, "Monte Carlo trials per seed");
        sc->add_option("--seeds", seeds, "number of network drops");
        sc->add_option("--master-seed", master_seed, "master RNG seed");
        sc->add_option("--workers", workers, "worker threads");
        sc->add_option("--out", out_path, "output CSV path");
        sc->add_option("--cdf", cdf_metric, "emit a CDF file for this metric");
    };

    const std::vector<std::pair<std::string, cfmimo::Scenario>> scenarios = {
        {"dl", cfmimo::Scenario::DL},     {"ul", cfmimo::Scenario::UL},
        {"nafd", cfmimo::Scenario::NAFD}, {"noma", cfmimo::Scenario::NOMA},
        {"pls", cfmimo::Scenario::PLS},   {"eh", cfmimo::Scenario::EH},
        {"ris", cfmimo::Scenario::RIS},   {"lemmas", cfmimo::Scenario::LEMMAS}};
    for (const auto& [name, sc] : scenarios) add_common(app.add_subcommand(name, name + " scenario"));
    auto* presets_cmd = app.add_subcommand("presets", "print the figure presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets_cmd->parsed()) {
            for (const char* p : {"fig4", "fig6", "fig8", "fig9", "fig10"})
                std::cout << cfmimo::preset_dump(p) << "\n";
            return kExitOk;
        }
        cfmimo::ExperimentConfig cfg;
        if (!preset_name.empty()) cfg = cfmimo::preset(preset_name);
        if (!config_path.empty()) cfg = cfmimo::load_config(config_path, cfg);
        for (const auto& [name, sc] : scenarios)
            if (app.get_subcommand(name)->parsed()) cfg.scenario = sc;
        if (trials > 0) cfg.trials = trials;
        if (seeds > 0) cfg.seeds = seeds;
        if (workers > 0) cfg.workers = workers;
        if (master_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(master_seed);
        cfg.validate();
        return run_scenario(cfg, out_path, cdf_metric);
    } catch (const cfmimo::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const cfmimo::invalid_configuration_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const cfmimo::infeasible_problem_error& e) {
        std::fprintf(stderr, "infeasible problem: %s\n", e.what());
        return kExitInfeasible;
    } catch (const cfmimo::numerical_domain_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const cfmimo::invalid_argument_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
}
