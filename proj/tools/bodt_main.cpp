// Copyright 2026 The bodt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bodt/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Planner and simulator for bags of distributed tasks"};
    app.require_subcommand(1);

    std::string scenario, out;
    double beta = 0.5;
    std::vector<double> betas;
    std::int64_t budget = 1;
    std::int64_t reps = 3;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string plan_file;

    int rc = bodt::cli::exit_internal_error;

    auto* plan = app.add_subcommand("plan", "Pick the best plan for a beta trade-off");
    plan->add_option("--scenario", scenario, "Scenario file")->required();
    plan->add_option("--beta", beta, "Trade-off weight in [0,1]; 1 favours speed")->required();
    plan->add_option("--out", out, "Report file")->required();
    plan->callback([&] { rc = bodt::cli::cmd_plan(scenario, beta, out); });

    auto* sweep = app.add_subcommand("sweep", "Score candidates across many beta values");
    sweep->add_option("--scenario", scenario, "Scenario file")->required();
    sweep->add_option("--betas", betas, "Comma-separated beta values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out, "Report file")->required();
    sweep->callback([&] { rc = bodt::cli::cmd_sweep(scenario, betas, out); });

    auto* budget_cmd = app.add_subcommand("budget", "Plan within a block budget");
    budget_cmd->add_option("--scenario", scenario, "Scenario file")->required();
    budget_cmd->add_option("--budget", budget, "Maximum total time blocks")->required();
    budget_cmd->add_option("--out", out, "Report file")->required();
    budget_cmd->callback([&] { rc = bodt::cli::cmd_budget(scenario, budget, out); });

    auto* compare = app.add_subcommand("compare", "Chosen plan vs the centralised baseline");
    compare->add_option("--scenario", scenario, "Scenario file")->required();
    compare->add_option("--beta", beta, "Trade-off weight in [0,1]")->required();
    compare->add_option("--out", out, "Report file")->required();
    compare->callback([&] { rc = bodt::cli::cmd_compare(scenario, beta, out); });

    auto* simulate = app.add_subcommand("simulate", "Replay plans and check predictions");
    simulate->add_option("--scenario", scenario, "Scenario file")->required();
    auto* sim_plan = simulate->add_option("--plan", plan_file, "Plan file to replay");
    auto* sim_beta =
        simulate->add_option("--beta", beta, "Evaluate all candidates for this beta");
    sim_plan->excludes(sim_beta);
    simulate->add_option("--reps", reps, "Repetitions per plan (default 3)");
    simulate->add_option("--sigma", sigma, "Transfer noise strength (0 = deterministic)");
    simulate->add_option("--seed", seed, "Noise seed");
    simulate->add_option("--out", out, "Report file")->required();
    simulate->callback([&] {
        std::optional<std::string> p;
        std::optional<double> b;
        if (sim_plan->count() > 0) p = plan_file;
        if (sim_beta->count() > 0) b = beta;
        rc = bodt::cli::cmd_simulate(scenario, p, b, reps, sigma, seed, out);
    });

    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum vs the heuristic");
    oracle->add_option("--scenario", scenario, "Scenario file")->required();
    oracle->add_option("--beta", beta, "Trade-off weight in [0,1]")->required();
    oracle->add_option("--out", out, "Report file")->required();
    oracle->callback([&] { rc = bodt::cli::cmd_oracle(scenario, beta, out); });

    bodt::GenSpec gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic scenario");
    generate->add_option("--locations", gen.n_locations, "Data locations (default 47)");
    generate->add_option("--sites", gen.n_sites, "Sites (default 8)");
    generate->add_option("--tasks", gen.n_tasks, "Tasks (default 3290)");
    generate->add_option("--size-lo", gen.size_lo, "Smallest task size");
    generate->add_option("--size-hi", gen.size_hi, "Largest task size");
    generate->add_option("--rate-lo", gen.rate_lo, "Transfer rate at distance zero");
    generate->add_option("--rate-hi", gen.rate_hi, "Transfer rate across the ring");
    generate->add_option("--compute-rate", gen.compute_rate, "Seconds of compute per unit");
    generate->add_option("--deploy-time", gen.deploy_time, "Site deployment seconds");
    generate->add_option("--block-seconds", gen.block_seconds, "Billing block length");
    generate->add_option("--unit-cost", gen.unit_cost, "Cost per block");
    generate->add_option("--cluster-spread", gen.cluster_spread,
                         "Location scatter around its site, radians");
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--out", out, "Scenario file to write")->required();
    generate->callback([&] { rc = bodt::cli::cmd_generate(gen, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return bodt::cli::exit_input_error;
    }
    return rc;
}
