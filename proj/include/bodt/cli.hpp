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

#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bodt/heuristics.hpp"
#include "bodt/model.hpp"
#include "bodt/oracle.hpp"
#include "bodt/sim.hpp"
#include "bodt/workload.hpp"

// Command implementations behind the bodt binary. Each command loads its
// inputs, writes one JSON report (schema "bodt-report v1") plus any side
// files, and returns a process exit code:
//   0 success, 1 bad input, 2 internal failure, 3 budget infeasible,
//   4 oracle instance over the enumeration cap.
// Reports echo the full invocation and contain nothing run-dependent, so a
// re-run with identical flags is byte-identical.

namespace bodt::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* report_schema_tag = "bodt-report v1";

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_internal_error = 2;
inline constexpr int exit_budget_infeasible = 3;
inline constexpr int exit_cap_exceeded = 4;

namespace cli_detail {

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw Error("failed writing: " + path);
}

inline void write_report(const std::string& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

// "report.json" -> "report_<name>.trace.csv"
inline std::string sibling_path(const std::string& out_path, const std::string& name,
                                const std::string& ext) {
    std::string stem = out_path;
    if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".json")
        stem = stem.substr(0, stem.size() - 5);
    return stem + "_" + name + ext;
}

// Candidates are named plan_<k> after the number of sites they use; repeats
// get an ordinal suffix so names stay unique within a report.
inline std::vector<std::string> candidate_names(const CandidateSet& candidates,
                                                const Scenario& scn) {
    std::vector<std::string> names;
    std::map<std::string, int> seen;
    for (const auto& cand : candidates.items()) {
        std::string base = "plan_" + std::to_string(sites_used(cand.dense, scn));
        int n = ++seen[base];
        names.push_back(n == 1 ? base : base + "_" + std::to_string(n));
    }
    return names;
}

inline json plan_to_json(const Plan& plan) {
    json j = json::object();
    for (const auto& [site, tasks] : plan.assignment) {
        json arr = json::array();
        for (const auto& t : tasks) arr.push_back(t);
        j[site] = std::move(arr);
    }
    return j;
}

inline Plan plan_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("plan assignment must be a JSON object");
    Plan plan;
    for (const auto& [site, tasks] : j.items()) {
        if (!tasks.is_array())
            throw ParseError("plan assignment for site " + site + " must be an array");
        auto& set = plan.assignment[site];
        for (const auto& t : tasks) {
            if (!t.is_string())
                throw ParseError("plan assignment for site " + site +
                                 " must contain task id strings");
            set.insert(t.get<std::string>());
        }
    }
    return plan;
}

// Accepts either a bare {"assignment": {...}} document or a full cmd_plan
// report (whose chosen plan is under chosen.assignment).
inline Plan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open plan file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (j.contains("chosen") && j["chosen"].contains("assignment"))
        return plan_from_json(j["chosen"]["assignment"]);
    if (j.contains("assignment")) return plan_from_json(j["assignment"]);
    throw ParseError(path + ": no plan assignment found (expected 'assignment' or "
                     "'chosen.assignment')");
}

inline json metrics_summary(const PlanMetrics& m, std::size_t used) {
    return json{{"sites_used", used},
                {"total_blocks", m.total_blocks},
                {"overall_exec", m.overall_exec},
                {"overall_running", m.overall_running},
                {"total_cost", m.total_cost},
                {"score", m.score}};
}

inline json metrics_detail(const PlanMetrics& m, const Scenario& scn) {
    json sites = json::array();
    for (std::size_t c = 0; c < scn.sites.size(); ++c) {
        sites.push_back({{"site", scn.sites[c].id},
                         {"exec", m.per_site_exec[c]},
                         {"running", m.per_site_running[c]},
                         {"blocks", m.per_site_blocks[c]}});
    }
    return sites;
}

inline json candidate_table(const CandidateSet& candidates,
                            const std::vector<std::string>& names, const Scenario& scn) {
    json rows = json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& cand = candidates.items()[i];
        json row = metrics_summary(cand.metrics, sites_used(cand.dense, scn));
        json named;
        named["name"] = names[i];
        named.update(row);
        rows.push_back(std::move(named));
    }
    return rows;
}

template <typename Fn>
int run_guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const CapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_cap_exceeded;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal_error;
    }
}

}  // namespace cli_detail

inline int cmd_plan(const std::string& scenario_path, double beta, const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        Scenario scn = load_scenario(scenario_path);
        BetaWeight bw(beta);
        FindPlanResult res = find_plan(scn, bw);
        std::vector<std::string> names = cli_detail::candidate_names(res.candidates, scn);
        const Candidate& chosen = res.candidates.items()[res.chosen];

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "plan";
        j["invocation"] = {{"command", "plan"},
                           {"scenario", scenario_path},
                           {"beta", beta},
                           {"out", out_path}};
        json jc;
        jc["name"] = names[res.chosen];
        jc["index"] = res.chosen;
        jc.update(cli_detail::metrics_summary(chosen.metrics, sites_used(chosen.dense, scn)));
        jc["per_site"] = cli_detail::metrics_detail(chosen.metrics, scn);
        jc["assignment"] = cli_detail::plan_to_json(chosen.plan);
        j["chosen"] = std::move(jc);
        j["candidates"] = cli_detail::candidate_table(res.candidates, names, scn);
        cli_detail::write_report(out_path, j);
        return exit_ok;
    });
}

inline int cmd_sweep(const std::string& scenario_path, const std::vector<double>& betas,
                     const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        if (betas.empty()) throw ValidationError("sweep needs at least one beta value");
        Scenario scn = load_scenario(scenario_path);
        std::vector<BetaWeight> weights;
        weights.reserve(betas.size());
        for (double b : betas) weights.emplace_back(b);

        CandidateSet candidates = build_candidates(scn);
        std::vector<std::string> names = cli_detail::candidate_names(candidates, scn);

        json rows = json::array();
        json matrix = json::array();
        for (std::size_t bi = 0; bi < weights.size(); ++bi) {
            std::vector<PlanMetrics> metrics;
            metrics.reserve(candidates.size());
            for (const auto& c : candidates.items()) metrics.push_back(c.metrics);
            std::vector<double> scores = score_plans(metrics, weights[bi]);
            std::size_t best = 0;
            for (std::size_t i = 1; i < scores.size(); ++i)
                if (scores[i] < scores[best]) best = i;
            rows.push_back({{"beta", betas[bi]},
                            {"chosen", names[best]},
                            {"chosen_index", best},
                            {"sites_used", sites_used(candidates.items()[best].dense, scn)},
                            {"total_blocks", candidates.items()[best].metrics.total_blocks},
                            {"overall_exec", candidates.items()[best].metrics.overall_exec},
                            {"score", scores[best]}});
            matrix.push_back({{"beta", betas[bi]}, {"scores", scores}});
        }

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "sweep";
        j["invocation"] = {{"command", "sweep"},
                           {"scenario", scenario_path},
                           {"betas", betas},
                           {"out", out_path}};
        j["candidates"] = cli_detail::candidate_table(candidates, names, scn);
        j["rows"] = std::move(rows);
        j["score_matrix"] = std::move(matrix);
        cli_detail::write_report(out_path, j);
        return exit_ok;
    });
}

inline int cmd_budget(const std::string& scenario_path, std::int64_t max_blocks,
                      const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        Scenario scn = load_scenario(scenario_path);
        BudgetPlanResult res = find_plan_budget(scn, max_blocks);
        DensePlan dense = to_dense(res.plan, scn);

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "budget";
        j["invocation"] = {{"command", "budget"},
                           {"scenario", scenario_path},
                           {"budget", max_blocks},
                           {"out", out_path}};
        j["within_budget"] = res.within_budget;
        json jp;
        jp["name"] = "plan_" + std::to_string(sites_used(dense, scn));
        jp.update(cli_detail::metrics_summary(res.metrics, sites_used(dense, scn)));
        jp["per_site"] = cli_detail::metrics_detail(res.metrics, scn);
        jp["assignment"] = cli_detail::plan_to_json(res.plan);
        j["plan"] = std::move(jp);
        cli_detail::write_report(out_path, j);
        if (!res.within_budget) {
            std::cerr << "budget of " << max_blocks << " blocks is infeasible; best effort needs "
                      << res.metrics.total_blocks << "\n";
            return exit_budget_infeasible;
        }
        return exit_ok;
    });
}

inline int cmd_compare(const std::string& scenario_path, double beta,
                       const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        Scenario scn = load_scenario(scenario_path);
        BetaWeight bw(beta);
        FindPlanResult res = find_plan(scn, bw);
        std::vector<std::string> names = cli_detail::candidate_names(res.candidates, scn);
        const Candidate& dec = res.candidates.items()[res.chosen];

        Plan cen_plan = centralised_plan(scn);
        DensePlan cen_dense = to_dense(cen_plan, scn);
        PlanMetrics cen = plan_metrics_dense(cen_dense, scn);

        // Ratios against the decentralised choice, which plays the base role.
        const auto ratio_row = [&](const std::string& name, const PlanMetrics& m,
                                   std::size_t used, const Plan& plan) {
            json row;
            row["name"] = name;
            row.update(cli_detail::metrics_summary(m, used));
            row["cost_increase"] = dec.metrics.total_blocks > 0
                                       ? static_cast<double>(m.total_blocks) /
                                             static_cast<double>(dec.metrics.total_blocks)
                                       : 0.0;
            row["speedup"] = m.overall_running > 0.0
                                 ? dec.metrics.overall_running / m.overall_running
                                 : 1.0;
            row["assignment"] = cli_detail::plan_to_json(plan);
            return row;
        };

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "compare";
        j["invocation"] = {{"command", "compare"},
                           {"scenario", scenario_path},
                           {"beta", beta},
                           {"out", out_path}};
        j["decentralised"] = ratio_row(names[res.chosen], dec.metrics,
                                       sites_used(dec.dense, scn), dec.plan);
        j["centralised"] =
            ratio_row("centralised", cen, sites_used(cen_dense, scn), cen_plan);
        j["candidates"] = cli_detail::candidate_table(res.candidates, names, scn);
        cli_detail::write_report(out_path, j);
        return exit_ok;
    });
}

inline int cmd_simulate(const std::string& scenario_path,
                        const std::optional<std::string>& plan_path,
                        const std::optional<double>& beta, std::int64_t reps, double sigma,
                        std::uint64_t seed, const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        if (!plan_path && !beta)
            throw ValidationError("simulate needs either a plan file or a beta value");
        Scenario scn = load_scenario(scenario_path);

        std::vector<NamedPlan> plans;
        std::size_t base_index = SIZE_MAX;
        if (plan_path) {
            Plan p = cli_detail::load_plan(*plan_path);
            DensePlan dense = to_dense(p, scn);  // validates
            plans.push_back({"plan_" + std::to_string(sites_used(dense, scn)), std::move(p)});
        } else {
            BetaWeight bw(*beta);
            FindPlanResult res = find_plan(scn, bw);
            std::vector<std::string> names = cli_detail::candidate_names(res.candidates, scn);
            // Base = fewest sites among the candidates; the centralised row is
            // appended for comparison only and must not claim the base role.
            std::size_t fewest = 0;
            for (std::size_t i = 0; i < res.candidates.size(); ++i) {
                plans.push_back({names[i], res.candidates.items()[i].plan});
                if (sites_used(res.candidates.items()[i].dense, scn) <
                    sites_used(res.candidates.items()[fewest].dense, scn))
                    fewest = i;
            }
            base_index = fewest;
            plans.push_back({"centralised", centralised_plan(scn)});
        }

        std::optional<NoiseSpec> noise;
        if (sigma > 0.0) noise = NoiseSpec{seed, sigma};
        EvaluationReport report = evaluate_plans(plans, scn, reps, noise, base_index);

        json rows = json::array();
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            const PlanEvaluation& r = report.rows[i];
            // First-repetition trace, one CSV per plan.
            std::optional<NoiseSpec> rep_noise;
            if (noise) rep_noise = NoiseSpec{mix_seed(seed, 0), sigma};
            SimTrace trace = simulate(plans[i].plan, scn, rep_noise);
            std::string trace_path = cli_detail::sibling_path(out_path, r.name, ".trace.csv");
            std::ostringstream csv;
            write_trace_csv(trace, csv);
            cli_detail::write_text(trace_path, csv.str());

            rows.push_back({{"name", r.name},
                            {"sites_used", r.sites_used},
                            {"predicted_blocks", r.predicted_blocks},
                            {"simulated_blocks_mean", r.simulated_blocks_mean},
                            {"accurate", r.accurate},
                            {"underpredicted", r.underpredicted},
                            {"predicted_running", r.predicted_running},
                            {"simulated_running_mean", r.simulated_running_mean},
                            {"predicted_overall_exec", r.predicted_overall_exec},
                            {"cost_increase", r.cost_increase},
                            {"speedup", r.speedup},
                            {"transfer_s_per_unit", r.transfer_s_per_unit},
                            {"transfer_units_per_s", r.transfer_units_per_s},
                            {"trace", trace_path}});
        }

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "simulate";
        json inv = {{"command", "simulate"},
                    {"scenario", scenario_path},
                    {"reps", reps},
                    {"sigma", sigma},
                    {"seed", seed},
                    {"out", out_path}};
        if (plan_path) inv["plan"] = *plan_path;
        if (beta) inv["beta"] = *beta;
        j["invocation"] = std::move(inv);
        j["base"] = report.rows.empty() ? "" : report.rows[report.base_index].name;
        j["rows"] = std::move(rows);
        cli_detail::write_report(out_path, j);
        return exit_ok;
    });
}

inline int cmd_oracle(const std::string& scenario_path, double beta,
                      const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        Scenario scn = load_scenario(scenario_path);
        BetaWeight bw(beta);
        OracleResult opt = exact_optimum(scn, bw, Objective::score);
        FindPlanResult heur = find_plan(scn, bw);
        std::vector<std::string> names = cli_detail::candidate_names(heur.candidates, scn);
        const Candidate& chosen = heur.candidates.items()[heur.chosen];
        DensePlan opt_dense = to_dense(opt.best_plan, scn);

        json j;
        j["schema"] = report_schema_tag;
        j["kind"] = "oracle";
        j["invocation"] = {{"command", "oracle"},
                           {"scenario", scenario_path},
                           {"beta", beta},
                           {"out", out_path}};
        json jo;
        jo["objective"] = objective_name(Objective::score);
        jo["enumerated"] = opt.enumerated;
        jo["best_score"] = opt.best_score;
        jo["best_makespan"] = opt.best_makespan;
        jo["best_blocks"] = opt.best_blocks;
        jo["max_overall_exec"] = opt.max_overall_exec;
        jo["max_total_blocks"] = opt.max_total_blocks;
        jo.update(cli_detail::metrics_summary(opt.metrics, sites_used(opt_dense, scn)));
        jo["assignment"] = cli_detail::plan_to_json(opt.best_plan);
        j["oracle"] = std::move(jo);
        json jh;
        jh["name"] = names[heur.chosen];
        jh.update(cli_detail::metrics_summary(chosen.metrics, sites_used(chosen.dense, scn)));
        jh["assignment"] = cli_detail::plan_to_json(chosen.plan);
        j["heuristic"] = std::move(jh);
        j["optimality_gap"] = chosen.metrics.score - opt.best_score;
        cli_detail::write_report(out_path, j);
        return exit_ok;
    });
}

inline int cmd_generate(const GenSpec& spec, const std::string& out_path) {
    return cli_detail::run_guarded([&] {
        Scenario scn = generate_scenario(spec);
        save_scenario(scn, out_path);
        return exit_ok;
    });
}

}  // namespace bodt::cli
