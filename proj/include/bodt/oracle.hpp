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
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "bodt/heuristics.hpp"
#include "bodt/model.hpp"

// Exhaustive reference optimiser for small instances. Used to measure how
// far the heuristics land from the true optimum; far too slow for anything
// beyond a handful of tasks and sites.

namespace bodt {

enum class Objective {
    score,     // lowest beta score, normalised over every assignment
    makespan,  // lowest overall execution time
    blocks,    // fewest total time blocks
};

inline const char* objective_name(Objective o) {
    switch (o) {
        case Objective::score: return "score";
        case Objective::makespan: return "makespan";
        case Objective::blocks: return "blocks";
    }
    throw InternalError("unhandled objective");
}

inline Objective objective_from_name(const std::string& name) {
    if (name == "score") return Objective::score;
    if (name == "makespan") return Objective::makespan;
    if (name == "blocks") return Objective::blocks;
    throw ValidationError("unknown objective '" + name +
                          "' (expected score, makespan, or blocks)");
}

struct OracleResult {
    Plan best_plan;
    PlanMetrics metrics;            // of best_plan; score uses the maxima below
    double best_score = 0.0;        // best_plan's score for the requested beta
    double best_makespan = 0.0;     // best_plan's overall_exec
    std::int64_t best_blocks = 0;   // best_plan's total_blocks
    double max_overall_exec = 0.0;  // normalisation maxima over every assignment
    std::int64_t max_total_blocks = 0;
    std::uint64_t enumerated = 0;   // |sites| ^ |tasks|
};

namespace oracle_detail {

inline std::uint64_t state_cap() {
    if (const char* env = std::getenv("BODT_ORACLE_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return 10'000'000ull;  // default assignment-count cap
}

inline std::int64_t blocks_of(const std::vector<double>& site_exec, const CostModel& cost) {
    std::int64_t tb = 0;
    for (double e : site_exec) tb += time_blocks(running_time(e, cost), cost);
    return tb;
}

// Objective value of a (possibly partial) assignment. Extending an
// assignment can only add exec time, so every objective is non-decreasing
// along a DFS path; pruning at "partial >= incumbent" is lossless.
inline double objective_value(const std::vector<double>& site_exec, const CostModel& cost,
                              Objective objective, BetaWeight beta, double max_oe,
                              std::int64_t max_tb) {
    switch (objective) {
        case Objective::blocks:
            return static_cast<double>(blocks_of(site_exec, cost));
        case Objective::makespan: {
            double m = 0.0;
            for (double e : site_exec)
                if (e > m) m = e;
            return m;
        }
        case Objective::score: {
            double oe = 0.0;
            for (double e : site_exec)
                if (e > oe) oe = e;
            std::int64_t tb = blocks_of(site_exec, cost);
            double exec_term = max_oe > 0.0 ? oe / max_oe : 0.0;
            double block_term =
                max_tb > 0 ? static_cast<double>(tb) / static_cast<double>(max_tb) : 0.0;
            return beta.value() * exec_term + (1.0 - beta.value()) * block_term;
        }
    }
    throw InternalError("unhandled objective");
}

}  // namespace oracle_detail

// True optimum by exhaustive enumeration. Pass one scans every assignment to
// find the normalisation maxima; pass two repeats the scan in lexicographic
// order with branch-and-bound pruning, keeping the first assignment that
// attains the optimum. Throws CapExceededError when |sites|^|tasks| exceeds
// the cap (BODT_ORACLE_CAP, default 1e7).
inline OracleResult exact_optimum(const Scenario& scn, BetaWeight beta, Objective objective) {
    const std::size_t n_tasks = scn.tasks.size();
    const std::size_t n_sites = scn.sites.size();
    const std::uint64_t cap = oracle_detail::state_cap();

    // Overflow-safe |sites|^|tasks| with early cap check.
    std::uint64_t states = 1;
    for (std::size_t t = 0; t < n_tasks; ++t) {
        if (states > cap / n_sites) {
            throw CapExceededError("oracle instance exceeds the enumeration cap of " +
                                   std::to_string(cap) + " assignments");
        }
        states *= n_sites;
    }

    std::vector<double> tab(n_tasks * n_sites);
    for (std::size_t t = 0; t < n_tasks; ++t)
        for (std::size_t c = 0; c < n_sites; ++c)
            tab[t * n_sites + c] = exec_time(scn.tasks[t], c, scn);
    const auto exec_of = [&](std::size_t t, std::size_t c) { return tab[t * n_sites + c]; };

    // Pass one: normalisation maxima over every complete assignment. Exec
    // sums are accumulated in task-index order, matching plan_metrics.
    double max_oe = 0.0;
    std::int64_t max_tb = 0;
    {
        DensePlan asg(n_tasks, 0);
        std::vector<double> site_exec(n_sites);
        while (true) {
            std::fill(site_exec.begin(), site_exec.end(), 0.0);
            for (std::size_t t = 0; t < n_tasks; ++t)
                site_exec[static_cast<std::size_t>(asg[t])] += exec_of(t, asg[t]);
            double oe = 0.0;
            for (double e : site_exec)
                if (e > oe) oe = e;
            std::int64_t tb = oracle_detail::blocks_of(site_exec, scn.cost);
            if (oe > max_oe) max_oe = oe;
            if (tb > max_tb) max_tb = tb;
            std::size_t pos = n_tasks;
            bool carry = true;
            while (pos > 0 && carry) {
                --pos;
                carry = static_cast<std::size_t>(++asg[pos]) >= n_sites;
                if (carry) asg[pos] = 0;
            }
            if (carry) break;  // every position wrapped: enumeration complete
        }
    }

    // Pass two: DFS in lexicographic order with pruning. A partial value
    // already at or above the incumbent cannot improve (objectives are
    // non-decreasing under extension), and only strict improvements replace
    // the incumbent, so the first optimum in lexicographic order wins.
    double best = std::numeric_limits<double>::infinity();
    DensePlan best_asg(n_tasks, 0);
    DensePlan asg(n_tasks, 0);
    std::vector<double> site_exec(n_sites, 0.0);
    std::vector<std::int32_t> choice(n_tasks, -1);
    std::size_t depth = 0;
    const auto partial_value = [&](const std::vector<double>& se) {
        return oracle_detail::objective_value(se, scn.cost, objective, beta, max_oe, max_tb);
    };
    // Tasks are placed in index order and removal recomputes the touched
    // site's sum from scratch, so every site sum is always the canonical
    // left-to-right sum of its current members.
    while (true) {
        if (choice[depth] >= 0) {
            std::size_t prev = static_cast<std::size_t>(choice[depth]);
            double acc = 0.0;
            for (std::size_t t = 0; t < depth; ++t)
                if (static_cast<std::size_t>(asg[t]) == prev) acc += exec_of(t, prev);
            site_exec[prev] = acc;
        }
        ++choice[depth];
        if (static_cast<std::size_t>(choice[depth]) >= n_sites) {
            choice[depth] = -1;
            if (depth == 0) break;
            --depth;
            continue;
        }
        std::size_t c = static_cast<std::size_t>(choice[depth]);
        asg[depth] = choice[depth];
        site_exec[c] += exec_of(depth, c);
        if (partial_value(site_exec) >= best) {
            continue;  // prune: extensions cannot drop below the incumbent
        }
        if (depth + 1 == n_tasks) {
            best = partial_value(site_exec);
            best_asg = asg;
            continue;
        }
        ++depth;
    }

    OracleResult res;
    res.best_plan = from_dense(best_asg, scn);
    res.metrics = plan_metrics_dense(best_asg, scn);
    res.max_overall_exec = max_oe;
    res.max_total_blocks = max_tb;
    res.enumerated = states;
    double exec_term = max_oe > 0.0 ? res.metrics.overall_exec / max_oe : 0.0;
    double block_term = max_tb > 0 ? static_cast<double>(res.metrics.total_blocks) /
                                         static_cast<double>(max_tb)
                                   : 0.0;
    res.metrics.score = beta.value() * exec_term + (1.0 - beta.value()) * block_term;
    res.best_score = res.metrics.score;
    res.best_makespan = res.metrics.overall_exec;
    res.best_blocks = res.metrics.total_blocks;
    return res;
}

// Heuristic score minus oracle score for the same beta. The heuristic
// normalises over its own candidate set, whose maxima cannot exceed the
// all-assignment maxima, so its score only over-states: the gap is >= 0 on
// every instance. Zero means the pipeline found a score optimum.
inline double optimality_gap(const Scenario& scn, BetaWeight beta) {
    FindPlanResult heur = find_plan(scn, beta);
    OracleResult opt = exact_optimum(scn, beta, Objective::score);
    return heur.candidates.items()[heur.chosen].metrics.score - opt.best_score;
}

}  // namespace bodt
