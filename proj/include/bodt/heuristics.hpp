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

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "bodt/model.hpp"

// Plan construction heuristics: nearest-site assignment, time-block
// reduction, load balancing, the beta-driven selection pipeline, budget
// planning, and the centralised baseline.
//
// Ties anywhere (donor, task, receiver, candidate) break towards the lowest
// canonical id, which after scenario canonicalisation is the lowest index.

namespace bodt {

// Guard against repeating a (task, from, to) move within one algorithm
// invocation; this is what bounds the number of moves and guarantees
// termination.
class MoveLedger {
public:
    bool contains(std::int32_t task, std::int32_t from, std::int32_t to) const {
        return moves_.count({task, from, to}) != 0;
    }
    void record(std::int32_t task, std::int32_t from, std::int32_t to) {
        moves_.insert({task, from, to});
    }
    std::size_t size() const { return moves_.size(); }

private:
    std::set<std::array<std::int32_t, 3>> moves_;
};

namespace detail {

// exec_time and transfer_time of every (task, site) pair, precomputed once
// per scenario. Values are identical to the model functions, so sums over
// the table reproduce model metrics bit for bit.
struct ExecTable {
    std::size_t n_sites = 0;
    std::vector<double> exec;      // [task * n_sites + site]
    std::vector<double> transfer;  // [task * n_sites + site]

    static ExecTable build(const Scenario& scn) {
        ExecTable tab;
        tab.n_sites = scn.sites.size();
        tab.exec.resize(scn.tasks.size() * tab.n_sites);
        tab.transfer.resize(scn.tasks.size() * tab.n_sites);
        for (std::size_t t = 0; t < scn.tasks.size(); ++t) {
            for (std::size_t c = 0; c < tab.n_sites; ++c) {
                tab.transfer[t * tab.n_sites + c] = transfer_time(scn.tasks[t], c, scn);
                tab.exec[t * tab.n_sites + c] = exec_time(scn.tasks[t], c, scn);
            }
        }
        return tab;
    }

    double exec_of(std::size_t t, std::size_t c) const { return exec[t * n_sites + c]; }
    double transfer_of(std::size_t t, std::size_t c) const { return transfer[t * n_sites + c]; }
};

// Mutable assignment with per-site exec sums that are always the exact
// canonical-order sums (sites recompute after each move, so incremental
// float drift cannot build up and block counts stay consistent with
// plan_metrics).
class WorkingPlan {
public:
    WorkingPlan(const Scenario& scn, const ExecTable& tab, DensePlan dense)
        : scn_(&scn), tab_(&tab), dense_(std::move(dense)) {
        site_tasks_.resize(scn.sites.size());
        for (std::size_t t = 0; t < dense_.size(); ++t)
            site_tasks_[static_cast<std::size_t>(dense_[t])].push_back(
                static_cast<std::int32_t>(t));
        exec_.assign(scn.sites.size(), 0.0);
        blocks_.assign(scn.sites.size(), 0);
        for (std::size_t c = 0; c < scn.sites.size(); ++c) refresh(c);
    }

    const DensePlan& dense() const { return dense_; }
    const std::vector<std::int32_t>& tasks_of(std::size_t c) const { return site_tasks_[c]; }
    double site_exec(std::size_t c) const { return exec_[c]; }
    double site_running(std::size_t c) const { return running_time(exec_[c], scn_->cost); }
    std::int64_t site_blocks(std::size_t c) const { return blocks_[c]; }
    std::int64_t total_blocks() const { return total_blocks_; }
    std::size_t n_sites() const { return site_tasks_.size(); }

    // Exec sum the site would have after also taking `task`, accumulated in
    // canonical order; matches refresh() after the move exactly.
    double site_exec_with(std::size_t c, std::int32_t task) const {
        double acc = 0.0;
        bool placed = false;
        for (std::int32_t t : site_tasks_[c]) {
            if (!placed && task < t) {
                acc += tab_->exec_of(static_cast<std::size_t>(task), c);
                placed = true;
            }
            acc += tab_->exec_of(static_cast<std::size_t>(t), c);
        }
        if (!placed) acc += tab_->exec_of(static_cast<std::size_t>(task), c);
        return acc;
    }

    void move(std::int32_t task, std::size_t from, std::size_t to) {
        auto& src = site_tasks_[from];
        src.erase(std::lower_bound(src.begin(), src.end(), task));
        auto& dst = site_tasks_[to];
        dst.insert(std::lower_bound(dst.begin(), dst.end(), task), task);
        dense_[static_cast<std::size_t>(task)] = static_cast<std::int32_t>(to);
        refresh(from);
        refresh(to);
    }

private:
    void refresh(std::size_t c) {
        double acc = 0.0;
        for (std::int32_t t : site_tasks_[c]) acc += tab_->exec_of(static_cast<std::size_t>(t), c);
        exec_[c] = acc;
        total_blocks_ -= blocks_[c];
        blocks_[c] = time_blocks(running_time(acc, scn_->cost), scn_->cost);
        total_blocks_ += blocks_[c];
    }

    const Scenario* scn_;
    const ExecTable* tab_;
    DensePlan dense_;
    std::vector<std::vector<std::int32_t>> site_tasks_;
    std::vector<double> exec_;
    std::vector<std::int64_t> blocks_;
    std::int64_t total_blocks_ = 0;
};

enum class MovePolicy { reduce_blocks, balance_running };

// Donor order: block reduction drains the site with the most charged-but-
// unused time first; balancing drains the site with the highest running time.
inline std::vector<std::size_t> donor_order(const WorkingPlan& wp, const Scenario& scn,
                                            MovePolicy policy) {
    std::vector<std::size_t> donors;
    for (std::size_t c = 0; c < wp.n_sites(); ++c)
        if (!wp.tasks_of(c).empty()) donors.push_back(c);
    if (policy == MovePolicy::reduce_blocks) {
        std::vector<std::int64_t> waste(wp.n_sites(), 0);
        for (std::size_t c : donors) waste[c] = block_waste_micros(wp.site_running(c), scn.cost);
        std::stable_sort(donors.begin(), donors.end(),
                         [&](std::size_t a, std::size_t b) { return waste[a] > waste[b]; });
    } else {
        std::stable_sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
            return wp.site_running(a) > wp.site_running(b);
        });
    }
    return donors;
}

inline std::vector<std::int32_t> tasks_by_exec_desc(const WorkingPlan& wp, const ExecTable& tab,
                                                    std::size_t c) {
    std::vector<std::int32_t> ts = wp.tasks_of(c);
    std::stable_sort(ts.begin(), ts.end(), [&](std::int32_t a, std::int32_t b) {
        return tab.exec_of(static_cast<std::size_t>(a), c) >
               tab.exec_of(static_cast<std::size_t>(b), c);
    });
    return ts;
}

inline std::vector<std::size_t> receivers_by_transfer(const ExecTable& tab, std::int32_t task,
                                                      std::size_t donor) {
    std::vector<std::size_t> rs;
    for (std::size_t c = 0; c < tab.n_sites; ++c)
        if (c != donor) rs.push_back(c);
    std::stable_sort(rs.begin(), rs.end(), [&](std::size_t a, std::size_t b) {
        return tab.transfer_of(static_cast<std::size_t>(task), a) <
               tab.transfer_of(static_cast<std::size_t>(task), b);
    });
    return rs;
}

// Shared move loop of the reduction and balancing algorithms. Each round
// walks donors in policy order, the donor's tasks longest-first, and
// receivers nearest-first, performing the first admissible move and starting
// over. Returns when a round finds no admissible move, or (reduction only)
// when the block budget is met.
inline DensePlan run_moves(const Scenario& scn, const ExecTable& tab, DensePlan start,
                           MovePolicy policy, std::int64_t min_tb) {
    WorkingPlan wp(scn, tab, std::move(start));
    MoveLedger ledger;
    if (policy == MovePolicy::reduce_blocks && wp.total_blocks() <= min_tb) return wp.dense();

    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t c0 : donor_order(wp, scn, policy)) {
            for (std::int32_t t0 : tasks_by_exec_desc(wp, tab, c0)) {
                for (std::size_t c1 : receivers_by_transfer(tab, t0, c0)) {
                    if (ledger.contains(t0, static_cast<std::int32_t>(c0),
                                        static_cast<std::int32_t>(c1)))
                        continue;
                    double new_exec = wp.site_exec_with(c1, t0);
                    if (policy == MovePolicy::reduce_blocks) {
                        // The receiving site must fit the task into the blocks
                        // it is already paying for.
                        if (time_blocks(running_time(new_exec, scn.cost), scn.cost) !=
                            wp.site_blocks(c1))
                            continue;
                    } else {
                        // The receiver must stay strictly below the donor's
                        // current running time.
                        if (!(running_time(new_exec, scn.cost) < wp.site_running(c0))) continue;
                    }
                    ledger.record(t0, static_cast<std::int32_t>(c0),
                                  static_cast<std::int32_t>(c1));
                    wp.move(t0, c0, c1);
                    if (policy == MovePolicy::reduce_blocks && wp.total_blocks() <= min_tb)
                        return wp.dense();
                    moved = true;
                    break;
                }
                if (moved) break;
            }
            if (moved) break;
        }
    }
    return wp.dense();
}

inline DensePlan nearest_dense(const Scenario& scn, const ExecTable& tab) {
    DensePlan dense(scn.tasks.size(), 0);
    for (std::size_t t = 0; t < scn.tasks.size(); ++t) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < tab.n_sites; ++c)
            if (tab.transfer_of(t, c) < tab.transfer_of(t, best)) best = c;
        dense[t] = static_cast<std::int32_t>(best);
    }
    return dense;
}

inline DensePlan centralised_dense(const Scenario& scn, const ExecTable& tab) {
    std::size_t best = 0;
    double best_total = 0.0;
    for (std::size_t c = 0; c < tab.n_sites; ++c) {
        double total = 0.0;
        for (std::size_t t = 0; t < scn.tasks.size(); ++t) total += tab.exec_of(t, c);
        if (c == 0 || total < best_total) {
            best = c;
            best_total = total;
        }
    }
    return DensePlan(scn.tasks.size(), static_cast<std::int32_t>(best));
}

}  // namespace detail

// Assigns every task to the site with the smallest transfer time to its data.
inline Plan nearest_plan(const Scenario& scn) {
    auto tab = detail::ExecTable::build(scn);
    return from_dense(detail::nearest_dense(scn, tab), scn);
}

// Packs tasks into already-paid-for blocks, draining the most wasteful sites
// first, until the plan needs at most min_tb blocks or no move is admissible.
// Best effort: an unreachable min_tb is not an error.
inline Plan reduce_time_blocks(const Scenario& scn, const Plan& plan, std::int64_t min_tb) {
    if (min_tb < 1) throw ValidationError("min_tb must be at least 1");
    auto tab = detail::ExecTable::build(scn);
    return from_dense(detail::run_moves(scn, tab, to_dense(plan, scn),
                                        detail::MovePolicy::reduce_blocks, min_tb),
                      scn);
}

// Evens out running times by repeatedly moving the longest task away from the
// busiest site, never letting a receiver rise to the donor's level. Makespan
// never increases.
inline Plan balance(const Scenario& scn, const Plan& plan) {
    auto tab = detail::ExecTable::build(scn);
    return from_dense(
        detail::run_moves(scn, tab, to_dense(plan, scn), detail::MovePolicy::balance_running, 1),
        scn);
}

// All tasks on the single site with the lowest total execution time.
inline Plan centralised_plan(const Scenario& scn) {
    auto tab = detail::ExecTable::build(scn);
    return from_dense(detail::centralised_dense(scn, tab), scn);
}

struct Candidate {
    Plan plan;
    DensePlan dense;
    PlanMetrics metrics;
};

// Distinct plans produced by the reduce/balance pipeline, in generation
// order. Deduplication is by assignment.
class CandidateSet {
public:
    bool insert(Candidate cand) {
        if (!keys_.insert(cand.dense).second) return false;
        items_.push_back(std::move(cand));
        return true;
    }
    const std::vector<Candidate>& items() const { return items_; }
    std::vector<Candidate>& items() { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

private:
    std::vector<Candidate> items_;
    std::set<DensePlan> keys_;
};

// Runs the pipeline for every block budget from 1 up to the nearest plan's
// block count (the budget sweep cannot do better than the nearest plan needs,
// nor worse than a single block). Candidates do not depend on beta, so a
// beta sweep can reuse one set.
inline CandidateSet build_candidates(const Scenario& scn) {
    auto tab = detail::ExecTable::build(scn);
    DensePlan nearest = detail::nearest_dense(scn, tab);
    std::int64_t upper = plan_metrics_dense(nearest, scn).total_blocks;
    if (upper < 1) upper = 1;  // all-zero-rate scenarios still yield one candidate
    CandidateSet set;
    for (std::int64_t min_tb = 1; min_tb <= upper; ++min_tb) {
        DensePlan reduced =
            detail::run_moves(scn, tab, nearest, detail::MovePolicy::reduce_blocks, min_tb);
        DensePlan balanced = detail::run_moves(scn, tab, std::move(reduced),
                                               detail::MovePolicy::balance_running, 1);
        Candidate cand;
        cand.metrics = plan_metrics_dense(balanced, scn);
        cand.plan = from_dense(balanced, scn);
        cand.dense = std::move(balanced);
        set.insert(std::move(cand));
    }
    return set;
}

// Index of the candidate with the lowest score for this beta; ties keep the
// earliest candidate. Writes scores into the set's metrics.
inline std::size_t select_candidate(CandidateSet& candidates, BetaWeight beta) {
    if (candidates.empty()) throw ValidationError("candidate set is empty");
    std::vector<PlanMetrics> metrics;
    metrics.reserve(candidates.size());
    for (const auto& c : candidates.items()) metrics.push_back(c.metrics);
    std::vector<double> scores = score_plans(metrics, beta);
    for (std::size_t i = 0; i < candidates.size(); ++i)
        candidates.items()[i].metrics.score = metrics[i].score;
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[best]) best = i;
    return best;
}

struct FindPlanResult {
    Plan plan;
    std::size_t chosen;  // index into candidates
    CandidateSet candidates;
};

// The full pipeline: build candidates, score them for the given beta, return
// the winner plus the whole set for reporting.
inline FindPlanResult find_plan(const Scenario& scn, BetaWeight beta) {
    FindPlanResult r;
    r.candidates = build_candidates(scn);
    r.chosen = select_candidate(r.candidates, beta);
    r.plan = r.candidates.items()[r.chosen].plan;
    return r;
}

struct BudgetPlanResult {
    Plan plan;
    PlanMetrics metrics;
    std::int64_t max_blocks = 0;
    bool within_budget = false;  // plan meets the requested block budget
};

// One reduce/balance pass with the budget as the block target. Balancing may
// spread tasks onto extra sites and overshoot a budget the reduction had
// already met; in that case the reduced plan is kept, so a budget of the
// nearest plan's block count (the reduction's upper bound) is always
// feasible. If even the best effort exceeds the budget the result is marked,
// not hidden.
inline BudgetPlanResult find_plan_budget(const Scenario& scn, std::int64_t max_blocks) {
    if (max_blocks < 1) throw ValidationError("budget must be at least 1 block");
    auto tab = detail::ExecTable::build(scn);
    DensePlan nearest = detail::nearest_dense(scn, tab);
    DensePlan reduced =
        detail::run_moves(scn, tab, std::move(nearest), detail::MovePolicy::reduce_blocks,
                          max_blocks);
    PlanMetrics reduced_metrics = plan_metrics_dense(reduced, scn);
    DensePlan balanced = detail::run_moves(scn, tab, reduced,
                                           detail::MovePolicy::balance_running, 1);
    PlanMetrics balanced_metrics = plan_metrics_dense(balanced, scn);

    bool keep_reduced = balanced_metrics.total_blocks > max_blocks &&
                        reduced_metrics.total_blocks <= max_blocks;
    BudgetPlanResult r;
    r.metrics = keep_reduced ? std::move(reduced_metrics) : std::move(balanced_metrics);
    r.plan = from_dense(keep_reduced ? reduced : balanced, scn);
    r.max_blocks = max_blocks;
    r.within_budget = r.metrics.total_blocks <= max_blocks;
    return r;
}

}  // namespace bodt
