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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Domain types and the closed-form cost/performance model for planning a bag
// of data-bound tasks across geographically distributed compute sites.
//
// All types are immutable values after construction and all operations are
// pure; results do not depend on evaluation order.

namespace bodt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scenario, plan, or parameter violates a model invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Input text could not be parsed at all.
struct ParseError : Error {
    using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
struct CapExceededError : Error {
    using Error::Error;
};

// A "never happens" internal consistency check failed.
struct InternalError : Error {
    using Error::Error;
};

struct DataLocation {
    std::string id;
    std::string label;
};

struct Site {
    std::string id;
    std::string label;
};

struct Task {
    std::string id;
    std::string location;  // DataLocation id
    double size = 0.0;     // data units, strictly positive
};

// Billing and rate parameters shared by all sites.
struct CostModel {
    // Seconds to move one data unit, row per location, column per site.
    std::vector<std::vector<double>> transfer;
    double compute_rate = 0.0;      // seconds per data unit, identical across sites
    double deploy_time = 0.0;       // seconds to start a site before its first task
    double block_seconds = 3600.0;  // billing quantum
    double unit_cost = 1.0;         // currency per started block
};

class Scenario;

namespace detail {

inline bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace detail

// Bundles locations, sites, tasks and the cost model. Construction via
// validated() canonicalises (sorts each list by id) and checks every
// invariant, so downstream code can rely on sorted order and total coverage
// of the transfer matrix. Tie-breaking all over the planner is "lowest id
// wins", which after canonicalisation is just "first in vector order".
class Scenario {
public:
    std::vector<DataLocation> locations;
    std::vector<Site> sites;
    std::vector<Task> tasks;
    CostModel cost;

    static Scenario validated(std::vector<DataLocation> locations, std::vector<Site> sites,
                              std::vector<Task> tasks, CostModel cost) {
        Scenario s;
        s.locations = std::move(locations);
        s.sites = std::move(sites);
        s.tasks = std::move(tasks);
        s.cost = std::move(cost);
        s.canonicalise();
        s.check();
        return s;
    }

    std::size_t location_index(const std::string& id) const {
        auto it = std::lower_bound(locations.begin(), locations.end(), id,
                                   [](const DataLocation& l, const std::string& v) { return l.id < v; });
        if (it == locations.end() || it->id != id)
            throw ValidationError("unknown location id: " + id);
        return static_cast<std::size_t>(it - locations.begin());
    }

    std::size_t site_index(const std::string& id) const {
        auto it = std::lower_bound(sites.begin(), sites.end(), id,
                                   [](const Site& s, const std::string& v) { return s.id < v; });
        if (it == sites.end() || it->id != id)
            throw ValidationError("unknown site id: " + id);
        return static_cast<std::size_t>(it - sites.begin());
    }

    std::size_t task_index(const std::string& id) const {
        auto it = std::lower_bound(tasks.begin(), tasks.end(), id,
                                   [](const Task& t, const std::string& v) { return t.id < v; });
        if (it == tasks.end() || it->id != id)
            throw ValidationError("unknown task id: " + id);
        return static_cast<std::size_t>(it - tasks.begin());
    }

    // Seconds per data unit for (location, site); the matrix is dense so this
    // cannot miss after validation.
    double rate(std::size_t location, std::size_t site) const {
        return cost.transfer[location][site];
    }

private:
    void canonicalise() {
        // The transfer matrix rows/columns follow their lists through the sort.
        std::vector<std::size_t> loc_perm(locations.size()), site_perm(sites.size());
        for (std::size_t i = 0; i < loc_perm.size(); ++i) loc_perm[i] = i;
        for (std::size_t i = 0; i < site_perm.size(); ++i) site_perm[i] = i;
        std::sort(loc_perm.begin(), loc_perm.end(),
                  [&](std::size_t a, std::size_t b) { return locations[a].id < locations[b].id; });
        std::sort(site_perm.begin(), site_perm.end(),
                  [&](std::size_t a, std::size_t b) { return sites[a].id < sites[b].id; });

        std::vector<DataLocation> locs;
        locs.reserve(locations.size());
        for (std::size_t p : loc_perm) locs.push_back(std::move(locations[p]));
        locations = std::move(locs);

        std::vector<Site> ss;
        ss.reserve(sites.size());
        for (std::size_t p : site_perm) ss.push_back(std::move(sites[p]));
        sites = std::move(ss);

        if (cost.transfer.size() == loc_perm.size()) {
            std::vector<std::vector<double>> m(cost.transfer.size());
            for (std::size_t r = 0; r < loc_perm.size(); ++r) {
                const auto& row = cost.transfer[loc_perm[r]];
                if (row.size() == site_perm.size()) {
                    m[r].reserve(row.size());
                    for (std::size_t c : site_perm) m[r].push_back(row[c]);
                } else {
                    m[r] = row;  // wrong shape, left for check() to report
                }
            }
            cost.transfer = std::move(m);
        }

        std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
    }

    void check() const {
        if (locations.empty()) throw ValidationError("scenario has no data locations");
        if (sites.empty()) throw ValidationError("scenario has no sites");
        if (tasks.empty()) throw ValidationError("scenario has no tasks");

        for (const auto& l : locations)
            if (!detail::valid_id(l.id))
                throw ValidationError("invalid location id: '" + l.id + "'");
        for (const auto& s : sites)
            if (!detail::valid_id(s.id)) throw ValidationError("invalid site id: '" + s.id + "'");
        for (const auto& t : tasks)
            if (!detail::valid_id(t.id)) throw ValidationError("invalid task id: '" + t.id + "'");

        for (std::size_t i = 1; i < locations.size(); ++i)
            if (locations[i].id == locations[i - 1].id)
                throw ValidationError("duplicate location id: " + locations[i].id);
        for (std::size_t i = 1; i < sites.size(); ++i)
            if (sites[i].id == sites[i - 1].id)
                throw ValidationError("duplicate site id: " + sites[i].id);
        for (std::size_t i = 1; i < tasks.size(); ++i)
            if (tasks[i].id == tasks[i - 1].id)
                throw ValidationError("duplicate task id: " + tasks[i].id);

        for (const auto& t : tasks) {
            if (!std::isfinite(t.size) || t.size <= 0.0)
                throw ValidationError("task " + t.id + " has non-positive size");
            location_index(t.location);  // throws if it does not resolve
        }

        if (cost.transfer.size() != locations.size())
            throw ValidationError("transfer matrix has " + std::to_string(cost.transfer.size()) +
                                  " rows, expected one per location (" +
                                  std::to_string(locations.size()) + ")");
        for (std::size_t r = 0; r < cost.transfer.size(); ++r) {
            if (cost.transfer[r].size() != sites.size())
                throw ValidationError("transfer matrix row for location " + locations[r].id +
                                      " has " + std::to_string(cost.transfer[r].size()) +
                                      " entries, expected one per site (" +
                                      std::to_string(sites.size()) + ")");
            for (std::size_t c = 0; c < cost.transfer[r].size(); ++c)
                if (!detail::finite_nonneg(cost.transfer[r][c]))
                    throw ValidationError("transfer rate for (" + locations[r].id + ", " +
                                          sites[c].id + ") must be finite and non-negative");
        }

        if (!detail::finite_nonneg(cost.compute_rate))
            throw ValidationError("compute_rate must be finite and non-negative");
        if (!detail::finite_nonneg(cost.deploy_time))
            throw ValidationError("deploy_time must be finite and non-negative");
        if (!std::isfinite(cost.block_seconds) || cost.block_seconds <= 0.0)
            throw ValidationError("block_seconds must be finite and positive");
        if (!detail::finite_nonneg(cost.unit_cost))
            throw ValidationError("unit_cost must be finite and non-negative");
    }
};

// Partition of the task bag across sites. Site keys may map to empty sets;
// validate_plan checks coverage and disjointness against a scenario.
struct Plan {
    std::map<std::string, std::set<std::string>> assignment;
};

// Dense view of a Plan: site index per task index, aligned with the
// scenario's canonical task order. The working representation of every
// algorithm in this project.
using DensePlan = std::vector<std::int32_t>;

inline void validate_plan(const Plan& plan, const Scenario& scn) {
    std::vector<char> seen(scn.tasks.size(), 0);
    std::size_t covered = 0;
    for (const auto& [site_id, task_ids] : plan.assignment) {
        scn.site_index(site_id);
        for (const auto& tid : task_ids) {
            std::size_t t = scn.task_index(tid);
            if (seen[t])
                throw ValidationError("plan assigns task " + tid + " to more than one site");
            seen[t] = 1;
            ++covered;
        }
    }
    if (covered != scn.tasks.size()) {
        for (std::size_t t = 0; t < scn.tasks.size(); ++t)
            if (!seen[t])
                throw ValidationError("plan does not assign task " + scn.tasks[t].id);
    }
}

inline DensePlan to_dense(const Plan& plan, const Scenario& scn) {
    validate_plan(plan, scn);
    DensePlan dense(scn.tasks.size(), -1);
    for (const auto& [site_id, task_ids] : plan.assignment) {
        auto s = static_cast<std::int32_t>(scn.site_index(site_id));
        for (const auto& tid : task_ids) dense[scn.task_index(tid)] = s;
    }
    return dense;
}

// Expands to a Plan that lists every site, including empty ones.
inline Plan from_dense(const DensePlan& dense, const Scenario& scn) {
    if (dense.size() != scn.tasks.size())
        throw InternalError("dense plan size does not match task count");
    Plan plan;
    for (const auto& s : scn.sites) plan.assignment[s.id];
    for (std::size_t t = 0; t < dense.size(); ++t) {
        if (dense[t] < 0 || static_cast<std::size_t>(dense[t]) >= scn.sites.size())
            throw InternalError("dense plan holds an out-of-range site index");
        plan.assignment[scn.sites[static_cast<std::size_t>(dense[t])].id].insert(scn.tasks[t].id);
    }
    return plan;
}

inline std::size_t sites_used(const DensePlan& dense, const Scenario& scn) {
    std::vector<char> used(scn.sites.size(), 0);
    for (auto s : dense) used[static_cast<std::size_t>(s)] = 1;
    return static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
}

// Performance preference weight: 1 = pure performance, 0 = pure cost.
class BetaWeight {
public:
    explicit BetaWeight(double value) : value_(value) {
        if (!std::isfinite(value) || value < 0.0 || value > 1.0)
            throw ValidationError("beta must lie in [0, 1], got " + std::to_string(value));
    }
    double value() const { return value_; }

private:
    double value_;
};

struct PlanMetrics {
    std::vector<double> per_site_exec;          // seconds, aligned with scenario sites
    std::vector<double> per_site_running;       // seconds
    std::vector<std::int64_t> per_site_blocks;  // billed blocks
    std::int64_t total_blocks = 0;
    double overall_exec = 0.0;     // makespan: max per-site exec, deployment excluded
    double overall_running = 0.0;  // wall clock: max per-site running, deployment included
    double total_cost = 0.0;
    double score = 0.0;  // meaningful only relative to a candidate set; see score_plans
};

// --- per-task time components ------------------------------------------------

inline double transfer_time(const Task& task, std::size_t site, const Scenario& scn) {
    std::size_t loc = scn.location_index(task.location);
    if (site >= scn.sites.size()) throw ValidationError("site index out of range");
    return task.size * scn.rate(loc, site);
}

inline double compute_time(const Task& task, const CostModel& cost) {
    return task.size * cost.compute_rate;
}

inline double exec_time(const Task& task, std::size_t site, const Scenario& scn) {
    return transfer_time(task, site, scn) + compute_time(task, scn.cost);
}

// --- site-level aggregation ---------------------------------------------------

// Sum of exec times of the tasks a site holds, accumulated in canonical task
// order so the simulator can reproduce it bit for bit.
inline double site_exec_time_dense(const DensePlan& dense, std::size_t site, const Scenario& scn) {
    double acc = 0.0;
    for (std::size_t t = 0; t < dense.size(); ++t)
        if (static_cast<std::size_t>(dense[t]) == site) acc += exec_time(scn.tasks[t], site, scn);
    return acc;
}

inline double site_exec_time(const Plan& plan, const Site& site, const Scenario& scn) {
    return site_exec_time_dense(to_dense(plan, scn), scn.site_index(site.id), scn);
}

// A site is billed only if it runs something: deployment plus execution, or
// nothing at all.
inline double running_time(double site_exec, const CostModel& cost) {
    if (!(site_exec >= 0.0)) throw ValidationError("site exec time must be non-negative");
    return site_exec > 0.0 ? cost.deploy_time + site_exec : 0.0;
}

// --- billing ------------------------------------------------------------------

// Block accounting is done on integer microseconds so that a running time
// landing exactly on a block boundary bills exactly that many blocks; the
// quantisation also absorbs sub-microsecond float noise from summation.
inline std::int64_t to_micros(double seconds) {
    if (!detail::finite_nonneg(seconds)) throw ValidationError("time must be finite and non-negative");
    return std::llround(seconds * 1e6);
}

inline std::int64_t time_blocks(double running, const CostModel& cost) {
    std::int64_t run_us = to_micros(running);
    std::int64_t block_us = to_micros(cost.block_seconds);
    if (block_us <= 0) throw ValidationError("block_seconds too small to represent");
    return (run_us + block_us - 1) / block_us;
}

// Charged-but-unused tail of the last billed block, in microseconds. Zero for
// idle sites and for running times that are exact block multiples.
inline std::int64_t block_waste_micros(double running, const CostModel& cost) {
    std::int64_t run_us = to_micros(running);
    std::int64_t block_us = to_micros(cost.block_seconds);
    if (block_us <= 0) throw ValidationError("block_seconds too small to represent");
    std::int64_t rem = run_us % block_us;
    return rem == 0 ? 0 : block_us - rem;
}

// --- plan-level metrics ---------------------------------------------------------

inline PlanMetrics plan_metrics_dense(const DensePlan& dense, const Scenario& scn) {
    PlanMetrics m;
    std::size_t n_sites = scn.sites.size();
    m.per_site_exec.assign(n_sites, 0.0);
    m.per_site_running.assign(n_sites, 0.0);
    m.per_site_blocks.assign(n_sites, 0);
    for (std::size_t c = 0; c < n_sites; ++c) {
        double ex = site_exec_time_dense(dense, c, scn);
        double run = running_time(ex, scn.cost);
        m.per_site_exec[c] = ex;
        m.per_site_running[c] = run;
        m.per_site_blocks[c] = time_blocks(run, scn.cost);
        m.total_blocks += m.per_site_blocks[c];
        m.overall_exec = std::max(m.overall_exec, ex);
        m.overall_running = std::max(m.overall_running, run);
    }
    m.total_cost = static_cast<double>(m.total_blocks) * scn.cost.unit_cost;
    return m;
}

inline PlanMetrics plan_metrics(const Plan& plan, const Scenario& scn) {
    return plan_metrics_dense(to_dense(plan, scn), scn);
}

// --- scoring --------------------------------------------------------------------

// Eq-of-merit over a candidate population: beta-weighted sum of makespan and
// block count, each normalised by the population maximum. A degenerate
// all-zero component cannot discriminate, so its term is dropped for every
// candidate rather than dividing by zero. Writes each candidate's score back
// and returns the list.
inline std::vector<double> score_plans(std::vector<PlanMetrics>& candidates, BetaWeight beta) {
    if (candidates.empty()) throw ValidationError("score_plans needs at least one candidate");
    double max_exec = 0.0;
    std::int64_t max_blocks = 0;
    for (const auto& m : candidates) {
        max_exec = std::max(max_exec, m.overall_exec);
        max_blocks = std::max(max_blocks, m.total_blocks);
    }
    std::vector<double> scores;
    scores.reserve(candidates.size());
    const double b = beta.value();
    for (auto& m : candidates) {
        double exec_term = max_exec > 0.0 ? m.overall_exec / max_exec : 0.0;
        double block_term =
            max_blocks > 0 ? static_cast<double>(m.total_blocks) / static_cast<double>(max_blocks)
                           : 0.0;
        m.score = b * exec_term + (1.0 - b) * block_term;
        scores.push_back(m.score);
    }
    return scores;
}

// Relative comparison used by validators and tests.
inline bool approx_eq(double a, double b, double rel = 1e-9) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * std::max(scale, 1.0);
}

}  // namespace bodt
