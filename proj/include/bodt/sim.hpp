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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bodt/model.hpp"
#include "bodt/rng.hpp"

// Replays a plan the way the planner's cost model assumes it executes:
// every site deploys, then runs its tasks back to back (fetch input, then
// compute), all sites in parallel. Deterministic mode reproduces the model's
// running times bit for bit; stochastic mode scales each task's transfer
// time by a log-normal factor to emulate unstable links.

namespace bodt {

struct NoiseSpec {
    std::uint64_t seed = 0;
    double sigma = 0.0;  // log-normal(0, sigma) multiplier on transfer time; 0 = off
};

// Intra-site execution order. The model is additive, so order cannot change
// finish times; it only affects trace readability. Scenarios are canonical
// (tasks sorted by id), which makes both orders the same sequence.
enum class TaskOrder { canonical, by_id };

enum class EventKind {
    deploy_start,
    deploy_end,
    transfer_start,
    transfer_end,
    compute_start,
    compute_end,
};

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::deploy_start: return "deploy_start";
        case EventKind::deploy_end: return "deploy_end";
        case EventKind::transfer_start: return "transfer_start";
        case EventKind::transfer_end: return "transfer_end";
        case EventKind::compute_start: return "compute_start";
        case EventKind::compute_end: return "compute_end";
    }
    throw InternalError("unhandled event kind");
}

struct SimEvent {
    double timestamp = 0.0;  // seconds
    std::string site;
    std::string task;  // empty for deploy events
    EventKind kind = EventKind::deploy_start;
};

struct SimTrace {
    std::vector<SimEvent> events;            // per site chronological, sites in id order
    std::vector<double> per_site_finish;     // indexed like scenario.sites; 0 if idle
    std::vector<std::int64_t> measured_blocks;  // per site, from simulated finish
    std::vector<double> per_task_transfer;   // effective transfer seconds per task
    double overall_finish = 0.0;             // max over sites of per_site_finish
    std::int64_t total_blocks = 0;
};

// Multiplier on a task's transfer time; must be positive.
using TransferMultiplier = std::function<double(std::size_t task_index)>;

// Core replay with explicit per-task transfer multipliers (the testing seam
// for noise properties). A site whose work sums to zero never runs and emits
// no events, mirroring the running-time rule, so per_site_finish always
// equals the model's running_time formula applied to the effective exec sum.
inline SimTrace simulate_with_transfer_multipliers(const Plan& plan, const Scenario& scn,
                                                   const TransferMultiplier& multiplier,
                                                   TaskOrder /*order*/ = TaskOrder::canonical) {
    DensePlan dense = to_dense(plan, scn);
    const std::size_t n_sites = scn.sites.size();
    const std::size_t n_tasks = scn.tasks.size();

    std::vector<std::vector<std::size_t>> site_tasks(n_sites);
    for (std::size_t t = 0; t < n_tasks; ++t)
        site_tasks[static_cast<std::size_t>(dense[t])].push_back(t);

    SimTrace trace;
    trace.per_site_finish.assign(n_sites, 0.0);
    trace.measured_blocks.assign(n_sites, 0);
    trace.per_task_transfer.assign(n_tasks, 0.0);

    const double dt = scn.cost.deploy_time;
    std::vector<double> trans_eff(n_tasks, 0.0), exec_eff(n_tasks, 0.0);
    for (std::size_t c = 0; c < n_sites; ++c) {
        double acc = 0.0;
        for (std::size_t t : site_tasks[c]) {
            double trans = transfer_time(scn.tasks[t], c, scn);
            if (multiplier) {
                double m = multiplier(t);
                if (!(m > 0.0) || !std::isfinite(m))
                    throw ValidationError("transfer multiplier must be finite and positive");
                trans = trans * m;
            }
            trans_eff[t] = trans;
            // Single addition per task, accumulated in task id order: the
            // exact arithmetic the model's exec sums use.
            exec_eff[t] = trans + compute_time(scn.tasks[t], scn.cost);
            acc += exec_eff[t];
        }
        if (!(acc > 0.0)) continue;  // site never runs; no deployment, no events

        trace.events.push_back({0.0, scn.sites[c].id, "", EventKind::deploy_start});
        trace.events.push_back({dt, scn.sites[c].id, "", EventKind::deploy_end});
        double sum = 0.0;
        for (std::size_t t : site_tasks[c]) {
            const std::string& task_id = scn.tasks[t].id;
            trace.events.push_back({dt + sum, scn.sites[c].id, task_id,
                                    EventKind::transfer_start});
            double mid = sum + trans_eff[t];
            trace.events.push_back({dt + mid, scn.sites[c].id, task_id,
                                    EventKind::transfer_end});
            trace.events.push_back({dt + mid, scn.sites[c].id, task_id,
                                    EventKind::compute_start});
            sum += exec_eff[t];
            trace.events.push_back({dt + sum, scn.sites[c].id, task_id,
                                    EventKind::compute_end});
            trace.per_task_transfer[t] = trans_eff[t];
        }
        trace.per_site_finish[c] = dt + sum;
        trace.measured_blocks[c] = time_blocks(trace.per_site_finish[c], scn.cost);
    }
    for (std::size_t c = 0; c < n_sites; ++c) {
        if (trace.per_site_finish[c] > trace.overall_finish)
            trace.overall_finish = trace.per_site_finish[c];
        trace.total_blocks += trace.measured_blocks[c];
    }
    return trace;
}

// Log-normal transfer multiplier for one task, derived from (seed, task), so
// the draw is independent of execution and iteration order.
inline double transfer_noise_multiplier(const NoiseSpec& noise, std::size_t task_index) {
    Rng rng(mix_seed(noise.seed, static_cast<std::uint64_t>(task_index)));
    return std::exp(noise.sigma * rng.next_normal());
}

// Replay under a noise model (none, or sigma = 0, is exact deterministic
// mode: no sampling happens at all).
inline SimTrace simulate(const Plan& plan, const Scenario& scn,
                         const std::optional<NoiseSpec>& noise = std::nullopt,
                         TaskOrder order = TaskOrder::canonical) {
    if (noise && !(noise->sigma >= 0.0))
        throw ValidationError("noise sigma must be non-negative");
    if (!noise || noise->sigma == 0.0)
        return simulate_with_transfer_multipliers(plan, scn, nullptr, order);
    NoiseSpec spec = *noise;
    return simulate_with_transfer_multipliers(
        plan, scn,
        [spec](std::size_t t) { return transfer_noise_multiplier(spec, t); }, order);
}

inline void write_trace_csv(const SimTrace& trace, std::ostream& out) {
    out << "timestamp,site,task,kind\n";
    char buf[64];
    for (const SimEvent& e : trace.events) {
        std::snprintf(buf, sizeof buf, "%.6f", e.timestamp);
        out << buf << ',' << e.site << ',' << e.task << ',' << event_kind_name(e.kind) << '\n';
    }
}

struct NamedPlan {
    std::string name;
    Plan plan;
};

struct PlanEvaluation {
    std::string name;
    std::size_t sites_used = 0;
    std::int64_t predicted_blocks = 0;
    double simulated_blocks_mean = 0.0;
    bool accurate = false;        // every repetition measured exactly the prediction
    bool underpredicted = false;  // some repetition needed more blocks than predicted
    double predicted_running = 0.0;  // max over sites of model running_time
    double simulated_running_mean = 0.0;
    double predicted_overall_exec = 0.0;  // deployment excluded
    double cost_increase = 0.0;  // simulated blocks mean / base plan's
    double speedup = 0.0;        // base plan's simulated running mean / this plan's
    double transfer_s_per_unit = 0.0;   // mean over tasks of seconds per data unit
    double transfer_units_per_s = 0.0;  // total data over total transfer seconds
};

struct EvaluationReport {
    std::vector<PlanEvaluation> rows;  // in input order
    std::size_t base_index = 0;        // fewest sites used; earliest wins ties
    std::int64_t repetitions = 1;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Measures every plan over `repetitions` simulated runs and reports
// prediction accuracy plus the cost/speedup ratios against a base plan: by
// default the row using the fewest sites (earliest wins ties), or the row
// named by base_index, so callers can keep a baseline row like the
// centralised plan out of the base role. Per-repetition seeds derive from
// (seed, repetition), so identical inputs always reproduce the same table.
inline EvaluationReport evaluate_plans(const std::vector<NamedPlan>& plans, const Scenario& scn,
                                       std::int64_t repetitions,
                                       const std::optional<NoiseSpec>& noise = std::nullopt,
                                       std::size_t base_index = SIZE_MAX) {
    if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
    if (base_index != SIZE_MAX && base_index >= plans.size())
        throw ValidationError("base plan index out of range");
    if (noise && !(noise->sigma >= 0.0))
        throw ValidationError("noise sigma must be non-negative");

    EvaluationReport report;
    report.repetitions = repetitions;
    if (noise) {
        report.sigma = noise->sigma;
        report.seed = noise->seed;
    }
    if (plans.empty()) return report;

    double total_size = 0.0;
    for (const Task& t : scn.tasks) total_size += t.size;

    for (const NamedPlan& np : plans) {
        DensePlan dense = to_dense(np.plan, scn);
        PlanMetrics metrics = plan_metrics_dense(dense, scn);
        PlanEvaluation row;
        row.name = np.name;
        row.sites_used = sites_used(dense, scn);
        row.predicted_blocks = metrics.total_blocks;
        row.predicted_running = metrics.overall_running;
        row.predicted_overall_exec = metrics.overall_exec;

        double blocks_sum = 0.0, running_sum = 0.0, transfer_total_sum = 0.0;
        double s_per_unit_sum = 0.0;
        row.accurate = true;
        for (std::int64_t rep = 0; rep < repetitions; ++rep) {
            std::optional<NoiseSpec> rep_noise;
            if (noise && noise->sigma > 0.0)
                rep_noise = NoiseSpec{mix_seed(noise->seed, static_cast<std::uint64_t>(rep)),
                                      noise->sigma};
            SimTrace trace = simulate(np.plan, scn, rep_noise);
            blocks_sum += static_cast<double>(trace.total_blocks);
            running_sum += trace.overall_finish;
            if (trace.total_blocks != metrics.total_blocks) row.accurate = false;
            if (trace.total_blocks > metrics.total_blocks) row.underpredicted = true;
            double rep_transfer = 0.0, rep_s_per_unit = 0.0;
            for (std::size_t t = 0; t < scn.tasks.size(); ++t) {
                rep_transfer += trace.per_task_transfer[t];
                rep_s_per_unit += trace.per_task_transfer[t] / scn.tasks[t].size;
            }
            transfer_total_sum += rep_transfer;
            s_per_unit_sum += rep_s_per_unit / static_cast<double>(scn.tasks.size());
        }
        double reps = static_cast<double>(repetitions);
        row.simulated_blocks_mean = blocks_sum / reps;
        row.simulated_running_mean = running_sum / reps;
        row.transfer_s_per_unit = s_per_unit_sum / reps;
        double mean_transfer_total = transfer_total_sum / reps;
        row.transfer_units_per_s =
            mean_transfer_total > 0.0 ? total_size / mean_transfer_total : 0.0;
        report.rows.push_back(std::move(row));
    }

    if (base_index != SIZE_MAX) {
        report.base_index = base_index;
    } else {
        report.base_index = 0;
        for (std::size_t i = 1; i < report.rows.size(); ++i)
            if (report.rows[i].sites_used < report.rows[report.base_index].sites_used)
                report.base_index = i;
    }

    const PlanEvaluation& base = report.rows[report.base_index];
    for (PlanEvaluation& row : report.rows) {
        row.cost_increase = base.simulated_blocks_mean > 0.0
                                ? row.simulated_blocks_mean / base.simulated_blocks_mean
                                : 0.0;
        row.speedup = row.simulated_running_mean > 0.0
                          ? base.simulated_running_mean / row.simulated_running_mean
                          : 0.0;
    }
    return report;
}

}  // namespace bodt
