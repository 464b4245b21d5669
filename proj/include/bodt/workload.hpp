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
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bodt/model.hpp"
#include "bodt/rng.hpp"

// Scenario files and synthetic scenario generation. The on-disk format is a
// versioned JSON document ("bodt-scenario v1"); see the README for the
// grammar. Saves are canonical: loading and re-saving any scenario, or
// saving the same scenario twice, produces identical bytes.

namespace bodt {

inline constexpr const char* scenario_format_tag = "bodt-scenario v1";

namespace workload_detail {

using json = nlohmann::ordered_json;

inline const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string(where) + " is missing required key '" + key + "'");
    return *it;
}

inline double require_number(const json& j, const char* key, const char* where) {
    const json& v = require(j, key, where);
    if (!v.is_number())
        throw ParseError(std::string(where) + " key '" + key + "' must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& j, const char* key, const char* where) {
    const json& v = require(j, key, where);
    if (!v.is_string())
        throw ParseError(std::string(where) + " key '" + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace workload_detail

inline Scenario scenario_from_json(const workload_detail::json& j) {
    using workload_detail::require;
    using workload_detail::require_number;
    using workload_detail::require_string;

    if (!j.is_object()) throw ParseError("scenario document must be a JSON object");
    std::string format = require_string(j, "format", "scenario");
    if (format != scenario_format_tag)
        throw ParseError("unsupported scenario format '" + format + "' (expected '" +
                         scenario_format_tag + "')");

    std::vector<DataLocation> locations;
    const auto& jlocs = require(j, "locations", "scenario");
    if (!jlocs.is_array() ) throw ParseError("'locations' must be an array");
    for (const auto& jl : jlocs) {
        DataLocation l;
        l.id = require_string(jl, "id", "location");
        if (jl.contains("label")) l.label = jl.at("label").get<std::string>();
        locations.push_back(std::move(l));
    }

    std::vector<Site> sites;
    const auto& jsites = require(j, "sites", "scenario");
    if (!jsites.is_array()) throw ParseError("'sites' must be an array");
    for (const auto& js : jsites) {
        Site s;
        s.id = require_string(js, "id", "site");
        if (js.contains("label")) s.label = js.at("label").get<std::string>();
        sites.push_back(std::move(s));
    }

    CostModel cost;
    const auto& jcost = require(j, "cost", "scenario");
    cost.compute_rate = require_number(jcost, "compute_rate", "cost");
    cost.deploy_time = require_number(jcost, "deploy_time", "cost");
    cost.block_seconds = require_number(jcost, "block_seconds", "cost");
    cost.unit_cost = require_number(jcost, "unit_cost", "cost");

    const auto& jmatrix = require(j, "transfer", "scenario");
    if (!jmatrix.is_array()) throw ParseError("'transfer' must be an array of rows");
    if (jmatrix.size() != locations.size())
        throw ParseError("'transfer' has " + std::to_string(jmatrix.size()) +
                         " rows, expected one per location (" +
                         std::to_string(locations.size()) + ")");
    for (std::size_t r = 0; r < jmatrix.size(); ++r) {
        const auto& row = jmatrix[r];
        if (!row.is_array())
            throw ParseError("'transfer' row for location " + locations[r].id +
                             " must be an array");
        // Dense rows: a short row means a missing (location, site) entry.
        if (row.size() < sites.size())
            throw ParseError("'transfer' is missing the entry for (" + locations[r].id + ", " +
                             sites[row.size()].id + ")");
        if (row.size() > sites.size())
            throw ParseError("'transfer' row for location " + locations[r].id + " has " +
                             std::to_string(row.size()) + " entries, expected one per site (" +
                             std::to_string(sites.size()) + ")");
        std::vector<double> rates;
        rates.reserve(row.size());
        for (const auto& v : row) {
            if (!v.is_number())
                throw ParseError("'transfer' entries for location " + locations[r].id +
                                 " must be numbers");
            rates.push_back(v.get<double>());
        }
        cost.transfer.push_back(std::move(rates));
    }

    std::vector<Task> tasks;
    const auto& jtasks = require(j, "tasks", "scenario");
    if (!jtasks.is_array()) throw ParseError("'tasks' must be an array");
    for (const auto& jt : jtasks) {
        Task t;
        t.id = require_string(jt, "id", "task");
        t.location = require_string(jt, "location", "task");
        t.size = require_number(jt, "size", "task");
        tasks.push_back(std::move(t));
    }

    return Scenario::validated(std::move(locations), std::move(sites), std::move(tasks),
                               std::move(cost));
}

inline workload_detail::json scenario_to_json(const Scenario& scn) {
    using workload_detail::json;
    json j;
    j["format"] = scenario_format_tag;
    j["units"] = {{"transfer_rate", "seconds per data unit"},
                  {"time", "seconds"},
                  {"cost", "currency per time block"}};
    j["cost"] = {{"compute_rate", scn.cost.compute_rate},
                 {"deploy_time", scn.cost.deploy_time},
                 {"block_seconds", scn.cost.block_seconds},
                 {"unit_cost", scn.cost.unit_cost}};
    j["locations"] = json::array();
    for (const auto& l : scn.locations) j["locations"].push_back({{"id", l.id}, {"label", l.label}});
    j["sites"] = json::array();
    for (const auto& s : scn.sites) j["sites"].push_back({{"id", s.id}, {"label", s.label}});
    j["transfer"] = json::array();
    for (const auto& row : scn.cost.transfer) j["transfer"].push_back(row);
    j["tasks"] = json::array();
    for (const auto& t : scn.tasks)
        j["tasks"].push_back({{"id", t.id}, {"location", t.location}, {"size", t.size}});
    return j;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    workload_detail::json j;
    try {
        j = workload_detail::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // e.what() carries the byte position of the failure.
        throw ParseError(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

inline void save_scenario(const Scenario& scn, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << scenario_to_json(scn).dump(2) << '\n';
    out.flush();
    if (!out) throw Error("failed writing scenario to: " + path);
}

// Knobs for the synthetic generator. Defaults mirror the desk-scale shape
// used throughout the test suite: many data locations, few sites, thousands
// of small tasks.
struct GenSpec {
    std::size_t n_locations = 47;
    std::size_t n_sites = 8;
    std::size_t n_tasks = 3290;
    double size_lo = 50.0;  // data units per task
    double size_hi = 200.0;
    double rate_lo = 0.002;  // seconds per unit at distance zero
    double rate_hi = 0.03;   // seconds per unit at the opposite side of the ring
    double compute_rate = 0.004;
    double deploy_time = 120.0;
    double block_seconds = 3600.0;
    double unit_cost = 1.0;
    // How far a location may sit from its site's ring position, in radians.
    // 0 puts every location exactly on a site.
    double cluster_spread = 0.1;
    std::uint64_t seed = 0;
};

// Sites sit evenly spaced on a ring; each location is dropped near one
// uniformly chosen site; the transfer rate grows linearly with ring distance
// from rate_lo to rate_hi. Proximity therefore matters: every location gets
// a distinct cheapest site (up to cluster overlap), like regions in a
// geo-distributed deployment. Pure function of its GenSpec, seed included.
inline Scenario generate_scenario(const GenSpec& spec) {
    if (spec.n_locations < 1 || spec.n_sites < 1 || spec.n_tasks < 1)
        throw ValidationError("generator counts must all be at least 1");
    if (!std::isfinite(spec.size_lo) || !std::isfinite(spec.size_hi) || spec.size_lo <= 0.0 ||
        spec.size_hi < spec.size_lo)
        throw ValidationError("size range must satisfy 0 < lo <= hi");
    if (!std::isfinite(spec.rate_lo) || !std::isfinite(spec.rate_hi) || spec.rate_lo < 0.0 ||
        spec.rate_hi < spec.rate_lo)
        throw ValidationError("rate range must satisfy 0 <= lo <= hi");
    if (!detail::finite_nonneg(spec.compute_rate))
        throw ValidationError("compute_rate must be finite and non-negative");
    if (!detail::finite_nonneg(spec.deploy_time))
        throw ValidationError("deploy_time must be finite and non-negative");
    if (!std::isfinite(spec.block_seconds) || spec.block_seconds <= 0.0)
        throw ValidationError("block_seconds must be positive");
    if (!detail::finite_nonneg(spec.unit_cost))
        throw ValidationError("unit_cost must be finite and non-negative");
    if (!std::isfinite(spec.cluster_spread) || spec.cluster_spread < 0.0)
        throw ValidationError("cluster_spread must be finite and non-negative");

    constexpr double tau = 2.0 * std::numbers::pi;
    Rng rng(spec.seed);

    const auto padded = [](const char* prefix, std::size_t i, std::size_t n) {
        int width = 1;
        for (std::size_t v = n - 1; v >= 10; v /= 10) ++width;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
        return std::string(buf);
    };

    std::vector<Site> sites;
    std::vector<double> site_angle(spec.n_sites);
    for (std::size_t c = 0; c < spec.n_sites; ++c) {
        site_angle[c] = tau * static_cast<double>(c) / static_cast<double>(spec.n_sites);
        sites.push_back({padded("site_", c, spec.n_sites), "ring site " + std::to_string(c)});
    }

    std::vector<DataLocation> locations;
    std::vector<double> loc_angle(spec.n_locations);
    for (std::size_t l = 0; l < spec.n_locations; ++l) {
        std::size_t home = rng.next_below(spec.n_sites);
        double jitter = spec.cluster_spread > 0.0
                            ? (rng.next_unit() * 2.0 - 1.0) * spec.cluster_spread
                            : 0.0;
        loc_angle[l] = site_angle[home] + jitter;
        locations.push_back(
            {padded("loc_", l, spec.n_locations), "near site " + std::to_string(home)});
    }

    CostModel cost;
    cost.compute_rate = spec.compute_rate;
    cost.deploy_time = spec.deploy_time;
    cost.block_seconds = spec.block_seconds;
    cost.unit_cost = spec.unit_cost;
    cost.transfer.assign(spec.n_locations, std::vector<double>(spec.n_sites, 0.0));
    for (std::size_t l = 0; l < spec.n_locations; ++l) {
        for (std::size_t c = 0; c < spec.n_sites; ++c) {
            double diff = std::fabs(loc_angle[l] - site_angle[c]);
            diff = std::fmod(diff, tau);
            double dist = std::min(diff, tau - diff);  // ring distance, 0..pi
            cost.transfer[l][c] =
                spec.rate_lo + (spec.rate_hi - spec.rate_lo) * (dist / std::numbers::pi);
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(spec.n_tasks);
    for (std::size_t t = 0; t < spec.n_tasks; ++t) {
        Task task;
        task.id = padded("task_", t, spec.n_tasks);
        task.location = locations[rng.next_below(spec.n_locations)].id;
        task.size = rng.next_in(spec.size_lo, spec.size_hi);
        tasks.push_back(std::move(task));
    }

    return Scenario::validated(std::move(locations), std::move(sites), std::move(tasks),
                               std::move(cost));
}

}  // namespace bodt
