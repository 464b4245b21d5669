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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bodt/heuristics.hpp"
#include "bodt/workload.hpp"
#include "test_helpers.hpp"

using namespace bodt;
using namespace bodt::test;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch_dir() {
    std::filesystem::path p(BODT_SCRATCH_DIR);
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << text;
}

const char* minimal_doc = R"({
  "format": "bodt-scenario v1",
  "cost": {"compute_rate": 1.0, "deploy_time": 5.0, "block_seconds": 3600.0, "unit_cost": 1.0},
  "locations": [{"id": "l1"}],
  "sites": [{"id": "A"}, {"id": "B"}],
  "transfer": [[1.0, 2.0]],
  "tasks": [{"id": "t1", "location": "l1", "size": 10.0}]
})";

}  // namespace

TEST_CASE("a minimal scenario document loads") {
    auto path = scratch_dir() / "minimal_doc.json";
    spill(path, minimal_doc);
    Scenario scn = load_scenario(path.string());
    REQUIRE(scn.locations.size() == 1);
    REQUIRE(scn.sites.size() == 2);
    REQUIRE(scn.tasks.size() == 1);
    REQUIRE(scn.cost.deploy_time == 5.0);
    REQUIRE(scn.rate(0, scn.site_index("B")) == 2.0);
}

TEST_CASE("scenario documents round-trip exactly") {
    GenSpec spec;
    spec.n_locations = 5;
    spec.n_sites = 3;
    spec.n_tasks = 12;
    spec.seed = 7;
    Scenario scn = generate_scenario(spec);

    auto first = scratch_dir() / "round_a.json";
    auto second = scratch_dir() / "round_b.json";
    save_scenario(scn, first.string());
    Scenario loaded = load_scenario(first.string());
    save_scenario(loaded, second.string());

    REQUIRE(slurp(first) == slurp(second));
    REQUIRE(scenario_to_json(scn).dump(2) == scenario_to_json(loaded).dump(2));
}

TEST_CASE("saved documents carry the format tag and the units contract") {
    GenSpec spec;
    spec.n_locations = 2;
    spec.n_sites = 2;
    spec.n_tasks = 3;
    Scenario scn = generate_scenario(spec);
    auto j = scenario_to_json(scn);
    REQUIRE(j.at("format") == scenario_format_tag);
    REQUIRE(j.at("units").at("transfer_rate") == "seconds per data unit");
    REQUIRE(j.at("units").at("time") == "seconds");
}

TEST_CASE("parse failures point at the problem") {
    SECTION("missing matrix entry names the pair") {
        auto j = workload_detail::json::parse(minimal_doc);
        j["transfer"] = {{1.0}};  // one entry, two sites
        REQUIRE_THROWS_WITH(scenario_from_json(j),
                            ContainsSubstring("missing the entry for (l1, B)"));
    }
    SECTION("oversized row is reported") {
        auto j = workload_detail::json::parse(minimal_doc);
        j["transfer"] = {{1.0, 2.0, 3.0}};
        REQUIRE_THROWS_WITH(scenario_from_json(j),
                            ContainsSubstring("expected one per site"));
    }
    SECTION("row count must match locations") {
        auto j = workload_detail::json::parse(minimal_doc);
        j["transfer"] = {{1.0, 2.0}, {1.0, 2.0}};
        REQUIRE_THROWS_WITH(scenario_from_json(j),
                            ContainsSubstring("expected one per location"));
    }
    SECTION("non-numeric rate is reported") {
        auto j = workload_detail::json::parse(minimal_doc);
        j["transfer"] = {{1.0, "fast"}};
        REQUIRE_THROWS_WITH(scenario_from_json(j), ContainsSubstring("must be numbers"));
    }
    SECTION("wrong format tag") {
        auto j = workload_detail::json::parse(minimal_doc);
        j["format"] = "bodt-scenario v9";
        REQUIRE_THROWS_WITH(scenario_from_json(j),
                            ContainsSubstring("unsupported scenario format"));
    }
    SECTION("missing keys are named") {
        auto j = workload_detail::json::parse(minimal_doc);
        j.erase("tasks");
        REQUIRE_THROWS_WITH(scenario_from_json(j),
                            ContainsSubstring("missing required key 'tasks'"));
    }
    SECTION("malformed text reports the file") {
        auto path = scratch_dir() / "broken.json";
        spill(path, "{ not json");
        bool threw = false;
        try {
            load_scenario(path.string());
        } catch (const ParseError& e) {
            threw = true;
            REQUIRE_THAT(e.what(), ContainsSubstring("broken.json"));
        }
        REQUIRE(threw);
    }
    SECTION("missing file") {
        REQUIRE_THROWS_WITH(load_scenario((scratch_dir() / "nope.json").string()),
                            ContainsSubstring("cannot open scenario file"));
    }
}

TEST_CASE("saving to an unwritable path fails loudly") {
    GenSpec spec;
    spec.n_locations = 1;
    spec.n_sites = 1;
    spec.n_tasks = 1;
    Scenario scn = generate_scenario(spec);
    // A directory is not a writable file.
    REQUIRE_THROWS_AS(save_scenario(scn, scratch_dir().string()), Error);
}

TEST_CASE("generation is a pure function of its inputs") {
    GenSpec spec;
    spec.n_locations = 6;
    spec.n_sites = 4;
    spec.n_tasks = 20;
    spec.seed = 99;
    Scenario a = generate_scenario(spec);
    Scenario b = generate_scenario(spec);
    REQUIRE(scenario_to_json(a).dump() == scenario_to_json(b).dump());

    spec.seed = 100;
    Scenario c = generate_scenario(spec);
    REQUIRE(scenario_to_json(a).dump() != scenario_to_json(c).dump());
}

TEST_CASE("generated scenarios have the requested shape") {
    GenSpec spec;
    spec.n_locations = 10;
    spec.n_sites = 4;
    spec.n_tasks = 25;
    spec.size_lo = 5.0;
    spec.size_hi = 9.0;
    spec.rate_lo = 0.01;
    spec.rate_hi = 0.5;
    spec.seed = 3;
    Scenario scn = generate_scenario(spec);

    REQUIRE(scn.locations.size() == 10);
    REQUIRE(scn.sites.size() == 4);
    REQUIRE(scn.tasks.size() == 25);
    REQUIRE(scn.locations[0].id == "loc_0");
    REQUIRE(scn.sites[0].id == "site_0");
    REQUIRE(scn.tasks[0].id == "task_00");

    for (const auto& t : scn.tasks) {
        REQUIRE(t.size >= 5.0);
        REQUIRE(t.size <= 9.0);
    }
    for (const auto& row : scn.cost.transfer)
        for (double r : row) {
            REQUIRE(r >= 0.01);
            REQUIRE(r <= 0.5 + 1e-12);
        }
}

TEST_CASE("zero spread pins every location to a distinct cheapest site") {
    GenSpec spec;
    spec.n_locations = 12;
    spec.n_sites = 4;
    spec.n_tasks = 10;
    spec.cluster_spread = 0.0;
    spec.rate_lo = 0.1;
    spec.rate_hi = 2.0;
    spec.seed = 11;
    Scenario scn = generate_scenario(spec);

    for (const auto& row : scn.cost.transfer) {
        int at_floor = 0;
        for (double r : row)
            if (r == 0.1) ++at_floor;
        REQUIRE(at_floor == 1);  // exactly the home site sits at distance zero
        for (double r : row) REQUIRE(r >= 0.1);
    }
}

TEST_CASE("single-site generation pins the nearest plan") {
    GenSpec spec;
    spec.n_locations = 3;
    spec.n_sites = 1;
    spec.n_tasks = 8;
    spec.cluster_spread = 0.0;  // keep every location at distance zero exactly
    spec.seed = 5;
    Scenario scn = generate_scenario(spec);
    Plan p = nearest_plan(scn);
    REQUIRE(p.assignment.at("site_0").size() == 8);
    for (const auto& row : scn.cost.transfer) REQUIRE(row[0] == spec.rate_lo);
}

TEST_CASE("generator rejects nonsensical specs") {
    GenSpec ok;
    ok.n_locations = 2;
    ok.n_sites = 2;
    ok.n_tasks = 2;

    GenSpec bad = ok;
    bad.n_tasks = 0;
    REQUIRE_THROWS_AS(generate_scenario(bad), ValidationError);

    bad = ok;
    bad.size_hi = 1.0;
    bad.size_lo = 2.0;
    REQUIRE_THROWS_AS(generate_scenario(bad), ValidationError);

    bad = ok;
    bad.rate_hi = 0.001;
    bad.rate_lo = 0.01;
    REQUIRE_THROWS_AS(generate_scenario(bad), ValidationError);

    bad = ok;
    bad.block_seconds = 0.0;
    REQUIRE_THROWS_AS(generate_scenario(bad), ValidationError);

    bad = ok;
    bad.cluster_spread = -1.0;
    REQUIRE_THROWS_AS(generate_scenario(bad), ValidationError);
}
