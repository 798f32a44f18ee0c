#include "doctest.h"

#include <cstring>

#include "dfib/gates.hpp"
#include "dfib/protocols.hpp"
#include "json.hpp"

using namespace dfib;
using nlohmann::json;

namespace {

const char* kAll[] = {"theta-fusion", "tetra-fusion", "tailed-fusion", "braiding", "twist",
                      "ground-state:single-edge", "ground-state:tailed-theta"};

json dumped(const std::string& name) { return json::parse(circuit_to_json(build_experiment(parse_experiment(name)))); }

} // namespace

TEST_CASE("dump carries the documented fields") {
    auto j = dumped("theta-fusion");
    CHECK(j["version"] == 1);
    CHECK(j["experiment"] == "theta-fusion");
    CHECK(j["qubits"] == 4);
    REQUIRE(j["ops"].is_array());
    for (const auto& op : j["ops"]) {
        CHECK(op.contains("gate"));
        CHECK(op.contains("variant"));
        CHECK(op.contains("targets"));
        CHECK(op.contains("controls"));
        CHECK(op.contains("control_values"));
        CHECK(op.contains("stage"));
    }
    for (const auto& s : j["expected_stages"]) {
        CHECK(s["amplitudes"].size() == 16);
        CHECK(s["amplitudes"][0].size() == 2);
    }
}

TEST_CASE("every dumped gate name resolves") {
    for (auto n : kAll) {
        auto j = dumped(n);
        for (const auto& op : j["ops"]) {
            auto g = op["gate"].get<std::string>();
            if (g == "fmove") {
                CHECK_NOTHROW(parse_fmove_variant(op["variant"].get<std::string>()));
                CHECK(op["legs"].size() == 4);
            } else {
                CHECK_NOTHROW(named_gate(g, op["variant"].get<std::string>()));
            }
        }
    }
}

TEST_CASE("replayed circuits give identical reports") {
    for (auto n : kAll) {
        auto e = parse_experiment(n);
        e.shots = 500;
        e.seed = 3;
        auto ec = build_experiment(e);
        auto back = circuit_from_json(circuit_to_json(ec));
        CAPTURE(n);
        CHECK(report_to_json(run_experiment(back)) == report_to_json(run_experiment(ec)));
        CHECK(circuit_to_json(back) == circuit_to_json(ec));
    }
}

TEST_CASE("amplitudes survive the text round trip bit for bit") {
    auto ec = build_experiment(parse_experiment("braiding"));
    auto back = circuit_from_json(circuit_to_json(ec));
    REQUIRE(back.expected.size() == ec.expected.size());
    for (std::size_t s = 0; s < ec.expected.size(); ++s)
        for (std::size_t i = 0; i < ec.expected[s].state.size(); ++i) {
            cplx a = ec.expected[s].state[i], b = back.expected[s].state[i];
            CHECK(std::memcmp(&a, &b, sizeof a) == 0);
        }
    for (std::size_t i = 0; i < ec.circuit.ops.size(); ++i)
        CHECK(max_abs_diff(ec.circuit.ops[i].matrix, back.circuit.ops[i].matrix) == 0.0);
}

TEST_CASE("cancelled F-move pair is kept but not executed") {
    int skipped = 0;
    auto j = dumped("braiding");
    for (const auto& op : j["ops"])
        if (op.contains("executed") && !op["executed"].get<bool>()) {
            ++skipped;
            CHECK(op["gate"] == "fmove");
            CHECK(op.contains("note"));
        }
    CHECK(skipped >= 1);
}

TEST_CASE("malformed circuits are rejected") {
    auto good = dumped("theta-fusion");
    CHECK_THROWS_AS(circuit_from_json("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(circuit_from_json("{}"), std::invalid_argument);

    auto v = good;
    v["version"] = 2;
    CHECK_THROWS_AS(circuit_from_json(v.dump()), std::invalid_argument);

    auto g = good;
    g["ops"][0]["gate"] = "Toffoli";
    CHECK_THROWS_AS(circuit_from_json(g.dump()), std::invalid_argument);

    auto q = good;
    q["ops"][0]["targets"] = {7};
    CHECK_THROWS(circuit_from_json(q.dump()));

    auto n = good;
    n["qubits"] = 0;
    CHECK_THROWS_AS(circuit_from_json(n.dump()), std::invalid_argument);

    auto x = good;
    x["experiment"] = "nope";
    CHECK_THROWS_AS(circuit_from_json(x.dump()), std::invalid_argument);

    // fmove whose targets disagree with its legs
    auto f = good;
    for (auto& op : f["ops"])
        if (op["gate"] == "fmove") {
            op["targets"][0] = op["targets"][1];
            break;
        }
    CHECK_THROWS_AS(circuit_from_json(f.dump()), std::invalid_argument);

    auto t = good;
    t["ops"][0]["gate"] = 5;
    CHECK_THROWS_AS(circuit_from_json(t.dump()), std::invalid_argument);
}

TEST_CASE("report JSON schema") {
    auto e = parse_experiment("twist");
    e.shots = 100;
    auto j = json::parse(report_to_json(run_experiment(e)));
    CHECK(j["version"] == 1);
    CHECK(j["passed"] == true);
    CHECK(j["experiment"]["name"] == "twist");
    CHECK(j["experiment"]["shots"] == 100);
    CHECK(j["counts"]["0"] == 100);
    CHECK(j["phases"][0]["name"] == "control relative phase");
}
