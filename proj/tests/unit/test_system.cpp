#include <algorithm>

#include "doctest.h"
#include "swarm/builtins.hpp"
#include "swarm/error.hpp"
#include "swarm/expression.hpp"
#include "swarm/system.hpp"

using namespace swarm;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
    return std::any_of(r.errors.begin(), r.errors.end(),
                       [&](const std::string& e) { return e.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("builtins validate") {
    CHECK(validate_system(builtin_lorenz()).ok());
    CHECK(validate_system(builtin_stn_gpe()).ok());
    CHECK(validate_system(builtin_hh_ring(1)).ok());
    CHECK(validate_system(builtin_hh_ring(3)).ok());
}

TEST_CASE("validation reports every problem by name") {
    SystemDefinition def = builtin_lorenz();
    def.state_variables[0].rhs = "sigma*(y-q)";
    def.groups[0].ic["y"] = {0.5, 0.2};
    def.parameters.push_back({"x", 0.0, 0.0, 1.0});
    def.parameters.push_back({"k", 5.0, 0.0, 1.0});
    def.techniques[0].axes = {"x", "y"};
    const ValidationReport r = validate_system(def);
    CHECK(mentions(r, "unknown identifier q in x.rhs"));
    CHECK(mentions(r, "empty initial-condition interval for y"));
    CHECK(mentions(r, "parameter x shadows a state variable"));
    CHECK(mentions(r, "parameter k: default outside [min, max]"));
    CHECK(mentions(r, "projection needs"));
    CHECK(r.errors.size() >= 5);

    SystemDefinition empty;
    CHECK(mentions(validate_system(empty), "no state variables"));

    SystemDefinition bad = builtin_lorenz();
    bad.state_variables[1].rhs = "x*(r-";
    CHECK(mentions(validate_system(bad), "y.rhs: cannot parse"));
    bad = builtin_lorenz();
    bad.groups[0].ic["z"] = {-20.0, 10.0};
    CHECK(mentions(validate_system(bad), "exceeds its bounds"));
    bad = builtin_lorenz();
    bad.state_variables[2].name = "exp";
    CHECK(mentions(validate_system(bad), "reserved name"));
}

TEST_CASE("save and load round-trip") {
    for (const auto& def : {builtin_lorenz(), builtin_stn_gpe(), builtin_hh_ring(3)}) {
        CAPTURE(def.name);
        const std::string doc = save_system(def);
        CHECK(load_system(doc) == def);
        CHECK(save_system(load_system(doc)) == doc);
        CHECK(std::all_of(doc.begin(), doc.end(), [](char c) { return static_cast<unsigned char>(c) < 128; }));
    }
    const std::string doc = save_system(builtin_lorenz());
    for (const char* key : {"\"sigma\"", "\"r\"", "\"beta\""}) CHECK(doc.find(key) != std::string::npos);
    const SystemDefinition loaded = load_system(doc);
    CHECK(loaded.state_variables.size() == 3);
    CHECK(loaded.parameters.size() == 3);
}

TEST_CASE("load rejects bad documents") {
    CHECK_THROWS_AS(load_system(""), SchemaError);
    CHECK_THROWS_AS(load_system("  \n"), SchemaError);
    CHECK_THROWS_AS(load_system("{}"), SchemaError);
    CHECK_THROWS_AS(load_system(R"({"name": "x", "state_variables": [{"name": "x", "rhs": "1"}]})"), SchemaError);
    try {
        load_system("{\"name\": \"a\",\n \"state_variables\": [ }");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position() > 0);
    }
    const char* unparsable = R"({"name": "s", "state_variables": [{"name": "x", "rhs": "x*(", "bounds": [0, 1]}]})";
    try {
        load_system(unparsable);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("x*(") != std::string::npos);
    }
    const char* minimal = R"({"name": "s", "state_variables": [{"name": "x", "rhs": "-x", "bounds": [0, 1]}]})";
    const SystemDefinition def = load_system(minimal);
    CHECK(def.dimension() == 1);
    CHECK(def.groups.empty());
}

TEST_CASE("lift_parameter") {
    const SystemDefinition lorenz = builtin_lorenz();
    const SystemDefinition lifted = lift_parameter(lorenz, "r", {0.0, 110.0}, {-1.0, 200.0});
    REQUIRE(lifted.dimension() == 4);
    CHECK(lifted.state_variables[3].name == "r");
    CHECK(lifted.state_variables[3].rhs == "0");
    CHECK(lifted.find_parameter("r") == nullptr);
    CHECK(lifted.parameters.size() == 2);
    CHECK(lifted.ic_range(lifted.groups[0], 3) == Interval{0.0, 110.0});
    CHECK(validate_system(lifted).ok());
    CHECK_THROWS_AS(lift_parameter(lorenz, "q", {0, 1}, {0, 1}), UnknownParameter);

    // Same semantics with r bound as parameter or as state.
    Bindings original{{"x", 1.5}, {"y", -2.0}, {"z", 7.0}, {"sigma", 10.0}, {"beta", 8.0 / 3.0}, {"r", 13.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(eval(parse(lorenz.state_variables[i].rhs), original) ==
              eval(parse(lifted.state_variables[i].rhs), original));
    }

    const SystemDefinition stn = lift_parameter(builtin_stn_gpe(), "w_ss", {0.0, 15.0}, {-1.0, 16.0});
    CHECK(stn.dimension() == 3);
    CHECK(validate_system(stn).ok());
}
