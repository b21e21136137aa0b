#include <doctest.h>

#include <stdexcept>

#include "lgtau/config.hpp"
#include "lgtau/manifest.hpp"

using namespace lgtau;

TEST_CASE("FNV-1a reference vectors")
{
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("manifest serialization")
{
    RunManifest m;
    m.command = "tau";
    m.config = {{"R", 1.0}};
    m.input_hashes["config"] = fnv1a64_hex("R = 1");
    m.outputs = {"tau.json"};
    const auto j = to_json(m);
    CHECK(j.at("command") == "tau");
    CHECK(j.at("version") == kVersion);
    CHECK(j.at("outputs").size() == 1);
    CHECK(to_json(m).dump() == j.dump());
}

TEST_CASE("config parsing")
{
    const auto c = parse_config_string("# trochoid\n"
                                       "R = 2\n"
                                       "r0=1.5\n"
                                       "N = 8\n"
                                       "M = 256\n"
                                       "dt0 = 5e-3\n"
                                       "t0_end = 1.25\n"
                                       "targets = 1:0.3:0 2:0.01:-0.02\n"
                                       "target = 4:0:1e-3\n"
                                       "quad_self_test = 1\n");
    CHECK(c.R == 2.0);
    CHECK(c.r0 == 1.5);
    CHECK(c.N == 8);
    CHECK(c.solve.M == 256);
    CHECK(c.solve.dt0 == 5e-3);
    REQUIRE(c.t0_end.has_value());
    CHECK(*c.t0_end == 1.25);
    CHECK(c.solve.quad_self_test);
    CHECK(c.targets.size() == 3);
    const auto t = c.target_vector();
    REQUIRE(t.size() == 9);
    CHECK(t[0] == std::complex<double>(0.0));
    CHECK(t[2] == std::complex<double>(0.01, -0.02));
    CHECK(t[4] == std::complex<double>(0.0, 1e-3));
    CHECK_NOTHROW(c.validate());
    const auto j = to_json(c);
    CHECK(j.at("N") == 8);
}

TEST_CASE("config errors name the line")
{
    auto message = [](const std::string &text) {
        try {
            parse_config_string(text);
        } catch (const std::invalid_argument &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("R = 1\nfoo = 2\n").find("line 2") != std::string::npos);
    CHECK(message("R = abc\n").find("line 1") != std::string::npos);
    CHECK(message("targets = 0:1:0\n").find("line 1") != std::string::npos);
    CHECK_FALSE(message("targets = 1:x\n").empty());
    CHECK_THROWS_AS(parse_config_string("N = 2\ntargets = 3:0.1:0\n").target_vector(), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_string("R = -1\n").validate(), std::invalid_argument);
    CHECK_THROWS(load_config("/nonexistent/run.cfg"));
}
