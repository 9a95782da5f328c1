#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "plastokh/config.hpp"
#include "plastokh/csv.hpp"
#include "plastokh/errors.hpp"
#include "plastokh/report.hpp"

using namespace plastokh;

TEST_CASE("config round trip through the canonical text form") {
    RunConfig c;
    c.model.alpha = 0.7;
    c.model.beta = 0.03;
    c.model.Y = 0.2;
    c.cycle = {0.4, 1.1};
    c.nx = 11;
    c.ny_per_band = 4;
    c.nz = 7;
    c.y_max = 4.25;
    c.solver.tol = 1e-10;
    c.solver.relaxation = 1.3;
    c.epsilon_z = 0.001;
    c.march = false;
    c.mc.dt = 2e-4;
    c.mc.n_paths = 123;
    c.mc.horizon = 77.5;
    c.mc.seed = 987654321;
    c.solvability_tol = 3e-5;
    c.function = "cos_x";
    c.center = true;
    c.out_dir = "elsewhere";
    c.parallel = false;
    const RunConfig back = parse_config(render_config(c));
    CHECK(back == c);
}

TEST_CASE("defaults survive an empty configuration") {
    const RunConfig c = parse_config("");
    CHECK(c == RunConfig{});
}

TEST_CASE("comments and blank lines are ignored") {
    const RunConfig c = parse_config("# leading comment\n\n[grid]\nnx = 13 # trailing\n");
    CHECK(c.nx == 13);
}

TEST_CASE("parse errors carry the offending line") {
    const auto line_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("[nosuch]\n") == 1);
    CHECK(line_of("[grid]\nbogus = 1\n") == 2);
    CHECK(line_of("[grid]\nnx = 9\nnx = 11\n") == 3);
    CHECK(line_of("[grid]\nnx = watermelon\n") == 2);
    CHECK(line_of("nx = 9\n") == 1); // key before any section
}

TEST_CASE("model validation runs at parse time") {
    CHECK_THROWS_AS(parse_config("[model]\nc0 = -1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[cycle]\nybar = 2\nybar1 = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[solver]\nrelaxation = 2.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[grid]\ny_max = 0.5\n"), ValidationError);
}

TEST_CASE("volume csv round trip preserves every bit") {
    ModelParams p;
    p.Y = 0.1;
    const Grid3 g = build_grid(p, CycleLevels{0.5, 1.0}, 3, 2, 3, 2.0);
    Field3 f = Field3::sample(g, Region::Interior, [](double x, double y, double z) {
        return x / 3.0 + y / 7.0 + z / 11.0;
    });
    const std::string path = "csv_roundtrip_test.csv";
    export_volume(f, path);
    const std::vector<double> values = import_values(path);
    REQUIRE(static_cast<long>(values.size()) == f.size());
    long q = 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j : f.js())
            for (int k = 0; k < g.nz(); ++k) CHECK(values[q++] == f.at(i, j, k));
    std::remove(path.c_str());
}

TEST_CASE("surface csv writes both sheets in a fixed order") {
    ModelParams p;
    p.Y = 0.1;
    const Grid3 g = build_grid(p, CycleLevels{0.5, 1.0}, 3, 2, 3, 2.0);
    SurfaceField s = SurfaceField::constant(g, SurfaceLevel::Gamma1, 0.0);
    s.lower[0] = -5.0;
    s.upper[0] = 5.0;
    const std::string path = "surface_roundtrip_test.csv";
    export_surface(s, path);
    const std::vector<double> values = import_values(path);
    REQUIRE(values.size() == 2 * static_cast<size_t>(s.sheet_size()));
    CHECK(values.front() == -5.0);                 // lower sheet first
    CHECK(values[s.sheet_size()] == 5.0);          // then upper
    std::remove(path.c_str());
}

TEST_CASE("report serialization") {
    RunReport r;
    r.command = "solve-interior";
    r.seed = 42;
    r.add_stage("interior", 1e-12, 250, 0.5);
    r.add_check("mass", true, 1.0, 1.0, "exact");
    r.add_check("broken", false, 2.0, 1.0);
    CHECK_FALSE(r.all_passed());

    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["command"] == "solve-interior");
    CHECK(j["seed"] == 42);
    CHECK(j["stages"].size() == 1);
    CHECK(j["checks"].size() == 2);
    CHECK(j["all_passed"] == false);

    const std::string dir = "report_test_dir";
    r.write(dir);
    CHECK(std::filesystem::exists(dir + "/report.json"));
    CHECK(std::filesystem::exists(dir + "/run.log"));
    std::filesystem::remove_all(dir);
}
