#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sticky/config.hpp"
#include "sticky/runner.hpp"
#include "sticky/trajectory_io.hpp"

using namespace sticky;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string minimal_config() {
    return R"({"model":{"d":1,"N":1,"potential":{"family":"gaussian","a":1.0},"s":1.0}})";
}

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("sticky_test_" + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal config parses with defaults filled") {
    const RunConfig cfg = parse_config(minimal_config());
    CHECK(cfg.model.d == 1);
    CHECK(cfg.scheme.h == Catch::Approx(0.05));
    CHECK(cfg.scheme.L == Catch::Approx(4.0));
    CHECK(cfg.replicas == 32);
    CHECK(cfg.sampler.sweeps == 200);  // 100*n + 100 for n=1
    CHECK(cfg.diagnostics.catalog == "default");
}

TEST_CASE("malformed json is a parse error") {
    CHECK_THROWS_AS(parse_config("{not json"), err::Parse);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), err::Parse);
}

TEST_CASE("unknown keys are rejected") {
    const std::string cfg =
        R"({"model":{"d":1,"N":1,"potential":{"family":"gaussian","a":1.0},"s":1.0},"extra":4})";
    try {
        parse_config(cfg);
        FAIL("expected validation error");
    } catch (const err::Validation& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0].find("unknown key 'extra'") != std::string::npos);
    }
}

TEST_CASE("validation aggregates violations with owning modules") {
    const std::string cfg = R"({
        "model": {"d":1, "N":1, "potential": {"family":"gaussian","a":1.0}, "s": 0.0},
        "replicas": 0
    })";
    try {
        parse_config(cfg);
        FAIL("expected validation error");
    } catch (const err::Validation& e) {
        REQUIRE(e.violations.size() == 2);
        CHECK(e.violations[0].find("InvalidStickiness") != std::string::npos);
        CHECK(e.violations[1].find("replicas") != std::string::npos);
    }
}

TEST_CASE("an oversized step is rejected with the dynamics bound") {
    const std::string cfg = R"({
        "model": {"d":1, "N":1, "potential": {"family":"gaussian","a":1.0}, "s": 0.05},
        "scheme": {"h": 0.5}
    })";
    try {
        parse_config(cfg);
        FAIL("expected validation error");
    } catch (const err::Validation& e) {
        bool cited = false;
        for (const auto& v : e.violations)
            if (v.find("StepTooLarge") != std::string::npos) cited = true;
        CHECK(cited);
    }
}

TEST_CASE("a divergent potential is rejected at config time") {
    const std::string cfg = R"({
        "model": {"d":1, "N":1, "potential": {"family":"quartic","a":-1.0,"c":0.0}, "s": 1.0}
    })";
    try {
        parse_config(cfg);
        FAIL("expected validation error");
    } catch (const err::Validation& e) {
        CHECK(e.what() == std::string(e.what()));
        bool cited = false;
        for (const auto& v : e.violations)
            if (v.find("KappaDiverges") != std::string::npos) cited = true;
        CHECK(cited);
    }
}

TEST_CASE("replica seed derivation is deterministic and collision free") {
    CHECK(derive_replica_seed(42, 0) != derive_replica_seed(42, 1));
    CHECK(derive_replica_seed(42, 3) == derive_replica_seed(42, 3));
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_replica_seed(42, i));
    CHECK(seen.size() == 10000);
    CHECK(derive_stream_seed(42, 1, kSamplerPurpose) != derive_stream_seed(42, 1, kChainPurpose));
}

TEST_CASE("trajectory dumps round trip") {
    const auto path = std::filesystem::temp_directory_path() / "sticky_traj_test.stky";
    {
        TrajectoryWriter writer(path.string(), 2, 0.1, 0.005);
        writer.append_frame(std::vector<double>{0.0, 0.3});
        writer.append_frame(std::vector<double>{0.1, 0.2});
        writer.append_frame(std::vector<double>{0.0, 0.1});
    }
    const TrajectoryData data = read_trajectory(path.string());
    CHECK(data.version == kTrajectoryVersion);
    CHECK(data.n == 2);
    CHECK(data.h == 0.1);
    CHECK(data.delta == 0.005);
    REQUIRE(data.frames.size() == 3);
    CHECK(data.frames[1] == std::vector<double>{0.1, 0.2});
    std::filesystem::remove(path);
}

TEST_CASE("experiment writes artifacts and reproduces them bit for bit") {
    RunConfig cfg = parse_config(R"({
        "model": {"d":1, "N":1, "potential": {"family":"gaussian","a":1.0}, "s": 1.0},
        "scheme": {"h": 0.1, "L": 4.0, "T": 3.0},
        "replicas": 32,
        "master_seed": 9              ,
        "diagnostics": {"catalog": "default", "dump_trajectory": true}
    })");

    const auto dir_a = temp_dir("runner_a");
    const auto dir_b = temp_dir("runner_b");

    cfg.out_dir = dir_a.string();
    const RunManifest m1 = run_experiment(cfg, 1);
    cfg.out_dir = dir_b.string();
    const RunManifest m2 = run_experiment(cfg, 2);

    CHECK(m1.config_hash != 0);
    CHECK(m1.replica_seeds.size() == 32);
    CHECK(m1.stage_status.at("simulation") == "ok");
    CHECK(m1.stage_status.at("quadrature") == "ok");
    CHECK(m1.stage_status.at("chain_oracle") == "ok");

    for (const char* name : {"occupancy.csv", "summary.json", "manifest.json"})
        CHECK(std::filesystem::exists(dir_a / name));

    // thread count must not leak into numeric outputs
    CHECK(slurp(dir_a / "occupancy.csv") == slurp(dir_b / "occupancy.csv"));
    CHECK(slurp(dir_a / "summary.json") == slurp(dir_b / "summary.json"));

    const TrajectoryData traj = read_trajectory((dir_a / "trajectory_r0.stky").string());
    CHECK(traj.n == 1);
    CHECK(traj.frames.size() == static_cast<std::size_t>(cfg.steps_per_replica()));

    // different master seed moves the numbers
    cfg.master_seed = 10;
    cfg.out_dir = temp_dir("runner_c").string();
    run_experiment(cfg, 1);
    CHECK(slurp(dir_a / "occupancy.csv") != slurp(cfg.out_dir + "/occupancy.csv"));

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove_all(cfg.out_dir);
}
