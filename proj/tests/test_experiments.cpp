#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loggas/experiments.hpp"

using namespace loggas;
namespace fs = std::filesystem;

namespace {

ordered_json parse(const std::string& text) { return ordered_json::parse(text); }

ordered_json tiny_gdbm_config() {
    return parse(R"({
        "kind": "gdbm_run",
        "check": "moment_identity",
        "potential": {"kind": "quadratic", "theta": 0.5},
        "n": 16,
        "beta": 2.0,
        "dt": 0.005,
        "t_final": 0.25,
        "checkpoints": [0.25],
        "seed": 12,
        "trials": 16
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << bytes;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("test_artifacts") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config errors carry the offending field path", "[experiments]") {
    auto field_of = [](const ordered_json& config) {
        try {
            run_experiment(config);
        } catch (const config_error& e) {
            return e.field;
        }
        return std::string("<no error>");
    };

    CHECK(field_of(parse(R"({"kind": "warp_drive"})")) == "kind");
    CHECK(field_of(parse(R"({})")) == "kind");

    auto bad_dt = tiny_gdbm_config();
    bad_dt["dt"] = -0.5;
    CHECK(field_of(bad_dt) == "dt");
    bad_dt.erase("dt");
    CHECK(field_of(bad_dt) == "dt");

    auto bad_pot = tiny_gdbm_config();
    bad_pot["potential"]["kind"] = "septic";
    CHECK(field_of(bad_pot) == "potential.kind");

    auto no_seed = tiny_gdbm_config();
    no_seed.erase("seed");
    CHECK(field_of(no_seed) == "seed");

    auto bad_ck = tiny_gdbm_config();
    bad_ck["checkpoints"] = {0.0031};
    CHECK(field_of(bad_ck) == "checkpoints");
    bad_ck["checkpoints"] = {0.25, 0.1};
    CHECK(field_of(bad_ck) == "checkpoints");

    auto dw_moment = tiny_gdbm_config();
    dw_moment["potential"] = parse(R"({"kind": "quartic_double_well", "c": -1.0})");
    CHECK(field_of(dw_moment) == "potential.kind");

    CHECK(field_of(parse(R"({
        "kind": "matrix_crosscheck",
        "potential": {"kind": "quadratic", "theta": 0.5},
        "n": 4, "beta": 4.0, "dt": 0.01, "t_final": 0.1, "seed": 1
    })")) == "beta");

    CHECK(field_of(parse(R"({
        "kind": "burgers",
        "potential": {"kind": "quadratic", "theta": 0.5},
        "q": 32, "zs": [[2.0, 0.0]]
    })")) == "zs");

    CHECK(field_of(parse(R"({
        "kind": "burgers",
        "potential": {"kind": "quartic_double_well", "c": -1.0},
        "q": 32
    })")) == "potential.kind");

    CHECK(field_of(parse(R"({
        "kind": "mean_field_decay",
        "potential": {"kind": "quadratic", "theta": 0.5},
        "q": 32, "mode": "sideways"
    })")) == "mode");
}

TEST_CASE("list_kinds names every dispatcher branch", "[experiments]") {
    const auto kinds = list_kinds();
    REQUIRE(kinds.size() == 7);
    for (const auto& kind : kinds) {
        ordered_json config;
        config["kind"] = kind;
        // Every kind must at least reach its own parser (i.e. not be rejected
        // as an unknown kind).
        try {
            run_experiment(config);
        } catch (const config_error& e) {
            CHECK(e.field != "kind");
        } catch (const std::exception&) {
            // fine: got past kind dispatch
        }
    }
}

TEST_CASE("equilibrium audit experiment passes with analytic families", "[experiments]") {
    const auto config = parse(R"({
        "kind": "equilibrium_audit",
        "m": 1024,
        "c_values": [-3, 0],
        "include_semicircle": true
    })");
    const ExperimentResult result = run_experiment(config);
    CHECK(result.pass());
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].rows.size() == 3);       // semicircle + two quartic cases
    CHECK(result.checks.size() == 9);               // three checks per case
    CHECK(result.sidecar_name == "equilibrium_params.json");
    REQUIRE(result.sidecar.is_array());
    CHECK(result.sidecar.size() == 3);
    CHECK(result.sidecar[0]["family"] == "semicircle");
    CHECK(result.sidecar[1]["family"] == "two_cut_quartic");
    CHECK(result.sidecar[2]["family"] == "one_cut_quartic");

    const ordered_json summary = result.summary();
    CHECK(summary["kind"] == "equilibrium_audit");
    CHECK(summary["pass"] == true);
    REQUIRE(summary["checks"].is_array());
    CHECK(summary["checks"].size() == 9);
    CHECK(summary["checks"][0].contains("name"));
    CHECK(summary["checks"][0].contains("pass"));
}

TEST_CASE("gdbm moment identity run is deterministic and thread-count independent", "[experiments]") {
    const auto config = tiny_gdbm_config();
    const auto files_a = artifact_files(run_experiment(config));
    const auto files_b = artifact_files(run_experiment(config));
    REQUIRE(files_a.size() == files_b.size());
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        CHECK(files_a[i].first == files_b[i].first);
        CHECK(files_a[i].second == files_b[i].second);
    }

    auto threaded = config;
    threaded["thread_count"] = 3;
    const auto files_c = artifact_files(run_experiment(threaded));
    REQUIRE(files_c.size() == files_a.size());
    // CSV payloads must not depend on the worker count (the config echo in
    // the manifest differs, but every series does not).
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        if (files_a[i].first.size() > 4 &&
            files_a[i].first.substr(files_a[i].first.size() - 4) == ".csv") {
            CHECK(files_c[i].second == files_a[i].second);
        }
    }

    auto reseeded = config;
    reseeded["seed"] = 13;
    const auto files_d = artifact_files(run_experiment(reseeded));
    bool any_diff = false;
    for (std::size_t i = 0; i < files_a.size(); ++i)
        if (files_d[i].first == files_a[i].first && files_d[i].second != files_a[i].second) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("run_and_write then replay verifies byte-identical CSVs", "[experiments]") {
    const fs::path dir = fresh_dir("roundtrip");
    const auto config = tiny_gdbm_config();
    const RunOutcome outcome = run_and_write(config, dir.string());
    CHECK(outcome.pass);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "moment_identity.csv"));

    CHECK_NOTHROW(replay(dir / "manifest.json"));

    SECTION("a corrupted CSV row is reported by file and row") {
        const fs::path csv = dir / "moment_identity.csv";
        std::string bytes = slurp(csv);
        // mutate the second line (first data row)
        const std::size_t nl = bytes.find('\n');
        REQUIRE(nl != std::string::npos);
        const std::size_t target = nl + 1;
        bytes[target] = bytes[target] == '9' ? '8' : '9';
        spit(csv, bytes);
        try {
            replay(dir / "manifest.json");
            FAIL("expected replay_mismatch");
        } catch (const replay_mismatch& e) {
            CHECK(e.file == "moment_identity.csv");
            CHECK(e.row == 2);
        }
    }

    SECTION("a missing CSV is reported with row 0") {
        fs::remove(dir / "moment_identity.csv");
        try {
            replay(dir / "manifest.json");
            FAIL("expected replay_mismatch");
        } catch (const replay_mismatch& e) {
            CHECK(e.file == "moment_identity.csv");
            CHECK(e.row == 0);
        }
    }

    SECTION("an edited seed in the manifest makes replay fail") {
        const fs::path mpath = dir / "manifest.json";
        auto manifest = ordered_json::parse(slurp(mpath));
        manifest["config"]["seed"] = manifest["config"]["seed"].get<std::uint64_t>() + 1;
        spit(mpath, manifest.dump(2) + "\n");
        CHECK_THROWS_AS(replay(mpath), replay_mismatch);
    }

    SECTION("an edited thread_count leaves replay byte-identical") {
        const fs::path mpath = dir / "manifest.json";
        auto manifest = ordered_json::parse(slurp(mpath));
        manifest["config"]["thread_count"] = 4;
        spit(mpath, manifest.dump(2) + "\n");
        CHECK_NOTHROW(replay(mpath));
    }
}

TEST_CASE("manifest records per-file hashes and a combined content hash", "[experiments]") {
    const fs::path dir = fresh_dir("manifest_shape");
    run_and_write(parse(R"({"kind": "equilibrium_audit", "m": 512, "c_values": [0]})"), dir.string());
    const auto manifest = ordered_json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["library_version"] == library_version);
    CHECK(manifest["kind"] == "equilibrium_audit");
    CHECK(manifest["config"]["m"] == 512);
    REQUIRE(manifest.contains("files"));
    for (const auto& [name, hash] : manifest["files"].items()) {
        CHECK(fs::exists(dir / name));
        REQUIRE(hash.is_string());
        CHECK(hash.get<std::string>().size() == 64);
        CHECK(sha256_hex(slurp(dir / name)) == hash.get<std::string>());
    }
    CHECK(manifest["content_hash"].get<std::string>().size() == 64);
}

TEST_CASE("mean-field experiment kinds pass on small instances", "[experiments][slow]") {
    SECTION("stationarity mode") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "mean_field_decay",
            "mode": "stationarity",
            "potential": {"kind": "quadratic", "theta": 0.5},
            "q": 256, "t_final": 0.5, "checkpoints": [0.5], "w2_tol": 0.005
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        CHECK(r.series[0].name == "stationarity");
    }
    SECTION("decay mode with exponential bounds") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "mean_field_decay",
            "mode": "decay",
            "potential": {"kind": "quadratic", "theta": 0.5},
            "q": 256, "t_final": 0.5, "checkpoints": [0.5], "dt_max": 0.005
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        CHECK(r.series[0].columns ==
              std::vector<std::string>{"w2", "w2_bound", "sigma_rel", "sigma_bound"});
        REQUIRE(r.series[0].rows.size() == 2); // t = 0 plus one checkpoint
        CHECK(r.series[0].rows[1][0] < r.series[0].rows[0][0]);
    }
    SECTION("contraction of two dilated starts") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "contraction",
            "potential": {"kind": "quadratic", "theta": 0.5},
            "q": 128, "t_final": 0.5, "checkpoints": [0.25, 0.5], "dt_max": 0.005
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        CHECK(r.series[0].rows.size() == 3);
    }
    SECTION("burgers residual with explicit tolerance") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "burgers",
            "potential": {"kind": "quadratic", "theta": 0.5},
            "q": 128, "dt": 0.005, "t_final": 0.05, "residual_tol": 0.003
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        REQUIRE(!r.series[0].rows.empty());
        for (const auto& row : r.series[0].rows) CHECK(row[2] <= 0.003);
    }
    SECTION("double-well sweep single case") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "double_well_sweep",
            "q": 96, "t_final": 0.3, "slices": 3, "dt_max": 0.004, "m": 1024,
            "cases": [{"c": -1.0}]
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        CHECK(r.series[0].name == "double_well_c_m1");
        CHECK(r.series[0].columns == std::vector<std::string>{"sigma_v", "w2"});
    }
    SECTION("matrix crosscheck at beta = 1") {
        const ExperimentResult r = run_experiment(parse(R"({
            "kind": "matrix_crosscheck",
            "potential": {"kind": "quadratic", "theta": 0.5},
            "n": 6, "beta": 1.0, "dt": 0.005, "t_final": 0.1, "seed": 5, "trials": 40
        })"));
        CHECK(r.pass());
        REQUIRE(r.series.size() == 1);
        CHECK(r.series[0].rows.size() == 4);
    }
}

TEST_CASE("csv payloads have a header row and stable shape", "[experiments]") {
    const auto files = artifact_files(run_experiment(tiny_gdbm_config()));
    bool saw_csv = false;
    for (const auto& [name, bytes] : files) {
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
        saw_csv = true;
        REQUIRE(!bytes.empty());
        CHECK(bytes.substr(0, 2) == "t,");
        CHECK(bytes.back() == '\n');
    }
    CHECK(saw_csv);
}
