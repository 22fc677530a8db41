#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spp/app.hpp"
#include "spp/config.hpp"
#include "spp/error.hpp"
#include "spp/scan_io.hpp"

namespace fs = std::filesystem;
using namespace spp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;
using nlohmann::json;

namespace {

const fs::path config_dir = fs::path(SPP_DATA_DIR) / "configs";

json fixture(const std::string& name) {
    return read_json_file(config_dir / name);
}

// Quantum fixture with a small Monte-Carlo budget to keep the tests quick.
json small_quantum() {
    json j = fixture("quantum.json");
    j["regimes"]["quantum"]["monte_carlo_instances"] = 40;
    return j;
}

ExperimentConfig parse(const json& j, const ConfigOverrides& o = {}) {
    return parse_config(j, o, config_dir);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("spp_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    write_text_file(p, j.dump(2));
    return p;
}

int run_tool(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(SPPDECO_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("simulate decay writes one file per waveguide") {
    const fs::path dir = fresh_dir("decay");
    const ExperimentConfig cfg = parse(fixture("quantum.json"));
    const cli::SimulateOutput out = cli::run_simulate(cfg, cli::SimKind::decay, dir);
    REQUIRE(out.files.size() == 4);
    CHECK(out.manifest["files"].size() == 4);
    CHECK(out.manifest["seed"] == 42);
    CHECK(out.manifest["config_hash"] == cfg.hash);
    CHECK(out.manifest_path == dir / "manifest_decay.json");
    for (const fs::path& f : out.files) {
        CHECK(fs::exists(f));
    }
    const DecayScan scan = read_decay_csv(dir / "decay_quantum_wg1.csv", Regime::quantum);
    REQUIRE(scan.points.size() == 1);
    CHECK_THAT(scan.points[0].length, WithinRel(7.47e-6, 1e-12));
    CHECK(slurp(dir / "decay_quantum_wg1.csv").starts_with("length_um,counts,integration_s\n"));
}

TEST_CASE("same config and seed give byte-identical files") {
    const json j = fixture("full.json");
    const ExperimentConfig cfg = parse(j);
    for (const cli::SimKind kind : {cli::SimKind::decay, cli::SimKind::fringe, cli::SimKind::g2}) {
        const fs::path a = fresh_dir("det_a");
        const fs::path b = fresh_dir("det_b");
        const cli::SimulateOutput ra = cli::run_simulate(cfg, kind, a);
        const cli::SimulateOutput rb = cli::run_simulate(parse(j), kind, b);
        REQUIRE(ra.files.size() == rb.files.size());
        for (std::size_t i = 0; i < ra.files.size(); ++i) {
            CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
        }
        CHECK(slurp(ra.manifest_path) == slurp(rb.manifest_path));
    }

    const ExperimentConfig reseeded = parse(j, ConfigOverrides{7, std::nullopt});
    CHECK(reseeded.seed == 7);
    CHECK(reseeded.hash != cfg.hash);
    const fs::path c = fresh_dir("det_c");
    const fs::path d = fresh_dir("det_d");
    cli::run_simulate(cfg, cli::SimKind::fringe, c);
    cli::run_simulate(reseeded, cli::SimKind::fringe, d);
    CHECK(slurp(c / "fringe_quantum_wg1.csv") != slurp(d / "fringe_quantum_wg1.csv"));
}

TEST_CASE("config validation names the offending field") {
    json no_seed = fixture("quantum.json");
    no_seed.erase("seed");
    try {
        parse(no_seed);
        FAIL("missing seed accepted");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "seed");
    }
    CHECK_NOTHROW(parse(no_seed, ConfigOverrides{3, std::nullopt}));

    json bad_length = fixture("quantum.json");
    bad_length["regimes"]["quantum"]["waveguides"][1]["length_um"] = -2.0;
    try {
        parse(bad_length);
        FAIL("negative length accepted");
    } catch (const ValidationError& e) {
        CHECK_THAT(e.field(), ContainsSubstring("waveguides") && ContainsSubstring("length_um"));
    }

    json bad_regime = fixture("quantum.json");
    bad_regime["regime"] = "semiclassical";
    CHECK_THROWS_AS(parse(bad_regime), ValidationError);
}

TEST_CASE("malformed JSON reports file and line") {
    const fs::path dir = fresh_dir("malformed");
    const fs::path p = dir / "broken.json";
    std::ofstream(p) << "{\n  \"seed\": 42,\n  \"noise\": \"poisson\"\n  \"regime\": \"quantum\"\n}\n";
    try {
        load_config(p);
        FAIL("malformed config parsed");
    } catch (const IoError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("broken.json:4"));
    }
    const std::array<fs::path, 1> files{p};
    try {
        cli::merge_results(files);
        FAIL("malformed result parsed");
    } catch (const IoError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("broken.json:4"));
    }
    CHECK_THROWS_AS(load_config(dir / "absent.json"), IoError);
}

TEST_CASE("fit reads simulate manifests back") {
    const fs::path dir = fresh_dir("fit");
    const ExperimentConfig cfg = parse(small_quantum());
    const cli::SimulateOutput decay = cli::run_simulate(cfg, cli::SimKind::decay, dir);
    const cli::SimulateOutput fringe = cli::run_simulate(cfg, cli::SimKind::fringe, dir);
    const std::array<fs::path, 2> manifests{decay.manifest_path, fringe.manifest_path};
    const json fit = cli::run_fit(manifests);
    const json& q = fit["regimes"]["quantum"];
    CHECK_THAT(q["decay"]["L_um"].get<double>(), WithinRel(5.61, 0.02));
    CHECK(q["waveguides"].size() == 4);
    CHECK(q.contains("line"));
    CHECK(q.contains("summary"));
    CHECK_THAT(q["summary"]["T2_s"].get<double>(), WithinRel(2.83e-14, 0.15));

    // Fitting the same manifests again is reproducible.
    CHECK(cli::run_fit(manifests).dump() == fit.dump());
}

TEST_CASE("report renders the decoherence table") {
    const ExperimentConfig both = parse(fixture("full.json"), ConfigOverrides{});
    json small = fixture("full.json");
    for (const char* r : {"classical", "quantum"}) {
        small["regimes"][r]["monte_carlo_instances"] = 30;
    }
    const cli::ReportRecord record = cli::run_pipeline(parse(small), std::nullopt);
    const std::string table = cli::render_report(record.to_json());
    for (const char* row : {"Gamma1 (1/s)", "Gamma2* (1/s)", "Gamma2 (1/s)", "T1 (s)",
                            "T2* (s)", "T2 (s)"}) {
        CHECK_THAT(table, ContainsSubstring(row));
    }
    const std::string header = table.substr(0, table.find('\n'));
    const auto classical = header.find("Classical");
    const auto quantum = header.find("Quantum");
    REQUIRE(classical != std::string::npos);
    REQUIRE(quantum != std::string::npos);
    CHECK(classical < quantum);
    CHECK_THAT(table, ContainsSubstring("+/-"));

    // A single regime gives a single column.
    const cli::ReportRecord one = cli::run_pipeline(parse(small_quantum()), std::nullopt);
    const std::string single = cli::render_report(one.to_json());
    CHECK(single.substr(0, single.find('\n')).find("Classical") == std::string::npos);
    CHECK(both.selected.size() == 2);
}

TEST_CASE("pipeline writes report.json and scans") {
    const fs::path dir = fresh_dir("pipeline");
    const cli::ReportRecord r = cli::run_pipeline(parse(small_quantum()), dir);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "decay_quantum.csv"));
    CHECK(fs::exists(dir / "fringe_quantum_wg4.csv"));
    const json j = read_json_file(dir / "report.json");
    CHECK(j["pass"] == r.pass());
    CHECK(j["regimes"]["quantum"]["checks"].contains("L_um"));
    CHECK(j["regimes"]["quantum"]["checks"].contains("T2_s"));
    CHECK(j["seed"] == 42);
}

TEST_CASE("zero-damping config takes T2 to 2 T1") {
    const cli::ReportRecord r = cli::run_pipeline(parse(fixture("zero_damping.json")), std::nullopt);
    const cli::RegimeResult& q = r.regime(Regime::quantum);
    REQUIRE(q.summary);
    const double t1 = q.summary->t1.value;
    // Gamma2* = 0 in the truth, so only noise separates T2 from 2 T1.
    CHECK_THAT(q.summary->t2.value, WithinRel(2.0 * t1, 0.15));
    CHECK(q.line->intercept.value > 0.0);
    const json j = r.to_json();
    CHECK(j["regimes"]["quantum"].contains("t2_at_bound"));
    CHECK(j["regimes"]["quantum"]["t2_at_bound"] == q.t2_at_bound);
    CHECK(q.t2_at_bound == q.slope_clamped);
}

TEST_CASE("JSON floats carry nine significant digits") {
    CHECK(json_number(1.0 / 3.0).dump() == "0.333333333");
    CHECK(json_number(2.8366911274182792e-14).get<double>() == 2.83669113e-14);
    CHECK(json_number(std::numeric_limits<double>::infinity()).is_null());
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = fresh_dir("exit");
    const fs::path log = dir / "log.txt";

    const fs::path good = write_json(dir, "good.json", small_quantum());
    CHECK(run_tool("pipeline --config " + good.string() + " --out " + (dir / "ok").string(), log) == 0);
    CHECK_THAT(slurp(log), ContainsSubstring("T2 (s)"));
    CHECK(run_tool("report " + (dir / "ok" / "report.json").string(), log) == 0);
    CHECK_THAT(slurp(log), ContainsSubstring("Quantum"));

    json strict = small_quantum();
    strict["regimes"]["quantum"]["expect"]["L_um"] = 9.0;
    const fs::path failing = write_json(dir, "failing.json", strict);
    CHECK(run_tool("pipeline --config " + failing.string() + " --out " + (dir / "f").string(), log) == 1);
    CHECK_THAT(slurp(log), ContainsSubstring("checks: FAIL"));

    json no_seed = small_quantum();
    no_seed.erase("seed");
    const fs::path unseeded = write_json(dir, "unseeded.json", no_seed);
    CHECK(run_tool("simulate --config " + unseeded.string() + " --out " + dir.string(), log) == 2);
    CHECK_THAT(slurp(log), ContainsSubstring("seed"));
    CHECK(run_tool("simulate --config " + unseeded.string() + " --seed 5 --out " +
                       (dir / "s").string(), log) == 0);
    CHECK(run_tool("simulate --out " + dir.string(), log) == 2);

    json short_scan = small_quantum();
    // Ten points at 40.5 nm cover half a fringe period.
    short_scan["regimes"]["quantum"]["fringe"]["positions"]["count"] = 10;
    const fs::path unfittable = write_json(dir, "short.json", short_scan);
    CHECK(run_tool("pipeline --config " + unfittable.string() + " --out " + (dir / "u").string(), log) == 3);
    CHECK_THAT(slurp(log), ContainsSubstring("wg1"));

    CHECK(run_tool("report " + (dir / "missing.json").string(), log) == 4);
    CHECK_THAT(slurp(log), ContainsSubstring("missing.json"));
}
