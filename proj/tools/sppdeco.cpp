// sppdeco: simulate, fit and summarise plasmonic decoherence experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spp/app.hpp"
#include "spp/config.hpp"
#include "spp/error.hpp"
#include "spp/scan_io.hpp"

namespace fs = std::filesystem;
using namespace spp;

namespace {

fs::path output_dir(const std::string& flag, const ExperimentConfig& config) {
    if (!flag.empty()) {
        return flag;
    }
    return config.output_dir.empty() ? fs::path("out") : config.output_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plasmonic waveguide decoherence: simulate, fit, report"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> regime;
    std::string kind = "decay";
    bool as_json = false;
    std::vector<std::string> inputs;

    const auto add_config_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
        sub->add_option("--seed", seed, "override the configured seed");
        sub->add_option("--regime", regime, "classical, quantum or both")
            ->check(CLI::IsMember({"classical", "quantum", "both"}));
    };

    CLI::App* simulate = app.add_subcommand("simulate", "write synthetic scans and a manifest");
    add_config_flags(simulate);
    simulate->add_option("--kind", kind, "decay, fringe or g2")
        ->check(CLI::IsMember({"decay", "fringe", "g2"}));
    simulate->add_option("--out", out_flag, "output directory");

    CLI::App* fit = app.add_subcommand("fit", "fit the scans listed in simulate manifests");
    fit->add_option("--manifest", inputs, "manifest_<kind>.json files")->required();
    fit->add_option("--out", out_flag, "write the fit JSON here instead of stdout");

    CLI::App* pipeline = app.add_subcommand("pipeline", "simulate, fit and check end to end");
    add_config_flags(pipeline);
    pipeline->add_option("--out", out_flag, "output directory");
    pipeline->add_flag("--json", as_json, "print the report JSON instead of the table");

    CLI::App* report = app.add_subcommand("report", "tabulate report or fit JSON files");
    report->add_option("files", inputs, "report.json or fit JSON files")->required();
    report->add_flag("--json", as_json, "print the merged JSON instead of the table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0; usage errors count as validation errors.
        const int code = app.exit(e);
        return code == 0 ? cli::exit_ok : cli::exit_validation;
    }

    try {
        if (fit->parsed()) {
            std::vector<fs::path> manifests(inputs.begin(), inputs.end());
            const std::string text = cli::run_fit(manifests).dump(2) + "\n";
            if (out_flag.empty()) {
                std::cout << text;
            } else {
                write_text_file(out_flag, text);
            }
            return cli::exit_ok;
        }
        if (report->parsed()) {
            std::vector<fs::path> files(inputs.begin(), inputs.end());
            const nlohmann::json merged = cli::merge_results(files);
            std::cout << (as_json ? merged.dump(2) + "\n" : cli::render_report(merged));
            return cli::exit_ok;
        }

        const ExperimentConfig config = load_config(config_path, ConfigOverrides{seed, regime});
        const fs::path out = output_dir(out_flag, config);
        if (simulate->parsed()) {
            const cli::SimulateOutput result =
                cli::run_simulate(config, cli::sim_kind_from_string(kind), out);
            std::cout << result.manifest.dump(2) << "\n";
            return cli::exit_ok;
        }

        const cli::ReportRecord record = cli::run_pipeline(config, out);
        const nlohmann::json j = record.to_json();
        std::cout << (as_json ? j.dump(2) + "\n" : cli::render_report(j));
        if (!as_json) {
            std::cout << "report: " << (out / "report.json").string() << "\n"
                      << "checks: " << (record.pass() ? "pass" : "FAIL") << "\n";
        }
        return record.pass() ? cli::exit_ok : cli::exit_checks_failed;
    } catch (const Error& e) {
        std::cerr << "sppdeco: " << e.what() << "\n";
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "sppdeco: " << e.what() << "\n";
        return cli::exit_io;
    }
}
