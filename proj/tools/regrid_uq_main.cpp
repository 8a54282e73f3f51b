#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "regrid_uq/commands.hpp"
#include "regrid_uq/errors.hpp"

using regrid_uq::CliOverrides;

int main(int argc, char** argv) {
    CLI::App app{"regrid_uq: grid-mismatch regridding with uncertainty propagation.\n"
                 "Coordinates are planar kilometers; project lon/lat upstream."};
    app.require_subcommand(1);

    std::string config_path, manifest_path, model_path, out_path, mode = "both";
    std::vector<std::string> report_inputs;
    bool emit_draws = false;
    std::uint64_t seed = 0;
    int threads = 0;
    bool seed_set = false, threads_set = false;

    auto add_seed_threads = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("--seed", seed, "override the master seed")->each([&](const std::string&) {
            seed_set = true;
        });
        if (with_threads) {
            cmd->add_option("--threads", threads, "worker thread cap")
                ->each([&](const std::string&) { threads_set = true; });
        }
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic study with known truth");
    synth->add_option("--config", config_path, "truth config file (omit for the default study)");
    synth->add_option("--out", out_path, "output directory")->required();
    add_seed_threads(synth, false);

    auto* fit = app.add_subcommand("fit", "fit transforms and GP covariance parameters");
    fit->add_option("--manifest", manifest_path, "dataset manifest")->required();
    fit->add_option("--config", config_path, "study config file");
    fit->add_option("--out", out_path, "fitted-model output file")->required();
    add_seed_threads(fit, true);

    auto* analyze = app.add_subcommand("analyze", "run the naive and/or Bayesian regressions");
    analyze->add_option("--manifest", manifest_path, "dataset manifest")->required();
    analyze->add_option("--model", model_path, "fitted-model file")->required();
    analyze->add_option("--config", config_path, "study config file");
    analyze->add_option("--mode", mode, "naive|bayes|both")->capture_default_str();
    analyze->add_option("--out", out_path, "output directory")->required();
    analyze->add_flag("--emit-draws", emit_draws, "also write the pooled posterior draws CSV");
    add_seed_threads(analyze, true);

    auto* eval = app.add_subcommand("eval", "leave-one-year-out coverage and RMSE");
    eval->add_option("--manifest", manifest_path, "dataset manifest")->required();
    eval->add_option("--model", model_path, "fitted-model file")->required();
    eval->add_option("--config", config_path, "study config file");
    eval->add_option("--out", out_path, "output directory")->required();
    add_seed_threads(eval, true);

    auto* report = app.add_subcommand("report", "concatenate summary CSVs into one table");
    report->add_option("--out", out_path, "combined output CSV")->required();
    report->add_option("inputs", report_inputs, "input CSV files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(regrid_uq::ExitCode::validation);
    }

    CliOverrides overrides;
    if (seed_set) overrides.seed = seed;
    if (threads_set) overrides.threads = threads;

    try {
        if (synth->parsed()) {
            regrid_uq::cmd_synth(config_path, out_path, overrides);
        } else if (fit->parsed()) {
            regrid_uq::cmd_fit(manifest_path, config_path, out_path, overrides);
        } else if (analyze->parsed()) {
            regrid_uq::cmd_analyze(manifest_path, config_path, model_path, mode, out_path,
                                   emit_draws, overrides);
        } else if (eval->parsed()) {
            regrid_uq::cmd_eval(manifest_path, config_path, model_path, out_path, overrides);
        } else if (report->parsed()) {
            regrid_uq::cmd_report(report_inputs, out_path);
        }
    } catch (const regrid_uq::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return static_cast<int>(regrid_uq::ExitCode::validation);
    } catch (const regrid_uq::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return static_cast<int>(regrid_uq::ExitCode::io);
    } catch (const regrid_uq::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return static_cast<int>(regrid_uq::ExitCode::numeric);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(regrid_uq::ExitCode::numeric);
    }
    return 0;
}
