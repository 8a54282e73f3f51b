#include "regrid_uq/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "regrid_uq/csv.hpp"
#include "regrid_uq/dataset.hpp"
#include "regrid_uq/errors.hpp"
#include "regrid_uq/eval.hpp"
#include "regrid_uq/log.hpp"
#include "regrid_uq/model_file.hpp"
#include "regrid_uq/pipeline.hpp"
#include "regrid_uq/synth.hpp"

namespace fs = std::filesystem;

namespace regrid_uq {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

StudyConfig load_study_config(const std::string& config_path, const CliOverrides& overrides) {
    StudyConfig cfg;
    if (!config_path.empty()) {
        cfg = StudyConfig::from_config(parse_config_file(config_path));
    }
    if (overrides.seed.has_value()) cfg.master_seed = *overrides.seed;
    if (overrides.threads.has_value()) cfg.threads = *overrides.threads;
    cfg.validate();
    return cfg;
}

AnalysisMode parse_mode(const std::string& mode) {
    if (mode == "naive") return AnalysisMode::naive;
    if (mode == "bayes") return AnalysisMode::bayes;
    if (mode == "both") return AnalysisMode::both;
    throw ValidationError("mode must be naive|bayes|both, got '" + mode + "'");
}

void check_model_against_manifest(const FittedModel& model, const DatasetManifest& manifest,
                                  const StudyConfig& cfg) {
    std::set<std::string> model_names;
    for (const auto& name : model.covariate_names()) model_names.insert(name);
    std::set<std::string> manifest_names;
    for (const auto& c : manifest.covariates) manifest_names.insert(c.name);
    if (model_names != manifest_names) {
        throw ValidationError("model/manifest mismatch: fitted covariates do not match the "
                              "manifest covariate set");
    }
    for (int m : cfg.months) {
        if (std::find(model.months.begin(), model.months.end(), m) == model.months.end()) {
            throw ValidationError("model/config mismatch: month " + std::to_string(m) +
                                  " was not fitted");
        }
    }
}

// The model file records the response scale it was fitted on; analysis
// follows the model, not the config default.
void adopt_model_scale(StudyConfig& cfg, const FittedModel& model) {
    if (model.response_scale == "transformed") {
        cfg.response_scale = ResponseScale::transformed;
    } else if (model.response_scale == "raw") {
        cfg.response_scale = ResponseScale::raw;
    } else {
        throw ValidationError("model file: unknown response_scale '" + model.response_scale + "'");
    }
}

csv::Table results_table(const std::vector<LocationResult>& results) {
    csv::Table t;
    t.header = {"location_id", "month",     "coef_name", "naive_est", "naive_lo",
                "naive_hi",    "bayes_median", "bayes_lo",  "bayes_hi",  "bias"};
    for (const auto& r : results) {
        for (const auto& c : r.coefficients) {
            t.rows.push_back({r.location_id, std::to_string(r.month), c.coef_name,
                              csv::format_double(c.naive_est), csv::format_double(c.naive_lo),
                              csv::format_double(c.naive_hi), csv::format_double(c.bayes_median),
                              csv::format_double(c.bayes_lo), csv::format_double(c.bayes_hi),
                              csv::format_double(c.bias)});
        }
    }
    return t;
}

csv::Table draws_table(const std::vector<LocationResult>& results, int n_post_per_sim) {
    csv::Table t;
    std::size_t n_beta = 0, n_gamma = 0;
    for (const auto& r : results) {
        if (!r.pooled_draws.empty()) {
            n_beta = static_cast<std::size_t>(r.pooled_draws.front().beta.size());
            n_gamma = static_cast<std::size_t>(r.pooled_draws.front().gamma.size());
            break;
        }
    }
    t.header = {"location_id", "month", "cond_sim_index", "post_draw_index"};
    for (std::size_t j = 0; j < n_beta; ++j) t.header.push_back("beta" + std::to_string(j));
    for (std::size_t j = 0; j < n_gamma; ++j) t.header.push_back("gamma" + std::to_string(j));
    t.header.push_back("sigma2");
    t.header.push_back("eta");
    for (const auto& r : results) {
        for (std::size_t d = 0; d < r.pooled_draws.size(); ++d) {
            const auto& pd = r.pooled_draws[d];
            std::vector<std::string> row{
                r.location_id, std::to_string(r.month),
                std::to_string(d / static_cast<std::size_t>(n_post_per_sim)),
                std::to_string(d % static_cast<std::size_t>(n_post_per_sim))};
            for (Eigen::Index j = 0; j < pd.beta.size(); ++j) {
                row.push_back(csv::format_double(pd.beta(j)));
            }
            for (Eigen::Index j = 0; j < pd.gamma.size(); ++j) {
                row.push_back(csv::format_double(pd.gamma(j)));
            }
            row.push_back(csv::format_double(pd.sigma2));
            row.push_back(pd.eta.has_value() ? csv::format_double(*pd.eta) : "nan");
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

}  // namespace

void cmd_synth(const std::string& config_path, const std::string& out_dir,
               const CliOverrides& overrides) {
    TruthConfig cfg = config_path.empty() ? TruthConfig::default_config()
                                          : TruthConfig::from_config(parse_config_file(config_path));
    if (overrides.seed.has_value()) cfg.master_seed = *overrides.seed;
    cfg.validate();

    const SyntheticStudy study = generate_study(cfg);
    ensure_dir(out_dir);
    ensure_dir(out_dir + "/truth");

    csv::write_grid(out_dir + "/target_grid.csv", study.target);
    csv::write_field(out_dir + "/response.csv", study.response_raw);
    std::string manifest_text = "[dataset]\nunits = W m^-2\n\n[response]\nname = ghi\n"
                                "field = response.csv\ngrid = target_grid.csv\n";
    for (std::size_t k = 0; k < study.covariate_names.size(); ++k) {
        const std::string& name = study.covariate_names[k];
        csv::write_grid(out_dir + "/native_" + name + "_grid.csv", study.native_grids[k]);
        csv::write_field(out_dir + "/cov_" + name + ".csv", study.covariates_raw[k]);
        csv::write_field(out_dir + "/truth/truth_" + name + ".csv",
                         Field(study.target, study.dates, study.truth_transformed[k]));
        manifest_text += "\n[covariate]\nname = " + name + "\nfield = cov_" + name +
                         ".csv\ngrid = native_" + name + "_grid.csv\n";
    }
    write_text(out_dir + "/manifest.cfg", manifest_text);

    std::string truth_text = "# generating truth (hidden from fitting)\n" + cfg.echo();
    truth_text += "\n[derived]\nresponse_nu = " + csv::format_double(study.response_nu) + "\n";
    for (std::size_t k = 0; k < study.covariate_names.size(); ++k) {
        truth_text += "nu_" + study.covariate_names[k] + " = " +
                      csv::format_double(study.covariate_nu[k]) + "\n";
    }
    write_text(out_dir + "/truth/truth_config.txt", truth_text);
    write_text(out_dir + "/synth_manifest.txt", "[synth]\ntool = regrid_uq\nversion = 1\n" + cfg.echo());
    log::info("synth: wrote study to ", out_dir);
}

void cmd_fit(const std::string& manifest_path, const std::string& config_path,
             const std::string& model_out, const CliOverrides& overrides) {
    const StudyConfig cfg = load_study_config(config_path, overrides);
    const DatasetManifest manifest = DatasetManifest::load(manifest_path);
    const Dataset data = load_dataset(manifest, cfg.months, cfg.years);
    const FittedModel model = fit_study(data, cfg);
    write_model_file(model_out, model);
    log::info("fit: wrote model to ", model_out);
}

void cmd_analyze(const std::string& manifest_path, const std::string& config_path,
                 const std::string& model_path, const std::string& mode,
                 const std::string& out_dir, bool emit_draws, const CliOverrides& overrides) {
    StudyConfig cfg = load_study_config(config_path, overrides);
    const AnalysisMode amode = parse_mode(mode);
    if (emit_draws && amode == AnalysisMode::naive) {
        throw ValidationError("--emit-draws requires mode bayes or both");
    }
    const DatasetManifest manifest = DatasetManifest::load(manifest_path);
    const FittedModel model = read_model_file(model_path);
    adopt_model_scale(cfg, model);
    check_model_against_manifest(model, manifest, cfg);
    const Dataset data = load_dataset(manifest, cfg.months, cfg.years);

    const std::vector<LocationResult> results =
        analyze_study(data, model, cfg, amode, emit_draws);

    ensure_dir(out_dir);
    csv::write_table(out_dir + "/results.csv", results_table(results));
    if (emit_draws) {
        csv::write_table(out_dir + "/draws.csv", draws_table(results, cfg.n_post_per_sim));
    }
    write_text(out_dir + "/run_manifest.txt", run_manifest_text(data, cfg, amode));
    log::info("analyze: wrote results to ", out_dir);
}

void cmd_eval(const std::string& manifest_path, const std::string& config_path,
              const std::string& model_path, const std::string& out_dir,
              const CliOverrides& overrides) {
    StudyConfig cfg = load_study_config(config_path, overrides);
    const DatasetManifest manifest = DatasetManifest::load(manifest_path);
    const FittedModel model = read_model_file(model_path);
    adopt_model_scale(cfg, model);
    check_model_against_manifest(model, manifest, cfg);
    const Dataset data = load_dataset(manifest, cfg.months, cfg.years);

    const std::vector<LocationResult> full_results =
        analyze_study(data, model, cfg, AnalysisMode::both, false);
    const EvalSummary summary = run_eval(data, cfg, model, full_results);

    ensure_dir(out_dir);
    csv::Table folds;
    folds.header = {"location_id", "month", "path", "test_year", "coverage", "rmse"};
    for (const auto& f : summary.folds) {
        folds.rows.push_back({f.location_id, std::to_string(f.month), f.path,
                              std::to_string(f.test_year), csv::format_double(f.coverage),
                              csv::format_double(f.rmse)});
    }
    csv::write_table(out_dir + "/eval_folds.csv", folds);

    csv::Table cells;
    cells.header = {"location_id", "month", "path", "mean_coverage", "mean_rmse"};
    for (const auto& c : summary.cells) {
        cells.rows.push_back({c.location_id, std::to_string(c.month), c.path,
                              csv::format_double(c.mean_coverage),
                              csv::format_double(c.mean_rmse)});
    }
    csv::write_table(out_dir + "/eval_summary.csv", cells);

    csv::Table bias;
    bias.header = {"location_id", "month", "coef_name", "bias"};
    for (const auto& b : summary.bias) {
        bias.rows.push_back(
            {b.location_id, std::to_string(b.month), b.coef_name, csv::format_double(b.bias)});
    }
    csv::write_table(out_dir + "/eval_bias.csv", bias);
    log::info("eval: wrote summaries to ", out_dir);
}

void cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    if (inputs.empty()) throw ValidationError("report: no input CSVs given");
    csv::Table combined;
    for (const auto& path : inputs) {
        const csv::Table t = csv::read_table(path);
        if (combined.header.empty()) {
            combined.header = t.header;
            combined.header.insert(combined.header.begin(), "source");
        } else if (!std::equal(t.header.begin(), t.header.end(), combined.header.begin() + 1,
                               combined.header.end())) {
            throw ValidationError("report: header of " + path + " differs from the first input");
        }
        for (const auto& row : t.rows) {
            std::vector<std::string> r{fs::path(path).stem().string()};
            r.insert(r.end(), row.begin(), row.end());
            combined.rows.push_back(std::move(r));
        }
    }
    csv::write_table(out_path, combined);
}

}  // namespace regrid_uq
