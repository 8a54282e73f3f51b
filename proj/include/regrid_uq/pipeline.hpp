#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regrid_uq/bayes_lm.hpp"
#include "regrid_uq/config.hpp"
#include "regrid_uq/dataset.hpp"
#include "regrid_uq/gp.hpp"
#include "regrid_uq/model_file.hpp"

namespace regrid_uq {

enum class ResponseScale { transformed, raw };
enum class Sigma2Mode { sample, plugin };
enum class ErrorFamily { none, ar1, ma1 };
enum class AnalysisMode { naive, bayes, both };

struct StudyConfig {
    std::vector<int> months{2, 5, 8, 11};
    std::vector<int> years;  // empty: every year present in the data
    int n_cond_sims = 100;
    int n_post_per_sim = 50;
    double ci_level = 0.95;
    double drop_pvalue = 0.05;
    ResponseScale response_scale = ResponseScale::transformed;
    Sigma2Mode sigma2_mode = Sigma2Mode::sample;
    ErrorFamily arma_family = ErrorFamily::none;
    bool seasonal_harmonics = false;
    std::uint64_t master_seed = 1;
    int threads = 1;

    void validate() const;
    static StudyConfig from_config(const Config& cfg);
    std::string echo() const;
};

struct CoefficientSummary {
    std::string coef_name;
    double naive_est = 0.0, naive_lo = 0.0, naive_hi = 0.0;
    double bayes_median = 0.0, bayes_lo = 0.0, bayes_hi = 0.0;
    double bias = 0.0;  // naive_est - bayes_median
};

struct LocationResult {
    std::string location_id;
    int month = 0;
    std::vector<CoefficientSummary> coefficients;
    std::vector<PosteriorDraw> pooled_draws;  // kept only when requested
};

// Working set for one month on the model scale: regridded covariates plus
// everything analyze_location needs.
struct MonthContext {
    int month = 0;
    std::vector<Date> dates;
    Eigen::MatrixXd response;      // model scale, days x target points
    Eigen::MatrixXd response_raw;  // raw scale
    std::optional<TransformSpec> response_transform;
    std::vector<std::string> covariate_names;  // retained only
    std::vector<TransformSpec> covariate_transforms;
    std::vector<KrigingOperator> ops;
    std::vector<Eigen::MatrixXd> kriging_means;  // per covariate: days x target points
    std::vector<Eigen::VectorXd> cond_sd;        // per covariate: per-point marginal sd
    Eigen::MatrixXd seasonal;                    // days x (0 or 2)
    std::vector<std::string> coef_names;         // intercept, covariates, seasonal
    Grid target = Grid("unset", {GridPoint{"unset", 0.0, 0.0}});

    RegressionDesign naive_design(std::size_t location) const;
    // Seasonal columns for arbitrary dates; empty when seasonal terms are off.
    Eigen::MatrixXd seasonal_for(const std::vector<Date>& dates) const;
};

// Transform + GP MLE fits for every (covariate, month); no drop decisions.
FittedModel fit_gp_stage(const Dataset& data, const StudyConfig& cfg);

// Retention votes: drop covariate k when its naive-fit p-value exceeds the
// threshold at strictly more than half the locations. Refuses to drop all.
std::vector<bool> drop_covariates(const Eigen::MatrixXd& pvalues, double threshold);

// fit_gp_stage plus per-month drop decisions from full-data naive fits.
FittedModel fit_study(const Dataset& data, const StudyConfig& cfg);

MonthContext build_month_context(const Dataset& data, const FittedModel& model,
                                 const StudyConfig& cfg, int month);

// Naive path: X is the kriging mean for every day; classical t intervals.
LocationResult naive_fit(const MonthContext& ctx, const StudyConfig& cfg, std::size_t location);

// Two-step path: n_cond_sims conditional simulations of X, n_post_per_sim
// conjugate posterior draws each, pooled and summarized by median and
// (1 +/- ci_level)/2 sample quantiles.
LocationResult bayes_two_step(const MonthContext& ctx, const StudyConfig& cfg,
                              std::size_t location, bool keep_draws = false);

// Both paths for one location; bias = naive - bayes median per coefficient.
LocationResult analyze_location(const MonthContext& ctx, const StudyConfig& cfg,
                                std::size_t location, AnalysisMode mode, bool keep_draws = false);

// Every (month, location) analyzed under an already-fitted model.
std::vector<LocationResult> analyze_study(const Dataset& data, const FittedModel& model,
                                          const StudyConfig& cfg, AnalysisMode mode,
                                          bool keep_draws = false);

struct StudyRun {
    FittedModel model;
    std::vector<LocationResult> results;  // ordered by (month, location)
    std::string manifest_text;
};

StudyRun run_study(const Dataset& data, const StudyConfig& cfg,
                   AnalysisMode mode = AnalysisMode::both, bool keep_draws = false);

std::string run_manifest_text(const Dataset& data, const StudyConfig& cfg, AnalysisMode mode,
                              double elapsed_seconds = -1.0);

// Draw-stream tags: master_seed -> derive_path(master, {tag, month, location,
// covariate, day, sim, ...}) so any study subset recomputes in isolation.
namespace seedtag {
inline constexpr std::uint64_t cond_sim = 0xC5;
inline constexpr std::uint64_t sigma2 = 0x52;
inline constexpr std::uint64_t coef = 0xCF;
inline constexpr std::uint64_t eta = 0xE7;
inline constexpr std::uint64_t predict = 0x9D;
inline constexpr std::uint64_t field = 0xF1;
inline constexpr std::uint64_t noise = 0xF2;
inline constexpr std::uint64_t fold = 0xFD;
}  // namespace seedtag

}  // namespace regrid_uq
