#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regrid_uq/dataset.hpp"
#include "regrid_uq/model_file.hpp"
#include "regrid_uq/pipeline.hpp"

namespace regrid_uq {

struct Fold {
    std::vector<int> train_years;
    int test_year = 0;
};

// One fold per year; train on all others. Requires >= 2 distinct years.
std::vector<Fold> loyo_folds(std::vector<int> years);

// Fraction of actuals inside their closed interval [lo, hi].
double coverage(std::span<const std::pair<double, double>> intervals,
                std::span<const double> actuals);

// Root mean squared difference.
double rmse(std::span<const double> pred, std::span<const double> actual);

struct FoldCell {
    std::string location_id;
    int month = 0;
    std::string path;  // naive | bayes
    int test_year = 0;
    double coverage = 0.0;
    double rmse = 0.0;
};

struct EvalCell {
    std::string location_id;
    int month = 0;
    std::string path;
    double mean_coverage = 0.0;
    double mean_rmse = 0.0;
};

struct BiasCell {
    std::string location_id;
    int month = 0;
    std::string coef_name;
    double bias = 0.0;
};

struct EvalSummary {
    std::vector<FoldCell> folds;
    std::vector<EvalCell> cells;  // fold averages per (location, month, path)
    std::vector<BiasCell> bias;   // from the full-data results
};

// Per-coefficient naive-minus-Bayesian-median table; requires both paths.
std::vector<BiasCell> bias_map(const std::vector<LocationResult>& results);

// Leave-one-year-out evaluation of both paths. GP parameters, transforms and
// regressions are refit per fold; covariate drop decisions are frozen from
// full_model so coefficient sets stay comparable across folds. Coverage is
// judged on the model scale, RMSE on the raw response scale.
EvalSummary run_eval(const Dataset& data, const StudyConfig& cfg, const FittedModel& full_model,
                     const std::vector<LocationResult>& full_results);

}  // namespace regrid_uq
