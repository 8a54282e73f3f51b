#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "regrid_uq/dataset.hpp"
#include "regrid_uq/gp.hpp"
#include "regrid_uq/pipeline.hpp"

namespace regrid_uq {

// True generating process for one covariate: its native grid geometry and
// the GP law of its transformed field.
struct CovariateTruth {
    std::string name;
    int nx = 10, ny = 10;
    double spacing_km = 24.0;
    double origin_x = -38.0, origin_y = -38.0;
    double rotation_rad = 0.0;
    double offset_x = 0.0, offset_y = 0.0;
    double rho = 0.25;
    double theta_km = 60.0;
    double mu = 5.5;
};

struct TruthConfig {
    int target_nx = 8, target_ny = 8;
    double target_spacing_km = 20.0;
    double target_origin_x = 0.0, target_origin_y = 0.0;
    std::vector<CovariateTruth> covariates;
    std::vector<double> beta;   // intercept first, one per covariate after
    std::vector<double> gamma;  // seasonal sin/cos truth; empty = no seasonal term
    double sigma_eps = 0.5;     // response noise sd, transformed scale
    int days_per_month = 28;
    std::vector<int> months{2, 5, 8, 11};
    std::vector<int> years;
    std::uint64_t master_seed = 20240817;

    void validate() const;
    static TruthConfig from_config(const Config& cfg);
    // Desk-scale default: 8x8 target, three covariates on rotated/offset
    // native grids (rotations 0, 0.2, -0.15 rad), 4 months x 12 years.
    static TruthConfig default_config();
    std::string echo() const;
};

// A generated study. Fitting paths only ever see visible(); the target-grid
// covariate truth stays on this type.
struct SyntheticStudy {
    Grid target;
    std::vector<Date> dates;
    Field response_raw;
    std::vector<std::string> covariate_names;
    std::vector<Grid> native_grids;
    std::vector<Field> covariates_raw;
    std::vector<Eigen::MatrixXd> truth_transformed;  // hidden; days x target points
    std::vector<double> covariate_nu;                // true transform knees
    double response_nu = 1.0;
    TruthConfig config;

    Dataset visible() const;
};

// Joint native-union-target GP draws per (covariate, day); response built
// from the hidden target-grid truth with i.i.d. noise.
SyntheticStudy generate_study(const TruthConfig& cfg);

struct AttenuationRow {
    std::string location_id;
    int month = 0;
    std::string coef_name;
    double truth = 0.0;
    double naive_est = 0.0;
    double bayes_median = 0.0;
    bool truth_in_naive_ci = false;
    bool truth_in_bayes_ci = false;
    bool naive_in_bayes_ci = false;
};

struct AttenuationReport {
    std::vector<AttenuationRow> rows;
    double frac_truth_in_naive = 0.0;
    double frac_truth_in_bayes = 0.0;
    double frac_naive_in_bayes = 0.0;
};

// Runs both analysis paths on a generated study and scores the estimates
// against the configured truth.
AttenuationReport attenuation_benchmark(const TruthConfig& truth_cfg, const StudyConfig& study_cfg);

}  // namespace regrid_uq
