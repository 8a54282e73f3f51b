#include "regrid_uq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "regrid_uq/csv.hpp"
#include "regrid_uq/errors.hpp"
#include "regrid_uq/rng.hpp"
#include "regrid_uq/transform.hpp"

namespace regrid_uq {

namespace {

// Standard normal 20th-percentile; knees are placed so the population 20th
// percentile of the raw field equals the configured transform knee.
constexpr double kZ20 = -0.8416212335729142;

double true_nu_for(double mu, double variance) { return std::exp(mu + kZ20 * std::sqrt(variance)); }

}  // namespace

void TruthConfig::validate() const {
    if (covariates.empty()) throw ValidationError("truth config: need at least one covariate");
    if (beta.size() != covariates.size() + 1) {
        throw ValidationError("truth config: beta must have length (covariates + 1)");
    }
    if (!gamma.empty() && gamma.size() != 2) {
        throw ValidationError("truth config: gamma must be empty or length 2 (sin, cos)");
    }
    if (sigma_eps < 0.0) throw ValidationError("truth config: sigma_eps must be >= 0");
    if (days_per_month < 1 || days_per_month > 28) {
        throw ValidationError("truth config: days_per_month must be in 1..28");
    }
    if (months.empty() || years.empty()) {
        throw ValidationError("truth config: months and years must be nonempty");
    }
    for (const auto& c : covariates) {
        if (!(c.rho > 0.0) || !(c.theta_km > 0.0)) {
            throw ValidationError("truth config: covariate '" + c.name + "' needs rho, theta > 0");
        }
        if (c.nx < 1 || c.ny < 1 || !(c.spacing_km > 0.0)) {
            throw ValidationError("truth config: covariate '" + c.name + "' has a bad grid spec");
        }
    }
}

TruthConfig TruthConfig::default_config() {
    TruthConfig cfg;
    cfg.years.resize(12);
    for (int i = 0; i < 12; ++i) cfg.years[static_cast<std::size_t>(i)] = 1998 + i;
    cfg.covariates = {
        {"rcm_a", 10, 10, 24.0, -38.0, -38.0, 0.0, 0.0, 0.0, 0.25, 60.0, 5.5},
        {"rcm_b", 10, 10, 24.0, -38.0, -38.0, 0.2, 0.0, 0.0, 0.25, 60.0, 5.3},
        {"rcm_c", 10, 10, 24.0, -38.0, -38.0, -0.15, 0.0, 0.0, 0.25, 60.0, 5.7},
    };
    cfg.beta = {0.5, 1.0, 0.6, -0.4};
    return cfg;
}

TruthConfig TruthConfig::from_config(const Config& cfg) {
    TruthConfig out = default_config();
    out.covariates.clear();
    const auto& target = cfg.require("target");
    out.target_nx = target.get_int_or("nx", out.target_nx);
    out.target_ny = target.get_int_or("ny", out.target_ny);
    out.target_spacing_km = target.get_double_or("spacing_km", out.target_spacing_km);
    out.target_origin_x = target.get_double_or("origin_x", out.target_origin_x);
    out.target_origin_y = target.get_double_or("origin_y", out.target_origin_y);

    for (const auto* s : cfg.all("covariate")) {
        CovariateTruth c;
        c.name = s->get("name");
        c.nx = s->get_int_or("nx", c.nx);
        c.ny = s->get_int_or("ny", c.ny);
        c.spacing_km = s->get_double_or("spacing_km", c.spacing_km);
        c.origin_x = s->get_double_or("origin_x", c.origin_x);
        c.origin_y = s->get_double_or("origin_y", c.origin_y);
        c.rotation_rad = s->get_double_or("rotation_rad", 0.0);
        c.offset_x = s->get_double_or("offset_x", 0.0);
        c.offset_y = s->get_double_or("offset_y", 0.0);
        c.rho = s->get_double_or("rho", c.rho);
        c.theta_km = s->get_double_or("theta_km", c.theta_km);
        c.mu = s->get_double_or("mu", c.mu);
        out.covariates.push_back(std::move(c));
    }

    const auto& truth = cfg.require("truth");
    out.beta = truth.get_double_list("beta");
    if (truth.has("gamma")) out.gamma = truth.get_double_list("gamma");
    out.sigma_eps = truth.get_double_or("sigma_eps", out.sigma_eps);
    out.days_per_month = truth.get_int_or("days_per_month", out.days_per_month);
    if (truth.has("months")) out.months = truth.get_int_list("months");
    if (truth.has("years")) out.years = truth.get_int_list("years");
    out.master_seed = truth.get_u64_or("master_seed", out.master_seed);
    out.validate();
    return out;
}

std::string TruthConfig::echo() const {
    std::ostringstream os;
    os << "[target]\n";
    os << "nx = " << target_nx << "\nny = " << target_ny << "\n";
    os << "spacing_km = " << csv::format_double(target_spacing_km) << "\n";
    os << "origin_x = " << csv::format_double(target_origin_x) << "\n";
    os << "origin_y = " << csv::format_double(target_origin_y) << "\n";
    for (const auto& c : covariates) {
        os << "\n[covariate]\n";
        os << "name = " << c.name << "\n";
        os << "nx = " << c.nx << "\nny = " << c.ny << "\n";
        os << "spacing_km = " << csv::format_double(c.spacing_km) << "\n";
        os << "origin_x = " << csv::format_double(c.origin_x) << "\n";
        os << "origin_y = " << csv::format_double(c.origin_y) << "\n";
        os << "rotation_rad = " << csv::format_double(c.rotation_rad) << "\n";
        os << "offset_x = " << csv::format_double(c.offset_x) << "\n";
        os << "offset_y = " << csv::format_double(c.offset_y) << "\n";
        os << "rho = " << csv::format_double(c.rho) << "\n";
        os << "theta_km = " << csv::format_double(c.theta_km) << "\n";
        os << "mu = " << csv::format_double(c.mu) << "\n";
    }
    os << "\n[truth]\n";
    os << "beta = ";
    for (std::size_t i = 0; i < beta.size(); ++i) os << (i ? "," : "") << csv::format_double(beta[i]);
    os << "\n";
    if (!gamma.empty()) {
        os << "gamma = " << csv::format_double(gamma[0]) << "," << csv::format_double(gamma[1])
           << "\n";
    }
    os << "sigma_eps = " << csv::format_double(sigma_eps) << "\n";
    os << "days_per_month = " << days_per_month << "\n";
    os << "months = ";
    for (std::size_t i = 0; i < months.size(); ++i) os << (i ? "," : "") << months[i];
    os << "\nyears = ";
    for (std::size_t i = 0; i < years.size(); ++i) os << (i ? "," : "") << years[i];
    os << "\nmaster_seed = " << master_seed << "\n";
    return os.str();
}

Dataset SyntheticStudy::visible() const { return Dataset{response_raw, covariates_raw, covariate_names}; }

SyntheticStudy generate_study(const TruthConfig& cfg) {
    cfg.validate();
    Grid target = make_regular_grid({cfg.target_origin_x, cfg.target_origin_y},
                                    cfg.target_spacing_km, cfg.target_nx, cfg.target_ny, "target",
                                    "s");

    std::vector<int> months = cfg.months;
    std::sort(months.begin(), months.end());
    std::vector<int> years = cfg.years;
    std::sort(years.begin(), years.end());
    std::vector<Date> dates;
    for (int y : years) {
        for (int m : months) {
            for (int d = 1; d <= cfg.days_per_month; ++d) dates.push_back(Date{y, m, d});
        }
    }
    const auto n_days = static_cast<Eigen::Index>(dates.size());
    const auto n_target = static_cast<Eigen::Index>(target.size());

    const auto m_cov = cfg.covariates.size();
    Eigen::MatrixXd response_star = Eigen::MatrixXd::Constant(n_days, n_target, cfg.beta[0]);

    std::vector<std::string> covariate_names;
    std::vector<Grid> native_grids;
    std::vector<Field> covariates_raw;
    std::vector<Eigen::MatrixXd> truth_transformed;
    std::vector<double> covariate_nu;

    for (std::size_t k = 0; k < m_cov; ++k) {
        const auto& ct = cfg.covariates[k];
        Grid native = transform_grid(
            make_regular_grid({ct.origin_x, ct.origin_y}, ct.spacing_km, ct.nx, ct.ny, ct.name, "u"),
            ct.rotation_rad, {ct.offset_x, ct.offset_y});

        // Joint native+target point set; a target point coincident with a
        // native point shares that native draw.
        std::vector<GridPoint> joint = native.points();
        std::vector<Eigen::Index> target_slot(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) {
            const auto& tp = target.point(i);
            Eigen::Index slot = -1;
            for (std::size_t j = 0; j < native.size(); ++j) {
                if (std::hypot(tp.x_km - native.point(j).x_km, tp.y_km - native.point(j).y_km) <
                    1e-9) {
                    slot = static_cast<Eigen::Index>(j);
                    break;
                }
            }
            if (slot < 0) {
                slot = static_cast<Eigen::Index>(joint.size());
                joint.push_back({"j" + std::to_string(joint.size()), tp.x_km, tp.y_km});
            }
            target_slot[i] = slot;
        }
        const Grid joint_grid("joint_" + ct.name, std::move(joint));
        const CovParams truth{ct.rho, ct.theta_km, ct.mu, 1e-10 * ct.rho};
        std::unique_ptr<PsdFactor> factor;
        try {
            factor = std::make_unique<PsdFactor>(
                exp_cov(pairwise_distances(joint_grid, joint_grid), truth));
        } catch (const std::exception& e) {
            throw ValidationError("generate_study: joint covariance for '" + ct.name +
                                  "' failed to factor (grids too dense/overlapping): " + e.what());
        }

        Eigen::MatrixXd native_vals(n_days, native.size());
        Eigen::MatrixXd truth_vals(n_days, n_target);
        for (Eigen::Index t = 0; t < n_days; ++t) {
            const Date& date = dates[static_cast<std::size_t>(t)];
            const Eigen::VectorXd z = factor->apply_to_normals(rng::derive_path(
                cfg.master_seed,
                {seedtag::field, static_cast<std::uint64_t>(k),
                 static_cast<std::uint64_t>(date.month), static_cast<std::uint64_t>(date.year),
                 static_cast<std::uint64_t>(date.day)}));
            const Eigen::VectorXd field = z.array() + ct.mu;
            native_vals.row(t) = field.head(static_cast<Eigen::Index>(native.size())).transpose();
            for (std::size_t i = 0; i < target.size(); ++i) {
                truth_vals(t, static_cast<Eigen::Index>(i)) = field(target_slot[i]);
            }
        }
        response_star += cfg.beta[k + 1] * truth_vals;

        const double nu_k = true_nu_for(ct.mu, ct.rho);
        covariate_nu.push_back(nu_k);
        covariate_names.push_back(ct.name);
        covariates_raw.emplace_back(native, dates,
                                    inverse_transform_field(native_vals, TransformSpec{nu_k}));
        native_grids.push_back(std::move(native));
        truth_transformed.push_back(std::move(truth_vals));
    }

    double mean_y = cfg.beta[0];
    double var_y = cfg.sigma_eps * cfg.sigma_eps;
    for (std::size_t k = 0; k < m_cov; ++k) {
        mean_y += cfg.beta[k + 1] * cfg.covariates[k].mu;
        var_y += cfg.beta[k + 1] * cfg.beta[k + 1] * cfg.covariates[k].rho;
    }
    for (Eigen::Index t = 0; t < n_days; ++t) {
        const Date& date = dates[static_cast<std::size_t>(t)];
        double seasonal = 0.0;
        if (!cfg.gamma.empty()) {
            const double phase = 2.0 * std::numbers::pi * date.day_of_year() / 365.25;
            seasonal = cfg.gamma[0] * std::sin(phase) + cfg.gamma[1] * std::cos(phase);
        }
        for (Eigen::Index i = 0; i < n_target; ++i) {
            rng::Stream noise(rng::derive_path(
                cfg.master_seed,
                {seedtag::noise, static_cast<std::uint64_t>(date.month),
                 static_cast<std::uint64_t>(date.year), static_cast<std::uint64_t>(date.day),
                 static_cast<std::uint64_t>(i)}));
            response_star(t, i) += seasonal + cfg.sigma_eps * noise.normal();
        }
    }

    const double response_nu = true_nu_for(mean_y, var_y);
    Field response_raw(target, dates,
                       inverse_transform_field(response_star, TransformSpec{response_nu}));

    return SyntheticStudy{std::move(target),
                          std::move(dates),
                          std::move(response_raw),
                          std::move(covariate_names),
                          std::move(native_grids),
                          std::move(covariates_raw),
                          std::move(truth_transformed),
                          std::move(covariate_nu),
                          response_nu,
                          cfg};
}

AttenuationReport attenuation_benchmark(const TruthConfig& truth_cfg,
                                        const StudyConfig& study_cfg) {
    const SyntheticStudy study = generate_study(truth_cfg);
    const Dataset data = study.visible();
    const StudyRun run = run_study(data, study_cfg, AnalysisMode::both);

    AttenuationReport report;
    std::size_t n_truth_naive = 0, n_truth_bayes = 0, n_naive_bayes = 0, n_cells = 0;
    for (const auto& r : run.results) {
        for (const auto& c : r.coefficients) {
            AttenuationRow row;
            row.location_id = r.location_id;
            row.month = r.month;
            row.coef_name = c.coef_name;
            if (c.coef_name == "intercept") {
                row.truth = truth_cfg.beta[0];
            } else if (c.coef_name == "s_sin") {
                row.truth = truth_cfg.gamma.empty() ? 0.0 : truth_cfg.gamma[0];
            } else if (c.coef_name == "s_cos") {
                row.truth = truth_cfg.gamma.empty() ? 0.0 : truth_cfg.gamma[1];
            } else {
                bool found = false;
                for (std::size_t k = 0; k < truth_cfg.covariates.size(); ++k) {
                    if (truth_cfg.covariates[k].name == c.coef_name) {
                        row.truth = truth_cfg.beta[k + 1];
                        found = true;
                        break;
                    }
                }
                if (!found) throw ValidationError("attenuation_benchmark: unknown coefficient");
            }
            row.naive_est = c.naive_est;
            row.bayes_median = c.bayes_median;
            row.truth_in_naive_ci = c.naive_lo <= row.truth && row.truth <= c.naive_hi;
            row.truth_in_bayes_ci = c.bayes_lo <= row.truth && row.truth <= c.bayes_hi;
            row.naive_in_bayes_ci = c.bayes_lo <= c.naive_est && c.naive_est <= c.bayes_hi;
            n_truth_naive += row.truth_in_naive_ci;
            n_truth_bayes += row.truth_in_bayes_ci;
            n_naive_bayes += row.naive_in_bayes_ci;
            ++n_cells;
            report.rows.push_back(std::move(row));
        }
    }
    report.frac_truth_in_naive = static_cast<double>(n_truth_naive) / static_cast<double>(n_cells);
    report.frac_truth_in_bayes = static_cast<double>(n_truth_bayes) / static_cast<double>(n_cells);
    report.frac_naive_in_bayes = static_cast<double>(n_naive_bayes) / static_cast<double>(n_cells);
    return report;
}

}  // namespace regrid_uq
