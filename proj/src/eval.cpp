#include "regrid_uq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "regrid_uq/errors.hpp"
#include "regrid_uq/log.hpp"
#include "regrid_uq/parallel.hpp"
#include "regrid_uq/rng.hpp"
#include "regrid_uq/stats.hpp"
#include "regrid_uq/transform.hpp"

namespace regrid_uq {

std::vector<Fold> loyo_folds(std::vector<int> years) {
    if (years.size() < 2) throw ValidationError("loyo_folds: need at least 2 years");
    std::sort(years.begin(), years.end());
    if (std::adjacent_find(years.begin(), years.end()) != years.end()) {
        throw ValidationError("loyo_folds: duplicate years");
    }
    std::vector<Fold> folds;
    folds.reserve(years.size());
    for (std::size_t i = 0; i < years.size(); ++i) {
        Fold f;
        f.test_year = years[i];
        for (std::size_t j = 0; j < years.size(); ++j) {
            if (j != i) f.train_years.push_back(years[j]);
        }
        folds.push_back(std::move(f));
    }
    return folds;
}

double coverage(std::span<const std::pair<double, double>> intervals,
                std::span<const double> actuals) {
    if (intervals.empty() || intervals.size() != actuals.size()) {
        throw ValidationError("coverage: intervals and actuals must be nonempty, equal length");
    }
    std::size_t inside = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].first <= actuals[i] && actuals[i] <= intervals[i].second) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(intervals.size());
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
    if (pred.empty() || pred.size() != actual.size()) {
        throw ValidationError("rmse: inputs must be nonempty, equal length");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - actual[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

std::vector<BiasCell> bias_map(const std::vector<LocationResult>& results) {
    if (results.empty()) throw ValidationError("bias_map: no results");
    std::vector<BiasCell> out;
    for (const auto& r : results) {
        if (r.coefficients.empty()) throw ValidationError("bias_map: result without coefficients");
        for (const auto& c : r.coefficients) {
            if (std::isnan(c.bayes_median)) {
                throw ValidationError("bias_map: missing Bayesian path for " + r.location_id);
            }
            out.push_back({r.location_id, r.month, c.coef_name, c.bias});
        }
    }
    return out;
}

EvalSummary run_eval(const Dataset& data, const StudyConfig& cfg, const FittedModel& full_model,
                     const std::vector<LocationResult>& full_results) {
    cfg.validate();
    std::vector<int> years = cfg.years.empty() ? data.years_present() : cfg.years;
    const std::vector<Fold> folds = loyo_folds(years);

    EvalSummary summary;
    summary.bias = bias_map(full_results);

    const auto n_loc = data.response.grid().size();

    // Accumulators keyed by (month, location, path).
    std::map<std::tuple<int, std::size_t, std::string>, std::pair<double, double>> acc;
    std::map<std::tuple<int, std::size_t, std::string>, int> acc_n;

    for (const auto& fold : folds) {
        const Dataset train = data.restricted_to_years(fold.train_years);
        StudyConfig fold_cfg = cfg;
        fold_cfg.years = fold.train_years;
        // Refit transforms and GP params on the training years; inherit the
        // full-data drop decisions.
        FittedModel fold_model = fit_gp_stage(train, fold_cfg);
        for (auto& cm : fold_model.covariates) {
            cm.retained = full_model.covariate(cm.name, cm.month).retained;
        }
        const std::uint64_t fold_master = rng::derive_path(
            cfg.master_seed, {seedtag::fold, static_cast<std::uint64_t>(fold.test_year)});
        StudyConfig bayes_cfg = fold_cfg;
        bayes_cfg.master_seed = fold_master;

        for (int month : cfg.months) {
            const MonthContext ctx = build_month_context(train, fold_model, fold_cfg, month);

            // Test-day inputs under the train-fitted model.
            std::vector<Date> test_dates;
            for (const auto& d : data.dates_in_month(month)) {
                if (d.year == fold.test_year) test_dates.push_back(d);
            }
            if (test_dates.empty()) {
                throw ValidationError("eval: no test days for year " +
                                      std::to_string(fold.test_year) + " month " +
                                      std::to_string(month));
            }
            const auto n_test = static_cast<Eigen::Index>(test_dates.size());
            const auto m = static_cast<Eigen::Index>(ctx.covariate_names.size());

            std::vector<Eigen::MatrixXd> test_means;  // per covariate: n_test x n_loc
            for (std::size_t k = 0; k < ctx.covariate_names.size(); ++k) {
                std::size_t src = data.covariates.size();
                for (std::size_t i = 0; i < data.covariate_names.size(); ++i) {
                    if (data.covariate_names[i] == ctx.covariate_names[k]) src = i;
                }
                const Eigen::MatrixXd transformed = transform_field(
                    data.covariates[src].rows_for(test_dates), ctx.covariate_transforms[k]);
                Eigen::MatrixXd mk(n_test, n_loc);
                for (Eigen::Index t = 0; t < n_test; ++t) {
                    mk.row(t) = ctx.ops[k].mean_for(transformed.row(t).transpose()).transpose();
                }
                test_means.push_back(std::move(mk));
            }
            const Eigen::MatrixXd test_seasonal = ctx.seasonal_for(test_dates);
            const Eigen::MatrixXd test_raw = data.response.rows_for(test_dates);
            Eigen::MatrixXd test_model_scale = test_raw;
            if (ctx.response_transform.has_value()) {
                test_model_scale = transform_field(test_raw, *ctx.response_transform);
            }

            const double t_hi = 0.5 * (1.0 + cfg.ci_level);

            std::vector<std::pair<FoldCell, FoldCell>> per_loc(n_loc);
            parallel_for(n_loc, cfg.threads, [&](std::size_t loc) {
                const auto li = static_cast<Eigen::Index>(loc);
                // Train fits.
                const RegressionDesign d = ctx.naive_design(loc);
                const OlsFit fit = ols_fit(d);
                const LocationResult bayes =
                    bayes_two_step(ctx, bayes_cfg, loc, /*keep_draws=*/true);

                Eigen::MatrixXd x_rows(n_test, 1 + m + test_seasonal.cols());
                x_rows.col(0).setOnes();
                for (Eigen::Index k = 0; k < m; ++k) {
                    x_rows.col(1 + k) = test_means[static_cast<std::size_t>(k)].col(li);
                }
                if (test_seasonal.cols() > 0) x_rows.rightCols(test_seasonal.cols()) = test_seasonal;

                const double tq = stats::student_t_quantile(t_hi, fit.dof());
                std::vector<std::pair<double, double>> naive_iv(static_cast<std::size_t>(n_test));
                std::vector<double> naive_pred(static_cast<std::size_t>(n_test));
                std::vector<std::pair<double, double>> bayes_iv(static_cast<std::size_t>(n_test));
                std::vector<double> bayes_pred(static_cast<std::size_t>(n_test));
                std::vector<double> actual_model(static_cast<std::size_t>(n_test));
                std::vector<double> actual_raw_v(static_cast<std::size_t>(n_test));

                for (Eigen::Index t = 0; t < n_test; ++t) {
                    const Eigen::VectorXd x = x_rows.row(t).transpose();
                    const double fit_mean = x.dot(fit.coefficients());
                    const double se_pred =
                        std::sqrt(fit.s2 * (1.0 + x.dot(fit.gram_inverse * x)));
                    naive_pred[static_cast<std::size_t>(t)] = fit_mean;
                    naive_iv[static_cast<std::size_t>(t)] = {fit_mean - tq * se_pred,
                                                             fit_mean + tq * se_pred};

                    const std::uint64_t pred_seed = rng::derive_path(
                        fold_master, {seedtag::predict, static_cast<std::uint64_t>(month),
                                      static_cast<std::uint64_t>(loc),
                                      static_cast<std::uint64_t>(t)});
                    const Eigen::VectorXd samples =
                        predictive_samples(bayes.pooled_draws, x, pred_seed);
                    std::vector<double> sorted(samples.data(), samples.data() + samples.size());
                    std::sort(sorted.begin(), sorted.end());
                    bayes_pred[static_cast<std::size_t>(t)] = stats::quantile_sorted(sorted, 0.5);
                    bayes_iv[static_cast<std::size_t>(t)] = {
                        stats::quantile_sorted(sorted, 0.5 * (1.0 - cfg.ci_level)),
                        stats::quantile_sorted(sorted, 0.5 * (1.0 + cfg.ci_level))};

                    actual_model[static_cast<std::size_t>(t)] = test_model_scale(t, li);
                    actual_raw_v[static_cast<std::size_t>(t)] = test_raw(t, li);
                }

                // RMSE on the raw scale: back-transform point predictions.
                std::vector<double> naive_pred_raw = naive_pred;
                std::vector<double> bayes_pred_raw = bayes_pred;
                if (ctx.response_transform.has_value()) {
                    for (auto& v : naive_pred_raw) v = gamma_inverse(v, *ctx.response_transform);
                    for (auto& v : bayes_pred_raw) v = gamma_inverse(v, *ctx.response_transform);
                }

                const std::string id = ctx.target.point(loc).id;
                per_loc[loc].first = {id,
                                      month,
                                      "naive",
                                      fold.test_year,
                                      coverage(naive_iv, actual_model),
                                      rmse(naive_pred_raw, actual_raw_v)};
                per_loc[loc].second = {id,
                                       month,
                                       "bayes",
                                       fold.test_year,
                                       coverage(bayes_iv, actual_model),
                                       rmse(bayes_pred_raw, actual_raw_v)};
            });

            for (std::size_t loc = 0; loc < n_loc; ++loc) {
                for (const auto* cell : {&per_loc[loc].first, &per_loc[loc].second}) {
                    summary.folds.push_back(*cell);
                    const auto key = std::make_tuple(month, loc, cell->path);
                    acc[key].first += cell->coverage;
                    acc[key].second += cell->rmse;
                    acc_n[key] += 1;
                }
            }
        }
        log::info("eval: finished fold with test year ", fold.test_year);
    }

    for (int month : cfg.months) {
        for (std::size_t loc = 0; loc < n_loc; ++loc) {
            for (const std::string path : {"naive", "bayes"}) {
                const auto key = std::make_tuple(month, loc, path);
                const auto it = acc.find(key);
                if (it == acc.end()) continue;
                const int n = acc_n.at(key);
                summary.cells.push_back({data.response.grid().point(loc).id, month, path,
                                         it->second.first / n, it->second.second / n});
            }
        }
    }
    return summary;
}

}  // namespace regrid_uq
