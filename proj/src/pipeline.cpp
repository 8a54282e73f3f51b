#include "regrid_uq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "regrid_uq/arma.hpp"
#include "regrid_uq/errors.hpp"
#include "regrid_uq/log.hpp"
#include "regrid_uq/parallel.hpp"
#include "regrid_uq/rng.hpp"
#include "regrid_uq/stats.hpp"

namespace regrid_uq {

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string scale_name(ResponseScale s) {
    return s == ResponseScale::transformed ? "transformed" : "raw";
}

std::string sigma2_name(Sigma2Mode m) { return m == Sigma2Mode::sample ? "sample" : "plugin"; }

std::string family_name(ErrorFamily f) {
    switch (f) {
        case ErrorFamily::ar1: return "AR1";
        case ErrorFamily::ma1: return "MA1";
        default: return "none";
    }
}

ArmaFamily to_arma_family(ErrorFamily f) {
    return f == ErrorFamily::ar1 ? ArmaFamily::ar1 : ArmaFamily::ma1;
}

}  // namespace

void StudyConfig::validate() const {
    if (months.empty()) throw ValidationError("study config: months must be nonempty");
    for (int m : months) {
        if (m < 1 || m > 12) throw ValidationError("study config: month out of range");
    }
    if (n_cond_sims < 1) throw ValidationError("study config: n_cond_sims must be >= 1");
    if (n_post_per_sim < 1) throw ValidationError("study config: n_post_per_sim must be >= 1");
    if (!(ci_level > 0.0 && ci_level < 1.0)) {
        throw ValidationError("study config: ci_level outside (0,1)");
    }
    if (!(drop_pvalue >= 0.0 && drop_pvalue <= 1.0)) {
        throw ValidationError("study config: drop_pvalue outside [0,1]");
    }
    if (threads < 1) throw ValidationError("study config: threads must be >= 1");
}

StudyConfig StudyConfig::from_config(const Config& cfg) {
    StudyConfig out;
    const auto* s = cfg.find("study");
    if (s == nullptr) return out;
    if (s->has("months")) out.months = s->get_int_list("months");
    if (s->has("years")) out.years = s->get_int_list("years");
    out.n_cond_sims = s->get_int_or("n_cond_sims", out.n_cond_sims);
    out.n_post_per_sim = s->get_int_or("n_post_per_sim", out.n_post_per_sim);
    out.ci_level = s->get_double_or("ci_level", out.ci_level);
    out.drop_pvalue = s->get_double_or("drop_pvalue", out.drop_pvalue);
    const std::string scale = s->get_or("response_scale", "transformed");
    if (scale == "transformed") {
        out.response_scale = ResponseScale::transformed;
    } else if (scale == "raw") {
        out.response_scale = ResponseScale::raw;
    } else {
        throw ValidationError("study config: response_scale must be transformed|raw");
    }
    const std::string mode = s->get_or("sigma2_mode", "sample");
    if (mode == "sample") {
        out.sigma2_mode = Sigma2Mode::sample;
    } else if (mode == "plugin") {
        out.sigma2_mode = Sigma2Mode::plugin;
    } else {
        throw ValidationError("study config: sigma2_mode must be sample|plugin");
    }
    const std::string family = s->get_or("arma_family", "none");
    if (family == "none") {
        out.arma_family = ErrorFamily::none;
    } else if (family == "AR1" || family == "ar1") {
        out.arma_family = ErrorFamily::ar1;
    } else if (family == "MA1" || family == "ma1") {
        out.arma_family = ErrorFamily::ma1;
    } else {
        throw ValidationError("study config: arma_family must be none|AR1|MA1");
    }
    out.seasonal_harmonics = s->get_bool_or("seasonal", false);
    out.master_seed = s->get_u64_or("master_seed", out.master_seed);
    out.threads = s->get_int_or("threads", out.threads);
    out.validate();
    return out;
}

std::string StudyConfig::echo() const {
    std::ostringstream os;
    os << "months = " << join_ints(months) << "\n";
    if (!years.empty()) os << "years = " << join_ints(years) << "\n";
    os << "n_cond_sims = " << n_cond_sims << "\n";
    os << "n_post_per_sim = " << n_post_per_sim << "\n";
    os << "ci_level = " << ci_level << "\n";
    os << "drop_pvalue = " << drop_pvalue << "\n";
    os << "response_scale = " << scale_name(response_scale) << "\n";
    os << "sigma2_mode = " << sigma2_name(sigma2_mode) << "\n";
    os << "arma_family = " << family_name(arma_family) << "\n";
    os << "seasonal = " << (seasonal_harmonics ? "on" : "off") << "\n";
    os << "master_seed = " << master_seed << "\n";
    os << "threads = " << threads << "\n";
    return os.str();
}

namespace {

Eigen::MatrixXd harmonic_columns(const std::vector<Date>& dates) {
    Eigen::MatrixXd s(dates.size(), 2);
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const double phase = 2.0 * std::numbers::pi * dates[t].day_of_year() / 365.25;
        s(static_cast<Eigen::Index>(t), 0) = std::sin(phase);
        s(static_cast<Eigen::Index>(t), 1) = std::cos(phase);
    }
    return s;
}

}  // namespace

Eigen::MatrixXd MonthContext::seasonal_for(const std::vector<Date>& for_dates) const {
    if (seasonal.cols() == 0) return Eigen::MatrixXd(for_dates.size(), 0);
    return harmonic_columns(for_dates);
}

RegressionDesign MonthContext::naive_design(std::size_t location) const {
    const auto n = static_cast<Eigen::Index>(dates.size());
    const auto m = static_cast<Eigen::Index>(covariate_names.size());
    RegressionDesign d;
    d.y = response.col(static_cast<Eigen::Index>(location));
    d.X.resize(n, m + 1);
    d.X.col(0).setOnes();
    for (Eigen::Index k = 0; k < m; ++k) {
        d.X.col(k + 1) = kriging_means[static_cast<std::size_t>(k)].col(
            static_cast<Eigen::Index>(location));
    }
    d.S = seasonal;
    return d;
}

FittedModel fit_gp_stage(const Dataset& data, const StudyConfig& cfg) {
    cfg.validate();
    FittedModel model;
    model.months = cfg.months;
    model.response_scale = scale_name(cfg.response_scale);
    model.master_seed = cfg.master_seed;

    for (int month : cfg.months) {
        const std::vector<Date> dates = data.dates_in_month(month);
        if (dates.empty()) {
            throw ValidationError("fit: no data for month " + std::to_string(month));
        }
        if (cfg.response_scale == ResponseScale::transformed) {
            const Eigen::MatrixXd raw = data.response.rows_for(dates);
            const std::span<const double> vals(raw.data(), static_cast<std::size_t>(raw.size()));
            model.response_transforms.push_back({month, fit_nu(vals)});
        }
        for (std::size_t k = 0; k < data.covariates.size(); ++k) {
            const Eigen::MatrixXd raw = data.covariates[k].rows_for(dates);
            const std::span<const double> vals(raw.data(), static_cast<std::size_t>(raw.size()));
            CovariateModel cm;
            cm.name = data.covariate_names[k];
            cm.month = month;
            cm.transform = fit_nu(vals);
            const Eigen::MatrixXd transformed = transform_field(raw, cm.transform);
            cm.params = fit_mle(data.covariates[k].grid(), transformed);
            if (cm.params.degenerate) {
                log::info("fit: degenerate GP fit for ", cm.name, " month ", month);
            }
            model.covariates.push_back(std::move(cm));
        }
    }
    return model;
}

MonthContext build_month_context(const Dataset& data, const FittedModel& model,
                                 const StudyConfig& cfg, int month) {
    MonthContext ctx;
    ctx.month = month;
    ctx.dates = data.dates_in_month(month);
    if (ctx.dates.empty()) {
        throw ValidationError("analyze: no data for month " + std::to_string(month));
    }
    ctx.target = data.response.grid();

    ctx.response_raw = data.response.rows_for(ctx.dates);
    if (cfg.response_scale == ResponseScale::transformed) {
        const auto spec = model.response_transform(month);
        if (!spec.has_value()) {
            throw ValidationError("model file has no response transform for month " +
                                  std::to_string(month));
        }
        ctx.response_transform = spec;
        ctx.response = transform_field(ctx.response_raw, *spec);
    } else {
        ctx.response = ctx.response_raw;
    }

    for (std::size_t k = 0; k < data.covariates.size(); ++k) {
        const auto& cm = model.covariate(data.covariate_names[k], month);
        if (!cm.retained) continue;
        ctx.covariate_names.push_back(cm.name);
        ctx.covariate_transforms.push_back(cm.transform);
        const Eigen::MatrixXd transformed =
            transform_field(data.covariates[k].rows_for(ctx.dates), cm.transform);
        KrigingOperator op =
            make_kriging_operator(cm.params, data.covariates[k].grid(), data.response.grid());
        Eigen::MatrixXd means(ctx.dates.size(), data.response.grid().size());
        for (std::size_t t = 0; t < ctx.dates.size(); ++t) {
            means.row(static_cast<Eigen::Index>(t)) =
                op.mean_for(transformed.row(static_cast<Eigen::Index>(t)).transpose()).transpose();
        }
        ctx.kriging_means.push_back(std::move(means));
        ctx.cond_sd.push_back(op.cond_cov.diagonal().cwiseMax(0.0).cwiseSqrt());
        ctx.ops.push_back(std::move(op));
    }
    if (ctx.covariate_names.empty()) {
        throw ValidationError("analyze: no retained covariates for month " + std::to_string(month));
    }

    if (cfg.seasonal_harmonics) {
        ctx.seasonal = harmonic_columns(ctx.dates);
    } else {
        ctx.seasonal = Eigen::MatrixXd(ctx.dates.size(), 0);
    }

    ctx.coef_names.push_back("intercept");
    for (const auto& name : ctx.covariate_names) ctx.coef_names.push_back(name);
    if (ctx.seasonal.cols() > 0) {
        ctx.coef_names.push_back("s_sin");
        ctx.coef_names.push_back("s_cos");
    }
    return ctx;
}

std::vector<bool> drop_covariates(const Eigen::MatrixXd& pvalues, double threshold) {
    const Eigen::Index n_loc = pvalues.rows();
    const Eigen::Index n_cov = pvalues.cols();
    if (n_loc < 1 || n_cov < 1) throw ValidationError("drop_covariates: empty p-value table");
    std::vector<bool> retained(static_cast<std::size_t>(n_cov), true);
    for (Eigen::Index k = 0; k < n_cov; ++k) {
        Eigen::Index over = 0;
        for (Eigen::Index i = 0; i < n_loc; ++i) {
            if (pvalues(i, k) > threshold) ++over;
        }
        retained[static_cast<std::size_t>(k)] = 2 * over <= n_loc;  // drop iff strictly more than half
    }
    if (std::none_of(retained.begin(), retained.end(), [](bool r) { return r; })) {
        throw ValidationError("drop_covariates: refusing to drop every covariate (intercept-only)");
    }
    return retained;
}

FittedModel fit_study(const Dataset& data, const StudyConfig& cfg) {
    FittedModel model = fit_gp_stage(data, cfg);
    for (int month : cfg.months) {
        const MonthContext ctx = build_month_context(data, model, cfg, month);
        const auto n_loc = static_cast<Eigen::Index>(ctx.target.size());
        const auto n_cov = static_cast<Eigen::Index>(ctx.covariate_names.size());
        Eigen::MatrixXd pvalues(n_loc, n_cov);
        for (Eigen::Index i = 0; i < n_loc; ++i) {
            const RegressionDesign d = ctx.naive_design(static_cast<std::size_t>(i));
            const OlsFit fit = ols_fit(d);
            for (Eigen::Index k = 0; k < n_cov; ++k) {
                const double se = std::sqrt(fit.s2 * fit.gram_inverse(k + 1, k + 1));
                const double t = se > 0.0 ? fit.beta(k + 1) / se
                                          : std::numeric_limits<double>::infinity();
                pvalues(i, k) = stats::two_sided_t_pvalue(t, fit.dof());
            }
        }
        const std::vector<bool> retained = drop_covariates(pvalues, cfg.drop_pvalue);
        for (std::size_t k = 0; k < retained.size(); ++k) {
            if (!retained[k]) {
                log::info("month ", month, ": dropping covariate ", ctx.covariate_names[k]);
            }
            for (auto& cm : model.covariates) {
                if (cm.month == month && cm.name == ctx.covariate_names[k]) {
                    cm.retained = retained[k];
                }
            }
        }
    }
    return model;
}

namespace {

void summarize_naive(const MonthContext& ctx, const StudyConfig& cfg, const OlsFit& fit,
                     LocationResult& out) {
    const Eigen::VectorXd coef = fit.coefficients();
    const double tq = stats::student_t_quantile(0.5 * (1.0 + cfg.ci_level), fit.dof());
    out.coefficients.resize(ctx.coef_names.size());
    for (std::size_t j = 0; j < ctx.coef_names.size(); ++j) {
        auto& c = out.coefficients[j];
        c.coef_name = ctx.coef_names[j];
        c.naive_est = coef(static_cast<Eigen::Index>(j));
        const double se =
            std::sqrt(fit.s2 * fit.gram_inverse(static_cast<Eigen::Index>(j),
                                                static_cast<Eigen::Index>(j)));
        c.naive_lo = c.naive_est - tq * se;
        c.naive_hi = c.naive_est + tq * se;
    }
}

void summarize_bayes(const MonthContext& ctx, const StudyConfig& cfg,
                     const std::vector<PosteriorDraw>& draws, LocationResult& out) {
    if (out.coefficients.size() != ctx.coef_names.size()) {
        out.coefficients.resize(ctx.coef_names.size());
        for (std::size_t j = 0; j < ctx.coef_names.size(); ++j) {
            out.coefficients[j].coef_name = ctx.coef_names[j];
        }
    }
    const double lo_q = 0.5 * (1.0 - cfg.ci_level);
    const double hi_q = 0.5 * (1.0 + cfg.ci_level);
    std::vector<double> values(draws.size());
    for (std::size_t j = 0; j < ctx.coef_names.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        for (std::size_t d = 0; d < draws.size(); ++d) {
            const auto& pd = draws[d];
            values[d] = jj < pd.beta.size() ? pd.beta(jj) : pd.gamma(jj - pd.beta.size());
        }
        std::sort(values.begin(), values.end());
        auto& c = out.coefficients[j];
        c.bayes_median = stats::quantile_sorted(values, 0.5);
        c.bayes_lo = stats::quantile_sorted(values, lo_q);
        c.bayes_hi = stats::quantile_sorted(values, hi_q);
        c.bias = c.naive_est - c.bayes_median;
    }
}

}  // namespace

LocationResult naive_fit(const MonthContext& ctx, const StudyConfig& cfg, std::size_t location) {
    LocationResult out;
    out.location_id = ctx.target.point(location).id;
    out.month = ctx.month;
    const RegressionDesign d = ctx.naive_design(location);
    OlsFit fit;
    try {
        fit = ols_fit(d);
    } catch (const NumericError& e) {
        // Re-map the dependent column indices onto covariate names.
        throw NumericError("naive_fit at " + out.location_id + " month " +
                           std::to_string(ctx.month) + ": " + e.what() + " (columns are " +
                           [&] {
                               std::string names;
                               for (std::size_t j = 0; j < ctx.coef_names.size(); ++j) {
                                   if (j) names += ", ";
                                   names += std::to_string(j) + "=" + ctx.coef_names[j];
                               }
                               return names;
                           }() +
                           ")");
    }
    summarize_naive(ctx, cfg, fit, out);
    return out;
}

namespace {

// Draws the two-step pooled posterior for one location. X(j) columns are
// conditional simulations from the per-location marginal law: kriging mean
// plus cond_sd * z, z keyed by (cond_sim, month, location, covariate, day,
// sim) so draws are independent of execution order.
std::vector<PosteriorDraw> pooled_draws_for_location(const MonthContext& ctx,
                                                     const StudyConfig& cfg,
                                                     std::size_t location) {
    const auto n = static_cast<Eigen::Index>(ctx.dates.size());
    const auto m = static_cast<Eigen::Index>(ctx.covariate_names.size());
    const auto loc = static_cast<Eigen::Index>(location);
    const auto month_u = static_cast<std::uint64_t>(ctx.month);
    const auto loc_u = static_cast<std::uint64_t>(location);

    RegressionDesign d;
    d.y = ctx.response.col(loc);
    d.S = ctx.seasonal;
    d.X.resize(n, m + 1);
    d.X.col(0).setOnes();

    Eigen::MatrixXd base(n, m);
    Eigen::VectorXd sds(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        base.col(k) = ctx.kriging_means[static_cast<std::size_t>(k)].col(loc);
        sds(k) = ctx.cond_sd[static_cast<std::size_t>(k)](loc);
    }

    std::vector<PosteriorDraw> draws;
    draws.reserve(static_cast<std::size_t>(cfg.n_cond_sims) *
                  static_cast<std::size_t>(cfg.n_post_per_sim));

    for (int sim = 0; sim < cfg.n_cond_sims; ++sim) {
        const auto sim_u = static_cast<std::uint64_t>(sim);
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index t = 0; t < n; ++t) {
                rng::Stream z(rng::derive_path(
                    cfg.master_seed, {seedtag::cond_sim, month_u, loc_u,
                                      static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(t), sim_u}));
                d.X(t, k + 1) = base(t, k) + sds(k) * z.normal();
            }
        }

        const OlsFit fit = ols_fit(d);

        std::optional<EtaPosterior> eta_post;
        if (cfg.arma_family != ErrorFamily::none) {
            eta_post = eta_posterior(d, to_arma_family(cfg.arma_family));
        }
        // Whitened refits shared across repeated eta draws within this sim.
        std::map<double, OlsFit> eta_fits;

        for (int pd = 0; pd < cfg.n_post_per_sim; ++pd) {
            const auto pd_u = static_cast<std::uint64_t>(pd);
            const OlsFit* active = &fit;
            std::optional<double> eta;
            if (eta_post.has_value()) {
                eta = sample_eta(*eta_post,
                                 rng::derive_path(cfg.master_seed, {seedtag::eta, month_u, loc_u,
                                                                    sim_u, pd_u}));
                auto it = eta_fits.find(*eta);
                if (it == eta_fits.end()) {
                    const FamilyWhitener whitener(to_arma_family(cfg.arma_family), *eta, n);
                    it = eta_fits.emplace(*eta, ols_fit(whitener.apply(d))).first;
                }
                active = &it->second;
            }

            double sigma2 = active->s2;
            if (cfg.sigma2_mode == Sigma2Mode::sample) {
                sigma2 = sample_sigma2(
                    static_cast<int>(active->n), static_cast<int>(active->k), active->s2,
                    rng::derive_path(cfg.master_seed,
                                     {seedtag::sigma2, month_u, loc_u, sim_u, pd_u}));
            }
            auto [beta, gamma] = sample_coefficients(
                active->beta, active->gamma, active->gram_inverse, sigma2,
                rng::derive_path(cfg.master_seed, {seedtag::coef, month_u, loc_u, sim_u, pd_u}));
            draws.push_back({std::move(beta), std::move(gamma), sigma2, eta});
        }
    }
    return draws;
}

}  // namespace

LocationResult bayes_two_step(const MonthContext& ctx, const StudyConfig& cfg,
                              std::size_t location, bool keep_draws) {
    LocationResult out;
    out.location_id = ctx.target.point(location).id;
    out.month = ctx.month;
    std::vector<PosteriorDraw> draws = pooled_draws_for_location(ctx, cfg, location);
    summarize_bayes(ctx, cfg, draws, out);
    if (keep_draws) out.pooled_draws = std::move(draws);
    return out;
}

LocationResult analyze_location(const MonthContext& ctx, const StudyConfig& cfg,
                                std::size_t location, AnalysisMode mode, bool keep_draws) {
    if (mode == AnalysisMode::naive) return naive_fit(ctx, cfg, location);

    LocationResult out = naive_fit(ctx, cfg, location);
    std::vector<PosteriorDraw> draws;
    try {
        draws = pooled_draws_for_location(ctx, cfg, location);
    } catch (const std::exception& e) {
        throw NumericError("bayes_two_step at " + out.location_id + " month " +
                           std::to_string(ctx.month) + ": " + e.what());
    }
    summarize_bayes(ctx, cfg, draws, out);
    if (keep_draws) out.pooled_draws = std::move(draws);
    return out;
}

std::vector<LocationResult> analyze_study(const Dataset& data, const FittedModel& model,
                                          const StudyConfig& cfg, AnalysisMode mode,
                                          bool keep_draws) {
    cfg.validate();
    std::vector<LocationResult> results;
    for (int month : cfg.months) {
        const MonthContext ctx = build_month_context(data, model, cfg, month);
        const std::size_t n_loc = ctx.target.size();
        std::vector<LocationResult> month_results(n_loc);
        parallel_for(n_loc, cfg.threads, [&](std::size_t i) {
            month_results[i] = analyze_location(ctx, cfg, i, mode, keep_draws);
        });
        for (auto& r : month_results) results.push_back(std::move(r));
        log::info("analyze: finished month ", month);
    }
    return results;
}

std::string run_manifest_text(const Dataset& data, const StudyConfig& cfg, AnalysisMode mode) {
    std::ostringstream manifest;
    manifest << "[run]\n";
    manifest << "tool = regrid_uq\n";
    manifest << "version = 1\n";
    manifest << "mode = "
             << (mode == AnalysisMode::both ? "both"
                                            : (mode == AnalysisMode::naive ? "naive" : "bayes"))
             << "\n";
    manifest << "locations = " << data.response.grid().size() << "\n";
    manifest << "pooled_draws_per_location = "
             << static_cast<long long>(cfg.n_cond_sims) * cfg.n_post_per_sim << "\n";
    manifest << cfg.echo();
    return manifest.str();
}

StudyRun run_study(const Dataset& data, const StudyConfig& cfg, AnalysisMode mode,
                   bool keep_draws) {
    cfg.validate();
    StudyRun run;
    run.model = fit_study(data, cfg);
    run.results = analyze_study(data, run.model, cfg, mode, keep_draws);
    run.manifest_text = run_manifest_text(data, cfg, mode);
    return run;
}

}  // namespace regrid_uq
