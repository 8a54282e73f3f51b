#include "regrid_uq/model_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "regrid_uq/csv.hpp"
#include "regrid_uq/config.hpp"
#include "regrid_uq/errors.hpp"

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

// CovParams wire format: `rho=<float> theta_km=<float> mu=<float> jitter=<float>`.
std::string covparams_block(const CovParams& p) {
    return "rho=" + csv::format_double(p.rho) + " theta_km=" + csv::format_double(p.theta_km) +
           " mu=" + csv::format_double(p.mu) + " jitter=" + csv::format_double(p.jitter);
}

CovParams parse_covparams(const std::string& block, const std::string& context) {
    CovParams p;
    bool seen_rho = false, seen_theta = false, seen_mu = false, seen_jitter = false;
    std::stringstream ss(block);
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(context + ": malformed covparams token '" + token + "'");
        }
        const std::string key = token.substr(0, eq);
        const double value = std::stod(token.substr(eq + 1));
        if (key == "rho") {
            p.rho = value;
            seen_rho = true;
        } else if (key == "theta_km") {
            p.theta_km = value;
            seen_theta = true;
        } else if (key == "mu") {
            p.mu = value;
            seen_mu = true;
        } else if (key == "jitter") {
            p.jitter = value;
            seen_jitter = true;
        } else {
            throw ValidationError(context + ": unknown covparams key '" + key + "'");
        }
    }
    if (!(seen_rho && seen_theta && seen_mu && seen_jitter)) {
        throw ValidationError(context + ": covparams block missing a field");
    }
    return p;
}

}  // namespace

const CovariateModel& FittedModel::covariate(const std::string& name, int month) const {
    for (const auto& c : covariates) {
        if (c.name == name && c.month == month) return c;
    }
    throw ValidationError("model: no fitted covariate '" + name + "' for month " +
                          std::to_string(month));
}

std::optional<TransformSpec> FittedModel::response_transform(int month) const {
    for (const auto& r : response_transforms) {
        if (r.month == month) return r.transform;
    }
    return std::nullopt;
}

std::vector<std::string> FittedModel::covariate_names() const {
    std::vector<std::string> names;
    for (const auto& c : covariates) {
        if (std::find(names.begin(), names.end(), c.name) == names.end()) names.push_back(c.name);
    }
    return names;
}

std::vector<std::string> FittedModel::retained_names(int month) const {
    std::vector<std::string> names;
    for (const auto& c : covariates) {
        if (c.month == month && c.retained) names.push_back(c.name);
    }
    return names;
}

void write_model_file(const std::string& path, const FittedModel& model) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "[model]\n";
    f << "version = 1\n";
    f << "months = " << join_ints(model.months) << "\n";
    f << "response_scale = " << model.response_scale << "\n";
    f << "master_seed = " << model.master_seed << "\n";
    for (const auto& r : model.response_transforms) {
        f << "\n[response_transform]\n";
        f << "month = " << r.month << "\n";
        f << "nu = " << csv::format_double(r.transform.nu) << "\n";
    }
    for (const auto& c : model.covariates) {
        f << "\n[covariate]\n";
        f << "name = " << c.name << "\n";
        f << "month = " << c.month << "\n";
        f << "nu = " << csv::format_double(c.transform.nu) << "\n";
        f << "covparams = " << covparams_block(c.params) << "\n";
        f << "retained = " << (c.retained ? "true" : "false") << "\n";
        f << "degenerate = " << (c.params.degenerate ? "true" : "false") << "\n";
    }
    if (!f) throw IoError("write failed: " + path);
}

FittedModel read_model_file(const std::string& path) {
    const Config cfg = parse_config_file(path);
    const auto& meta = cfg.require("model");
    FittedModel model;
    model.months = meta.get_int_list("months");
    model.response_scale = meta.get("response_scale");
    model.master_seed = meta.get_u64_or("master_seed", 0);
    for (const auto* s : cfg.all("response_transform")) {
        model.response_transforms.push_back({s->get_int("month"), TransformSpec{s->get_double("nu")}});
    }
    for (const auto* s : cfg.all("covariate")) {
        CovariateModel c;
        c.name = s->get("name");
        c.month = s->get_int("month");
        c.transform.nu = s->get_double("nu");
        c.params = parse_covparams(s->get("covparams"), path);
        c.params.degenerate = s->get_bool_or("degenerate", false);
        c.retained = s->get_bool_or("retained", true);
        model.covariates.push_back(std::move(c));
    }
    return model;
}

}  // namespace regrid_uq
