#include "regrid_uq/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "regrid_uq/csv.hpp"
#include "regrid_uq/errors.hpp"

namespace fs = std::filesystem;

namespace regrid_uq {

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
    const fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

SourceSpec parse_source(const ConfigSection& s, const std::string& base_dir) {
    SourceSpec spec;
    spec.name = s.get("name");
    spec.field_path = resolve(base_dir, s.get("field"));
    spec.grid_path = resolve(base_dir, s.get("grid"));
    return spec;
}

bool keep_date(const Date& d, const std::vector<int>& months, const std::vector<int>& years) {
    const bool month_ok =
        months.empty() || std::find(months.begin(), months.end(), d.month) != months.end();
    const bool year_ok =
        years.empty() || std::find(years.begin(), years.end(), d.year) != years.end();
    return month_ok && year_ok;
}

}  // namespace

DatasetManifest DatasetManifest::parse(const Config& cfg, const std::string& base_dir) {
    DatasetManifest m;
    m.response = parse_source(cfg.require("response"), base_dir);
    for (const auto* s : cfg.all("covariate")) {
        m.covariates.push_back(parse_source(*s, base_dir));
    }
    if (m.covariates.empty()) {
        throw ValidationError(cfg.source + ": manifest needs at least one [covariate]");
    }
    std::set<std::string> names;
    for (const auto& c : m.covariates) {
        if (!names.insert(c.name).second) {
            throw ValidationError(cfg.source + ": duplicate covariate name '" + c.name + "'");
        }
    }
    if (const auto* ds = cfg.find("dataset"); ds != nullptr) {
        m.units = ds->get_or("units", m.units);
    }
    for (const auto* spec : {&m.response.field_path, &m.response.grid_path}) {
        if (!fs::exists(*spec)) throw IoError("manifest references missing file: " + *spec);
    }
    for (const auto& c : m.covariates) {
        if (!fs::exists(c.field_path)) throw IoError("manifest references missing file: " + c.field_path);
        if (!fs::exists(c.grid_path)) throw IoError("manifest references missing file: " + c.grid_path);
    }
    return m;
}

DatasetManifest DatasetManifest::load(const std::string& path) {
    const Config cfg = parse_config_file(path);
    return parse(cfg, fs::path(path).parent_path().string());
}

std::vector<int> Dataset::years_present() const {
    std::set<int> years;
    for (const auto& d : response.dates()) years.insert(d.year);
    return {years.begin(), years.end()};
}

std::vector<Date> Dataset::dates_in_month(int month) const {
    std::vector<Date> out;
    for (const auto& d : response.dates()) {
        if (d.month == month) out.push_back(d);
    }
    return out;
}

Dataset Dataset::restricted_to_years(const std::vector<int>& years) const {
    std::vector<Date> keep;
    for (const auto& d : response.dates()) {
        if (std::find(years.begin(), years.end(), d.year) != years.end()) keep.push_back(d);
    }
    if (keep.empty()) throw ValidationError("dataset: no dates left for requested years");
    Dataset out{response.subset(keep), {}, covariate_names};
    out.covariates.reserve(covariates.size());
    for (const auto& c : covariates) out.covariates.push_back(c.subset(keep));
    return out;
}

Dataset align_dataset(Field response, std::vector<Field> covariates,
                      std::vector<std::string> covariate_names, const std::vector<int>& months,
                      const std::vector<int>& years) {
    if (covariates.size() != covariate_names.size()) {
        throw ValidationError("align_dataset: covariate name count mismatch");
    }

    std::vector<const Field*> sources{&response};
    std::vector<std::string> source_names{"response"};
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        sources.push_back(&covariates[i]);
        source_names.push_back(covariate_names[i]);
    }

    std::vector<std::set<Date>> date_sets(sources.size());
    std::set<Date> union_dates;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        for (const auto& d : sources[s]->dates()) {
            if (keep_date(d, months, years)) {
                date_sets[s].insert(d);
                union_dates.insert(d);
            }
        }
    }

    std::vector<Date> common;
    std::string misaligned;
    int named = 0;
    for (const auto& d : union_dates) {
        bool in_all = true;
        for (std::size_t s = 0; s < sources.size(); ++s) {
            if (!date_sets[s].contains(d)) {
                in_all = false;
                if (named < 8) {
                    misaligned += (named ? "; " : "") + d.iso() + " missing from " + source_names[s];
                    ++named;
                }
            }
        }
        if (in_all) common.push_back(d);
    }
    if (!misaligned.empty()) {
        throw ValidationError("dataset alignment: " + misaligned);
    }
    if (common.empty()) {
        throw ValidationError("dataset alignment: no common dates for the requested months/years");
    }

    Dataset out{response.subset(common), {}, std::move(covariate_names)};
    out.covariates.reserve(covariates.size());
    for (const auto& c : covariates) out.covariates.push_back(c.subset(common));
    return out;
}

Dataset load_dataset(const DatasetManifest& manifest, const std::vector<int>& months,
                     const std::vector<int>& years) {
    const Grid target = csv::read_grid(manifest.response.grid_path, "target");
    Field response = csv::read_field(manifest.response.field_path, target);

    std::vector<Field> covariates;
    std::vector<std::string> names;
    for (const auto& c : manifest.covariates) {
        const Grid native = csv::read_grid(c.grid_path, c.name);
        covariates.push_back(csv::read_field(c.field_path, native));
        names.push_back(c.name);
    }
    return align_dataset(std::move(response), std::move(covariates), std::move(names), months,
                         years);
}

}  // namespace regrid_uq
