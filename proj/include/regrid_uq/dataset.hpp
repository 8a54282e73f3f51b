#pragma once

#include <string>
#include <vector>

#include "regrid_uq/config.hpp"
#include "regrid_uq/field.hpp"

namespace regrid_uq {

struct SourceSpec {
    std::string name;
    std::string field_path;
    std::string grid_path;
};

// Paths and labels of one study's inputs. Paths are resolved relative to the
// manifest file's directory.
struct DatasetManifest {
    SourceSpec response;
    std::vector<SourceSpec> covariates;
    std::string units = "W m^-2";

    static DatasetManifest parse(const Config& cfg, const std::string& base_dir);
    static DatasetManifest load(const std::string& path);
};

// Loaded and date-aligned inputs; every field carries exactly the same dates.
struct Dataset {
    Field response;
    std::vector<Field> covariates;
    std::vector<std::string> covariate_names;

    std::vector<int> years_present() const;
    std::vector<Date> dates_in_month(int month) const;
    Dataset restricted_to_years(const std::vector<int>& years) const;
};

// Reads all sources and aligns dates, restricted to the given months (all
// months when empty) and years (all years when empty). A date carried by
// some sources but not others is a misalignment error naming the offenders;
// an empty common date set is an error.
Dataset load_dataset(const DatasetManifest& manifest, const std::vector<int>& months = {},
                     const std::vector<int>& years = {});

// Alignment applied to in-memory fields (the synthetic path).
Dataset align_dataset(Field response, std::vector<Field> covariates,
                      std::vector<std::string> covariate_names, const std::vector<int>& months,
                      const std::vector<int>& years);

}  // namespace regrid_uq
