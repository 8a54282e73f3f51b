#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regrid_uq/gp.hpp"
#include "regrid_uq/transform.hpp"

namespace regrid_uq {

// Fitted pieces for one covariate in one month.
struct CovariateModel {
    std::string name;
    int month = 0;
    TransformSpec transform;
    CovParams params;
    bool retained = true;
};

struct ResponseTransformModel {
    int month = 0;
    TransformSpec transform;
};

struct FittedModel {
    std::vector<int> months;
    std::string response_scale = "transformed";
    std::uint64_t master_seed = 0;
    std::vector<ResponseTransformModel> response_transforms;  // empty when raw scale
    std::vector<CovariateModel> covariates;

    const CovariateModel& covariate(const std::string& name, int month) const;
    std::optional<TransformSpec> response_transform(int month) const;
    std::vector<std::string> covariate_names() const;
    std::vector<std::string> retained_names(int month) const;
};

void write_model_file(const std::string& path, const FittedModel& model);
FittedModel read_model_file(const std::string& path);

}  // namespace regrid_uq
