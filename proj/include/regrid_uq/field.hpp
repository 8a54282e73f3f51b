#pragma once

#include <Eigen/Dense>
#include <compare>
#include <string>
#include <vector>

#include "regrid_uq/grid.hpp"

namespace regrid_uq {

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    static Date parse(const std::string& iso);  // YYYY-MM-DD
    std::string iso() const;
    int day_of_year() const;
};

// One variable on one grid over a set of days: values(t, i) is day t at grid
// point i. Dates are sorted and unique.
class Field {
public:
    Field(Grid grid, std::vector<Date> dates, Eigen::MatrixXd values);

    const Grid& grid() const { return grid_; }
    const std::vector<Date>& dates() const { return dates_; }
    const Eigen::MatrixXd& values() const { return values_; }

    std::size_t n_days() const { return dates_.size(); }
    std::size_t n_locations() const { return grid_.size(); }

    // Rows for the given dates, which must all be present.
    Eigen::MatrixXd rows_for(const std::vector<Date>& dates) const;

    // New field restricted to the given dates.
    Field subset(const std::vector<Date>& dates) const;

private:
    Grid grid_;
    std::vector<Date> dates_;
    Eigen::MatrixXd values_;
};

}  // namespace regrid_uq
