#include "regrid_uq/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "regrid_uq/errors.hpp"

namespace regrid_uq {

namespace {

int parse_int_strict(std::string_view s, const std::string& context) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("invalid date component '" + std::string(s) + "' in " + context);
    }
    return v;
}

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

constexpr int kDaysBefore[12] = {0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};
constexpr int kDaysInMonth[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

}  // namespace

Date Date::parse(const std::string& iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw ValidationError("invalid ISO-8601 date '" + iso + "'");
    }
    Date d;
    d.year = parse_int_strict(std::string_view(iso).substr(0, 4), iso);
    d.month = parse_int_strict(std::string_view(iso).substr(5, 2), iso);
    d.day = parse_int_strict(std::string_view(iso).substr(8, 2), iso);
    if (d.month < 1 || d.month > 12 || d.day < 1) {
        throw ValidationError("invalid date '" + iso + "'");
    }
    int max_day = kDaysInMonth[d.month - 1];
    if (d.month == 2 && is_leap(d.year)) max_day = 29;
    if (d.day > max_day) throw ValidationError("invalid date '" + iso + "'");
    return d;
}

std::string Date::iso() const {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

int Date::day_of_year() const {
    int doy = kDaysBefore[month - 1] + day;
    if (month > 2 && is_leap(year)) ++doy;
    return doy;
}

Field::Field(Grid grid, std::vector<Date> dates, Eigen::MatrixXd values)
    : grid_(std::move(grid)), dates_(std::move(dates)), values_(std::move(values)) {
    if (values_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
        values_.cols() != static_cast<Eigen::Index>(grid_.size())) {
        throw ValidationError("field: value matrix shape does not match dates x grid");
    }
    if (!std::is_sorted(dates_.begin(), dates_.end())) {
        throw ValidationError("field: dates must be sorted ascending");
    }
    if (std::adjacent_find(dates_.begin(), dates_.end()) != dates_.end()) {
        throw ValidationError("field: duplicate dates");
    }
    if (!values_.allFinite()) throw ValidationError("field: non-finite values");
}

Eigen::MatrixXd Field::rows_for(const std::vector<Date>& dates) const {
    Eigen::MatrixXd out(dates.size(), values_.cols());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const auto it = std::lower_bound(dates_.begin(), dates_.end(), dates[i]);
        if (it == dates_.end() || *it != dates[i]) {
            throw ValidationError("field: missing date " + dates[i].iso());
        }
        out.row(static_cast<Eigen::Index>(i)) =
            values_.row(static_cast<Eigen::Index>(it - dates_.begin()));
    }
    return out;
}

Field Field::subset(const std::vector<Date>& dates) const {
    return Field(grid_, dates, rows_for(dates));
}

}  // namespace regrid_uq
