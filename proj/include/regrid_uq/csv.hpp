#pragma once

#include <string>
#include <vector>

#include "regrid_uq/field.hpp"
#include "regrid_uq/grid.hpp"

namespace regrid_uq::csv {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const Table& table);

// Grid CSV: header id,x_km,y_km, one row per point, LF line endings.
void write_grid(const std::string& path, const Grid& grid);
Grid read_grid(const std::string& path, const std::string& label);

// Field CSV: header date,location_id,value; one row per (day, location),
// days outer, grid order inner.
void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path, const Grid& grid);

}  // namespace regrid_uq::csv
