#include "regrid_uq/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "regrid_uq/errors.hpp"

namespace regrid_uq::csv {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw NumericError("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const std::string& context) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError("invalid number '" + s + "' in " + context);
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    return f;
}

}  // namespace

Table read_table(const std::string& path) {
    auto f = open_in(path);
    Table t;
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty CSV: " + path);
    t.header = split_csv_line(line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != t.header.size()) {
            throw IoError(path + ": row with " + std::to_string(row.size()) +
                          " fields, expected " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_table(const std::string& path, const Table& table) {
    auto f = open_out(path);
    auto emit = [&f](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ',';
            f << row[i];
        }
        f << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    if (!f) throw IoError("write failed: " + path);
}

void write_grid(const std::string& path, const Grid& grid) {
    auto f = open_out(path);
    f << "id,x_km,y_km\n";
    for (const auto& p : grid.points()) {
        f << p.id << ',' << format_double(p.x_km) << ',' << format_double(p.y_km) << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

Grid read_grid(const std::string& path, const std::string& label) {
    const Table t = read_table(path);
    if (t.header != std::vector<std::string>{"id", "x_km", "y_km"}) {
        throw IoError(path + ": expected header id,x_km,y_km");
    }
    std::vector<GridPoint> pts;
    pts.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        pts.push_back({row[0], parse_double(row[1], path), parse_double(row[2], path)});
    }
    return Grid(label, std::move(pts));
}

void write_field(const std::string& path, const Field& field) {
    auto f = open_out(path);
    f << "date,location_id,value\n";
    for (std::size_t t = 0; t < field.n_days(); ++t) {
        const std::string date = field.dates()[t].iso();
        for (std::size_t i = 0; i < field.n_locations(); ++i) {
            f << date << ',' << field.grid().point(i).id << ','
              << format_double(field.values()(static_cast<Eigen::Index>(t),
                                              static_cast<Eigen::Index>(i)))
              << '\n';
        }
    }
    if (!f) throw IoError("write failed: " + path);
}

Field read_field(const std::string& path, const Grid& grid) {
    const Table t = read_table(path);
    if (t.header != std::vector<std::string>{"date", "location_id", "value"}) {
        throw IoError(path + ": expected header date,location_id,value");
    }
    std::map<Date, Eigen::Index> date_index;
    for (const auto& row : t.rows) {
        date_index.emplace(Date::parse(row[0]), 0);
    }
    std::vector<Date> dates;
    dates.reserve(date_index.size());
    for (auto& [d, idx] : date_index) {
        idx = static_cast<Eigen::Index>(dates.size());
        dates.push_back(d);
    }

    const auto n_loc = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd values(dates.size(), n_loc);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(dates.size(), n_loc);
    for (const auto& row : t.rows) {
        const Eigen::Index r = date_index.at(Date::parse(row[0]));
        const auto c = static_cast<Eigen::Index>(grid.index_of(row[1]));
        if (seen(r, c)++ > 0) {
            throw IoError(path + ": duplicate cell (" + row[0] + ", " + row[1] + ")");
        }
        values(r, c) = parse_double(row[2], path);
    }
    if (seen.minCoeff() == 0) {
        for (Eigen::Index r = 0; r < seen.rows(); ++r) {
            for (Eigen::Index c = 0; c < seen.cols(); ++c) {
                if (seen(r, c) == 0) {
                    throw IoError(path + ": missing cell (" + dates[static_cast<std::size_t>(r)].iso() +
                                  ", " + grid.point(static_cast<std::size_t>(c)).id + ")");
                }
            }
        }
    }
    return Field(grid, std::move(dates), std::move(values));
}

}  // namespace regrid_uq::csv
