#include "regrid_uq/grid.hpp"

#include <cmath>
#include <utility>

#include "regrid_uq/errors.hpp"

namespace regrid_uq {

namespace {
constexpr double kDuplicateTolKm = 1e-9;
}

Grid::Grid(std::string label, std::vector<GridPoint> points)
    : label_(std::move(label)), points_(std::move(points)) {
    if (points_.empty()) throw ValidationError("grid '" + label_ + "': no points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            const double dx = points_[i].x_km - points_[j].x_km;
            const double dy = points_[i].y_km - points_[j].y_km;
            if (std::hypot(dx, dy) < kDuplicateTolKm) {
                throw ValidationError("grid '" + label_ + "': duplicate points at indices " +
                                      std::to_string(i) + " and " + std::to_string(j));
            }
        }
    }
}

std::size_t Grid::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].id == id) return i;
    }
    throw ValidationError("grid '" + label_ + "': no point with id '" + id + "'");
}

Grid make_regular_grid(std::pair<double, double> origin, double spacing_km, int nx, int ny,
                       const std::string& label, const std::string& id_prefix) {
    if (!(spacing_km > 0.0)) throw ValidationError("make_regular_grid: spacing must be positive");
    if (nx < 1 || ny < 1) throw ValidationError("make_regular_grid: nx and ny must be >= 1");
    std::vector<GridPoint> pts;
    pts.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    int idx = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            pts.push_back({id_prefix + std::to_string(idx++),
                           origin.first + i * spacing_km,
                           origin.second + j * spacing_km});
        }
    }
    return Grid(label, std::move(pts));
}

Grid transform_grid(const Grid& g, double rotation_rad, std::pair<double, double> offset_km) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : g.points()) {
        cx += p.x_km;
        cy += p.y_km;
    }
    cx /= static_cast<double>(g.size());
    cy /= static_cast<double>(g.size());

    const double c = std::cos(rotation_rad);
    const double s = std::sin(rotation_rad);
    std::vector<GridPoint> pts;
    pts.reserve(g.size());
    for (const auto& p : g.points()) {
        const double dx = p.x_km - cx;
        const double dy = p.y_km - cy;
        pts.push_back({p.id,
                       cx + c * dx - s * dy + offset_km.first,
                       cy + s * dx + c * dy + offset_km.second});
    }
    return Grid(g.label(), std::move(pts));
}

DistanceMatrix pairwise_distances(const Grid& a, const Grid& b) {
    // Grid construction already rejects empty grids; this guards spans built
    // elsewhere.
    Eigen::MatrixXd d(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::hypot(a.point(i).x_km - b.point(j).x_km, a.point(i).y_km - b.point(j).y_km);
        }
    }
    return DistanceMatrix{std::move(d)};
}

}  // namespace regrid_uq
