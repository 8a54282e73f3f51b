#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace regrid_uq {

struct GridPoint {
    std::string id;
    double x_km = 0.0;
    double y_km = 0.0;
};

// Ordered set of planar locations in kilometers. Order is stable and defines
// the row/column indexing of every matrix built from the grid. Coordinates
// are planar km, not lon/lat; real lon/lat data must be pre-projected.
class Grid {
public:
    // Validates: nonempty, no duplicate coordinates within 1e-9 km.
    Grid(std::string label, std::vector<GridPoint> points);

    const std::string& label() const { return label_; }
    std::size_t size() const { return points_.size(); }
    const GridPoint& point(std::size_t i) const { return points_[i]; }
    const std::vector<GridPoint>& points() const { return points_; }

    // Index of the point with the given id, or throws.
    std::size_t index_of(const std::string& id) const;

private:
    std::string label_;
    std::vector<GridPoint> points_;
};

struct DistanceMatrix {
    Eigen::MatrixXd km;  // rows indexed by grid A, columns by grid B
};

// nx*ny points in row-major order; point (i,j) at origin + (i*spacing, j*spacing).
Grid make_regular_grid(std::pair<double, double> origin, double spacing_km, int nx, int ny,
                       const std::string& label = "grid", const std::string& id_prefix = "p");

// Rigid motion: rotate about the grid centroid, then translate.
Grid transform_grid(const Grid& g, double rotation_rad, std::pair<double, double> offset_km);

DistanceMatrix pairwise_distances(const Grid& a, const Grid& b);

}  // namespace regrid_uq
