#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace rdmt {

struct InteriorFace {
    std::size_t cell_a = 0;
    std::size_t cell_b = 0;
    double area = 0.0;
    double center_distance = 0.0;
};

struct BoundaryFace {
    std::size_t cell = 0;
    double area = 0.0;
    int axis = 0;   // 0 = x, 1 = y
    int sign = 0;   // outward normal direction along axis
    std::array<double, 2> midpoint{0.0, 0.0};
};

/// Uniform tensor-product finite-volume mesh on an interval or rectangle.
/// Immutable after construction.
struct Mesh {
    int dim = 1;
    std::array<double, 2> extents{0.0, 0.0};
    std::array<std::size_t, 2> cells{0, 0};
    double cell_volume = 0.0;
    std::array<double, 2> spacing{0.0, 0.0};
    std::vector<InteriorFace> interior_faces;
    std::vector<BoundaryFace> boundary_faces;
    /// Total boundary-face area owned by each cell; zero for interior cells.
    std::vector<double> boundary_area_per_cell;

    std::size_t num_cells() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }

    /// Cell center coordinates (y = 0 in 1D).
    std::array<double, 2> cell_center(std::size_t k) const;

    double total_volume() const { return cell_volume * static_cast<double>(num_cells()); }
    double boundary_measure() const;
};

/// Uniform 1D mesh with n >= 2 cells; both endpoints carry a unit-area
/// boundary face, so the boundary measure is 2.
Mesh build_interval(double length, std::size_t n);

/// Uniform 2D tensor mesh with the 5-point interior adjacency; boundary faces
/// on all four edges carry the transverse cell width as area.
Mesh build_rectangle(double lx, double ly, std::size_t nx, std::size_t ny);

}  // namespace rdmt
