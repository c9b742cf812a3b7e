#include "rdmt/mesh.hpp"

#include <stdexcept>

namespace rdmt {

std::array<double, 2> Mesh::cell_center(std::size_t k) const {
    if (dim == 1) {
        return {(static_cast<double>(k) + 0.5) * spacing[0], 0.0};
    }
    const std::size_t i = k % cells[0];
    const std::size_t j = k / cells[0];
    return {(static_cast<double>(i) + 0.5) * spacing[0],
            (static_cast<double>(j) + 0.5) * spacing[1]};
}

double Mesh::boundary_measure() const {
    double acc = 0.0;
    for (const auto& f : boundary_faces) acc += f.area;
    return acc;
}

Mesh build_interval(double length, std::size_t n) {
    if (length <= 0.0) throw std::invalid_argument("interval length must be positive");
    if (n < 2) throw std::invalid_argument("interval mesh needs at least 2 cells");

    Mesh m;
    m.dim = 1;
    m.extents = {length, 0.0};
    m.cells = {n, 0};
    const double h = length / static_cast<double>(n);
    m.spacing = {h, 0.0};
    m.cell_volume = h;

    m.interior_faces.reserve(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        m.interior_faces.push_back({k, k + 1, 1.0, h});
    }
    m.boundary_faces.push_back({0, 1.0, 0, -1, {0.0, 0.0}});
    m.boundary_faces.push_back({n - 1, 1.0, 0, +1, {length, 0.0}});

    m.boundary_area_per_cell.assign(n, 0.0);
    for (const auto& f : m.boundary_faces) m.boundary_area_per_cell[f.cell] += f.area;
    return m;
}

Mesh build_rectangle(double lx, double ly, std::size_t nx, std::size_t ny) {
    if (lx <= 0.0 || ly <= 0.0) throw std::invalid_argument("rectangle extents must be positive");
    if (nx < 2 || ny < 2) throw std::invalid_argument("rectangle mesh needs at least 2x2 cells");

    Mesh m;
    m.dim = 2;
    m.extents = {lx, ly};
    m.cells = {nx, ny};
    const double dx = lx / static_cast<double>(nx);
    const double dy = ly / static_cast<double>(ny);
    m.spacing = {dx, dy};
    m.cell_volume = dx * dy;

    const auto id = [nx](std::size_t i, std::size_t j) { return j * nx + i; };

    m.interior_faces.reserve((nx - 1) * ny + nx * (ny - 1));
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            m.interior_faces.push_back({id(i, j), id(i + 1, j), dy, dx});
        }
    }
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            m.interior_faces.push_back({id(i, j), id(i, j + 1), dx, dy});
        }
    }

    for (std::size_t j = 0; j < ny; ++j) {
        const double ymid = (static_cast<double>(j) + 0.5) * dy;
        m.boundary_faces.push_back({id(0, j), dy, 0, -1, {0.0, ymid}});
        m.boundary_faces.push_back({id(nx - 1, j), dy, 0, +1, {lx, ymid}});
    }
    for (std::size_t i = 0; i < nx; ++i) {
        const double xmid = (static_cast<double>(i) + 0.5) * dx;
        m.boundary_faces.push_back({id(i, 0), dx, 1, -1, {xmid, 0.0}});
        m.boundary_faces.push_back({id(i, ny - 1), dx, 1, +1, {xmid, ly}});
    }

    m.boundary_area_per_cell.assign(nx * ny, 0.0);
    for (const auto& f : m.boundary_faces) m.boundary_area_per_cell[f.cell] += f.area;
    return m;
}

}  // namespace rdmt
