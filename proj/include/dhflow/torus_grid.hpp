#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dhflow {

// Spin structure on the flat torus: delta = 1 means spinors pick up a factor
// -1 across the seam in that direction.
struct SpinStructure {
    int delta1 = 0;
    int delta2 = 0;

    bool trivial() const { return delta1 == 0 && delta2 == 0; }
    double sign_x() const { return delta1 != 0 ? -1.0 : 1.0; }
    double sign_y() const { return delta2 != 0 ? -1.0 : 1.0; }
    bool operator==(const SpinStructure&) const = default;
};

struct GridSpec {
    double Lx = 0.0;
    double Ly = 0.0;
    int Nx = 0;
    int Ny = 0;
    double hx = 0.0;
    double hy = 0.0;
    SpinStructure spin;

    std::size_t size() const { return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny); }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(Nx) + static_cast<std::size_t>(ix);
    }
    double x(int ix) const { return ix * hx; }
    double y(int iy) const { return iy * hy; }
    double cell_area() const { return hx * hy; }
    double volume() const { return Lx * Ly; }
    double injectivity_radius() const { return 0.5 * (Lx < Ly ? Lx : Ly); }
    double h_max() const { return hx > hy ? hx : hy; }
    double h_min() const { return hx < hy ? hx : hy; }
    bool operator==(const GridSpec&) const = default;
};

// Rejects non-positive lengths, odd N, N < 8 and spin bits outside {0, 1}.
GridSpec make_grid(double Lx, double Ly, int Nx, int Ny, SpinStructure spin = {});

enum class FieldKind { Scalar, Ambient, Spinor };

// Structure-of-arrays storage: `components` real planes of grid.size() values.
// Spinor fields apply the spin-structure seam signs in every stencil.
// A positive period marks values on R / period Z; differences are wrapped.
class Field {
public:
    Field() = default;
    Field(const GridSpec& grid, FieldKind kind, int components, double period = 0.0);

    const GridSpec& grid() const { return grid_; }
    FieldKind kind() const { return kind_; }
    int components() const { return components_; }
    double period() const { return period_; }
    std::size_t plane_size() const { return grid_.size(); }

    std::span<double> plane(int k) { return {data_.data() + k * plane_size(), plane_size()}; }
    std::span<const double> plane(int k) const {
        return {data_.data() + k * plane_size(), plane_size()};
    }
    double* plane_ptr(int k) { return data_.data() + k * plane_size(); }
    const double* plane_ptr(int k) const { return data_.data() + k * plane_size(); }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double seam_sign_x() const { return kind_ == FieldKind::Spinor ? grid_.spin.sign_x() : 1.0; }
    double seam_sign_y() const { return kind_ == FieldKind::Spinor ? grid_.spin.sign_y() : 1.0; }

    // Same grid, kind, component count and period.
    bool same_layout(const Field& o) const;
    Field zeros_like() const { return Field(grid_, kind_, components_, period_); }

private:
    GridSpec grid_{};
    FieldKind kind_ = FieldKind::Scalar;
    int components_ = 0;
    double period_ = 0.0;
    std::vector<double> data_;
};

// Centered difference along axis 1 (x) or 2 (y).
Field partial(const Field& f, int axis);
// One-sided differences; backward(forward(f)) summed over axes is the 5-point stencil.
Field forward_difference(const Field& f, int axis);
Field backward_difference(const Field& f, int axis);
// 5-point Laplacian.
Field laplacian(const Field& f);

struct GridPoint {
    int ix = 0;
    int iy = 0;
    bool operator==(const GridPoint&) const = default;
};

// Grid point nearest to (x, y) on the torus.
GridPoint snap_to_grid(const GridSpec& grid, double x, double y);
// Periodic minimal-image distance between two grid points.
double periodic_distance(const GridSpec& grid, GridPoint a, GridPoint b);

// Quadrature weights (cell area) of the cells whose centre lies in the
// periodic ball B_R(center). The centre snaps to the nearest grid point.
// Requires 2 max(hx, hy) <= R < injectivity radius.
Field ball_mask(const GridSpec& grid, double cx, double cy, double R);

// Grid offsets (dx, dy) with |(dx hx, dy hy)| <= R, shared by ball_mask and the
// FFT scans in energy.
std::vector<GridPoint> ball_offsets(const GridSpec& grid, double R);
void check_ball_radius(const GridSpec& grid, double R);

}  // namespace dhflow
