#include "dhflow/torus_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dhflow/kernels.hpp"

namespace dhflow {

GridSpec make_grid(double Lx, double Ly, int Nx, int Ny, SpinStructure spin) {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("grid lengths must be positive");
    if (Nx < 8 || Ny < 8) throw std::invalid_argument("grid needs at least 8 points per axis");
    if (Nx % 2 != 0 || Ny % 2 != 0) throw std::invalid_argument("grid point counts must be even");
    auto bit = [](int d) { return d == 0 || d == 1; };
    if (!bit(spin.delta1) || !bit(spin.delta2))
        throw std::invalid_argument("spin structure bits must be 0 or 1");
    GridSpec g;
    g.Lx = Lx;
    g.Ly = Ly;
    g.Nx = Nx;
    g.Ny = Ny;
    g.hx = Lx / Nx;
    g.hy = Ly / Ny;
    g.spin = spin;
    return g;
}

Field::Field(const GridSpec& grid, FieldKind kind, int components, double period)
    : grid_(grid), kind_(kind), components_(components), period_(period),
      data_(grid.size() * static_cast<std::size_t>(components), 0.0) {
    if (components < 1) throw std::invalid_argument("field needs at least one component");
}

bool Field::same_layout(const Field& o) const {
    return grid_ == o.grid_ && kind_ == o.kind_ && components_ == o.components_ &&
           period_ == o.period_;
}

namespace {

kernels::PlaneShape shape_of(const GridSpec& g) {
    return {static_cast<std::size_t>(g.Nx), static_cast<std::size_t>(g.Ny)};
}

// Differences of wrapped values are ordinary vectors, so outputs drop the period.
Field derivative_like(const Field& f) { return Field(f.grid(), f.kind(), f.components(), 0.0); }

void check_axis(int axis) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
}

}  // namespace

Field partial(const Field& f, int axis) {
    check_axis(axis);
    const auto& k = kernels::active();
    const auto& g = f.grid();
    if (f.period() > 0.0) {
        // Wrapped values: average the two wrapped one-sided differences.
        Field fw = forward_difference(f, axis);
        Field bw = backward_difference(f, axis);
        Field out = derivative_like(f);
        k.axpby(out.data().data(), 0.5, fw.data().data(), 0.5, bw.data().data(), out.data().size());
        return out;
    }
    Field out = derivative_like(f);
    for (int c = 0; c < f.components(); ++c) {
        if (axis == 1)
            k.centered_x(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_x(), 0.5 / g.hx);
        else
            k.centered_y(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_y(), 0.5 / g.hy);
    }
    return out;
}

Field forward_difference(const Field& f, int axis) {
    check_axis(axis);
    const auto& k = kernels::active();
    const auto& g = f.grid();
    Field out = derivative_like(f);
    for (int c = 0; c < f.components(); ++c) {
        if (axis == 1)
            k.forward_x(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_x(), 1.0 / g.hx,
                        f.period());
        else
            k.forward_y(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_y(), 1.0 / g.hy,
                        f.period());
    }
    return out;
}

Field backward_difference(const Field& f, int axis) {
    check_axis(axis);
    const auto& k = kernels::active();
    const auto& g = f.grid();
    Field out = derivative_like(f);
    for (int c = 0; c < f.components(); ++c) {
        if (axis == 1)
            k.backward_x(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_x(), 1.0 / g.hx,
                         f.period());
        else
            k.backward_y(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_y(), 1.0 / g.hy,
                         f.period());
    }
    return out;
}

Field laplacian(const Field& f) {
    const auto& k = kernels::active();
    const auto& g = f.grid();
    Field out = derivative_like(f);
    if (f.period() > 0.0) {
        // Difference of wrapped forward differences keeps the stencil exact for
        // maps that wind around the target.
        for (int axis = 1; axis <= 2; ++axis) {
            Field fw = forward_difference(f, axis);
            Field bfw = derivative_like(fw);
            for (int c = 0; c < f.components(); ++c) {
                // Differences are already unwrapped, so no period here.
                if (axis == 1)
                    k.backward_x(bfw.plane_ptr(c), fw.plane_ptr(c), shape_of(g), 1.0, 1.0 / g.hx, 0.0);
                else
                    k.backward_y(bfw.plane_ptr(c), fw.plane_ptr(c), shape_of(g), 1.0, 1.0 / g.hy, 0.0);
            }
            k.axpy(out.data().data(), 1.0, bfw.data().data(), out.data().size());
        }
        return out;
    }
    for (int c = 0; c < f.components(); ++c)
        k.laplacian(out.plane_ptr(c), f.plane_ptr(c), shape_of(g), f.seam_sign_x(), f.seam_sign_y(),
                    1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    return out;
}

GridPoint snap_to_grid(const GridSpec& grid, double x, double y) {
    auto snap = [](double v, double h, int n) {
        long long i = std::llround(v / h);
        i %= n;
        if (i < 0) i += n;
        return static_cast<int>(i);
    };
    return {snap(x, grid.hx, grid.Nx), snap(y, grid.hy, grid.Ny)};
}

double periodic_distance(const GridSpec& grid, GridPoint a, GridPoint b) {
    auto d = [](int i, int j, int n, double h) {
        int k = std::abs(i - j) % n;
        if (k > n - k) k = n - k;
        return k * h;
    };
    return std::hypot(d(a.ix, b.ix, grid.Nx, grid.hx), d(a.iy, b.iy, grid.Ny, grid.hy));
}

void check_ball_radius(const GridSpec& grid, double R) {
    if (!(R < grid.injectivity_radius()))
        throw std::invalid_argument("ball radius must be below the injectivity radius");
    if (R < 2.0 * grid.h_max())
        throw std::invalid_argument("ball radius " + std::to_string(R) +
                                    " is below two grid spacings");
}

std::vector<GridPoint> ball_offsets(const GridSpec& grid, double R) {
    check_ball_radius(grid, R);
    const int rx = static_cast<int>(std::floor(R / grid.hx));
    const int ry = static_cast<int>(std::floor(R / grid.hy));
    std::vector<GridPoint> out;
    for (int dy = -ry; dy <= ry; ++dy)
        for (int dx = -rx; dx <= rx; ++dx)
            if (std::hypot(dx * grid.hx, dy * grid.hy) <= R) out.push_back({dx, dy});
    return out;
}

Field ball_mask(const GridSpec& grid, double cx, double cy, double R) {
    const auto offsets = ball_offsets(grid, R);
    const GridPoint c = snap_to_grid(grid, cx, cy);
    Field mask(grid, FieldKind::Scalar, 1);
    auto w = mask.plane(0);
    for (const auto& o : offsets) {
        const int ix = ((c.ix + o.ix) % grid.Nx + grid.Nx) % grid.Nx;
        const int iy = ((c.iy + o.iy) % grid.Ny + grid.Ny) % grid.Ny;
        w[grid.index(ix, iy)] = grid.cell_area();
    }
    return mask;
}

}  // namespace dhflow
