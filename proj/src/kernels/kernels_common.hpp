#pragma once

// Edge handling shared by the scalar and AVX2 translation units so that both
// evaluate seam cells with identical expressions.

#include <cmath>
#include <cstddef>

#include "dhflow/kernels.hpp"

namespace dhflow::kernels::detail {

inline double wrap(double d, double period, double inv_period) {
    return period > 0.0 ? d - period * std::nearbyint(d * inv_period) : d;
}

inline double right_of(const double* row, std::size_t i, std::size_t nx, double sign) {
    return i + 1 < nx ? row[i + 1] : sign * row[0];
}

inline double left_of(const double* row, std::size_t i, std::size_t nx, double sign) {
    return i > 0 ? row[i - 1] : sign * row[nx - 1];
}

inline void centered_x_cell(double* out, const double* row, std::size_t i, std::size_t nx,
                            double sign, double scale) {
    out[i] = (right_of(row, i, nx, sign) - left_of(row, i, nx, sign)) * scale;
}

inline void forward_x_cell(double* out, const double* row, std::size_t i, std::size_t nx,
                           double sign, double scale, double period, double inv_period) {
    out[i] = wrap(right_of(row, i, nx, sign) - row[i], period, inv_period) * scale;
}

inline void backward_x_cell(double* out, const double* row, std::size_t i, std::size_t nx,
                            double sign, double scale, double period, double inv_period) {
    out[i] = wrap(row[i] - left_of(row, i, nx, sign), period, inv_period) * scale;
}

// Row pointers and seam factors for the neighbours of row j in y.
struct RowNeighbours {
    const double* down;
    const double* up;
    double down_sign;
    double up_sign;
};

inline RowNeighbours row_neighbours(const double* in, PlaneShape s, std::size_t j, double sign) {
    RowNeighbours r{};
    r.down = in + (j > 0 ? j - 1 : s.ny - 1) * s.nx;
    r.up = in + (j + 1 < s.ny ? j + 1 : 0) * s.nx;
    r.down_sign = j > 0 ? 1.0 : sign;
    r.up_sign = j + 1 < s.ny ? 1.0 : sign;
    return r;
}

inline void laplacian_cell(double* out, const double* row, const RowNeighbours& nb, std::size_t i,
                           std::size_t nx, double sign_x, double ihx2, double ihy2) {
    const double c = row[i];
    const double l = left_of(row, i, nx, sign_x);
    const double r = right_of(row, i, nx, sign_x);
    const double d = nb.down_sign * nb.down[i];
    const double u = nb.up_sign * nb.up[i];
    out[i] = ((l + r) - 2.0 * c) * ihx2 + ((d + u) - 2.0 * c) * ihy2;
}

}  // namespace dhflow::kernels::detail
