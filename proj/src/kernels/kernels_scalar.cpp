#include <cmath>

#include "kernels_common.hpp"

namespace dhflow::kernels {
namespace {

using detail::row_neighbours;
using detail::wrap;

void centered_x(double* out, const double* in, PlaneShape s, double sign, double scale) {
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i) detail::centered_x_cell(o, row, i, s.nx, sign, scale);
    }
}

void centered_y(double* out, const double* in, PlaneShape s, double sign, double scale) {
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign);
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            o[i] = (nb.up_sign * nb.up[i] - nb.down_sign * nb.down[i]) * scale;
    }
}

void forward_x(double* out, const double* in, PlaneShape s, double sign, double scale,
               double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            detail::forward_x_cell(o, row, i, s.nx, sign, scale, period, inv);
    }
}

void forward_y(double* out, const double* in, PlaneShape s, double sign, double scale,
               double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign);
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            o[i] = wrap(nb.up_sign * nb.up[i] - row[i], period, inv) * scale;
    }
}

void backward_x(double* out, const double* in, PlaneShape s, double sign, double scale,
                double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            detail::backward_x_cell(o, row, i, s.nx, sign, scale, period, inv);
    }
}

void backward_y(double* out, const double* in, PlaneShape s, double sign, double scale,
                double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign);
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            o[i] = wrap(row[i] - nb.down_sign * nb.down[i], period, inv) * scale;
    }
}

void laplacian(double* out, const double* in, PlaneShape s, double sign_x, double sign_y,
               double ihx2, double ihy2) {
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign_y);
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        for (std::size_t i = 0; i < s.nx; ++i)
            detail::laplacian_cell(o, row, nb, i, s.nx, sign_x, ihx2, ihy2);
    }
}

void axpy(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpby(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(a[i]);
        if (!(v <= m)) m = v;
    }
    return m;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar",   centered_x, centered_y, forward_x,
                                   forward_y,  backward_x, backward_y, laplacian,
                                   axpy,       axpby,      dot,        sum,
                                   max_abs};
    return table;
}

}  // namespace dhflow::kernels
