#pragma once

// Plane kernels on a periodic Nx x Ny grid (row-major, x fastest).
//
// Every stencil kernel exists in a scalar reference form and, where the CPU
// supports it, an AVX2 form. Stencil kernels of both forms perform the same
// IEEE operations in the same order and agree bitwise; reductions use lane
// accumulators and agree to rounding.
//
// Seam rule: reading a neighbour across the x (resp. y) seam multiplies it by
// sign_x (resp. sign_y). Spinor fields use -1 on twisted directions.
// Wrapped differences (period > 0) reduce d to d - period*nearbyint(d/period).

#include <cstddef>

namespace dhflow::kernels {

struct PlaneShape {
    std::size_t nx;
    std::size_t ny;
};

struct KernelTable {
    const char* name;

    // out = (in(x+e) - in(x-e)) * scale
    void (*centered_x)(double* out, const double* in, PlaneShape s, double sign, double scale);
    void (*centered_y)(double* out, const double* in, PlaneShape s, double sign, double scale);

    // out = wrap(in(x+e) - in(x)) * scale
    void (*forward_x)(double* out, const double* in, PlaneShape s, double sign, double scale,
                      double period);
    void (*forward_y)(double* out, const double* in, PlaneShape s, double sign, double scale,
                      double period);

    // out = wrap(in(x) - in(x-e)) * scale
    void (*backward_x)(double* out, const double* in, PlaneShape s, double sign, double scale,
                       double period);
    void (*backward_y)(double* out, const double* in, PlaneShape s, double sign, double scale,
                       double period);

    // out = (l + r - 2c) * ihx2 + (d + u - 2c) * ihy2
    void (*laplacian)(double* out, const double* in, PlaneShape s, double sign_x, double sign_y,
                      double ihx2, double ihy2);

    // y += a * x
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // out = a * x + b * y
    void (*axpby)(double* out, double a, const double* x, double b, const double* y,
                  std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when AVX2 is not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

// Selected once: AVX2 when available unless DHFLOW_KERNELS=scalar.
const KernelTable& active();

}  // namespace dhflow::kernels
