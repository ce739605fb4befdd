#include <immintrin.h>

#include <cmath>

#include "kernels_common.hpp"

namespace dhflow::kernels {
namespace {

using detail::row_neighbours;

constexpr std::size_t W = 4;

inline __m256d wrap4(__m256d d, __m256d period, __m256d inv) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(d, inv), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    return _mm256_sub_pd(d, _mm256_mul_pd(period, k));
}

void centered_x(double* out, const double* in, PlaneShape s, double sign, double scale) {
    const __m256d vs = _mm256_set1_pd(scale);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        detail::centered_x_cell(o, row, 0, s.nx, sign, scale);
        std::size_t i = 1;
        for (; i + W <= s.nx - 1; i += W) {
            const __m256d r = _mm256_loadu_pd(row + i + 1);
            const __m256d l = _mm256_loadu_pd(row + i - 1);
            _mm256_storeu_pd(o + i, _mm256_mul_pd(_mm256_sub_pd(r, l), vs));
        }
        for (; i < s.nx; ++i) detail::centered_x_cell(o, row, i, s.nx, sign, scale);
    }
}

void centered_y(double* out, const double* in, PlaneShape s, double sign, double scale) {
    const __m256d vs = _mm256_set1_pd(scale);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign);
        const __m256d us = _mm256_set1_pd(nb.up_sign);
        const __m256d ds = _mm256_set1_pd(nb.down_sign);
        double* o = out + j * s.nx;
        std::size_t i = 0;
        for (; i + W <= s.nx; i += W) {
            const __m256d u = _mm256_mul_pd(us, _mm256_loadu_pd(nb.up + i));
            const __m256d d = _mm256_mul_pd(ds, _mm256_loadu_pd(nb.down + i));
            _mm256_storeu_pd(o + i, _mm256_mul_pd(_mm256_sub_pd(u, d), vs));
        }
        for (; i < s.nx; ++i) o[i] = (nb.up_sign * nb.up[i] - nb.down_sign * nb.down[i]) * scale;
    }
}

template <bool Wrap>
void forward_x_impl(double* out, const double* in, PlaneShape s, double sign, double scale,
                    double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vp = _mm256_set1_pd(period);
    const __m256d vi = _mm256_set1_pd(inv);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        std::size_t i = 0;
        for (; i + W <= s.nx - 1; i += W) {
            __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + i + 1), _mm256_loadu_pd(row + i));
            if constexpr (Wrap) d = wrap4(d, vp, vi);
            _mm256_storeu_pd(o + i, _mm256_mul_pd(d, vs));
        }
        for (; i < s.nx; ++i) detail::forward_x_cell(o, row, i, s.nx, sign, scale, period, inv);
    }
}

template <bool Wrap>
void backward_x_impl(double* out, const double* in, PlaneShape s, double sign, double scale,
                     double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vp = _mm256_set1_pd(period);
    const __m256d vi = _mm256_set1_pd(inv);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        detail::backward_x_cell(o, row, 0, s.nx, sign, scale, period, inv);
        std::size_t i = 1;
        for (; i + W <= s.nx; i += W) {
            __m256d d = _mm256_sub_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(row + i - 1));
            if constexpr (Wrap) d = wrap4(d, vp, vi);
            _mm256_storeu_pd(o + i, _mm256_mul_pd(d, vs));
        }
        for (; i < s.nx; ++i) detail::backward_x_cell(o, row, i, s.nx, sign, scale, period, inv);
    }
}

template <bool Wrap, bool Forward>
void diff_y_impl(double* out, const double* in, PlaneShape s, double sign, double scale,
                 double period) {
    const double inv = period > 0.0 ? 1.0 / period : 0.0;
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vp = _mm256_set1_pd(period);
    const __m256d vi = _mm256_set1_pd(inv);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign);
        const double* row = in + j * s.nx;
        const double* other = Forward ? nb.up : nb.down;
        const double osign = Forward ? nb.up_sign : nb.down_sign;
        const __m256d os = _mm256_set1_pd(osign);
        double* o = out + j * s.nx;
        std::size_t i = 0;
        for (; i + W <= s.nx; i += W) {
            const __m256d n = _mm256_mul_pd(os, _mm256_loadu_pd(other + i));
            const __m256d c = _mm256_loadu_pd(row + i);
            __m256d d = Forward ? _mm256_sub_pd(n, c) : _mm256_sub_pd(c, n);
            if constexpr (Wrap) d = wrap4(d, vp, vi);
            _mm256_storeu_pd(o + i, _mm256_mul_pd(d, vs));
        }
        for (; i < s.nx; ++i) {
            const double n = osign * other[i];
            o[i] = detail::wrap(Forward ? n - row[i] : row[i] - n, period, inv) * scale;
        }
    }
}

void forward_x(double* out, const double* in, PlaneShape s, double sign, double scale,
               double period) {
    if (period > 0.0) forward_x_impl<true>(out, in, s, sign, scale, period);
    else forward_x_impl<false>(out, in, s, sign, scale, period);
}

void backward_x(double* out, const double* in, PlaneShape s, double sign, double scale,
                double period) {
    if (period > 0.0) backward_x_impl<true>(out, in, s, sign, scale, period);
    else backward_x_impl<false>(out, in, s, sign, scale, period);
}

void forward_y(double* out, const double* in, PlaneShape s, double sign, double scale,
               double period) {
    if (period > 0.0) diff_y_impl<true, true>(out, in, s, sign, scale, period);
    else diff_y_impl<false, true>(out, in, s, sign, scale, period);
}

void backward_y(double* out, const double* in, PlaneShape s, double sign, double scale,
                double period) {
    if (period > 0.0) diff_y_impl<true, false>(out, in, s, sign, scale, period);
    else diff_y_impl<false, false>(out, in, s, sign, scale, period);
}

void laplacian(double* out, const double* in, PlaneShape s, double sign_x, double sign_y,
               double ihx2, double ihy2) {
    const __m256d vx = _mm256_set1_pd(ihx2);
    const __m256d vy = _mm256_set1_pd(ihy2);
    const __m256d two = _mm256_set1_pd(2.0);
    for (std::size_t j = 0; j < s.ny; ++j) {
        const auto nb = row_neighbours(in, s, j, sign_y);
        const __m256d us = _mm256_set1_pd(nb.up_sign);
        const __m256d ds = _mm256_set1_pd(nb.down_sign);
        const double* row = in + j * s.nx;
        double* o = out + j * s.nx;
        detail::laplacian_cell(o, row, nb, 0, s.nx, sign_x, ihx2, ihy2);
        std::size_t i = 1;
        for (; i + W <= s.nx - 1; i += W) {
            const __m256d c = _mm256_loadu_pd(row + i);
            const __m256d l = _mm256_loadu_pd(row + i - 1);
            const __m256d r = _mm256_loadu_pd(row + i + 1);
            const __m256d d = _mm256_mul_pd(ds, _mm256_loadu_pd(nb.down + i));
            const __m256d u = _mm256_mul_pd(us, _mm256_loadu_pd(nb.up + i));
            const __m256d c2 = _mm256_mul_pd(two, c);
            const __m256d tx = _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(l, r), c2), vx);
            const __m256d ty = _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(d, u), c2), vy);
            _mm256_storeu_pd(o + i, _mm256_add_pd(tx, ty));
        }
        for (; i < s.nx; ++i) detail::laplacian_cell(o, row, nb, i, s.nx, sign_x, ihx2, ihy2);
    }
}

void axpy(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                              _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpby(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                                _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))));
    for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

double hsum(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double max_abs(const double* a, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + W <= n; i += W) m = _mm256_max_pd(m, _mm256_and_pd(mask, _mm256_loadu_pd(a + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
    for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

}  // namespace

const KernelTable& avx2_table_impl() {
    static const KernelTable table{"avx2",     centered_x, centered_y, forward_x,
                                   forward_y,  backward_x, backward_y, laplacian,
                                   axpy,       axpby,      dot,        sum,
                                   max_abs};
    return table;
}

}  // namespace dhflow::kernels
