#include "dhflow/clifford_spin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double kTangencyTol = 1e-10;

void check_alpha(int alpha) {
    if (alpha != 1 && alpha != 2) throw std::invalid_argument("Clifford index must be 1 or 2");
}

void check_same_grid(const MapField& u, const VectorSpinorField& psi) {
    if (!(u.grid() == psi.grid())) throw std::invalid_argument("map and spinor grids differ");
    if (u.q() != psi.q()) throw std::invalid_argument("map and spinor ambient dimensions differ");
}

void require_tangent(const MapField& u, const VectorSpinorField& psi) {
    const double v = tangency_violation(u, psi);
    if (v > kTangencyTol)
        throw ConstraintError("spinor is not tangent to the target (relative violation " +
                              std::to_string(v) + ")");
}

}  // namespace

Spinor clifford_mul(int alpha, const Spinor& s) {
    check_alpha(alpha);
    if (alpha == 1) return {I * s[1], I * s[0]};
    return {s[1], -s[0]};
}

std::complex<double> hermitian(const Spinor& a, const Spinor& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

VectorSpinorField::VectorSpinorField(const GridSpec& grid, int q)
    : values(grid, FieldKind::Spinor, q * kChannels) {}

VectorSpinorField::VectorSpinorField(Field v) : values(std::move(v)) {
    if (values.kind() != FieldKind::Spinor || values.components() % kChannels != 0)
        throw std::invalid_argument("field is not a vector spinor");
}

std::complex<double> VectorSpinorField::component(std::size_t point, int i, int slot) const {
    return {channel(i, 2 * slot)[point], channel(i, 2 * slot + 1)[point]};
}

void VectorSpinorField::set_component(std::size_t point, int i, int slot, std::complex<double> v) {
    channel(i, 2 * slot)[point] = v.real();
    channel(i, 2 * slot + 1)[point] = v.imag();
}

void VectorSpinorField::get(std::size_t point, std::span<double> out) const {
    for (int i = 0; i < q(); ++i)
        for (int k = 0; k < kChannels; ++k)
            out[static_cast<std::size_t>(i * kChannels + k)] = channel(i, k)[point];
}

bool is_zero(const VectorSpinorField& psi) {
    const auto& d = psi.values.data();
    return std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
}

VectorSpinorField clifford_mul(int alpha, const VectorSpinorField& psi) {
    check_alpha(alpha);
    VectorSpinorField out = psi.zeros_like();
    const std::size_t n = psi.values.plane_size();
    // Channel maps (re0, im0, re1, im1):
    //   gamma_1: (-im1, re1, -im0, re0)    gamma_2: (re1, im1, -re0, -im0)
    static constexpr int src[2][4] = {{3, 2, 1, 0}, {2, 3, 0, 1}};
    static constexpr double sgn[2][4] = {{-1.0, 1.0, -1.0, 1.0}, {1.0, 1.0, -1.0, -1.0}};
    const int a = alpha - 1;
    for (int i = 0; i < psi.q(); ++i) {
        for (int k = 0; k < kChannels; ++k) {
            const double* in = psi.channel(i, src[a][k]);
            double* o = out.channel(i, k);
            const double s = sgn[a][k];
            for (std::size_t p = 0; p < n; ++p) o[p] = s * in[p];
        }
    }
    return out;
}

VectorSpinorField dirac_flat(const VectorSpinorField& psi) {
    VectorSpinorField out = psi.zeros_like();
    const auto& k = kernels::active();
    for (int alpha = 1; alpha <= 2; ++alpha) {
        VectorSpinorField d(partial(psi.values, alpha));
        VectorSpinorField g = clifford_mul(alpha, d);
        k.axpy(out.values.data().data(), 1.0, g.values.data().data(), out.values.data().size());
    }
    return out;
}

void apply_projector(const MapField& u, VectorSpinorField& psi) {
    check_same_grid(u, psi);
    if (u.target.kind() == TargetKind::FlatTorus) return;
    const int q = u.q();
    const std::size_t n = u.grid().size();
    std::vector<double> d(n);
    for (int k = 0; k < kChannels; ++k) {
        std::fill(d.begin(), d.end(), 0.0);
        for (int i = 0; i < q; ++i) {
            const double* ui = u.values.plane_ptr(i);
            const double* pi = psi.channel(i, k);
            for (std::size_t p = 0; p < n; ++p) d[p] += ui[p] * pi[p];
        }
        for (int i = 0; i < q; ++i) {
            const double* ui = u.values.plane_ptr(i);
            double* pi = psi.channel(i, k);
            for (std::size_t p = 0; p < n; ++p) pi[p] -= ui[p] * d[p];
        }
    }
}

void tangency_project(const MapField& u, VectorSpinorField& psi) { apply_projector(u, psi); }

VectorSpinorField tangency_projected(const MapField& u, const VectorSpinorField& psi) {
    VectorSpinorField out = psi;
    apply_projector(u, out);
    return out;
}

double tangency_violation(const MapField& u, const VectorSpinorField& psi) {
    check_same_grid(u, psi);
    if (u.target.kind() == TargetKind::FlatTorus) return 0.0;
    const double scale = kernels::active().max_abs(psi.values.data().data(), psi.values.data().size());
    if (scale == 0.0) return 0.0;
    const int q = u.q();
    const std::size_t n = u.grid().size();
    double worst = 0.0;
    for (int k = 0; k < kChannels; ++k) {
        for (std::size_t p = 0; p < n; ++p) {
            double d = 0.0;
            for (int i = 0; i < q; ++i) d += u.values.plane_ptr(i)[p] * psi.channel(i, k)[p];
            worst = std::max(worst, std::fabs(d));
        }
    }
    return worst / std::max(scale, 1.0);
}

VectorSpinorField twisted_gradient(const MapField& u, const VectorSpinorField& psi, int axis) {
    check_same_grid(u, psi);
    VectorSpinorField d(partial(psi.values, axis));
    apply_projector(u, d);
    return d;
}

VectorSpinorField twisted_forward_gradient(const MapField& u, const VectorSpinorField& psi,
                                           int axis) {
    check_same_grid(u, psi);
    VectorSpinorField d(forward_difference(psi.values, axis));
    apply_projector(u, d);
    return d;
}

VectorSpinorField twisted_backward_gradient(const MapField& u, const VectorSpinorField& psi,
                                            int axis) {
    check_same_grid(u, psi);
    VectorSpinorField d(backward_difference(psi.values, axis));
    apply_projector(u, d);
    return d;
}

VectorSpinorField twisted_dirac(const MapField& u, const VectorSpinorField& psi) {
    check_same_grid(u, psi);
    require_tangent(u, psi);
    VectorSpinorField out = psi.zeros_like();
    const auto& k = kernels::active();
    for (int alpha = 1; alpha <= 2; ++alpha) {
        VectorSpinorField g = clifford_mul(alpha, twisted_gradient(u, psi, alpha));
        k.axpy(out.values.data().data(), 1.0, g.values.data().data(), out.values.data().size());
    }
    return out;
}

VectorSpinorField twisted_conn_laplacian(const MapField& u, const VectorSpinorField& psi) {
    check_same_grid(u, psi);
    require_tangent(u, psi);
    VectorSpinorField out = psi.zeros_like();
    const auto& k = kernels::active();
    for (int alpha = 1; alpha <= 2; ++alpha) {
        const Field b = backward_difference(twisted_forward_gradient(u, psi, alpha).values, alpha);
        const Field f = forward_difference(twisted_backward_gradient(u, psi, alpha).values, alpha);
        k.axpy(out.values.data().data(), 0.5, b.data().data(), out.values.data().size());
        k.axpy(out.values.data().data(), 0.5, f.data().data(), out.values.data().size());
    }
    apply_projector(u, out);
    return out;
}

double real_inner(const VectorSpinorField& a, const VectorSpinorField& b) {
    if (!a.values.same_layout(b.values)) throw std::invalid_argument("spinor layouts differ");
    return kernels::active().dot(a.values.data().data(), b.values.data().data(),
                                 a.values.data().size()) *
           a.grid().cell_area();
}

double imag_inner(const VectorSpinorField& a, const VectorSpinorField& b) {
    if (!a.values.same_layout(b.values)) throw std::invalid_argument("spinor layouts differ");
    const auto& k = kernels::active();
    const std::size_t n = a.values.plane_size();
    double s = 0.0;
    for (int i = 0; i < a.q(); ++i) {
        for (int slot = 0; slot < 2; ++slot) {
            const double* ar = a.channel(i, 2 * slot);
            const double* ai = a.channel(i, 2 * slot + 1);
            const double* br = b.channel(i, 2 * slot);
            const double* bi = b.channel(i, 2 * slot + 1);
            s += k.dot(ar, bi, n) - k.dot(ai, br, n);
        }
    }
    return s * a.grid().cell_area();
}

}  // namespace dhflow
