#pragma once

#include <array>
#include <complex>

#include "dhflow/target_geometry.hpp"
#include "dhflow/torus_grid.hpp"

namespace dhflow {

// Clifford basis on the spinor fibre C^2: gamma_1 = i sigma_1, gamma_2 = i sigma_2.
// Both are anti-Hermitian, gamma_a^2 = -I and gamma_1 gamma_2 = -gamma_2 gamma_1.
using Spinor = std::array<std::complex<double>, 2>;

Spinor clifford_mul(int alpha, const Spinor& s);
std::complex<double> hermitian(const Spinor& a, const Spinor& b);

// Real channel index within one spinor: k = 2 * slot + part (part 0 re, 1 im).
constexpr int kChannels = 4;

// Vector spinor psi = (psi^1, ..., psi^q), psi^i a section of the spinor
// bundle. Stored as 4q real planes, plane i * 4 + k. q = 1 is a plain spinor.
struct VectorSpinorField {
    Field values;

    VectorSpinorField(const GridSpec& grid, int q);
    explicit VectorSpinorField(Field v);

    const GridSpec& grid() const { return values.grid(); }
    int q() const { return values.components() / kChannels; }
    static int plane_index(int i, int k) { return i * kChannels + k; }
    double* channel(int i, int k) { return values.plane_ptr(plane_index(i, k)); }
    const double* channel(int i, int k) const { return values.plane_ptr(plane_index(i, k)); }

    std::complex<double> component(std::size_t point, int i, int slot) const;
    void set_component(std::size_t point, int i, int slot, std::complex<double> v);
    // Gathers psi[i * 4 + k] at one point.
    void get(std::size_t point, std::span<double> out) const;

    VectorSpinorField zeros_like() const { return VectorSpinorField(values.zeros_like()); }
};

// True when every channel is exactly zero. The flow keeps psi = 0 invariant, so
// callers use this to skip spinor terms that would only add zeros.
bool is_zero(const VectorSpinorField& psi);

// gamma_alpha acting on the spinor factor of every component.
VectorSpinorField clifford_mul(int alpha, const VectorSpinorField& psi);

// Sum_alpha gamma_alpha d_alpha psi with centred, spin-aware differences.
VectorSpinorField dirac_flat(const VectorSpinorField& psi);

// Removes the normal part: psi^i <- psi^i - nu^i <nu, psi>.
void tangency_project(const MapField& u, VectorSpinorField& psi);
VectorSpinorField tangency_projected(const MapField& u, const VectorSpinorField& psi);
// Largest |<nu, psi>| relative to max |psi| (or absolute when psi is tiny).
double tangency_violation(const MapField& u, const VectorSpinorField& psi);

// Pi_u applied pointwise to each real channel.
void apply_projector(const MapField& u, VectorSpinorField& psi);

// Twisted covariant derivative Pi_u d_alpha psi with centred differences.
VectorSpinorField twisted_gradient(const MapField& u, const VectorSpinorField& psi, int axis);
// Pi_u d^+_alpha psi and Pi_u d^-_alpha psi (one-sided differences).
VectorSpinorField twisted_forward_gradient(const MapField& u, const VectorSpinorField& psi, int axis);
VectorSpinorField twisted_backward_gradient(const MapField& u, const VectorSpinorField& psi, int axis);

// Sum_alpha gamma_alpha Pi_u d_alpha psi. Requires psi tangent (1e-10 relative).
VectorSpinorField twisted_dirac(const MapField& u, const VectorSpinorField& psi);

// Compact twisted connection Laplacian
//   Pi_u sum_alpha (d^-_alpha (Pi_u d^+_alpha psi) + d^+_alpha (Pi_u d^-_alpha psi)) / 2,
// i.e. d^-(Pibar d^+ psi) with the projector averaged over each edge. Reduces to
// the 5-point stencil for a flat target and is the exact negative gradient of
// (1/4) sum (|Pi_u d^+ psi|^2 + |Pi_u d^- psi|^2). Requires psi tangent.
VectorSpinorField twisted_conn_laplacian(const MapField& u, const VectorSpinorField& psi);

// L^2 inner products with cell-area weights.
double real_inner(const VectorSpinorField& a, const VectorSpinorField& b);
double imag_inner(const VectorSpinorField& a, const VectorSpinorField& b);

}  // namespace dhflow
