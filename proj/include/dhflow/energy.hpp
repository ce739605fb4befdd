#pragma once

#include "dhflow/state.hpp"

namespace dhflow {

// Discrete energy functional
//   E_eps = 1/2 sum |D+ u|^2 dA + 1/2 Re sum <psi, Dslash psi> dA
//         + eps/4 sum (|Pi D+ psi|^2 + |Pi D- psi|^2) dA.
// D+/D- are one-sided differences, Dslash = gamma_a Pi d_a with centred differences.
// The Dirichlet term has the 5-point Laplacian as its exact gradient; the
// spinor-gradient term has twisted_conn_laplacian as its exact gradient.
struct EnergyReport {
    double dirichlet = 0.0;
    double dirac_pairing = 0.0;
    double spinor_gradient = 0.0;
    double E_eps = 0.0;
    double psi_l2 = 0.0;   // sum |psi|^2 dA
    double psi_l4 = 0.0;   // sum |psi|^4 dA
    double psi_sup = 0.0;  // max |psi|
    double dirac_imag = 0.0;
    // E_eps >= -psi_l2 / (4 eps) up to rounding.
    bool lower_bound_ok = true;
};

// 1/2 sum_a sum |D+_a u|^2 dA.
double dirichlet_energy(const MapField& u);
// 1/4 sum_a sum (|Pi D+_a psi|^2 + |Pi D-_a psi|^2) dA.
double spinor_gradient_energy(const MapField& u, const VectorSpinorField& psi);

// Throws std::logic_error when Im <psi, Dslash psi> exceeds 1e-10 of its scale.
EnergyReport energy_regularized(const FlowState& s);

// F = E_eps without the Dirac pairing, pointwise:
//   1/2 sum_a |D+_a u|^2 + eps/4 sum_a (|Pi D+_a psi|^2 + |Pi D-_a psi|^2).
Field F_density(const FlowState& s);

// F restricted to the periodic ball B_R around the grid point nearest (cx, cy).
double local_F(const FlowState& s, double cx, double cy, double R);
// Sum of a density over B_R centred at every grid point (FFT correlation).
Field ball_scan(const Field& density, double R);
inline Field local_F_scan(const FlowState& s, double R) { return ball_scan(F_density(s), R); }

// Tension tau(u) = Pi_u Laplacian(u).
Field tension(const MapField& u);

// Dirac curvature term, the u-gradient of (1/2) Re <psi, Dslash psi>:
//   R(u, psi) = 1/2 sum_a R^N(psi, e_a . psi) du(e_a),
// with R^N(X, Y)Z = <Y, Z>X - <X, Z>Y and centred du.
Field curvature_R(const MapField& u, const VectorSpinorField& psi);
// Spinor-gradient curvature term R_c = sum_a R^N(nabla~_a psi, psi) du(e_a).
Field curvature_Rc(const MapField& u, const VectorSpinorField& psi);

// sum |f|^2 dA over all planes.
double l2_squared(const Field& f);

}  // namespace dhflow
