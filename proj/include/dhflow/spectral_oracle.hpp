#pragma once

#include <vector>

#include "dhflow/flow.hpp"

namespace dhflow {

// Allowed spinor frequencies xi = 2 pi (n + delta / 2) / L per axis.
struct ModeSet {
    std::vector<double> xi_x;  // grid band, n in [-N/2, N/2)
    std::vector<double> xi_y;
    double min_nonzero = 0.0;
    bool has_zero_mode = false;
};

ModeSet mode_set(const GridSpec& grid);

// 1 / min |xi| over nonzero modes: above it every nonzero mode of the decoupled
// spinor flow decays, below it the slowest branch grows.
double epsilon_threshold(const GridSpec& grid);

enum class Symbol {
    Continuum,  // xi and |xi|^2
    Discrete,   // sin(xi h) / h and (2 sin(xi h / 2) / h)^2, exact for the stencils
};

// Growth rate of the slower branch of mode xi: |xi| - eps |xi|^2 (continuum).
double mode_rate(double xi_abs, double eps);

// Exact solution of d/dt psi = eps Lap psi - dslash psi for a flat target,
// mode by mode: psi^(t) = exp(t (-eps |xi|^2 + sigma . xi)) psi^(0).
// Throws std::invalid_argument for a non-flat target.
VectorSpinorField decoupled_exact(const MapField& u, const VectorSpinorField& psi0, double eps,
                                  double t, Symbol symbol = Symbol::Continuum);

struct GradientSample {
    double s = 0.0;
    double fd = 0.0;        // (E(s) - E(-s)) / 2s along the retracted variation
    double residual = 0.0;  // fd - predicted
};

struct GradientReport {
    double predicted = 0.0;  // -<rhs, var>
    std::vector<GradientSample> samples;
    double extrapolated_gap = 0.0;  // |Richardson(fd) - predicted|
    double scale = 0.0;             // ||rhs|| ||var||
};

// Compares the centred energy difference along u_s = proj(u + s v),
// psi_s = Pi_{u_s}(psi + s phi) with -<rhs, (v, phi)>. v and phi must be tangent.
GradientReport gradient_check(const FlowState& s, const Field& var_u, const VectorSpinorField& var_psi,
                              const std::vector<double>& s_values);

struct BochnerResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // lhs - rhs
};

// int |tau|^2 against int |nabla du|^2 + int <R(du_a, du_b) du_a, du_b>.
BochnerResult bochner_residual_phi(const MapField& u);
// int |Lap~ psi|^2 against int |nabla~^2 psi|^2 + int <R^E_ab psi, nabla~_b nabla~_a psi>
//   + int <R^E_ab nabla~_a psi, nabla~_b psi>, R^E_ab = R^N(du_a, du_b).
BochnerResult bochner_residual_psi(const VectorSpinorField& psi, const MapField& u);

struct SobolevReport {
    std::vector<double> ratios;        // int v^4 / (int v^2 int |grad v|^2), mean removed
    std::vector<double> local_ratios;  // int |grad v|^4 / (sup_x int_{B_R} |grad v|^2 (int |grad^2 v|^2 + R^-2 int |grad v|^2))
    double max_ratio = 0.0;
    double max_local_ratio = 0.0;
    bool finite = true;
};

// Scalar sample fields; samples with zero gradient after mean removal are skipped.
SobolevReport sobolev_ratio(const std::vector<Field>& samples, double R);

struct HarnackReport {
    double sup_at_T = 0.0;
    double U0 = 0.0;  // max over [0, T] of int u
    double K = 0.0;   // sup of the discrete heat kernel at t = 1
    double bound = 0.0;  // e^C K U0
    bool holds = false;
};

// Evolves du/dt = Lap u + C u exactly (discrete Laplacian symbol) to T >= 1.
HarnackReport harnack_demo(const Field& u0, double C, double T);
// The same semigroup as a field, for direct comparisons.
Field heat_semigroup(const Field& u0, double C, double t);

struct EquationGap {
    double gap_u = 0.0;    // ||du/dt - (tau - R - eps R_c)||
    double gap_psi = 0.0;  // ||Pi dpsi/dt - (eps Lap~ psi - Dslash psi)||
};

// Extrinsic right-hand side against the intrinsic Euler-Lagrange form.
EquationGap extrinsic_intrinsic_gap(const FlowState& s);

}  // namespace dhflow
