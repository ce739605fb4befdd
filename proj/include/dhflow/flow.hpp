#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dhflow/energy.hpp"
#include "dhflow/records.hpp"
#include "dhflow/state.hpp"

namespace dhflow {

class Monitor;

// dt > 0 requests a fixed step (clamped to [min_dt, max_dt]); dt == 0 uses the
// CFL rule.
struct StepControl {
    double dt = 0.0;
    double cfl_safety = 0.5;
    double min_dt = 1e-10;
    double max_dt = 1e-2;
    int max_retries = 8;
};

void validate(const StepControl& ctl);

// How II(du/dt, psi) in the spinor equation obtains du/dt.
enum class CouplingOrder {
    GaussSeidel,  // du/dt of the same evaluation
    Lagged,       // du/dt supplied by the caller (previous evaluation)
};

struct RhsOptions {
    CouplingOrder order = CouplingOrder::GaussSeidel;
    const Field* lagged_du_dt = nullptr;  // zero when absent
};

struct Rhs {
    Field du_dt;
    VectorSpinorField dpsi_dt;
};

// Extrinsic right-hand side of the regularized Dirac-harmonic heat flow:
//   du/dt   = Lap u - II(du, du) - P(II(du_a, e_a.psi), psi) - eps B
//             - eps P(II(du_a, psi), nabla~_a psi) + eps P(II(du_a, nabla~_a psi), psi)
//   dpsi/dt = eps Lap psi - dslash psi + II(du_a, e_a.psi) + II(du/dt, psi)
//             - 2 eps II(du_a, nabla~_a psi) - eps (nabla_a II)(du_a, psi) - eps II(tau, psi)
// Lap is the 5-point stencil, du and nabla~ psi = Pi d psi use centred differences.
// Throws ConstraintError when the state violates its constraints (1e-8) and
// NonFiniteError naming the first term that produced a non-finite value.
Rhs rhs(const FlowState& s, const RhsOptions& opt = {});

// Lap u - II(du, du): the harmonic-map part of du/dt.
Field harmonic_map_rhs(const MapField& u);

// safety * min(h^2/4, h^2/(4 eps)) / (1 + max|du|^2 + max|psi|^2), clamped to
// max_dt; throws BlowUpSignal below min_dt.
double cfl_dt(const GridSpec& grid, double eps, double max_du2, double max_psi2,
              const StepControl& ctl, double t = 0.0);
double cfl_dt(const FlowState& s, const StepControl& ctl);

// L^2 norms of the tangential velocities, sum |Pi v|^2 dA.
double kinetic_u(const MapField& u, const Field& du_dt);
double kinetic_psi(const MapField& u, const VectorSpinorField& dpsi_dt);

struct StepResult {
    FlowState state;
    double dt = 0.0;
    int retries = 0;
    EnergyReport energy_before;
    EnergyReport energy_after;
    // Tangential kinetic energy of the first stage, i.e. at the step start.
    double dissipation = 0.0;
};

// One explicit midpoint (RK2) step followed by nearest-point projection of u
// and tangency projection of psi; the midpoint state is projected as well.
// dt_cap bounds the step (e.g. to land on T_end). A step whose energy rises
// above E_prev + 0.02 dt dissipation, or whose projection degenerates, is
// retried with half the step up to ctl.max_retries times; exhaustion or a step
// below min_dt raises BlowUpSignal.
StepResult step(const FlowState& s, const StepControl& ctl, double dt_cap = 0.0,
                const RhsOptions& opt = {});

// Single attempt with an explicit dt (no CFL, no retry).
FlowState step_fixed(const FlowState& s, double dt, const RhsOptions& opt = {});

enum class RunStatus { Completed, Singular, Failed };

struct RunResult {
    FlowState final_state;
    std::vector<MonitorRecord> records;
    std::vector<SingularityEvent> events;
    RunStatus status = RunStatus::Completed;
    std::string message;
    long steps = 0;
};

// Integrates to T_end. The monitor records every cadence steps and at the end;
// the run stops at the first singular time (threshold event or dt floor).
RunResult run(const FlowState& s0, double T_end, const StepControl& ctl, Monitor& monitor);

// Harmonic map heat flow reference without any spinor: same stencils, CFL
// rule (with psi = 0), RK2 step, projection and energy rejection rule.
struct HarmonicMapRun {
    MapField u;
    double t = 0.0;
    long steps = 0;
};
HarmonicMapRun harmonic_map_heat_flow(const MapField& u0, double eps_for_cfl, double T_end,
                                      const StepControl& ctl);

}  // namespace dhflow
