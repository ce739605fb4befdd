#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dhflow/flow.hpp"
#include "dhflow/records.hpp"

namespace dhflow {

struct MonitorConfig {
    int cadence = 10;
    double delta1 = 1.0;
    // Descending radii in (0, i_M); empty selects {i_M/2, i_M/4, i_M/8}
    // restricted to radii >= 2 max(hx, hy).
    std::vector<double> radii;
    bool scan_local_F = true;
    bool detect_events = true;
    // Ends a run early once ||psi||_L2 exceeds this multiple of its initial
    // value; 0 disables. Used by sweeps that only need the growth verdict.
    double stop_psi_ratio = 0.0;
};

std::vector<double> default_radii(const GridSpec& grid);
void validate(const MonitorConfig& cfg, const GridSpec& grid);

struct ObserveInfo {
    double cumulative_open = 0.0;  // dissipation integral with the last half-step open
    double last_dt = 0.0;
    double dt = 0.0;
};

// Per-record diagnostics: energies, tangential kinetic norms, Euler-Lagrange
// residuals, local-F maxima, invariant flags and threshold events.
class Monitor {
public:
    explicit Monitor(MonitorConfig cfg);

    void begin(const FlowState& s0);
    MonitorRecord observe(const FlowState& s, const ObserveInfo& info);
    // Events produced by the most recent observe().
    const std::vector<SingularityEvent>& new_events() const { return fresh_; }
    SingularityEvent dt_floor_event(const FlowState& s) const;
    bool stop_requested(const MonitorRecord& r) const;

    int cadence() const { return cfg_.cadence; }
    const MonitorConfig& config() const { return cfg_; }
    const std::vector<double>& radii() const { return radii_; }
    double initial_energy() const { return E0_; }
    double initial_psi_sup() const { return psi_sup0_; }

private:
    MonitorConfig cfg_;
    std::vector<double> radii_;
    double E0_ = 0.0;
    double t0_ = 0.0;
    double psi_sup0_ = 0.0;
    double psi_l2_0_ = 0.0;
    bool have_prev_ = false;
    MonitorRecord prev_;
    std::vector<SingularityEvent> fresh_;
};

// Monitor check between two consecutive states:
//   E(cur) <= E(prev) + 0.02 (t_cur - t_prev) (kinetic_u + kinetic_psi)(cur).
MonitorRecord monitor_step(const FlowState& prev, const FlowState& cur);
bool energy_step_ok(double E_prev, double E_cur, double dt, double dissipation);

// tau - R - eps R_c and eps Lap~ psi - Dslash psi in L^2.
double el_residual_u(const FlowState& s);
double el_residual_psi(const FlowState& s);

// Threshold candidates at radius R: grid points whose local F reaches delta1,
// greedily merged (highest first) within distance 2R.
std::vector<SingularityEvent> threshold_events(const FlowState& s, double delta1, double R);

// Post-hoc detection over snapshots: threshold events at the smallest radius
// plus dt-floor events recorded by the flow; an event within 2R of an earlier
// one is merged into it.
std::vector<SingularityEvent> detect_singularities(std::span<const FlowState> snapshots,
                                                   std::span<const SingularityEvent> flow_events,
                                                   double delta1, std::span<const double> radii);

// floor(4 E0 / delta1).
long singularity_budget(double E0, double delta1);

struct BudgetRow {
    double eps = 0.0;
    double F0 = 0.0;      // dirichlet + eps * spinor_gradient of the initial data
    double delta5 = 0.0;  // (4 / eps) sum |psi0|^2 dA
    double delta1 = 0.0;
    double bound = 0.0;   // (F0 + delta5) / delta1
};

// Bound table over eps for fixed initial data (u0, psi0); delta1 may depend on eps.
std::vector<BudgetRow> epsilon_budget_report(const MapField& u0, const VectorSpinorField& psi0,
                                             const std::function<double(double)>& delta1,
                                             std::span<const double> eps_list);

struct StabilitySample {
    double t = 0.0;
    double gap = 0.0;      // ||u_A - u_B||^2 + ||psi_A - psi_B||^2
    double gap_psi = 0.0;  // spinor part
};

struct StabilityReport {
    std::vector<StabilitySample> samples;
    double lambda = 0.0;  // smallest rate with gap(t) <= gap(0) e^{lambda t}
    double lambda_fit = 0.0;
    bool bound_holds = true;
};

// Co-evolves two states with a common step (the smaller CFL step of the two).
StabilityReport stability_gap(const FlowState& A, const FlowState& B, double T,
                              const StepControl& ctl, int sample_every = 1);

// sum over B_R(center) of (|du|^2 + |psi|^4) dA, du centred.
double dh_blowup_quantity(const FlowState& s, double cx, double cy, double R);

}  // namespace dhflow
