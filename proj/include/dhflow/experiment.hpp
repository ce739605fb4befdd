#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dhflow/config.hpp"
#include "dhflow/diagnostics.hpp"

namespace dhflow {

struct ExperimentOptions {
    bool quiet = false;
    std::ostream* log = nullptr;  // progress lines; std::cerr when null
};

struct ExitReport {
    int exit_code = 0;  // 0 clean, 2 singular termination, 1 error
    std::string summary;
};

// Initial state from the [initial] section.
FlowState initial_state(const RunConfig& c);

// One flow run with artifacts written to dir: config.ini, run.csv,
// events.json, final.ckpt, conventions.json, status.json.
struct SingleRun {
    RunResult result;
    std::vector<double> radii;
    double initial_energy = 0.0;
};
SingleRun run_single(const RunConfig& c, const FlowState& s0, const std::filesystem::path& dir,
                     const ExperimentOptions& opt = {});

struct DecoupledRow {
    int delta1 = 0, delta2 = 0;
    double factor = 0.0;
    double eps = 0.0;
    double eps_star = 0.0;
    double predicted_rate = 0.0;  // |xi_min| - eps |xi_min|^2, amplitude growth of the slowest branch
    double fitted_rate = 0.0;     // d/dt log ||psi|| over the second half of the run
    double psi_norm_initial = 0.0;
    double psi_norm_final = 0.0;
    double t_final = 0.0;
    bool monotone_decay = false;
    bool grew_10x = false;
    RunStatus status = RunStatus::Completed;
};
std::vector<DecoupledRow> decoupled_sweep(const RunConfig& c, const std::filesystem::path& dir,
                                          const ExperimentOptions& opt = {});

struct EpsilonRow {
    int k = 0;
    BudgetRow budget;
    double psi_l4_final = 0.0;
    RunStatus status = RunStatus::Completed;
    std::vector<MonitorRecord> records;
};
struct EpsilonSweep {
    std::vector<EpsilonRow> rows;
    bool budget_monotone = false;
    bool l4_monotone = false;
};
EpsilonSweep epsilon_sweep(const RunConfig& c, const std::filesystem::path& dir,
                           const ExperimentOptions& opt = {});

struct IdentityRow {
    int N = 0;
    double bochner_phi_gap = 0.0;
    double bochner_psi_gap = 0.0;
    double bochner_zero_phi = 0.0;  // flat linear map
    double bochner_zero_psi = 0.0;  // psi = 0 on the sphere
    double rhs_gap_u = 0.0;
    double rhs_gap_psi = 0.0;
    double geodesic_residual = 0.0;
    double gradient_rel_gap = 0.0;
    double sobolev_max_ratio = 0.0;
    double sobolev_max_local_ratio = 0.0;
    double harnack_sup = 0.0;
    double harnack_bound = 0.0;
    bool harnack_holds = false;
};
std::vector<IdentityRow> identities(const RunConfig& c, const std::filesystem::path& dir,
                                    const ExperimentOptions& opt = {});

// Dispatches on c.preset and writes everything under c.out_dir.
ExitReport run_experiment(const RunConfig& c, const ExperimentOptions& opt = {});

const char* status_name(RunStatus s);

}  // namespace dhflow
