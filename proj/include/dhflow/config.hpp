#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dhflow/diagnostics.hpp"
#include "dhflow/flow.hpp"

namespace dhflow {

enum class Preset { Single, DecoupledSweep, Degree1Blowup, Convergence, EpsilonSweep, Identities };

const char* preset_name(Preset p);

struct InitialConfig {
    std::string map = "smooth";  // constant | geodesic | smooth | bubble
    double map_amplitude = 0.3;
    int map_modes = 2;
    int geodesic_k = 1;
    double bubble_lambda = 0.3;
    double bubble_rho = 2.0;
    int bubble_turns = 1;  // odd; theta(0) = turns * pi
    double bubble_x = -1.0;  // negative: domain centre
    double bubble_y = -1.0;
    std::string spinor = "smooth";  // zero | smooth | mode
    double spinor_amplitude = 0.1;
    int spinor_modes = 2;
    int mode_n1 = 0;
    int mode_n2 = 0;
    int mode_sign = -1;
};

struct SweepConfig {
    // decoupled_sweep: eps = factor * eps* for each spin structure listed.
    std::vector<double> eps_factors{0.5, 0.75, 1.25, 1.5};
    std::vector<std::pair<int, int>> spins{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    // epsilon_sweep: eps* 2^-k for k = 0..halvings, at a fixed delta1.
    int halvings = 6;
};

struct IdentitiesConfig {
    std::vector<int> resolutions{32, 64};
    int sobolev_samples = 50;
};

struct RunConfig {
    Preset preset = Preset::Single;
    std::uint64_t seed = 1;
    double Lx = 6.283185307179586;
    double Ly = 6.283185307179586;
    int Nx = 32;
    int Ny = 32;
    SpinStructure spin;
    TargetKind target = TargetKind::Sphere;
    int q = 3;
    double eps = 1.0;
    double T_end = 1.0;
    StepControl step;
    CouplingOrder coupling = CouplingOrder::GaussSeidel;
    InitialConfig initial;
    MonitorConfig monitor;
    SweepConfig sweep;
    IdentitiesConfig identities;
    std::filesystem::path out_dir = "out";

    GridSpec grid() const;
    Target target_manifold() const;
};

// Tuned defaults for each preset. A config naming run.preset starts from these
// and overrides individual keys.
RunConfig preset_config(Preset p);

// INI text with sections; unknown sections or keys and out-of-range values
// raise ConfigError naming the key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(const std::string& text);

// Normalised INI listing every key with its effective value.
std::string echo_config(const RunConfig& c);

}  // namespace dhflow
