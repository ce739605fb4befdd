#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dhflow/config.hpp"
#include "dhflow/energy.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/experiment.hpp"
#include "dhflow/io.hpp"
#include "dhflow/kernels.hpp"

namespace {

using namespace dhflow;

struct Common {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

RunConfig load(const Common& o, std::initializer_list<Preset> allowed, const char* verb) {
    RunConfig c = parse_config(o.config);
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (o.seed_set) c.seed = o.seed;
    for (Preset p : allowed)
        if (c.preset == p) return c;
    throw ConfigError(std::string("run.preset: '") + preset_name(c.preset) + "' cannot be used with '" + verb + "'");
}

int execute(const RunConfig& c, bool quiet) {
    const ExitReport rep = run_experiment(c, {quiet, nullptr});
    std::cout << rep.summary << '\n';
    return rep.exit_code;
}

int inspect(const std::string& path) {
    const FlowState s = read_checkpoint(path);
    const GridSpec& g = s.grid();
    const EnergyReport e = energy_regularized(s);
    nlohmann::ordered_json j;
    j["grid"] = {{"Nx", g.Nx}, {"Ny", g.Ny}, {"Lx", g.Lx}, {"Ly", g.Ly}};
    j["spin"] = {g.spin.delta1, g.spin.delta2};
    j["target"] = s.target().name();
    j["q"] = s.u.q();
    j["eps"] = s.eps;
    j["t"] = s.t;
    j["E_eps"] = e.E_eps;
    j["dirichlet"] = e.dirichlet;
    j["psi_l2"] = e.psi_l2;
    j["constraint_violation"] = s.u.constraint_violation();
    j["tangency_violation"] = tangency_violation(s.u, s.psi);
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized Dirac-harmonic heat flow on a flat torus"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", o.config, "INI config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", o.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--seed", o.seed, "random seed (overrides run.seed)")
            ->each([&](const std::string&) { o.seed_set = true; });
        sub->add_flag("-q,--quiet", o.quiet, "suppress progress lines");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "single flow run (single, degree1_blowup, convergence)");
    add_common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep (decoupled_sweep, epsilon_sweep)");
    add_common(sweep_cmd);
    CLI::App* id_cmd = app.add_subcommand("identities", "discrete identity checks");
    add_common(id_cmd);
    std::string ckpt;
    CLI::App* inspect_cmd = app.add_subcommand("inspect", "summarize a checkpoint");
    inspect_cmd->add_option("checkpoint", ckpt, "checkpoint file")->required()->check(CLI::ExistingFile);
    CLI::App* kernels_cmd = app.add_subcommand("kernels", "print the active SIMD kernel set");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd)
            return execute(load(o, {Preset::Single, Preset::Degree1Blowup, Preset::Convergence}, "run"), o.quiet);
        if (*sweep_cmd)
            return execute(load(o, {Preset::DecoupledSweep, Preset::EpsilonSweep}, "sweep"), o.quiet);
        if (*id_cmd) return execute(load(o, {Preset::Identities}, "identities"), o.quiet);
        if (*inspect_cmd) return inspect(ckpt);
        if (*kernels_cmd) {
            std::cout << kernels::active().name << '\n';
            return 0;
        }
    } catch (const dhflow::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
