#include "dhflow/experiment.hpp"

#include <cmath>
#include <iostream>

#include <json.hpp>

#include "dhflow/errors.hpp"
#include "dhflow/initial_data.hpp"
#include "dhflow/io.hpp"
#include "dhflow/spectral_oracle.hpp"

namespace dhflow {

namespace fs = std::filesystem;

namespace {

void say(const ExperimentOptions& opt, const std::string& line) {
    if (opt.quiet) return;
    std::ostream& os = opt.log != nullptr ? *opt.log : std::cerr;
    os << line << '\n';
}

std::string row_csv(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
    return s + "\n";
}

std::string fmt(double v) { return format_double(v); }

void write_common(const RunConfig& c, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "config.ini", echo_config(c));
    write_text(dir / "conventions.json", conventions_json());
}

Field tangent_part(const MapField& u, const Field& v) {
    Field out(u.grid(), FieldKind::Ambient, u.q());
    out.data() = v.data();
    const std::size_t n = u.grid().size();
    std::vector<double> up(static_cast<std::size_t>(u.q())), x(up);
    for (std::size_t p = 0; p < n; ++p) {
        u.get(p, up);
        for (int i = 0; i < u.q(); ++i) x[static_cast<std::size_t>(i)] = out.plane_ptr(i)[p];
        u.target.project_tangent(up, x);
        for (int i = 0; i < u.q(); ++i) out.plane_ptr(i)[p] = x[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Singular: return "singular";
        case RunStatus::Failed: return "failed";
    }
    return "failed";
}

FlowState initial_state(const RunConfig& c) {
    const GridSpec g = c.grid();
    const Target t = c.target_manifold();
    const InitialConfig& ic = c.initial;
    MapField u = [&]() {
        if (ic.map == "constant") return constant_map(g, t);
        if (ic.map == "geodesic") return geodesic_map(g, t, ic.geodesic_k);
        if (ic.map == "bubble") {
            const double cx = ic.bubble_x < 0.0 ? 0.5 * g.Lx : ic.bubble_x;
            const double cy = ic.bubble_y < 0.0 ? 0.5 * g.Ly : ic.bubble_y;
            return bubble_map(g, ic.bubble_lambda, ic.bubble_rho, cx, cy, ic.bubble_turns);
        }
        return smooth_map(g, t, ic.map_amplitude, c.seed, ic.map_modes);
    }();
    VectorSpinorField psi = [&]() {
        if (ic.spinor == "zero") return VectorSpinorField(g, t.q());
        if (ic.spinor == "mode") {
            VectorSpinorField m = mode_spinor(g, t.q(), ic.mode_n1, ic.mode_n2, ic.mode_sign, ic.spinor_amplitude);
            tangency_project(u, m);
            return m;
        }
        return smooth_spinor(u, ic.spinor_amplitude, c.seed + 1, ic.spinor_modes);
    }();
    return FlowState(0.0, c.eps, std::move(u), std::move(psi));
}

SingleRun run_single(const RunConfig& c, const FlowState& s0, const fs::path& dir, const ExperimentOptions& opt) {
    write_common(c, dir);
    Monitor monitor(c.monitor);
    SingleRun out{run(s0, c.T_end, c.step, monitor), {}, monitor.initial_energy()};
    out.radii = monitor.radii();
    const RunResult& r = out.result;
    write_run_csv(dir / "run.csv", r.records, out.radii.size());
    write_text(dir / "events.json", events_json(r.events));
    write_checkpoint(r.final_state, dir / "final.ckpt");
    nlohmann::ordered_json st;
    st["status"] = status_name(r.status);
    st["message"] = r.message;
    st["steps"] = r.steps;
    st["t_final"] = r.final_state.t;
    st["records"] = r.records.size();
    st["events"] = r.events.size();
    st["singularity_budget"] = singularity_budget(std::max(0.0, out.initial_energy), c.monitor.delta1);
    write_text(dir / "status.json", st.dump(2) + "\n");
    say(opt, std::string(dir.string()) + ": " + status_name(r.status) + " at t=" + fmt(r.final_state.t) +
                 " after " + std::to_string(r.steps) + " steps, " + std::to_string(r.events.size()) + " events");
    return out;
}

std::vector<DecoupledRow> decoupled_sweep(const RunConfig& base, const fs::path& dir, const ExperimentOptions& opt) {
    if (base.target != TargetKind::FlatTorus) throw ConfigError("target.kind: decoupled_sweep needs flat_torus");
    fs::create_directories(dir);
    std::vector<DecoupledRow> rows;
    std::string csv = row_csv({"delta1", "delta2", "factor", "eps", "eps_star", "predicted_rate", "fitted_rate",
                               "psi_norm_initial", "psi_norm_final", "t_final", "monotone_decay", "grew_10x",
                               "status"});
    int idx = 0;
    for (const auto& [d1, d2] : base.sweep.spins) {
        RunConfig c = base;
        c.spin = {d1, d2};
        const GridSpec g = c.grid();
        const double eps_star = epsilon_threshold(g);
        const ModeSet ms = mode_set(g);
        for (double f : base.sweep.eps_factors) {
            c.eps = f * eps_star;
            const fs::path sub = dir / ("run_" + std::to_string(d1) + std::to_string(d2) + "_" + std::to_string(idx++));
            const SingleRun sr = run_single(c, initial_state(c), sub, opt);
            const auto& recs = sr.result.records;
            DecoupledRow row;
            row.delta1 = d1;
            row.delta2 = d2;
            row.factor = f;
            row.eps = c.eps;
            row.eps_star = eps_star;
            // A zero mode never decays, so it sets the late-time rate once every other mode does.
            row.predicted_rate = mode_rate(ms.min_nonzero, c.eps);
            if (ms.has_zero_mode) row.predicted_rate = std::max(row.predicted_rate, 0.0);
            row.psi_norm_initial = std::sqrt(recs.front().energy.psi_l2);
            row.psi_norm_final = std::sqrt(recs.back().energy.psi_l2);
            row.t_final = recs.back().t;
            row.monotone_decay = true;
            double peak = row.psi_norm_initial;
            for (std::size_t i = 1; i < recs.size(); ++i) {
                if (recs[i].energy.psi_l2 > recs[i - 1].energy.psi_l2 * (1.0 + 1e-12)) row.monotone_decay = false;
                peak = std::max(peak, std::sqrt(recs[i].energy.psi_l2));
            }
            row.grew_10x = peak >= 10.0 * row.psi_norm_initial;
            const std::size_t mid = recs.size() / 2;
            if (recs.size() >= 3 && recs.back().t > recs[mid].t && recs[mid].energy.psi_l2 > 0.0)
                row.fitted_rate = 0.5 * std::log(recs.back().energy.psi_l2 / recs[mid].energy.psi_l2) /
                                  (recs.back().t - recs[mid].t);
            row.status = sr.result.status;
            rows.push_back(row);
            csv += row_csv({std::to_string(d1), std::to_string(d2), fmt(f), fmt(row.eps), fmt(eps_star),
                            fmt(row.predicted_rate), fmt(row.fitted_rate), fmt(row.psi_norm_initial),
                            fmt(row.psi_norm_final), fmt(row.t_final), row.monotone_decay ? "1" : "0",
                            row.grew_10x ? "1" : "0", status_name(row.status)});
        }
    }
    write_text(dir / "sweep.csv", csv);
    return rows;
}

EpsilonSweep epsilon_sweep(const RunConfig& base, const fs::path& dir, const ExperimentOptions& opt) {
    fs::create_directories(dir);
    EpsilonSweep out;
    const GridSpec g = base.grid();
    const double eps_star = epsilon_threshold(g);
    std::vector<double> eps_list;
    for (int k = 0; k <= base.sweep.halvings; ++k) eps_list.push_back(eps_star * std::ldexp(1.0, -k));

    RunConfig c0 = base;
    c0.eps = eps_star;
    const FlowState s0 = initial_state(c0);
    const double delta1 = base.monitor.delta1;
    const auto budget = epsilon_budget_report(s0.u, s0.psi, [delta1](double) { return delta1; }, eps_list);

    std::string csv = row_csv({"k", "eps", "F0", "delta5", "delta1", "bound", "psi_l4_final", "status"});
    for (int k = 0; k <= base.sweep.halvings; ++k) {
        RunConfig c = base;
        c.eps = eps_list[static_cast<std::size_t>(k)];
        const FlowState sk(0.0, c.eps, s0.u, s0.psi);
        const SingleRun sr = run_single(c, sk, dir / ("run_k" + std::to_string(k)), opt);
        EpsilonRow row{k, budget[static_cast<std::size_t>(k)], sr.result.records.back().energy.psi_l4,
                       sr.result.status, sr.result.records};
        csv += row_csv({std::to_string(k), fmt(row.budget.eps), fmt(row.budget.F0), fmt(row.budget.delta5),
                        fmt(row.budget.delta1), fmt(row.budget.bound), fmt(row.psi_l4_final),
                        status_name(row.status)});
        out.rows.push_back(std::move(row));
    }
    out.budget_monotone = true;
    out.l4_monotone = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (!(out.rows[i].budget.bound > out.rows[i - 1].budget.bound)) out.budget_monotone = false;
        if (out.rows[i].psi_l4_final < out.rows[i - 1].psi_l4_final) out.l4_monotone = false;
    }
    write_text(dir / "epsilon_sweep.csv", csv);
    say(opt, std::string("epsilon sweep: budget monotone ") + (out.budget_monotone ? "yes" : "no") +
                 ", final L4 monotone " + (out.l4_monotone ? "yes" : "no"));
    return out;
}

std::vector<IdentityRow> identities(const RunConfig& base, const fs::path& dir, const ExperimentOptions& opt) {
    fs::create_directories(dir);
    std::vector<IdentityRow> rows;
    for (int N : base.identities.resolutions) {
        const GridSpec g = make_grid(base.Lx, base.Ly, N, N, base.spin);
        const Target sphere = Target::sphere(3);
        IdentityRow row;
        row.N = N;

        const MapField u = smooth_map(g, sphere, 0.3, base.seed);
        const VectorSpinorField psi = smooth_spinor(u, 0.3, base.seed + 1);
        const FlowState s(0.0, base.eps, u, psi);
        row.bochner_phi_gap = bochner_residual_phi(u).gap;
        row.bochner_psi_gap = bochner_residual_psi(psi, u).gap;
        const BochnerResult zp = bochner_residual_phi(geodesic_map(g, Target::flat_torus(2), 1));
        row.bochner_zero_phi = std::max({std::fabs(zp.lhs), std::fabs(zp.rhs), std::fabs(zp.gap)});
        const BochnerResult zs = bochner_residual_psi(VectorSpinorField(g, 3), u);
        row.bochner_zero_psi = std::max({std::fabs(zs.lhs), std::fabs(zs.rhs), std::fabs(zs.gap)});

        const EquationGap eg = extrinsic_intrinsic_gap(s);
        row.rhs_gap_u = eg.gap_u;
        row.rhs_gap_psi = eg.gap_psi;

        const FlowState geo(0.0, base.eps, geodesic_map(g, sphere, 1), VectorSpinorField(g, 3));
        row.geodesic_residual = std::sqrt(l2_squared(rhs(geo).du_dt));

        const Field v = tangent_part(u, smooth_map(g, Target::flat_torus(3), 0.5, base.seed + 2).values);
        const VectorSpinorField phi = smooth_spinor(u, 0.5, base.seed + 3);
        const GradientReport gr = gradient_check(s, v, phi, {1e-2, 5e-3, 2.5e-3});
        row.gradient_rel_gap = gr.scale > 0.0 ? gr.extrapolated_gap / gr.scale : 0.0;

        std::vector<Field> samples;
        for (int k = 0; k < base.identities.sobolev_samples; ++k) {
            const MapField m = smooth_map(g, Target::flat_torus(1), 1.0, base.seed + 100 + static_cast<std::uint64_t>(k), 3);
            Field f(g, FieldKind::Scalar, 1);
            f.data() = m.values.data();
            samples.push_back(std::move(f));
        }
        const SobolevReport sob = sobolev_ratio(samples, default_radii(g).empty() ? g.injectivity_radius() / 2
                                                                                  : default_radii(g).back());
        row.sobolev_max_ratio = sob.max_ratio;
        row.sobolev_max_local_ratio = sob.max_local_ratio;

        Field bump(g, FieldKind::Scalar, 1);
        for (int iy = 0; iy < g.Ny; ++iy)
            for (int ix = 0; ix < g.Nx; ++ix) {
                const double dx = g.x(ix) - 0.5 * g.Lx, dy = g.y(iy) - 0.5 * g.Ly;
                bump.plane_ptr(0)[g.index(ix, iy)] = std::exp(-(dx * dx + dy * dy) / 0.18);
            }
        const HarnackReport hr = harnack_demo(bump, 1.0, 1.0);
        row.harnack_sup = hr.sup_at_T;
        row.harnack_bound = hr.bound;
        row.harnack_holds = hr.holds;
        rows.push_back(row);
        say(opt, "identities N=" + std::to_string(N) + " done");
    }

    std::string csv = row_csv({"N", "bochner_phi_gap", "bochner_psi_gap", "bochner_zero_phi", "bochner_zero_psi",
                               "rhs_gap_u", "rhs_gap_psi", "geodesic_residual", "gradient_rel_gap",
                               "sobolev_max_ratio", "sobolev_max_local_ratio", "harnack_sup", "harnack_bound",
                               "harnack_holds"});
    for (const auto& r : rows)
        csv += row_csv({std::to_string(r.N), fmt(r.bochner_phi_gap), fmt(r.bochner_psi_gap), fmt(r.bochner_zero_phi),
                        fmt(r.bochner_zero_psi), fmt(r.rhs_gap_u), fmt(r.rhs_gap_psi), fmt(r.geodesic_residual),
                        fmt(r.gradient_rel_gap), fmt(r.sobolev_max_ratio), fmt(r.sobolev_max_local_ratio),
                        fmt(r.harnack_sup), fmt(r.harnack_bound), r.harnack_holds ? "1" : "0"});
    write_text(dir / "identities.csv", csv);

    auto order = [](double a, double b, int na, int nb) {
        return std::log(std::fabs(a) / std::fabs(b)) / std::log(static_cast<double>(nb) / na);
    };
    std::string ord = row_csv({"N_coarse", "N_fine", "bochner_phi", "bochner_psi", "rhs_gap_u", "rhs_gap_psi",
                               "geodesic_residual"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        ord += row_csv({std::to_string(a.N), std::to_string(b.N), fmt(order(a.bochner_phi_gap, b.bochner_phi_gap, a.N, b.N)),
                        fmt(order(a.bochner_psi_gap, b.bochner_psi_gap, a.N, b.N)),
                        fmt(order(a.rhs_gap_u, b.rhs_gap_u, a.N, b.N)), fmt(order(a.rhs_gap_psi, b.rhs_gap_psi, a.N, b.N)),
                        fmt(order(a.geodesic_residual, b.geodesic_residual, a.N, b.N))});
    }
    write_text(dir / "orders.csv", ord);
    return rows;
}

ExitReport run_experiment(const RunConfig& c, const ExperimentOptions& opt) {
    ExitReport rep;
    switch (c.preset) {
        case Preset::Single:
        case Preset::Degree1Blowup:
        case Preset::Convergence: {
            const SingleRun sr = run_single(c, initial_state(c), c.out_dir, opt);
            const RunResult& r = sr.result;
            rep.exit_code = r.status == RunStatus::Completed ? 0 : r.status == RunStatus::Singular ? 2 : 1;
            rep.summary = std::string(preset_name(c.preset)) + ": " + status_name(r.status) + ", " +
                          std::to_string(r.events.size()) + " events, t=" + fmt(r.final_state.t);
            if (!r.message.empty()) rep.summary += " (" + r.message + ")";
            break;
        }
        case Preset::DecoupledSweep: {
            write_common(c, c.out_dir);
            const auto rows = decoupled_sweep(c, c.out_dir, opt);
            int failed = 0;
            for (const auto& r : rows) failed += r.status == RunStatus::Failed;
            rep.exit_code = failed > 0 ? 1 : 0;
            rep.summary = "decoupled_sweep: " + std::to_string(rows.size()) + " runs, " + std::to_string(failed) +
                          " failed";
            break;
        }
        case Preset::EpsilonSweep: {
            write_common(c, c.out_dir);
            const EpsilonSweep es = epsilon_sweep(c, c.out_dir, opt);
            int failed = 0;
            for (const auto& r : es.rows) failed += r.status == RunStatus::Failed;
            rep.exit_code = failed > 0 ? 1 : 0;
            rep.summary = std::string("epsilon_sweep: budget monotone ") + (es.budget_monotone ? "yes" : "no") +
                          ", L4 monotone " + (es.l4_monotone ? "yes" : "no");
            break;
        }
        case Preset::Identities: {
            write_common(c, c.out_dir);
            const auto rows = identities(c, c.out_dir, opt);
            rep.summary = "identities: " + std::to_string(rows.size()) + " resolutions";
            break;
        }
    }
    return rep;
}

}  // namespace dhflow
