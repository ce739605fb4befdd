#include "dhflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dhflow/diagnostics.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow {

namespace {

bool finite(const Field& f) {
    for (double v : f.data())
        if (!std::isfinite(v)) return false;
    return true;
}

void add_scaled(Field& y, double a, const Field& x) {
    kernels::active().axpy(y.data().data(), a, x.data().data(), y.data().size());
}

// max over points of sum_a |d_a u|^2 with centred differences.
double max_du2(const MapField& u) {
    const Field d1 = partial(u.values, 1);
    const Field d2 = partial(u.values, 2);
    const std::size_t n = u.grid().size();
    std::vector<double> acc(n, 0.0);
    for (int i = 0; i < u.q(); ++i) {
        const double* a = d1.plane_ptr(i);
        const double* b = d2.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) acc[p] += a[p] * a[p] + b[p] * b[p];
    }
    return n ? *std::max_element(acc.begin(), acc.end()) : 0.0;
}

double max_psi2(const VectorSpinorField& psi) {
    const std::size_t n = psi.grid().size();
    std::vector<double> acc(n, 0.0);
    for (int c = 0; c < psi.values.components(); ++c) {
        const double* v = psi.values.plane_ptr(c);
        for (std::size_t p = 0; p < n; ++p) acc[p] += v[p] * v[p];
    }
    return n ? *std::max_element(acc.begin(), acc.end()) : 0.0;
}

// Lap u - II(du, du) given the Laplacian and centred derivatives.
Field harmonic_part(const MapField& u, const Field& lap, const Field& d1, const Field& d2) {
    Field a = lap;
    if (u.target.kind() == TargetKind::FlatTorus) return a;
    const std::size_t n = u.grid().size();
    std::vector<double> du2(n, 0.0);
    for (int i = 0; i < u.q(); ++i) {
        const double* x = d1.plane_ptr(i);
        const double* y = d2.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) du2[p] += x[p] * x[p] + y[p] * y[p];
    }
    // II(X, X) = -|X|^2 u on the unit sphere.
    for (int i = 0; i < u.q(); ++i) {
        const double* ui = u.values.plane_ptr(i);
        double* ai = a.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) ai[p] = ai[p] + du2[p] * ui[p];
    }
    return a;
}

// Pointwise s[p] = sum_i X_i[p] Y_i[p] for ambient X (stride 1) and one spinor
// channel Y (stride kChannels).
void contract(const Field& X, const Field& Y, int k, int q, std::vector<double>& s) {
    std::fill(s.begin(), s.end(), 0.0);
    const std::size_t n = s.size();
    for (int i = 0; i < q; ++i) {
        const double* x = X.plane_ptr(i);
        const double* y = Y.plane_ptr(i * kChannels + k);
        for (std::size_t p = 0; p < n; ++p) s[p] += x[p] * y[p];
    }
}

std::string first_nonfinite(const std::vector<std::pair<const char*, const Field*>>& terms) {
    for (const auto& [name, f] : terms)
        if (!finite(*f)) return name;
    return "rhs";
}

}  // namespace

void validate(const StepControl& ctl) {
    if (!(ctl.cfl_safety > 0.0)) throw ConfigError("flow.cfl_safety must be positive");
    if (!(ctl.min_dt > 0.0)) throw ConfigError("flow.min_dt must be positive");
    if (!(ctl.max_dt >= ctl.min_dt)) throw ConfigError("flow.max_dt must be >= flow.min_dt");
    if (ctl.dt < 0.0) throw ConfigError("flow.dt must be non-negative");
    if (ctl.dt > 0.0 && (ctl.dt < ctl.min_dt || ctl.dt > ctl.max_dt))
        throw ConfigError("flow.dt must lie in [min_dt, max_dt]");
    if (ctl.max_retries < 0) throw ConfigError("flow.max_retries must be non-negative");
}

Field harmonic_map_rhs(const MapField& u) {
    const Field lap = laplacian(u.values);
    if (u.target.kind() == TargetKind::FlatTorus) return lap;
    return harmonic_part(u, lap, partial(u.values, 1), partial(u.values, 2));
}

Rhs rhs(const FlowState& s, const RhsOptions& opt) {
    check_constraints(s, 1e-8);
    const MapField& u = s.u;
    const VectorSpinorField& psi = s.psi;
    const double eps = s.eps;
    const int q = u.q();
    const std::size_t n = u.grid().size();

    const Field lap = laplacian(u.values);
    const Field d[2] = {partial(u.values, 1), partial(u.values, 2)};
    const Field a = harmonic_part(u, lap, d[0], d[1]);

    // Every spinor term is bilinear in psi and vanishes identically at psi = 0.
    if (is_zero(psi)) {
        if (!finite(a))
            throw NonFiniteError(first_nonfinite({{"laplacian_u", &lap}, {"harmonic_map", &a}}));
        return Rhs{a, psi.zeros_like()};
    }

    const VectorSpinorField lap_psi(laplacian(psi.values));
    const VectorSpinorField dpsi[2] = {VectorSpinorField(partial(psi.values, 1)),
                                       VectorSpinorField(partial(psi.values, 2))};
    VectorSpinorField dirac = psi.zeros_like();
    for (int al = 0; al < 2; ++al) {
        const VectorSpinorField g = clifford_mul(al + 1, dpsi[al]);
        add_scaled(dirac.values, 1.0, g.values);
    }

    Rhs out{a.zeros_like(), psi.zeros_like()};
    // eps Lap psi - dslash psi
    kernels::active().axpby(out.dpsi_dt.values.data().data(), eps, lap_psi.values.data().data(),
                            -1.0, dirac.values.data().data(), out.dpsi_dt.values.data().size());

    if (u.target.kind() == TargetKind::FlatTorus) {
        out.du_dt = a;
    } else {
        // Sphere closed forms: II(X, Y) = -<X, Y> u, P(xi, X) = -<u, xi> X,
        // hence P(II(X, Y), Z) = <X, Y> Z, (nabla_V II)(X, Y) = -<X, Y> V.
        VectorSpinorField npsi[2] = {dpsi[0], dpsi[1]};
        apply_projector(u, npsi[0]);
        apply_projector(u, npsi[1]);
        const VectorSpinorField gpsi[2] = {clifford_mul(1, psi), clifford_mul(2, psi)};

        // s1 = <du_a, (e_a.psi)_k>, s2 = <du_a, psi_k>, s3 = <du_a, (nabla~_a psi)_k>
        std::vector<std::vector<double>> s1(8, std::vector<double>(n)), s2 = s1, s3 = s1;
        for (int al = 0; al < 2; ++al) {
            for (int k = 0; k < kChannels; ++k) {
                const int j = al * kChannels + k;
                contract(d[al], gpsi[al].values, k, q, s1[static_cast<std::size_t>(j)]);
                contract(d[al], psi.values, k, q, s2[static_cast<std::size_t>(j)]);
                contract(d[al], npsi[al].values, k, q, s3[static_cast<std::size_t>(j)]);
            }
        }

        // Spinor terms of du/dt, accumulated from +0 so that psi = 0 leaves
        // the harmonic-map part bitwise unchanged.
        Field extra = a.zeros_like();
        for (int i = 0; i < q; ++i) {
            double* e = extra.plane_ptr(i);
            for (int al = 0; al < 2; ++al) {
                for (int k = 0; k < kChannels; ++k) {
                    const auto j = static_cast<std::size_t>(al * kChannels + k);
                    const double* pk = psi.values.plane_ptr(i * kChannels + k);
                    const double* nk = npsi[al].values.plane_ptr(i * kChannels + k);
                    const double* t1 = s1[j].data();
                    const double* t2 = s2[j].data();
                    const double* t3 = s3[j].data();
                    for (std::size_t p = 0; p < n; ++p) {
                        e[p] += t1[p] * pk[p];
                        e[p] += eps * (t2[p] * nk[p]);
                        e[p] += -eps * (t3[p] * pk[p]);
                    }
                }
            }
        }
        if (!u.target.christoffels_vanish()) {
            std::vector<double> uu(static_cast<std::size_t>(q)), x1(uu), x2(uu), b(uu);
            std::vector<double> pp(static_cast<std::size_t>(q * kChannels));
            for (std::size_t p = 0; p < n; ++p) {
                u.get(p, uu);
                for (int i = 0; i < q; ++i) {
                    x1[static_cast<std::size_t>(i)] = d[0].plane_ptr(i)[p];
                    x2[static_cast<std::size_t>(i)] = d[1].plane_ptr(i)[p];
                }
                psi.get(p, pp);
                b_term(u.target, uu, x1, x2, pp, b);
                for (int i = 0; i < q; ++i) extra.plane_ptr(i)[p] += eps * b[static_cast<std::size_t>(i)];
            }
        }
        out.du_dt = a;
        for (int i = 0; i < q; ++i) {
            double* o = out.du_dt.plane_ptr(i);
            const double* e = extra.plane_ptr(i);
            for (std::size_t p = 0; p < n; ++p) o[p] = o[p] - e[p];
        }
        if (!finite(out.du_dt))
            throw NonFiniteError(first_nonfinite({{"laplacian_u", &lap},
                                                  {"derivative_u", &d[0]},
                                                  {"derivative_u", &d[1]},
                                                  {"second_fundamental_form", &a},
                                                  {"spinor_coupling_u", &extra}}));

        const Field* ut = &out.du_dt;
        Field zero_ut;
        if (opt.order == CouplingOrder::Lagged) {
            if (opt.lagged_du_dt != nullptr) {
                ut = opt.lagged_du_dt;
            } else {
                zero_ut = a.zeros_like();
                ut = &zero_ut;
            }
        }

        // Tension tau = Lap u - <u, Lap u> u.
        Field tau = lap;
        {
            std::vector<double> ul(n, 0.0);
            for (int i = 0; i < q; ++i) {
                const double* ui = u.values.plane_ptr(i);
                const double* li = lap.plane_ptr(i);
                for (std::size_t p = 0; p < n; ++p) ul[p] += ui[p] * li[p];
            }
            for (int i = 0; i < q; ++i) {
                const double* ui = u.values.plane_ptr(i);
                double* ti = tau.plane_ptr(i);
                for (std::size_t p = 0; p < n; ++p) ti[p] -= ul[p] * ui[p];
            }
        }

        std::vector<double> coef(n), st(n), stau(n);
        for (int k = 0; k < kChannels; ++k) {
            contract(*ut, psi.values, k, q, st);
            contract(tau, psi.values, k, q, stau);
            // Normal coefficient:
            //   II(du_a, e_a.psi) + II(u_t, psi) - 2 eps II(du_a, nabla~ psi) - eps II(tau, psi)
            const double* a1 = s1[static_cast<std::size_t>(k)].data();
            const double* b1 = s1[static_cast<std::size_t>(kChannels + k)].data();
            const double* a3 = s3[static_cast<std::size_t>(k)].data();
            const double* b3 = s3[static_cast<std::size_t>(kChannels + k)].data();
            for (std::size_t p = 0; p < n; ++p)
                coef[p] = -(a1[p] + b1[p]) - st[p] + 2.0 * eps * (a3[p] + b3[p]) + eps * stau[p];
            const double* a2 = s2[static_cast<std::size_t>(k)].data();
            const double* b2 = s2[static_cast<std::size_t>(kChannels + k)].data();
            for (int i = 0; i < q; ++i) {
                double* o = out.dpsi_dt.values.plane_ptr(i * kChannels + k);
                const double* ui = u.values.plane_ptr(i);
                const double* x1 = d[0].plane_ptr(i);
                const double* x2 = d[1].plane_ptr(i);
                // - eps (nabla_a II)(du_a, psi) = eps <du_a, psi> du_a
                for (std::size_t p = 0; p < n; ++p)
                    o[p] += coef[p] * ui[p] + eps * (a2[p] * x1[p] + b2[p] * x2[p]);
            }
        }
    }

    if (!finite(out.du_dt))
        throw NonFiniteError(first_nonfinite({{"laplacian_u", &lap}, {"harmonic_map", &a}}));
    if (!finite(out.dpsi_dt.values))
        throw NonFiniteError(first_nonfinite({{"laplacian_psi", &lap_psi.values},
                                              {"dirac_flat", &dirac.values},
                                              {"spinor_coupling_psi", &out.dpsi_dt.values}}));
    return out;
}

double cfl_dt(const GridSpec& grid, double eps, double max_du2_v, double max_psi2_v,
              const StepControl& ctl, double t) {
    if (ctl.dt > 0.0) return std::min(ctl.dt, ctl.max_dt);
    const double h2 = grid.h_min() * grid.h_min();
    const double base = ctl.cfl_safety * std::min(0.25 * h2, h2 / (4.0 * eps));
    const double dt = base / (1.0 + max_du2_v + max_psi2_v);
    if (!(dt >= ctl.min_dt)) throw BlowUpSignal(t, dt);
    return std::min(dt, ctl.max_dt);
}

double cfl_dt(const FlowState& s, const StepControl& ctl) {
    return cfl_dt(s.grid(), s.eps, max_du2(s.u), max_psi2(s.psi), ctl, s.t);
}

double kinetic_u(const MapField& u, const Field& du_dt) {
    const std::size_t n = u.grid().size();
    std::vector<double> acc(n, 0.0), un(n, 0.0);
    const bool sphere = u.target.kind() == TargetKind::Sphere;
    for (int i = 0; i < u.q(); ++i) {
        const double* v = du_dt.plane_ptr(i);
        const double* ui = u.values.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) {
            acc[p] += v[p] * v[p];
            if (sphere) un[p] += ui[p] * v[p];
        }
    }
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) s += acc[p] - un[p] * un[p];
    return s * u.grid().cell_area();
}

double kinetic_psi(const MapField& u, const VectorSpinorField& dpsi_dt) {
    if (is_zero(dpsi_dt)) return 0.0;
    VectorSpinorField t = dpsi_dt;
    apply_projector(u, t);
    return l2_squared(t.values);
}

namespace {

FlowState advance(const FlowState& s, const Rhs& k, double dt) {
    FlowState out = s;
    add_scaled(out.u.values, dt, k.du_dt);
    out.u.project();
    if (is_zero(k.dpsi_dt) && is_zero(s.psi)) return out;
    add_scaled(out.psi.values, dt, k.dpsi_dt.values);
    tangency_project(out.u, out.psi);
    return out;
}

FlowState midpoint_step(const FlowState& s, const Rhs& k1, double dt, const RhsOptions& opt) {
    FlowState mid = advance(s, k1, 0.5 * dt);
    mid.t = s.t + 0.5 * dt;
    RhsOptions opt2 = opt;
    if (opt.order == CouplingOrder::Lagged) opt2.lagged_du_dt = &k1.du_dt;
    const Rhs k2 = rhs(mid, opt2);
    FlowState out = advance(s, k2, dt);
    out.t = s.t + dt;
    return out;
}

}  // namespace

FlowState step_fixed(const FlowState& s, double dt, const RhsOptions& opt) {
    const Rhs k1 = rhs(s, opt);
    return midpoint_step(s, k1, dt, opt);
}

StepResult step(const FlowState& s, const StepControl& ctl, double dt_cap, const RhsOptions& opt) {
    const EnergyReport e0 = energy_regularized(s);
    const Rhs k1 = rhs(s, opt);
    const double diss = kinetic_u(s.u, k1.du_dt) + kinetic_psi(s.u, k1.dpsi_dt);
    double dt = cfl_dt(s, ctl);
    if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
    const double slack = 1e-12 * std::max(1.0, std::fabs(e0.E_eps));
    for (int attempt = 0; attempt <= ctl.max_retries; ++attempt) {
        try {
            FlowState next = midpoint_step(s, k1, dt, opt);
            const EnergyReport e1 = energy_regularized(next);
            if (e1.E_eps <= e0.E_eps + 0.02 * dt * diss + slack)
                return StepResult{std::move(next), dt, attempt, e0, e1, diss};
        } catch (const DegenerateProjection&) {
        } catch (const NonFiniteError&) {
        } catch (const ConstraintError&) {
        }
        dt *= 0.5;
        if (dt < ctl.min_dt) break;
    }
    throw BlowUpSignal(s.t, dt);
}

RunResult run(const FlowState& s0, double T_end, const StepControl& ctl, Monitor& monitor) {
    validate(ctl);
    RunResult res{s0, {}, {}, RunStatus::Completed, {}, 0};
    FlowState& state = res.final_state;
    const double t_tol = 1e-12 * std::max(1.0, std::fabs(T_end));

    monitor.begin(state);
    res.records.push_back(monitor.observe(state, {0.0, 0.0, 0.0}));
    auto collect_events = [&]() {
        const auto& ev = monitor.new_events();
        res.events.insert(res.events.end(), ev.begin(), ev.end());
        return !ev.empty();
    };
    if (collect_events()) {
        res.status = RunStatus::Singular;
        return res;
    }

    // Trapezoidal dissipation integral: the open half of the last step is
    // closed by the next step's start-of-step dissipation.
    double cum = 0.0;
    double last_dt = 0.0;
    int since_record = 0;
    while (state.t < T_end - t_tol) {
        StepResult r{state, 0.0, 0, {}, {}, 0.0};
        try {
            r = step(state, ctl, T_end - state.t);
        } catch (const BlowUpSignal& e) {
            res.records.push_back(monitor.observe(state, {cum, last_dt, last_dt}));
            res.events.push_back(monitor.dt_floor_event(state));
            res.status = RunStatus::Singular;
            res.message = e.what();
            return res;
        } catch (const Error& e) {
            res.status = RunStatus::Failed;
            res.message = e.what();
            return res;
        }
        cum += 0.5 * last_dt * r.dissipation + 0.5 * r.dt * r.dissipation;
        last_dt = r.dt;
        state = std::move(r.state);
        ++res.steps;
        ++since_record;
        const bool done = !(state.t < T_end - t_tol);
        if (since_record >= monitor.cadence() || done) {
            since_record = 0;
            res.records.push_back(monitor.observe(state, {cum, last_dt, last_dt}));
            if (collect_events()) {
                res.status = RunStatus::Singular;
                return res;
            }
            if (monitor.stop_requested(res.records.back())) {
                res.message = "spinor growth limit reached";
                return res;
            }
        }
    }
    return res;
}

HarmonicMapRun harmonic_map_heat_flow(const MapField& u0, double eps_for_cfl, double T_end,
                                      const StepControl& ctl) {
    validate(ctl);
    HarmonicMapRun res{u0, 0.0, 0};
    const double t_tol = 1e-12 * std::max(1.0, std::fabs(T_end));
    while (res.t < T_end - t_tol) {
        const MapField& u = res.u;
        const double e0 = dirichlet_energy(u);
        const Field k1 = harmonic_map_rhs(u);
        const double diss = kinetic_u(u, k1);
        double dt = cfl_dt(u.grid(), eps_for_cfl, max_du2(u), 0.0, ctl, res.t);
        dt = std::min(dt, T_end - res.t);
        const double slack = 1e-12 * std::max(1.0, std::fabs(e0));
        bool accepted = false;
        for (int attempt = 0; attempt <= ctl.max_retries && !accepted; ++attempt) {
            try {
                MapField mid = u;
                add_scaled(mid.values, 0.5 * dt, k1);
                mid.project();
                const Field k2 = harmonic_map_rhs(mid);
                MapField next = u;
                add_scaled(next.values, dt, k2);
                next.project();
                if (dirichlet_energy(next) <= e0 + 0.02 * dt * diss + slack) {
                    res.u = std::move(next);
                    res.t += dt;
                    ++res.steps;
                    accepted = true;
                    break;
                }
            } catch (const DegenerateProjection&) {
            }
            dt *= 0.5;
            if (dt < ctl.min_dt) break;
        }
        if (!accepted) throw BlowUpSignal(res.t, dt);
    }
    return res;
}

}  // namespace dhflow
