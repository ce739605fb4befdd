#include "dhflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow {

const char* trigger_name(EventTrigger t) {
    return t == EventTrigger::Threshold ? "threshold" : "dt_floor";
}

std::vector<double> default_radii(const GridSpec& grid) {
    const double iM = grid.injectivity_radius();
    std::vector<double> out;
    for (double r : {iM / 2.0, iM / 4.0, iM / 8.0})
        if (r >= 2.0 * grid.h_max()) out.push_back(r);
    return out;
}

void validate(const MonitorConfig& cfg, const GridSpec& grid) {
    if (cfg.cadence < 1) throw ConfigError("monitor.cadence must be >= 1");
    if (!(cfg.delta1 > 0.0)) throw ConfigError("monitor.delta1 must be > 0");
    if (!(cfg.stop_psi_ratio >= 0.0)) throw ConfigError("monitor.stop_psi_ratio must be >= 0");
    for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
        const double r = cfg.radii[i];
        if (!(r > 0.0) || !(r < grid.injectivity_radius()))
            throw ConfigError("monitor.radii entries must lie in (0, injectivity radius)");
        if (r < 2.0 * grid.h_max())
            throw ConfigError("monitor.radii entry below two grid spacings");
        if (i > 0 && !(r < cfg.radii[i - 1]))
            throw ConfigError("monitor.radii must be strictly descending");
    }
}

double el_residual_u(const FlowState& s) {
    Field r = tension(s.u);
    const Field R = curvature_R(s.u, s.psi);
    const Field Rc = curvature_Rc(s.u, s.psi);
    const auto& k = kernels::active();
    k.axpy(r.data().data(), -1.0, R.data().data(), r.data().size());
    k.axpy(r.data().data(), -s.eps, Rc.data().data(), r.data().size());
    return std::sqrt(l2_squared(r));
}

double el_residual_psi(const FlowState& s) {
    VectorSpinorField r = twisted_conn_laplacian(s.u, s.psi);
    const VectorSpinorField D = twisted_dirac(s.u, s.psi);
    kernels::active().axpby(r.values.data().data(), s.eps, r.values.data().data(), -1.0,
                            D.values.data().data(), r.values.data().size());
    return std::sqrt(l2_squared(r.values));
}

bool energy_step_ok(double E_prev, double E_cur, double dt, double dissipation) {
    const double slack = 1e-12 * std::max(1.0, std::fabs(E_prev));
    return E_cur <= E_prev + 0.02 * dt * dissipation + slack;
}

Monitor::Monitor(MonitorConfig cfg) : cfg_(std::move(cfg)) {}

void Monitor::begin(const FlowState& s0) {
    validate(cfg_, s0.grid());
    radii_ = cfg_.radii.empty() ? default_radii(s0.grid()) : cfg_.radii;
    const EnergyReport e = energy_regularized(s0);
    E0_ = e.E_eps;
    psi_sup0_ = e.psi_sup;
    psi_l2_0_ = e.psi_l2;
    t0_ = s0.t;
    have_prev_ = false;
    fresh_.clear();
}

MonitorRecord Monitor::observe(const FlowState& s, const ObserveInfo& info) {
    MonitorRecord rec;
    rec.t = s.t;
    rec.energy = energy_regularized(s);
    const Rhs r = rhs(s);
    rec.kinetic_u = kinetic_u(s.u, r.du_dt);
    rec.kinetic_psi = kinetic_psi(s.u, r.dpsi_dt);
    rec.el_residual_u = el_residual_u(s);
    rec.el_residual_psi = el_residual_psi(s);
    rec.dt = info.dt;
    const double diss = rec.kinetic_u + rec.kinetic_psi;
    rec.cumulative_dissipation = info.cumulative_open + 0.5 * info.last_dt * diss;

    if (cfg_.scan_local_F && !radii_.empty()) {
        const Field dens = F_density(s);
        for (double R : radii_) {
            const Field scan = ball_scan(dens, R);
            const auto v = scan.plane(0);
            rec.max_local_F.push_back(*std::max_element(v.begin(), v.end()));
        }
    }

    const double E = rec.energy.E_eps;
    if (have_prev_) {
        const double dmax = std::max(diss, prev_.kinetic_u + prev_.kinetic_psi);
        rec.monotone_ok = energy_step_ok(prev_.energy.E_eps, E, s.t - prev_.t, dmax);
    }
    const double drop = E0_ - E;
    rec.dissipation_identity_ok = std::fabs(drop - rec.cumulative_dissipation) <=
                                  0.02 * rec.cumulative_dissipation + 1e-10 * std::max(1.0, std::fabs(E0_));
    const double envelope = psi_sup0_ * psi_sup0_ * std::exp((s.t - t0_) / s.eps);
    rec.pointwise_bound_ok = rec.energy.psi_sup * rec.energy.psi_sup <= 1.05 * envelope + 1e-300;

    fresh_.clear();
    if (cfg_.detect_events && !radii_.empty())
        fresh_ = threshold_events(s, cfg_.delta1, radii_.back());

    prev_ = rec;
    have_prev_ = true;
    return rec;
}

bool Monitor::stop_requested(const MonitorRecord& r) const {
    if (!(cfg_.stop_psi_ratio > 0.0) || !(psi_l2_0_ > 0.0)) return false;
    return r.energy.psi_l2 >= cfg_.stop_psi_ratio * cfg_.stop_psi_ratio * psi_l2_0_;
}

SingularityEvent Monitor::dt_floor_event(const FlowState& s) const {
    const Field dens = F_density(s);
    const auto v = dens.plane(0);
    const auto p = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const auto& g = s.grid();
    SingularityEvent ev;
    ev.t_detected = s.t;
    ev.center = {static_cast<int>(p % static_cast<std::size_t>(g.Nx)),
                 static_cast<int>(p / static_cast<std::size_t>(g.Nx))};
    ev.x = g.x(ev.center.ix);
    ev.y = g.y(ev.center.iy);
    ev.radius = radii_.empty() ? 2.0 * g.h_max() : radii_.back();
    ev.local_F = ev.radius < g.injectivity_radius() ? local_F(s, ev.x, ev.y, ev.radius) : 0.0;
    ev.trigger = EventTrigger::DtFloor;
    return ev;
}

MonitorRecord monitor_step(const FlowState& prev, const FlowState& cur) {
    MonitorConfig cfg;
    cfg.scan_local_F = false;
    cfg.detect_events = false;
    Monitor m(cfg);
    m.begin(prev);
    const MonitorRecord r0 = m.observe(prev, {});
    const double dt = cur.t - prev.t;
    return m.observe(cur, {0.5 * dt * (r0.kinetic_u + r0.kinetic_psi), dt, dt});
}

std::vector<SingularityEvent> threshold_events(const FlowState& s, double delta1, double R) {
    const auto& g = s.grid();
    const Field scan = ball_scan(F_density(s), R);
    const auto v = scan.plane(0);
    std::vector<std::size_t> cand;
    for (std::size_t p = 0; p < v.size(); ++p)
        if (v[p] >= delta1) cand.push_back(p);
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    std::vector<SingularityEvent> out;
    for (std::size_t p : cand) {
        const GridPoint c{static_cast<int>(p % static_cast<std::size_t>(g.Nx)),
                          static_cast<int>(p / static_cast<std::size_t>(g.Nx))};
        const bool merged = std::any_of(out.begin(), out.end(), [&](const SingularityEvent& e) {
            return periodic_distance(g, e.center, c) <= 2.0 * R;
        });
        if (merged) continue;
        SingularityEvent e;
        e.t_detected = s.t;
        e.center = c;
        e.x = g.x(c.ix);
        e.y = g.y(c.iy);
        e.radius = R;
        e.local_F = v[p];
        e.trigger = EventTrigger::Threshold;
        out.push_back(e);
    }
    return out;
}

std::vector<SingularityEvent> detect_singularities(std::span<const FlowState> snapshots,
                                                   std::span<const SingularityEvent> flow_events,
                                                   double delta1, std::span<const double> radii) {
    if (snapshots.empty()) return {};
    const auto& g = snapshots.front().grid();
    std::vector<double> rs(radii.begin(), radii.end());
    if (rs.empty()) rs = default_radii(g);
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (!(rs[i] < rs[i - 1])) throw std::invalid_argument("radii must be descending");
    std::vector<SingularityEvent> out;
    auto absorb = [&](const SingularityEvent& e) {
        const bool merged = std::any_of(out.begin(), out.end(), [&](const SingularityEvent& o) {
            return periodic_distance(g, o.center, e.center) <= 2.0 * std::max(o.radius, e.radius);
        });
        if (!merged) out.push_back(e);
    };
    if (!rs.empty()) {
        const double R = rs.back();
        for (const auto& s : snapshots)
            for (const auto& e : threshold_events(s, delta1, R)) absorb(e);
    }
    for (const auto& e : flow_events)
        if (e.trigger == EventTrigger::DtFloor) absorb(e);
    std::stable_sort(out.begin(), out.end(), [](const SingularityEvent& a, const SingularityEvent& b) {
        return a.t_detected < b.t_detected;
    });
    return out;
}

long singularity_budget(double E0, double delta1) {
    if (!(delta1 > 0.0)) throw std::invalid_argument("delta1 must be > 0");
    if (!(E0 >= 0.0)) throw std::invalid_argument("E0 must be >= 0");
    return static_cast<long>(std::floor(4.0 * E0 / delta1));
}

std::vector<BudgetRow> epsilon_budget_report(const MapField& u0, const VectorSpinorField& psi0,
                                             const std::function<double(double)>& delta1,
                                             std::span<const double> eps_list) {
    const double dirichlet = dirichlet_energy(u0);
    const double spinor_gradient = spinor_gradient_energy(u0, psi0);
    const double psi_l2 = l2_squared(psi0.values);
    std::vector<BudgetRow> rows;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw std::invalid_argument("eps entries must be > 0");
        BudgetRow r;
        r.eps = eps;
        r.F0 = dirichlet + eps * spinor_gradient;
        r.delta5 = 4.0 / eps * psi_l2;
        r.delta1 = delta1(eps);
        if (!(r.delta1 > 0.0)) throw std::invalid_argument("delta1 must be > 0");
        r.bound = (r.F0 + r.delta5) / r.delta1;
        rows.push_back(r);
    }
    return rows;
}

namespace {

double gap_between(const FlowState& A, const FlowState& B, double* psi_part) {
    Field du = A.u.values;
    kernels::active().axpy(du.data().data(), -1.0, B.u.values.data().data(), du.data().size());
    Field dp = A.psi.values;
    kernels::active().axpy(dp.data().data(), -1.0, B.psi.values.data().data(), dp.data().size());
    const double gp = l2_squared(dp);
    if (psi_part != nullptr) *psi_part = gp;
    return l2_squared(du) + gp;
}

}  // namespace

StabilityReport stability_gap(const FlowState& A0, const FlowState& B0, double T,
                              const StepControl& ctl, int sample_every) {
    if (!(A0.grid() == B0.grid()) || !(A0.target() == B0.target()) || A0.eps != B0.eps)
        throw std::invalid_argument("stability_gap needs matching grid, target and eps");
    validate(ctl);
    StabilityReport rep;
    FlowState A = A0, B = B0;
    double gp = 0.0;
    rep.samples.push_back({A.t, gap_between(A, B, &gp), gp});
    const double t_tol = 1e-12 * std::max(1.0, T);
    long n = 0;
    while (A.t < A0.t + T - t_tol) {
        try {
            double dt = std::min(cfl_dt(A, ctl), cfl_dt(B, ctl));
            dt = std::min(dt, A0.t + T - A.t);
            A = step_fixed(A, dt);
            B = step_fixed(B, dt);
        } catch (const Error&) {
            break;
        }
        if (++n % sample_every == 0 || !(A.t < A0.t + T - t_tol))
            rep.samples.push_back({A.t, gap_between(A, B, &gp), gp});
    }
    const double g0 = rep.samples.front().gap;
    if (g0 > 0.0) {
        double lam = -std::numeric_limits<double>::infinity();
        double sxy = 0.0, sxx = 0.0;
        for (const auto& s : rep.samples) {
            const double dt = s.t - A0.t;
            if (dt <= 0.0) continue;
            const double l = std::log(s.gap / g0);
            lam = std::max(lam, l / dt);
            sxy += dt * l;
            sxx += dt * dt;
        }
        rep.lambda = std::isfinite(lam) ? lam : 0.0;
        rep.lambda_fit = sxx > 0.0 ? sxy / sxx : 0.0;
        rep.bound_holds = std::isfinite(rep.lambda);
        for (const auto& s : rep.samples)
            if (s.gap > g0 * std::exp(rep.lambda * (s.t - A0.t)) * (1.0 + 1e-12)) rep.bound_holds = false;
    } else {
        rep.bound_holds = std::all_of(rep.samples.begin(), rep.samples.end(),
                                      [](const StabilitySample& s) { return s.gap == 0.0; });
    }
    return rep;
}

double dh_blowup_quantity(const FlowState& s, double cx, double cy, double R) {
    if (!(R > 0.0) || !(R < s.grid().injectivity_radius()))
        throw std::invalid_argument("radius must lie in (0, injectivity radius)");
    const Field mask = ball_mask(s.grid(), cx, cy, R);
    const std::size_t n = s.grid().size();
    std::vector<double> dens(n, 0.0), m2(n, 0.0);
    for (int a = 1; a <= 2; ++a) {
        const Field d = partial(s.u.values, a);
        for (int i = 0; i < d.components(); ++i) {
            const double* v = d.plane_ptr(i);
            for (std::size_t p = 0; p < n; ++p) dens[p] += v[p] * v[p];
        }
    }
    for (int c = 0; c < s.psi.values.components(); ++c) {
        const double* v = s.psi.values.plane_ptr(c);
        for (std::size_t p = 0; p < n; ++p) m2[p] += v[p] * v[p];
    }
    double sum = 0.0;
    const double* w = mask.plane_ptr(0);
    for (std::size_t p = 0; p < n; ++p) sum += w[p] * (dens[p] + m2[p] * m2[p]);
    return sum;
}

}  // namespace dhflow
