#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "dhflow/diagnostics.hpp"
#include "dhflow/energy.hpp"
#include "dhflow/errors.hpp"
#include "dhflow/flow.hpp"
#include "dhflow/initial_data.hpp"

using namespace dhflow;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

FlowState sphere_state(int N, SpinStructure spin, double eps, double amp = 0.3, double spinor_amp = 0.2) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, N, N, spin);
    MapField u = smooth_map(g, Target::sphere(3), amp, 4);
    VectorSpinorField psi = smooth_spinor(u, spinor_amp, 5);
    return FlowState(0.0, eps, std::move(u), std::move(psi));
}
}  // namespace

TEST(Energy, GeodesicDirichletEnergy) {
    // u = (cos x, sin x, 0): |D+ u|^2 = (2 sin(h/2)/h)^2 everywhere, E -> 2 pi^2.
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 64, 64);
    const MapField u = geodesic_map(g, Target::sphere(3), 1);
    const double s = 2.0 * std::sin(0.5 * g.hx) / g.hx;
    EXPECT_NEAR(dirichlet_energy(u), 0.5 * s * s * kTwoPi * kTwoPi, 1e-11);
    const double E = 2.0 * std::numbers::pi * std::numbers::pi;
    EXPECT_NEAR(dirichlet_energy(u), E, E * g.hx * g.hx / 12.0);
}

TEST(Energy, ComponentsAndLowerBound) {
    const FlowState s = sphere_state(32, {1, 0}, 0.5);
    const EnergyReport r = energy_regularized(s);
    EXPECT_NEAR(r.E_eps, r.dirichlet + r.dirac_pairing + s.eps * r.spinor_gradient, 1e-13);
    EXPECT_NEAR(r.dirac_imag, 0.0, 1e-12);
    EXPECT_TRUE(r.lower_bound_ok);
    EXPECT_GT(r.psi_l2, 0.0);
    EXPECT_LE(r.psi_l4, r.psi_sup * r.psi_sup * r.psi_l2 * (1.0 + 1e-12));
}

TEST(Energy, LocalFMatchesBallScan) {
    const FlowState s = sphere_state(32, {0, 0}, 1.0);
    const Field scan = local_F_scan(s, 1.0);
    const GridSpec& g = s.grid();
    for (std::size_t p : {std::size_t{0}, std::size_t{37}, std::size_t{500}}) {
        const int ix = static_cast<int>(p % static_cast<std::size_t>(g.Nx));
        const int iy = static_cast<int>(p / static_cast<std::size_t>(g.Nx));
        EXPECT_NEAR(scan.plane_ptr(0)[p], local_F(s, g.x(ix), g.y(iy), 1.0), 1e-12);
    }
    // The whole-torus F is the energy without the Dirac pairing.
    const EnergyReport r = energy_regularized(s);
    const Field dens = F_density(s);
    double total = 0.0;
    for (double v : dens.data()) total += v;
    EXPECT_NEAR(total * g.cell_area(), r.dirichlet + s.eps * r.spinor_gradient, 1e-12);
}

TEST(Flow, FlatTargetDecouples) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16, {1, 1});
    MapField u = smooth_map(g, Target::flat_torus(2), 0.4, 1);
    VectorSpinorField psi = smooth_spinor(u, 0.3, 2);
    const FlowState s(0.0, 0.7, u, psi);
    const Rhs r = rhs(s);
    const Field lu = laplacian(u.values);
    for (std::size_t k = 0; k < lu.data().size(); ++k) EXPECT_EQ(r.du_dt.data()[k], lu.data()[k]);
    const Field lp = laplacian(psi.values);
    const VectorSpinorField D = dirac_flat(psi);
    for (std::size_t k = 0; k < lp.data().size(); ++k)
        EXPECT_NEAR(r.dpsi_dt.values.data()[k], 0.7 * lp.data()[k] - D.values.data()[k], 1e-13);
}

TEST(Flow, ZeroSpinorGivesHarmonicMapRhs) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16);
    const MapField u = smooth_map(g, Target::sphere(3), 0.5, 3);
    const FlowState s(0.0, 1.0, u, VectorSpinorField(g, 3));
    const Rhs r = rhs(s);
    const Field h = harmonic_map_rhs(u);
    EXPECT_EQ(std::memcmp(r.du_dt.data().data(), h.data().data(), h.data().size() * sizeof(double)), 0);
    EXPECT_TRUE(is_zero(r.dpsi_dt));
}

TEST(Flow, CflRule) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 32, 32);
    StepControl ctl;
    ctl.max_dt = 1.0;
    const double h2 = g.hx * g.hx;
    EXPECT_DOUBLE_EQ(cfl_dt(g, 0.5, 0.0, 0.0, ctl), 0.5 * 0.25 * h2);
    EXPECT_DOUBLE_EQ(cfl_dt(g, 2.0, 3.0, 1.0, ctl), 0.5 * h2 / 8.0 / 5.0);
    ctl.min_dt = 1e-3;
    EXPECT_THROW(cfl_dt(g, 2.0, 3.0, 1.0, ctl), BlowUpSignal);
    ctl.dt = 1e-4;
    ctl.min_dt = 1e-10;
    EXPECT_DOUBLE_EQ(cfl_dt(g, 2.0, 3.0, 1.0, ctl), 1e-4);
}

TEST(Flow, StepPreservesConstraintsAndDecreasesEnergy) {
    FlowState s = sphere_state(32, {1, 0}, 2.0);
    const double E0 = energy_regularized(s).E_eps;
    for (int k = 0; k < 5; ++k) {
        StepResult r = step(s, StepControl{});
        EXPECT_LE(r.energy_after.E_eps, r.energy_before.E_eps);
        EXPECT_GT(r.dissipation, 0.0);
        s = std::move(r.state);
    }
    EXPECT_LT(s.u.constraint_violation(), 1e-13);
    EXPECT_LT(tangency_violation(s.u, s.psi), 1e-13);
    EXPECT_LT(energy_regularized(s).E_eps, E0);
}

TEST(Flow, LaggedCouplingRuns) {
    const FlowState s = sphere_state(16, {0, 1}, 1.0);
    RhsOptions opt;
    opt.order = CouplingOrder::Lagged;
    const Rhs a = rhs(s, opt);
    const Rhs b = rhs(s);
    opt.lagged_du_dt = &b.du_dt;
    const Rhs c = rhs(s, opt);
    for (std::size_t k = 0; k < a.du_dt.data().size(); ++k) EXPECT_EQ(a.du_dt.data()[k], b.du_dt.data()[k]);
    double diff = 0.0;
    for (std::size_t k = 0; k < b.dpsi_dt.values.data().size(); ++k)
        diff = std::max(diff, std::fabs(b.dpsi_dt.values.data()[k] - c.dpsi_dt.values.data()[k]));
    EXPECT_LT(diff, 1e-12);
}

TEST(Flow, RejectsBrokenStates) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16);
    MapField u = constant_map(g, Target::sphere(3));
    u.at(3, 0) = 1.5;
    EXPECT_THROW(rhs(FlowState(0.0, 1.0, u, VectorSpinorField(g, 3))), ConstraintError);

    MapField f = constant_map(g, Target::flat_torus(1));
    VectorSpinorField psi(g, 1);
    psi.channel(0, 2)[7] = std::numeric_limits<double>::infinity();
    try {
        rhs(FlowState(0.0, 1.0, f, psi));
        FAIL() << "expected NonFiniteError";
    } catch (const NonFiniteError& e) {
        EXPECT_EQ(e.term(), "laplacian_psi");
    }
    EXPECT_THROW(FlowState(0.0, 0.0, f, psi), std::invalid_argument);
}

TEST(Flow, RunStopsAtTEndAndRecords) {
    const FlowState s0 = sphere_state(16, {1, 0}, 1.0);
    MonitorConfig mc;
    mc.cadence = 5;
    mc.detect_events = false;
    Monitor mon(mc);
    const RunResult r = run(s0, 0.05, StepControl{}, mon);
    EXPECT_EQ(r.status, RunStatus::Completed);
    EXPECT_DOUBLE_EQ(r.final_state.t, 0.05);
    ASSERT_GE(r.records.size(), 2u);
    EXPECT_DOUBLE_EQ(r.records.back().t, 0.05);
    for (const auto& rec : r.records) {
        EXPECT_TRUE(rec.monotone_ok);
        EXPECT_TRUE(rec.dissipation_identity_ok);
        EXPECT_TRUE(rec.pointwise_bound_ok);
        EXPECT_EQ(rec.max_local_F.size(), mon.radii().size());
    }
}

TEST(Flow, HarmonicMapReferenceMatchesZeroSpinorRun) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16, {1, 0});
    const MapField u0 = smooth_map(g, Target::sphere(3), 0.5, 9);
    MonitorConfig mc;
    mc.detect_events = false;
    Monitor mon(mc);
    const RunResult r = run(FlowState(0.0, 1.0, u0, VectorSpinorField(g, 3)), 0.1, StepControl{}, mon);
    const HarmonicMapRun h = harmonic_map_heat_flow(u0, 1.0, 0.1, StepControl{});
    EXPECT_EQ(r.steps, h.steps);
    EXPECT_EQ(std::memcmp(r.final_state.u.values.data().data(), h.u.values.data().data(),
                          h.u.values.data().size() * sizeof(double)),
              0);
}
