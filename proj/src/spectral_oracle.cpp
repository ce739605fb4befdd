#include "dhflow/spectral_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dhflow/diagnostics.hpp"
#include "dhflow/kernels.hpp"
#include "fft.hpp"

namespace dhflow {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

int signed_index(int m, int n) { return m < n / 2 ? m : m - n; }

double frequency(int n, int delta, double L) { return 2.0 * kPi * (n + 0.5 * delta) / L; }

// Tangential part of an ambient field, pointwise.
Field project_tangent_field(const MapField& u, const Field& X) {
    Field out = X;
    if (u.target.kind() == TargetKind::FlatTorus) return out;
    const int q = u.q();
    const std::size_t n = u.grid().size();
    std::vector<double> up(q), xp(q);
    for (std::size_t p = 0; p < n; ++p) {
        for (int i = 0; i < q; ++i) {
            up[i] = u.values.plane_ptr(i)[p];
            xp[i] = out.plane_ptr(i)[p];
        }
        u.target.project_tangent(up, xp);
        for (int i = 0; i < q; ++i) out.plane_ptr(i)[p] = xp[i];
    }
    return out;
}

Field difference(const Field& a, const Field& b) {
    Field d = a;
    kernels::active().axpy(d.data().data(), -1.0, b.data().data(), d.data().size());
    return d;
}

double dot(const Field& a, const Field& b) {
    return kernels::active().dot(a.data().data(), b.data().data(), a.data().size()) *
           a.grid().cell_area();
}

// One axis of twisted_conn_laplacian.
VectorSpinorField compact_second(const MapField& u, const VectorSpinorField& psi, int axis) {
    VectorSpinorField b(backward_difference(twisted_forward_gradient(u, psi, axis).values, axis));
    const Field f = forward_difference(twisted_backward_gradient(u, psi, axis).values, axis);
    kernels::active().axpby(b.values.data().data(), 0.5, b.values.data().data(), 0.5, f.data().data(),
                            f.data().size());
    apply_projector(u, b);
    return b;
}

// out_k = R^N(X, Y) Z_k over spinor channels.
void riemann_channels(const Target& t, std::span<const double> u, std::span<const double> X,
                      std::span<const double> Y, const std::vector<double>& Z, int q,
                      std::vector<double>& out) {
    std::vector<double> z(q), r(q);
    for (int k = 0; k < kChannels; ++k) {
        for (int i = 0; i < q; ++i) z[i] = Z[i * kChannels + k];
        t.riemann(u, X, Y, z, r);
        for (int i = 0; i < q; ++i) out[i * kChannels + k] = r[i];
    }
}

double channel_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

ModeSet mode_set(const GridSpec& grid) {
    ModeSet m;
    for (int n = -grid.Nx / 2; n < grid.Nx / 2; ++n) m.xi_x.push_back(frequency(n, grid.spin.delta1, grid.Lx));
    for (int n = -grid.Ny / 2; n < grid.Ny / 2; ++n) m.xi_y.push_back(frequency(n, grid.spin.delta2, grid.Ly));
    double best = std::numeric_limits<double>::infinity();
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const double r = std::hypot(frequency(a, grid.spin.delta1, grid.Lx),
                                        frequency(b, grid.spin.delta2, grid.Ly));
            if (r > 0.0) best = std::min(best, r);
        }
    m.min_nonzero = best;
    m.has_zero_mode = grid.spin.trivial();
    return m;
}

double epsilon_threshold(const GridSpec& grid) { return 1.0 / mode_set(grid).min_nonzero; }

double mode_rate(double xi_abs, double eps) { return xi_abs - eps * xi_abs * xi_abs; }

VectorSpinorField decoupled_exact(const MapField& u, const VectorSpinorField& psi0, double eps,
                                  double t, Symbol symbol) {
    if (u.target.kind() != TargetKind::FlatTorus)
        throw std::invalid_argument("decoupled_exact requires a flat target");
    if (!(u.grid() == psi0.grid()) || u.q() != psi0.q())
        throw std::invalid_argument("decoupled_exact: map and spinor layouts differ");
    const GridSpec& g = psi0.grid();
    const int nx = g.Nx, ny = g.Ny;
    const std::size_t n = g.size();
    const int d1 = g.spin.delta1, d2 = g.spin.delta2;

    std::vector<cplx> demod(n);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            demod[g.index(ix, iy)] = std::polar(1.0, -kPi * (d1 * ix / double(nx) + d2 * iy / double(ny)));

    detail::ComplexFft2D fft(nx, ny);
    VectorSpinorField out = psi0.zeros_like();
    std::vector<cplx> a0(n), a1(n), f0(n), f1(n);
    for (int i = 0; i < psi0.q(); ++i) {
        const double* re0 = psi0.channel(i, 0);
        const double* im0 = psi0.channel(i, 1);
        const double* re1 = psi0.channel(i, 2);
        const double* im1 = psi0.channel(i, 3);
        for (std::size_t p = 0; p < n; ++p) {
            a0[p] = cplx(re0[p], im0[p]) * demod[p];
            a1[p] = cplx(re1[p], im1[p]) * demod[p];
        }
        fft.forward(a0, f0);
        fft.forward(a1, f1);
        for (int my = 0; my < ny; ++my) {
            const double xy = frequency(signed_index(my, ny), d2, g.Ly);
            for (int mx = 0; mx < nx; ++mx) {
                const double xx = frequency(signed_index(mx, nx), d1, g.Lx);
                double a, b, k2;
                if (symbol == Symbol::Continuum) {
                    a = xx;
                    b = xy;
                    k2 = xx * xx + xy * xy;
                } else {
                    a = std::sin(xx * g.hx) / g.hx;
                    b = std::sin(xy * g.hy) / g.hy;
                    const double sx = 2.0 * std::sin(0.5 * xx * g.hx) / g.hx;
                    const double sy = 2.0 * std::sin(0.5 * xy * g.hy) / g.hy;
                    k2 = sx * sx + sy * sy;
                }
                const double r = std::hypot(a, b);
                const double damp = std::exp(-eps * k2 * t);
                const double ch = std::cosh(r * t);
                const double sh = r > 0.0 ? std::sinh(r * t) / r : t;
                const std::size_t p = g.index(mx, my);
                const cplx c0 = f0[p], c1 = f1[p];
                f0[p] = damp * (ch * c0 + sh * cplx(a, -b) * c1);
                f1[p] = damp * (ch * c1 + sh * cplx(a, b) * c0);
            }
        }
        fft.inverse(f0, a0);
        fft.inverse(f1, a1);
        double* o0 = out.channel(i, 0);
        double* o1 = out.channel(i, 1);
        double* o2 = out.channel(i, 2);
        double* o3 = out.channel(i, 3);
        for (std::size_t p = 0; p < n; ++p) {
            const cplx v0 = a0[p] * std::conj(demod[p]);
            const cplx v1 = a1[p] * std::conj(demod[p]);
            o0[p] = v0.real();
            o1[p] = v0.imag();
            o2[p] = v1.real();
            o3[p] = v1.imag();
        }
    }
    return out;
}

GradientReport gradient_check(const FlowState& s, const Field& var_u, const VectorSpinorField& var_psi,
                              const std::vector<double>& s_values) {
    if (var_u.components() != s.u.q() || !(var_u.grid() == s.grid()) ||
        !var_psi.values.same_layout(s.psi.values))
        throw std::invalid_argument("gradient_check: variation layout differs from the state");
    GradientReport rep;
    const Rhs r = rhs(s);
    rep.predicted = -(dot(r.du_dt, var_u) + dot(r.dpsi_dt.values, var_psi.values));
    rep.scale = std::sqrt((l2_squared(r.du_dt) + l2_squared(r.dpsi_dt.values)) *
                          (l2_squared(var_u) + l2_squared(var_psi.values)));

    auto energy_at = [&](double sv) {
        MapField u = s.u;
        kernels::active().axpy(u.values.data().data(), sv, var_u.data().data(), u.values.data().size());
        u.project();
        VectorSpinorField psi = s.psi;
        kernels::active().axpy(psi.values.data().data(), sv, var_psi.values.data().data(),
                               psi.values.data().size());
        tangency_project(u, psi);
        return energy_regularized(FlowState(s.t, s.eps, std::move(u), std::move(psi))).E_eps;
    };
    for (double sv : s_values) {
        if (!(sv > 0.0)) throw std::invalid_argument("gradient_check: step sizes must be > 0");
        GradientSample g;
        g.s = sv;
        g.fd = (energy_at(sv) - energy_at(-sv)) / (2.0 * sv);
        g.residual = g.fd - rep.predicted;
        rep.samples.push_back(g);
    }
    if (rep.samples.size() >= 2) {
        const auto& a = rep.samples[rep.samples.size() - 2];
        const auto& b = rep.samples.back();
        const double q2 = (a.s / b.s) * (a.s / b.s);
        rep.extrapolated_gap = std::fabs((q2 * b.fd - a.fd) / (q2 - 1.0) - rep.predicted);
    } else if (!rep.samples.empty()) {
        rep.extrapolated_gap = std::fabs(rep.samples.back().residual);
    }
    return rep;
}

BochnerResult bochner_residual_phi(const MapField& u) {
    const GridSpec& g = u.grid();
    const int q = u.q();
    const std::size_t n = g.size();
    BochnerResult res;
    res.lhs = l2_squared(tension(u));

    const Field d1 = partial(u.values, 1);
    const Field d2 = partial(u.values, 2);
    const Field h11 = project_tangent_field(u, backward_difference(forward_difference(u.values, 1), 1));
    const Field h22 = project_tangent_field(u, backward_difference(forward_difference(u.values, 2), 2));
    const Field h12 = project_tangent_field(u, partial(d1, 2));
    double hess = l2_squared(h11) + l2_squared(h22) + 2.0 * l2_squared(h12);

    double curv = 0.0;
    std::vector<double> up(q), a(q), b(q), r(q);
    const Field* du[2] = {&d1, &d2};
    for (std::size_t p = 0; p < n; ++p) {
        for (int i = 0; i < q; ++i) up[i] = u.values.plane_ptr(i)[p];
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) {
                if (al == be) continue;
                for (int i = 0; i < q; ++i) {
                    a[i] = du[al]->plane_ptr(i)[p];
                    b[i] = du[be]->plane_ptr(i)[p];
                }
                u.target.riemann(up, a, b, a, r);
                for (int i = 0; i < q; ++i) curv += r[i] * b[i];
            }
    }
    res.rhs = hess + curv * g.cell_area();
    res.gap = res.lhs - res.rhs;
    return res;
}

BochnerResult bochner_residual_psi(const VectorSpinorField& psi, const MapField& u) {
    const GridSpec& g = u.grid();
    const int q = u.q();
    const std::size_t n = g.size();
    BochnerResult res;
    res.lhs = l2_squared(twisted_conn_laplacian(u, psi).values);

    const VectorSpinorField D1 = twisted_gradient(u, psi, 1);
    const VectorSpinorField D2 = twisted_gradient(u, psi, 2);
    const VectorSpinorField H11 = compact_second(u, psi, 1);
    const VectorSpinorField H22 = compact_second(u, psi, 2);
    const VectorSpinorField H12 = twisted_gradient(u, D2, 1);  // nabla_1 nabla_2 psi
    const VectorSpinorField H21 = twisted_gradient(u, D1, 2);  // nabla_2 nabla_1 psi
    const double hess = l2_squared(H11.values) + l2_squared(H22.values) + l2_squared(H12.values) +
                        l2_squared(H21.values);

    const Field du1 = partial(u.values, 1);
    const Field du2 = partial(u.values, 2);
    const Field* du[2] = {&du1, &du2};
    const VectorSpinorField* D[2] = {&D1, &D2};
    // H[b][a] = nabla_b nabla_a psi.
    const VectorSpinorField* H[2][2] = {{&H11, &H12}, {&H21, &H22}};
    const int m = q * kChannels;
    std::vector<double> up(q), X(q), Y(q), z(m), r(m), w(m), v(m);
    double curvB = 0.0, curvC = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (int i = 0; i < q; ++i) up[i] = u.values.plane_ptr(i)[p];
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) {
                if (al == be) continue;
                for (int i = 0; i < q; ++i) {
                    X[i] = du[al]->plane_ptr(i)[p];
                    Y[i] = du[be]->plane_ptr(i)[p];
                }
                psi.get(p, z);
                riemann_channels(u.target, up, X, Y, z, q, r);
                H[be][al]->get(p, w);
                curvB += channel_dot(r, w);
                D[al]->get(p, z);
                riemann_channels(u.target, up, X, Y, z, q, r);
                D[be]->get(p, v);
                curvC += channel_dot(r, v);
            }
    }
    const double curv = curvB + curvC;
    res.rhs = hess + curv * g.cell_area();
    res.gap = res.lhs - res.rhs;
    return res;
}

SobolevReport sobolev_ratio(const std::vector<Field>& samples, double R) {
    SobolevReport rep;
    for (const Field& s0 : samples) {
        if (s0.components() != 1) throw std::invalid_argument("sobolev_ratio expects scalar fields");
        const GridSpec& g = s0.grid();
        const std::size_t n = g.size();
        Field v = s0;
        const double mean = kernels::active().sum(v.plane_ptr(0), n) / static_cast<double>(n);
        for (double& x : v.data()) x -= mean;

        const Field gx = partial(v, 1);
        const Field gy = partial(v, 2);
        Field g2(g, FieldKind::Scalar, 1);
        double v2 = 0.0, v4 = 0.0, grad2 = 0.0, grad4 = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double a = v.plane_ptr(0)[p];
            const double e = gx.plane_ptr(0)[p] * gx.plane_ptr(0)[p] + gy.plane_ptr(0)[p] * gy.plane_ptr(0)[p];
            g2.plane_ptr(0)[p] = e;
            v2 += a * a;
            v4 += a * a * a * a;
            grad2 += e;
            grad4 += e * e;
        }
        const double dA = g.cell_area();
        v2 *= dA;
        v4 *= dA;
        grad2 *= dA;
        grad4 *= dA;
        if (!(grad2 > 0.0)) continue;
        rep.ratios.push_back(v4 / (v2 * grad2));

        const double hess = l2_squared(backward_difference(forward_difference(v, 1), 1)) +
                            l2_squared(backward_difference(forward_difference(v, 2), 2)) +
                            2.0 * l2_squared(partial(gx, 2));
        const Field scan = ball_scan(g2, R);
        const double sup = *std::max_element(scan.plane(0).begin(), scan.plane(0).end());
        rep.local_ratios.push_back(grad4 / (sup * (hess + grad2 / (R * R))));
    }
    for (double r : rep.ratios) {
        rep.finite = rep.finite && std::isfinite(r);
        rep.max_ratio = std::max(rep.max_ratio, r);
    }
    for (double r : rep.local_ratios) {
        rep.finite = rep.finite && std::isfinite(r);
        rep.max_local_ratio = std::max(rep.max_local_ratio, r);
    }
    return rep;
}

Field heat_semigroup(const Field& u0, double C, double t) {
    if (u0.components() != 1) throw std::invalid_argument("heat_semigroup expects a scalar field");
    const GridSpec& g = u0.grid();
    const std::size_t n = g.size();
    std::vector<cplx> a(n), f(n);
    for (std::size_t p = 0; p < n; ++p) a[p] = u0.plane_ptr(0)[p];
    detail::ComplexFft2D fft(g.Nx, g.Ny);
    fft.forward(a, f);
    for (int my = 0; my < g.Ny; ++my) {
        const double sy = 2.0 * std::sin(kPi * signed_index(my, g.Ny) / g.Ny) / g.hy;
        for (int mx = 0; mx < g.Nx; ++mx) {
            const double sx = 2.0 * std::sin(kPi * signed_index(mx, g.Nx) / g.Nx) / g.hx;
            f[g.index(mx, my)] *= std::exp((C - sx * sx - sy * sy) * t);
        }
    }
    fft.inverse(f, a);
    Field out(g, FieldKind::Scalar, 1);
    for (std::size_t p = 0; p < n; ++p) out.plane_ptr(0)[p] = a[p].real();
    return out;
}

HarnackReport harnack_demo(const Field& u0, double C, double T) {
    if (!(T >= 1.0)) throw std::invalid_argument("harnack_demo requires T >= 1");
    for (double v : u0.data())
        if (!(v >= 0.0)) throw std::invalid_argument("harnack_demo requires u0 >= 0");
    const GridSpec& g = u0.grid();
    HarnackReport rep;
    const double mass = kernels::active().sum(u0.plane_ptr(0), g.size()) * g.cell_area();
    rep.U0 = C >= 0.0 ? std::exp(C * T) * mass : mass;

    Field delta(g, FieldKind::Scalar, 1);
    delta.plane_ptr(0)[0] = 1.0 / g.cell_area();
    const Field kernel = heat_semigroup(delta, 0.0, 1.0);
    rep.K = *std::max_element(kernel.plane(0).begin(), kernel.plane(0).end());

    const Field uT = heat_semigroup(u0, C, T);
    rep.sup_at_T = *std::max_element(uT.plane(0).begin(), uT.plane(0).end());
    rep.bound = std::exp(C) * rep.K * rep.U0;
    rep.holds = rep.sup_at_T <= rep.bound * (1.0 + 1e-12);
    return rep;
}

EquationGap extrinsic_intrinsic_gap(const FlowState& s) {
    EquationGap gap;
    const Rhs r = rhs(s);
    Field intrinsic = tension(s.u);
    kernels::active().axpy(intrinsic.data().data(), -1.0, curvature_R(s.u, s.psi).data().data(),
                           intrinsic.data().size());
    kernels::active().axpy(intrinsic.data().data(), -s.eps, curvature_Rc(s.u, s.psi).data().data(),
                           intrinsic.data().size());
    gap.gap_u = std::sqrt(l2_squared(difference(r.du_dt, intrinsic)));

    VectorSpinorField tang = r.dpsi_dt;
    apply_projector(s.u, tang);
    VectorSpinorField lap = twisted_conn_laplacian(s.u, s.psi);
    const VectorSpinorField D = twisted_dirac(s.u, s.psi);
    kernels::active().axpby(lap.values.data().data(), s.eps, lap.values.data().data(), -1.0,
                            D.values.data().data(), lap.values.data().size());
    gap.gap_psi = std::sqrt(l2_squared(difference(tang.values, lap.values)));
    return gap;
}

}  // namespace dhflow
