#include "dhflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dhflow/kernels.hpp"
#include "fft.hpp"

namespace dhflow {

namespace {

double sum_squares(const Field& f) {
    return kernels::active().dot(f.data().data(), f.data().data(), f.data().size());
}

// Adds the pointwise squared norm of all planes of f, times w, into acc.
void add_pointwise_squares(const Field& f, double w, std::vector<double>& acc) {
    const std::size_t n = f.plane_size();
    for (int c = 0; c < f.components(); ++c) {
        const double* v = f.plane_ptr(c);
        for (std::size_t p = 0; p < n; ++p) acc[p] += w * v[p] * v[p];
    }
}

// Ambient q-vector of one plane-set at a point.
void gather(const Field& f, std::size_t p, int first_plane, int stride, int q,
            std::span<double> out) {
    for (int i = 0; i < q; ++i)
        out[static_cast<std::size_t>(i)] = f.plane_ptr(first_plane + i * stride)[p];
}

}  // namespace

double l2_squared(const Field& f) { return sum_squares(f) * f.grid().cell_area(); }

double spinor_gradient_energy(const MapField& u, const VectorSpinorField& psi) {
    double grad = 0.0;
    for (int a = 1; a <= 2; ++a) {
        grad += sum_squares(twisted_forward_gradient(u, psi, a).values);
        grad += sum_squares(twisted_backward_gradient(u, psi, a).values);
    }
    return 0.25 * grad * u.grid().cell_area();
}

double dirichlet_energy(const MapField& u) {
    double du2 = 0.0;
    for (int a = 1; a <= 2; ++a) du2 += sum_squares(forward_difference(u.values, a));
    return 0.5 * du2 * u.grid().cell_area();
}

EnergyReport energy_regularized(const FlowState& s) {
    const auto& g = s.grid();
    const double dA = g.cell_area();
    EnergyReport r;
    r.dirichlet = dirichlet_energy(s.u);
    if (is_zero(s.psi)) {
        r.E_eps = r.dirichlet;
        return r;
    }

    const VectorSpinorField D = twisted_dirac(s.u, s.psi);
    const double re = real_inner(s.psi, D);
    const double im = imag_inner(s.psi, D);
    const double scale = std::sqrt(l2_squared(s.psi.values) * l2_squared(D.values));
    if (std::fabs(im) > 1e-10 * std::max(1.0, scale))
        throw std::logic_error("Dirac pairing has imaginary part " + std::to_string(im));
    r.dirac_pairing = 0.5 * re;
    r.dirac_imag = 0.5 * im;

    r.spinor_gradient = spinor_gradient_energy(s.u, s.psi);

    r.E_eps = r.dirichlet + r.dirac_pairing + s.eps * r.spinor_gradient;

    std::vector<double> mag2(g.size(), 0.0);
    add_pointwise_squares(s.psi.values, 1.0, mag2);
    double l2 = 0.0, l4 = 0.0, sup = 0.0;
    for (double m : mag2) {
        l2 += m;
        l4 += m * m;
        sup = std::max(sup, m);
    }
    r.psi_l2 = l2 * dA;
    r.psi_l4 = l4 * dA;
    r.psi_sup = std::sqrt(sup);

    const double bound = -r.psi_l2 / (4.0 * s.eps);
    r.lower_bound_ok = r.E_eps >= bound - 1e-12 * std::max(1.0, std::fabs(bound));
    return r;
}

Field F_density(const FlowState& s) {
    const auto& g = s.grid();
    Field out(g, FieldKind::Scalar, 1);
    std::vector<double> acc(g.size(), 0.0);
    const bool zero = is_zero(s.psi);
    for (int a = 1; a <= 2; ++a) {
        add_pointwise_squares(forward_difference(s.u.values, a), 0.5, acc);
        if (zero) continue;
        add_pointwise_squares(twisted_forward_gradient(s.u, s.psi, a).values, 0.25 * s.eps, acc);
        add_pointwise_squares(twisted_backward_gradient(s.u, s.psi, a).values, 0.25 * s.eps, acc);
    }
    std::copy(acc.begin(), acc.end(), out.plane_ptr(0));
    return out;
}

double local_F(const FlowState& s, double cx, double cy, double R) {
    const Field mask = ball_mask(s.grid(), cx, cy, R);
    const Field dens = F_density(s);
    return kernels::active().dot(mask.plane_ptr(0), dens.plane_ptr(0), dens.plane_size());
}

Field ball_scan(const Field& density, double R) {
    const auto& g = density.grid();
    std::vector<double> kernel(g.size(), 0.0);
    for (const auto& o : ball_offsets(g, R)) {
        const int ix = (o.ix % g.Nx + g.Nx) % g.Nx;
        const int iy = (o.iy % g.Ny + g.Ny) % g.Ny;
        kernel[g.index(ix, iy)] = g.cell_area();
    }
    detail::RealConvolver2D conv(g.Nx, g.Ny, kernel);
    const auto r = conv.correlate(density.plane(0));
    Field out(g, FieldKind::Scalar, 1);
    std::copy(r.begin(), r.end(), out.plane_ptr(0));
    return out;
}

Field tension(const MapField& u) {
    Field lap = laplacian(u.values);
    if (u.target.kind() == TargetKind::FlatTorus) return lap;
    const int q = u.q();
    const std::size_t n = u.grid().size();
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < q; ++i) {
        const double* ui = u.values.plane_ptr(i);
        const double* li = lap.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) d[p] += ui[p] * li[p];
    }
    for (int i = 0; i < q; ++i) {
        const double* ui = u.values.plane_ptr(i);
        double* li = lap.plane_ptr(i);
        for (std::size_t p = 0; p < n; ++p) li[p] -= d[p] * ui[p];
    }
    return lap;
}

Field curvature_R(const MapField& u, const VectorSpinorField& psi) {
    const auto& g = u.grid();
    const int q = u.q();
    const auto nq = static_cast<std::size_t>(q);
    Field out(g, FieldKind::Ambient, q);
    if (u.target.kind() == TargetKind::FlatTorus) return out;
    std::vector<double> uu(nq), du(nq), X(nq), Y(nq), r(nq);
    for (int a = 1; a <= 2; ++a) {
        const Field d = partial(u.values, a);
        const VectorSpinorField gp = clifford_mul(a, psi);
        for (std::size_t p = 0; p < g.size(); ++p) {
            gather(u.values, p, 0, 1, q, uu);
            gather(d, p, 0, 1, q, du);
            for (int k = 0; k < kChannels; ++k) {
                gather(psi.values, p, k, kChannels, q, X);
                gather(gp.values, p, k, kChannels, q, Y);
                u.target.riemann(uu, X, Y, du, r);
                for (int i = 0; i < q; ++i) out.plane_ptr(i)[p] += 0.5 * r[static_cast<std::size_t>(i)];
            }
        }
    }
    return out;
}

Field curvature_Rc(const MapField& u, const VectorSpinorField& psi) {
    const auto& g = u.grid();
    const int q = u.q();
    const auto nq = static_cast<std::size_t>(q);
    Field out(g, FieldKind::Ambient, q);
    if (u.target.kind() == TargetKind::FlatTorus) return out;
    std::vector<double> uu(nq), du(nq), X(nq), Y(nq), r(nq);
    for (int a = 1; a <= 2; ++a) {
        const Field d = partial(u.values, a);
        const VectorSpinorField np = twisted_gradient(u, psi, a);
        for (std::size_t p = 0; p < g.size(); ++p) {
            gather(u.values, p, 0, 1, q, uu);
            gather(d, p, 0, 1, q, du);
            for (int k = 0; k < kChannels; ++k) {
                gather(np.values, p, k, kChannels, q, X);
                gather(psi.values, p, k, kChannels, q, Y);
                u.target.riemann(uu, X, Y, du, r);
                for (int i = 0; i < q; ++i) out.plane_ptr(i)[p] += r[static_cast<std::size_t>(i)];
            }
        }
    }
    return out;
}

}  // namespace dhflow
