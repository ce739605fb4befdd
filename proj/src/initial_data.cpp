#include "dhflow/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace dhflow {

namespace {

constexpr double kPi = std::numbers::pi;

struct Mode {
    int n1, n2;
    double c, s;  // cos and sin coefficients
};

std::vector<Mode> random_modes(std::mt19937_64& rng, int modes, double amp) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<Mode> out;
    for (int n1 = -modes; n1 <= modes; ++n1)
        for (int n2 = -modes; n2 <= modes; ++n2) {
            const double w = amp / (1.0 + n1 * n1 + n2 * n2);
            const double c = w * U(rng);
            const double s = w * U(rng);
            out.push_back({n1, n2, c, s});
        }
    return out;
}

double smooth_cutoff(double r, double rho) {
    if (r <= 0.5 * rho) return 1.0;
    if (r >= rho) return 0.0;
    const double s = (rho - r) / (0.5 * rho);
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double min_image(double d, double L) { return d - L * std::nearbyint(d / L); }

}  // namespace

MapField constant_map(const GridSpec& grid, const Target& target) {
    MapField u(grid, target);
    if (target.kind() == TargetKind::Sphere)
        for (double& v : u.values.plane(0)) v = 1.0;
    return u;
}

MapField geodesic_map(const GridSpec& grid, const Target& target, int k) {
    MapField u(grid, target);
    if (target.kind() == TargetKind::Sphere) {
        for (int iy = 0; iy < grid.Ny; ++iy)
            for (int ix = 0; ix < grid.Nx; ++ix) {
                const std::size_t p = grid.index(ix, iy);
                const double a = 2.0 * kPi * k * grid.x(ix) / grid.Lx;
                u.at(p, 0) = std::cos(a);
                u.at(p, 1) = std::sin(a);
            }
    } else {
        for (int iy = 0; iy < grid.Ny; ++iy)
            for (int ix = 0; ix < grid.Nx; ++ix)
                u.at(grid.index(ix, iy), 0) = 2.0 * kPi * k * grid.x(ix) / grid.Lx;
    }
    return u;
}

MapField smooth_map(const GridSpec& grid, const Target& target, double amp, std::uint64_t seed,
                    int modes) {
    std::mt19937_64 rng(seed);
    MapField u(grid, target);
    const int q = target.q();
    for (int i = 0; i < q; ++i) {
        const auto ms = random_modes(rng, modes, amp);
        double* v = u.values.plane_ptr(i);
        for (int iy = 0; iy < grid.Ny; ++iy)
            for (int ix = 0; ix < grid.Nx; ++ix) {
                double acc = 0.0;
                for (const auto& m : ms) {
                    const double ph = 2.0 * kPi * (m.n1 * grid.x(ix) / grid.Lx + m.n2 * grid.y(iy) / grid.Ly);
                    acc += m.c * std::cos(ph) + m.s * std::sin(ph);
                }
                v[grid.index(ix, iy)] = acc;
            }
    }
    if (target.kind() == TargetKind::Sphere) {
        for (double& v : u.values.plane(q - 1)) v += 1.0;
        u.project();
    }
    return u;
}

MapField bubble_map(const GridSpec& grid, double lambda, double rho, double cx, double cy, int turns) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bubble: lambda must be > 0");
    if (turns < 1 || turns % 2 == 0) throw std::invalid_argument("bubble: turns must be odd and positive");
    if (!(rho > 0.0) || !(rho < grid.injectivity_radius()))
        throw std::invalid_argument("bubble: cutoff radius must lie in (0, injectivity radius)");
    MapField u(grid, Target::sphere(3));
    for (int iy = 0; iy < grid.Ny; ++iy)
        for (int ix = 0; ix < grid.Nx; ++ix) {
            const double dx = min_image(grid.x(ix) - cx, grid.Lx);
            const double dy = min_image(grid.y(iy) - cy, grid.Ly);
            const double r = std::hypot(dx, dy);
            const double theta = 2.0 * turns * std::atan2(lambda, r) * smooth_cutoff(r, rho);
            const double phi = std::atan2(dy, dx);
            const std::size_t p = grid.index(ix, iy);
            u.at(p, 0) = std::sin(theta) * std::cos(phi);
            u.at(p, 1) = std::sin(theta) * std::sin(phi);
            u.at(p, 2) = std::cos(theta);
        }
    return u;
}

VectorSpinorField smooth_spinor(const MapField& u, double amp, std::uint64_t seed, int modes) {
    const GridSpec& grid = u.grid();
    std::mt19937_64 rng(seed);
    VectorSpinorField psi(grid, u.q());
    const double s1 = 0.5 * grid.spin.delta1, s2 = 0.5 * grid.spin.delta2;
    for (int i = 0; i < u.q(); ++i)
        for (int slot = 0; slot < 2; ++slot) {
            const auto ms = random_modes(rng, modes, amp);
            double* re = psi.channel(i, 2 * slot);
            double* im = psi.channel(i, 2 * slot + 1);
            for (int iy = 0; iy < grid.Ny; ++iy)
                for (int ix = 0; ix < grid.Nx; ++ix) {
                    std::complex<double> acc = 0.0;
                    for (const auto& m : ms) {
                        const double ph = 2.0 * kPi * ((m.n1 + s1) * grid.x(ix) / grid.Lx +
                                                       (m.n2 + s2) * grid.y(iy) / grid.Ly);
                        acc += std::complex<double>(m.c, m.s) * std::polar(1.0, ph);
                    }
                    const std::size_t p = grid.index(ix, iy);
                    re[p] = acc.real();
                    im[p] = acc.imag();
                }
        }
    tangency_project(u, psi);
    return psi;
}

VectorSpinorField mode_spinor(const GridSpec& grid, int q, int n1, int n2, int dirac_sign, double amp) {
    const double xi1 = 2.0 * kPi * (n1 + 0.5 * grid.spin.delta1) / grid.Lx;
    const double xi2 = 2.0 * kPi * (n2 + 0.5 * grid.spin.delta2) / grid.Ly;
    const double r = std::hypot(xi1, xi2);
    std::complex<double> e0(1.0, 0.0), e1(0.0, 0.0);
    if (r > 0.0) {
        // Eigenvector of sigma . xi with eigenvalue -dirac_sign |xi|.
        e0 = std::complex<double>(xi1, -xi2);
        e1 = -static_cast<double>(dirac_sign) * r;
        const double nrm = std::sqrt(std::norm(e0) + std::norm(e1));
        e0 /= nrm;
        e1 /= nrm;
    }
    VectorSpinorField psi(grid, q);
    for (int iy = 0; iy < grid.Ny; ++iy)
        for (int ix = 0; ix < grid.Nx; ++ix) {
            const auto w = amp * std::polar(1.0, xi1 * grid.x(ix) + xi2 * grid.y(iy));
            const std::size_t p = grid.index(ix, iy);
            for (int i = 0; i < q; ++i) {
                psi.set_component(p, i, 0, w * e0);
                psi.set_component(p, i, 1, w * e1);
            }
        }
    return psi;
}

}  // namespace dhflow
