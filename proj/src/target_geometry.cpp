#include "dhflow/target_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dhflow/errors.hpp"

namespace dhflow {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void zero(std::span<double> out) {
    for (double& v : out) v = 0.0;
}

}  // namespace

Target Target::sphere(int q) {
    if (q < 2) throw std::invalid_argument("sphere target needs q >= 2");
    return Target(TargetKind::Sphere, q);
}

Target Target::flat_torus(int q) {
    if (q < 1) throw std::invalid_argument("flat torus target needs q >= 1");
    return Target(TargetKind::FlatTorus, q);
}

double Target::period() const {
    return kind_ == TargetKind::FlatTorus ? 2.0 * std::numbers::pi : 0.0;
}

const char* Target::name() const {
    return kind_ == TargetKind::Sphere ? "sphere" : "flat_torus";
}

void Target::project_point(std::span<double> y) const {
    if (kind_ == TargetKind::FlatTorus) return;
    const double n = std::sqrt(dot(y, y));
    if (!(n >= 1e-8)) throw DegenerateProjection("nearest-point projection undefined at |y| < 1e-8");
    for (double& v : y) v /= n;
}

std::vector<double> Target::project_point(std::span<const double> y) const {
    std::vector<double> out(y.begin(), y.end());
    project_point(std::span<double>(out));
    return out;
}

double Target::constraint_residual(std::span<const double> y) const {
    if (kind_ == TargetKind::FlatTorus) return 0.0;
    return std::sqrt(dot(y, y)) - 1.0;
}

std::vector<double> Target::tangent_projector(std::span<const double> u) const {
    const int n = q_;
    std::vector<double> P(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v = i == j ? 1.0 : 0.0;
            if (kind_ == TargetKind::Sphere) v -= u[i] * u[j];
            P[static_cast<std::size_t>(i * n + j)] = v;
        }
    }
    return P;
}

void Target::project_tangent(std::span<const double> u, std::span<double> X) const {
    if (kind_ == TargetKind::FlatTorus) return;
    const double d = dot(u, X);
    for (std::size_t i = 0; i < X.size(); ++i) X[i] -= d * u[i];
}

double Target::normal_part(std::span<const double> u, std::span<const double> X) const {
    if (kind_ == TargetKind::FlatTorus) return 0.0;
    return std::fabs(dot(u, X));
}

void Target::second_fundamental_form(std::span<const double> u, std::span<const double> X,
                                     std::span<const double> Y, std::span<double> out) const {
    if (kind_ == TargetKind::FlatTorus) return zero(out);
    const double d = dot(X, Y);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -d * u[i];
}

void Target::shape_operator(std::span<const double> u, std::span<const double> xi,
                            std::span<const double> X, std::span<double> out) const {
    if (kind_ == TargetKind::FlatTorus) return zero(out);
    const double d = dot(u, xi);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -d * X[i];
}

void Target::riemann(std::span<const double>, std::span<const double> X,
                     std::span<const double> Y, std::span<const double> Z,
                     std::span<double> out) const {
    if (kind_ == TargetKind::FlatTorus) return zero(out);
    const double yz = dot(Y, Z);
    const double xz = dot(X, Z);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = yz * X[i] - xz * Y[i];
}

void Target::second_fundamental_form_derivative(std::span<const double>, std::span<const double> V,
                                                std::span<const double> X,
                                                std::span<const double> Y,
                                                std::span<double> out) const {
    if (kind_ == TargetKind::FlatTorus) return zero(out);
    const double d = dot(X, Y);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -d * V[i];
}

double Target::christoffel(std::span<const double>, int m, int k, int l) const {
    if (m < 0 || k < 0 || l < 0 || m >= q_ || k >= q_ || l >= q_)
        throw std::out_of_range("christoffel index");
    return 0.0;
}

void b_term(const Target& target, std::span<const double> u, std::span<const double> du1,
            std::span<const double> du2, std::span<const double> psi, std::span<double> out,
            const ChristoffelFn& gamma) {
    zero(out);
    if (!gamma && target.christoffels_vanish()) return;
    const int q = target.q();
    const auto n = static_cast<std::size_t>(q);
    auto G = [&](int m, int k, int l) { return gamma ? gamma(m, k, l) : target.christoffel(u, m, k, l); };
    std::vector<double> ei(n), ej(n), em(n), two(n), tmp(n);
    auto unit = [n](std::vector<double>& e, int i) {
        for (std::size_t a = 0; a < n; ++a) e[a] = a == static_cast<std::size_t>(i) ? 1.0 : 0.0;
    };
    // Re<psi^l, psi^j> summed over the four real channels.
    auto pair = [&](int l, int j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += psi[static_cast<std::size_t>(l * 4 + k)] * psi[static_cast<std::size_t>(j * 4 + k)];
        return s;
    };
    for (int i = 0; i < q; ++i) {
        unit(ei, i);
        for (int k = 0; k < q; ++k) {
            const double w = du1[static_cast<std::size_t>(i)] * du1[static_cast<std::size_t>(k)] +
                             du2[static_cast<std::size_t>(i)] * du2[static_cast<std::size_t>(k)];
            if (w == 0.0) continue;
            for (int l = 0; l < q; ++l) {
                for (int j = 0; j < q; ++j) {
                    const double pj = pair(l, j);
                    if (pj == 0.0) continue;
                    unit(ej, j);
                    for (int m = 0; m < q; ++m) {
                        const double g = G(m, k, l);
                        if (g == 0.0) continue;
                        unit(em, m);
                        target.second_fundamental_form(u, ei, em, two);
                        target.shape_operator(u, two, ej, tmp);
                        for (std::size_t a = 0; a < n; ++a) out[a] += w * pj * g * tmp[a];
                        target.second_fundamental_form(u, ei, ej, two);
                        target.shape_operator(u, two, em, tmp);
                        for (std::size_t a = 0; a < n; ++a) out[a] -= w * pj * g * tmp[a];
                    }
                }
            }
        }
    }
}

MapField::MapField(const GridSpec& grid, const Target& t)
    : values(grid, FieldKind::Ambient, t.q(), t.period()), target(t) {}

MapField::MapField(Field v, const Target& t) : values(std::move(v)), target(t) {
    if (values.kind() != FieldKind::Ambient || values.components() != t.q() ||
        values.period() != t.period())
        throw std::invalid_argument("map field layout does not match its target");
}

void MapField::get(std::size_t point, std::span<double> out) const {
    for (int i = 0; i < q(); ++i) out[static_cast<std::size_t>(i)] = at(point, i);
}

void MapField::set(std::size_t point, std::span<const double> in) {
    for (int i = 0; i < q(); ++i) at(point, i) = in[static_cast<std::size_t>(i)];
}

double MapField::constraint_violation() const {
    if (target.kind() == TargetKind::FlatTorus) return 0.0;
    double worst = 0.0;
    const std::size_t n = grid().size();
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (int i = 0; i < q(); ++i) s += at(p, i) * at(p, i);
        const double r = std::fabs(std::sqrt(s) - 1.0);
        if (!(r <= worst)) worst = r;
    }
    return worst;
}

void MapField::project() {
    if (target.kind() == TargetKind::FlatTorus) return;
    const std::size_t n = grid().size();
    std::vector<double> y(static_cast<std::size_t>(q()));
    for (std::size_t p = 0; p < n; ++p) {
        get(p, y);
        target.project_point(std::span<double>(y));
        set(p, y);
    }
}

}  // namespace dhflow
