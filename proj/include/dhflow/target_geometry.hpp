#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dhflow/torus_grid.hpp"

namespace dhflow {

enum class TargetKind { Sphere, FlatTorus };

// Target manifold N in R^q, described in Cartesian ambient coordinates.
//   Sphere(q):    unit sphere S^{q-1}, q >= 2.
//   FlatTorus(q): R^q / (2 pi Z)^q; tangent projector is the identity.
//
// Point operations take spans of length q. Arguments X, Y, Z are ambient
// vectors; the sphere formulas are the standard extensions off the tangent
// space (II(X, Y) = -<X, Y> u and so on).
class Target {
public:
    static Target sphere(int q);
    static Target flat_torus(int q);

    TargetKind kind() const { return kind_; }
    int q() const { return q_; }
    // Period of the coordinate identification (0 for the sphere).
    double period() const;
    const char* name() const;

    // Nearest-point projection, in place. Throws DegenerateProjection when
    // |y| < 1e-8 on the sphere.
    void project_point(std::span<double> y) const;
    std::vector<double> project_point(std::span<const double> y) const;

    // |y| - 1 on the sphere, 0 on the flat torus.
    double constraint_residual(std::span<const double> y) const;

    // q x q row-major matrix of the orthogonal projection onto T_u N.
    std::vector<double> tangent_projector(std::span<const double> u) const;
    // X <- Pi_u X.
    void project_tangent(std::span<const double> u, std::span<double> X) const;
    // <nu, X> measured as |X - Pi_u X|.
    double normal_part(std::span<const double> u, std::span<const double> X) const;

    void second_fundamental_form(std::span<const double> u, std::span<const double> X,
                                 std::span<const double> Y, std::span<double> out) const;
    // P(xi, X): shape operator of the normal vector xi applied to X.
    void shape_operator(std::span<const double> u, std::span<const double> xi,
                        std::span<const double> X, std::span<double> out) const;
    // R(X, Y) Z = <Y, Z> X - <X, Z> Y on the unit sphere.
    void riemann(std::span<const double> u, std::span<const double> X, std::span<const double> Y,
                 std::span<const double> Z, std::span<double> out) const;
    // (nabla_V II)(X, Y) for a direction V = du(e_alpha).
    void second_fundamental_form_derivative(std::span<const double> u, std::span<const double> V,
                                            std::span<const double> X, std::span<const double> Y,
                                            std::span<double> out) const;

    // Christoffel symbols Gamma^m_{kl} of the coordinates in which u and psi
    // are expressed. Both targets use Cartesian ambient coordinates, so these
    // vanish identically.
    bool christoffels_vanish() const { return true; }
    double christoffel(std::span<const double> u, int m, int k, int l) const;

    bool operator==(const Target&) const = default;

private:
    Target(TargetKind kind, int q) : kind_(kind), q_(q) {}
    TargetKind kind_ = TargetKind::Sphere;
    int q_ = 3;
};

using ChristoffelFn = std::function<double(int m, int k, int l)>;

// Extrinsic correction term B(du, psi, du, psi) at one point:
//   sum_alpha du_a^i du_a^k Re<psi^l, psi^j>
//     (P(II(e_i, e_m), e_j) - P(II(e_i, e_j), e_m)) Gamma^m_{kl}.
// du1, du2: du(e_1), du(e_2). psi holds the q x 4 real spinor channels of the
// vector spinor, psi[i * 4 + k]. With no explicit Christoffel function the
// target's own symbols are used, which vanish in ambient coordinates.
void b_term(const Target& target, std::span<const double> u, std::span<const double> du1,
            std::span<const double> du2, std::span<const double> psi, std::span<double> out,
            const ChristoffelFn& gamma = nullptr);

// Map u: T^2 -> N stored as q ambient planes.
struct MapField {
    Field values;
    Target target;

    MapField(const GridSpec& grid, const Target& t);
    MapField(Field v, const Target& t);

    const GridSpec& grid() const { return values.grid(); }
    int q() const { return target.q(); }
    double at(std::size_t point, int i) const { return values.plane_ptr(i)[point]; }
    double& at(std::size_t point, int i) { return values.plane_ptr(i)[point]; }
    void get(std::size_t point, std::span<double> out) const;
    void set(std::size_t point, std::span<const double> in);

    // Max over points of |constraint_residual|.
    double constraint_violation() const;
    // Pointwise nearest-point projection.
    void project();
};

}  // namespace dhflow
