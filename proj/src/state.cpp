#include "dhflow/state.hpp"

#include <stdexcept>
#include <string>

#include "dhflow/errors.hpp"

namespace dhflow {

FlowState::FlowState(double t0, double epsilon, MapField map, VectorSpinorField spinor)
    : t(t0), eps(epsilon), u(std::move(map)), psi(std::move(spinor)) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(u.grid() == psi.grid())) throw std::invalid_argument("map and spinor grids differ");
    if (u.q() != psi.q()) throw std::invalid_argument("map and spinor ambient dimensions differ");
}

void check_constraints(const FlowState& s, double tol) {
    const double cu = s.u.constraint_violation();
    if (!(cu <= tol))
        throw ConstraintError("map leaves the target by " + std::to_string(cu));
    const double cp = tangency_violation(s.u, s.psi);
    if (!(cp <= tol))
        throw ConstraintError("spinor leaves the tangent bundle by " + std::to_string(cp));
}

}  // namespace dhflow
