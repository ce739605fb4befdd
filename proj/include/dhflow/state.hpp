#pragma once

#include "dhflow/clifford_spin.hpp"
#include "dhflow/target_geometry.hpp"

namespace dhflow {

// Full flow state. Invariants: u lies on the target within 1e-8 and psi is
// tangent along u within 1e-8.
struct FlowState {
    double t = 0.0;
    double eps = 1.0;
    MapField u;
    VectorSpinorField psi;

    FlowState(double t0, double epsilon, MapField map, VectorSpinorField spinor);

    const GridSpec& grid() const { return u.grid(); }
    const Target& target() const { return u.target; }
};

// Throws ConstraintError when the invariants above fail.
void check_constraints(const FlowState& s, double tol = 1e-8);

}  // namespace dhflow
