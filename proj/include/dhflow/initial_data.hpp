#pragma once

#include <cstdint>

#include "dhflow/clifford_spin.hpp"
#include "dhflow/target_geometry.hpp"

namespace dhflow {

// Constant map at the first basis vector (sphere) or the origin (flat torus).
MapField constant_map(const GridSpec& grid, const Target& target);

// Closed geodesic x -> (cos(2 pi k x / Lx), sin(2 pi k x / Lx), 0, ...) on the
// sphere; on the flat torus the linear map x -> (2 pi k x / Lx, 0, ...).
MapField geodesic_map(const GridSpec& grid, const Target& target, int k = 1);

// Smooth random map: low Fourier modes (|n| <= modes) with amplitude `amp`,
// added to e_q and projected (sphere) or used directly (flat torus).
MapField smooth_map(const GridSpec& grid, const Target& target, double amp, std::uint64_t seed,
                    int modes = 2);

// Degree-one bubble into S^2 centred at (cx, cy): polar angle
// theta(r) = 2 arctan(lambda / r) chi(r), chi a smooth cutoff equal to 1 for
// r <= rho / 2 and 0 for r >= rho. Requires q = 3 and rho < injectivity radius.
// With turns = 2m + 1 the angle is multiplied by turns: theta(0) = turns * pi, so
// the map wraps the sphere turns times with alternating orientation and still
// has degree one (up to sign).
MapField bubble_map(const GridSpec& grid, double lambda, double rho, double cx, double cy, int turns = 1);

// Smooth random spinor along u: spin-compatible low modes with amplitude `amp`,
// projected to be tangent.
VectorSpinorField smooth_spinor(const MapField& u, double amp, std::uint64_t seed, int modes = 2);

// Single Fourier mode xi = 2 pi (n + delta / 2) / L in every component, on the
// eigenvector of the flat Dirac symbol with eigenvalue dirac_sign * |xi|.
// For xi = 0 the spinor is the constant (amp, 0).
VectorSpinorField mode_spinor(const GridSpec& grid, int q, int n1, int n2, int dirac_sign, double amp);

}  // namespace dhflow
