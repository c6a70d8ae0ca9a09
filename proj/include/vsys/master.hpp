#pragma once

#include <Eigen/Dense>

#include "vsys/params.hpp"

namespace vsys {

// Real affine form dx/dt = A x + c of the V-system master equation after
// eliminating rho33 and the conjugate coherences. The constant vector c
// collects the terms produced by substituting rho33 = 1 - rho11 - rho22.
// delta2 enters only the four coherence rows Re/Im rho12 and Re/Im rho23,
// each affinely.
struct AffineGenerator {
  Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Zero();
  StateVec c = StateVec::Zero();
};

AffineGenerator build_generator(const SystemParams& p);

// Steady state of A x + c = 0 by dense partial-pivot LU with one step of
// iterative refinement. Throws SingularGenerator when the condition
// estimate exceeds 1e14 or the residual cannot be driven below
// 1e-12 * max(1, |c|_inf).
BlochState steady_state(const AffineGenerator& g);

// Classical fixed-step 4th-order integration of dx/dt = A x + c, used as an
// independent cross-check of steady_state. Requires dt <= 0.1/|A|_inf and
// throws UnstableStep if any component leaves [-10, 10] during integration.
// Explicit stepping is a validation tool only: with lifetime ratios of 1e5
// the system is stiff and the linear solve is the production path.
BlochState evolve(const AffineGenerator& g, const BlochState& x0, double t_final, double dt);

}  // namespace vsys
