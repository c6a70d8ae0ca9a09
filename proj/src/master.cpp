#include "vsys/master.hpp"

#include <cmath>

namespace vsys {

AffineGenerator build_generator(const SystemParams& p) {
  const double g1 = p.gamma1, nu = p.nu, gl = p.gamma_l;
  const double e1 = p.eps1, e2 = p.eps2, d1 = p.delta1, d2 = p.delta2;

  AffineGenerator g;
  auto& A = g.A;

  // d rho11 = -2 g1 rho11 + 2 e1 Im rho13
  A(kRho11, kRho11) = -2.0 * g1;
  A(kRho11, kImRho13) = 2.0 * e1;

  // d rho22 = -2 nu rho22 + 2 e2 Im rho23
  A(kRho22, kRho22) = -2.0 * nu;
  A(kRho22, kImRho23) = 2.0 * e2;

  // rho12: damping (g1 + nu), rotation at (d1 - d2); no laser linewidth here.
  A(kReRho12, kReRho12) = -(g1 + nu);
  A(kReRho12, kImRho12) = d1 - d2;
  A(kReRho12, kImRho13) = e2;
  A(kReRho12, kImRho23) = e1;
  A(kImRho12, kReRho12) = -(d1 - d2);
  A(kImRho12, kImRho12) = -(g1 + nu);
  A(kImRho12, kReRho13) = -e2;
  A(kImRho12, kReRho23) = e1;

  // rho13: damping (g1 + gamma_l), rotation at d1; drive against the
  // population inversion rho11 - rho33 = 2 rho11 + rho22 - 1.
  A(kReRho13, kReRho13) = -(g1 + gl);
  A(kReRho13, kImRho13) = d1;
  A(kReRho13, kImRho12) = e2;
  A(kImRho13, kRho11) = -2.0 * e1;
  A(kImRho13, kRho22) = -e1;
  A(kImRho13, kReRho12) = -e2;
  A(kImRho13, kReRho13) = -d1;
  A(kImRho13, kImRho13) = -(g1 + gl);
  g.c[kImRho13] = e1;

  // rho23: damping (nu + gamma_l), rotation at d2; drive against
  // rho22 - rho33 = rho11 + 2 rho22 - 1.
  A(kReRho23, kImRho12) = -e1;
  A(kReRho23, kReRho23) = -(nu + gl);
  A(kReRho23, kImRho23) = d2;
  A(kImRho23, kRho11) = -e2;
  A(kImRho23, kRho22) = -2.0 * e2;
  A(kImRho23, kReRho12) = -e1;
  A(kImRho23, kReRho23) = -d2;
  A(kImRho23, kImRho23) = -(nu + gl);
  g.c[kImRho23] = e2;

  return g;
}

BlochState steady_state(const AffineGenerator& g) {
  Eigen::PartialPivLU<Eigen::Matrix<double, 8, 8>> lu(g.A);
  if (lu.rcond() < 1e-14)
    throw Error(Errc::SingularGenerator,
                "generator condition estimate exceeds 1e14 (effective rank < 8)");

  StateVec x = lu.solve(-g.c);
  const double scale = std::max(1.0, g.c.cwiseAbs().maxCoeff());
  // Iterative refinement: the 8x8 solve is backward stable, one or two
  // correction steps push the residual to rounding level.
  for (int iter = 0; iter < 3; ++iter) {
    StateVec r = g.A * x + g.c;
    if (r.cwiseAbs().maxCoeff() < 1e-12 * scale) break;
    x -= lu.solve(r);
  }
  StateVec r = g.A * x + g.c;
  if (!(r.cwiseAbs().maxCoeff() < 1e-12 * scale))
    throw Error(Errc::SingularGenerator, "steady-state residual did not converge");

  BlochState s;
  s.x = x;
  return s;
}

BlochState evolve(const AffineGenerator& g, const BlochState& x0, double t_final, double dt) {
  if (t_final < 0.0)
    throw Error(Errc::InvalidParameter, "t_final must be non-negative");
  const double a_norm = g.A.cwiseAbs().rowwise().sum().maxCoeff();
  if (a_norm > 0.0 && dt > 0.1 / a_norm)
    throw Error(Errc::InvalidParameter, "dt exceeds the stability guard 0.1/|A|_inf");
  if (t_final == 0.0) return x0;
  if (!(dt > 0.0))
    throw Error(Errc::InvalidParameter, "dt must be positive");

  const auto steps = static_cast<long long>(std::ceil(t_final / dt));
  const double h = t_final / static_cast<double>(steps);

  StateVec x = x0.x;
  StateVec k1, k2, k3, k4;
  for (long long i = 0; i < steps; ++i) {
    k1 = g.A * x + g.c;
    k2 = g.A * (x + 0.5 * h * k1) + g.c;
    k3 = g.A * (x + 0.5 * h * k2) + g.c;
    k4 = g.A * (x + h * k3) + g.c;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (x.cwiseAbs().maxCoeff() > 10.0)
      throw Error(Errc::UnstableStep, "state component exceeded 10 during integration");
  }
  BlochState out;
  out.x = x;
  return out;
}

}  // namespace vsys
