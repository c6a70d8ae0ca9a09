#include "vsys/params.hpp"

#include <cmath>

namespace vsys {

SystemParams normalize(const SystemParams& raw) {
  if (!(raw.gamma1 > 0.0))
    throw Error(Errc::NonPositiveRate, "gamma1 must be positive");
  if (!(raw.nu > 0.0))
    throw Error(Errc::NonPositiveRate, "nu must be positive");
  if (raw.gamma_l < 0.0)
    throw Error(Errc::InvalidParameter, "gamma_l must be non-negative");
  if (raw.eps1 < 0.0 || raw.eps2 < 0.0)
    throw Error(Errc::InvalidParameter, "Rabi frequencies must be non-negative");

  SystemParams p = raw;
  const double g = raw.gamma1;
  p.gamma1 = raw.gamma1 / g;  // exactly 1.0, and x/1 == x keeps idempotence exact
  p.nu = raw.nu / g;
  p.gamma_l = raw.gamma_l / g;
  p.eps1 = raw.eps1 / g;
  p.eps2 = raw.eps2 / g;
  p.delta1 = raw.delta1 / g;
  p.delta2 = raw.delta2 / g;
  return p;
}

std::vector<std::string> check_limit_hierarchy(const SystemParams& p, double factor) {
  std::vector<std::string> warnings;
  auto check = [&](double big, const char* big_name, double small, const char* small_name) {
    if (!(big >= factor * small)) {
      warnings.push_back(std::string(big_name) + " >> " + small_name +
                         " violated at factor " + std::to_string(factor));
    }
  };
  // gamma1, eps1 >> gamma_l, eps2
  check(p.gamma1, "gamma1", p.gamma_l, "gamma_l");
  check(p.gamma1, "gamma1", p.eps2, "eps2");
  check(p.eps1, "eps1", p.gamma_l, "gamma_l");
  check(p.eps1, "eps1", p.eps2, "eps2");
  // gamma_l, eps2 >> nu. A perfectly coherent clock laser (gamma_l == 0)
  // drops out of the equations entirely, so that clause is skipped.
  if (p.gamma_l > 0.0) check(p.gamma_l, "gamma_l", p.nu, "nu");
  check(p.eps2, "eps2", p.nu, "nu");
  return warnings;
}

Eigen::Matrix3cd reconstruct(const BlochState& s) {
  using std::complex;
  Eigen::Matrix3cd rho;
  const complex<double> r12(s.x[kReRho12], s.x[kImRho12]);
  const complex<double> r13(s.x[kReRho13], s.x[kImRho13]);
  const complex<double> r23(s.x[kReRho23], s.x[kImRho23]);
  rho(0, 0) = s.x[kRho11];
  rho(1, 1) = s.x[kRho22];
  rho(2, 2) = 1.0 - s.x[kRho11] - s.x[kRho22];
  rho(0, 1) = r12;
  rho(1, 0) = std::conj(r12);
  rho(0, 2) = r13;
  rho(2, 0) = std::conj(r13);
  rho(1, 2) = r23;
  rho(2, 1) = std::conj(r23);
  return rho;
}

}  // namespace vsys
