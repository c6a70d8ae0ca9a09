#include "vsys/closedform.hpp"

#include <cmath>

namespace vsys {

namespace {

void require_resonant_pump(const SystemParams& p, const char* who) {
  if (p.delta1 != 0.0)
    throw Error(Errc::WrongBranch,
                std::string(who) + " is valid for delta1 = 0 only");
}

void require_positive_nu(const SystemParams& p) {
  if (!(p.nu > 0.0)) throw Error(Errc::NonPositiveRate, "nu must be positive");
}

}  // namespace

std::pair<double, double> eta_pair(const SystemParams& p) {
  const double g2 = p.gamma1 * p.gamma1;
  const double e2 = p.eps1 * p.eps1;
  const double root = std::sqrt(9.0 * e2 * e2 + 10.0 * e2 * g2 + 2.0 * g2 * g2);
  const double base = 3.0 * (2.0 * e2 + g2);
  return {base + 2.0 * root, base - 2.0 * root};
}

AbResult ab(const SystemParams& p) {
  require_positive_nu(p);
  const double g1 = p.gamma1;
  const double C = 2.0 * p.eps1 * p.eps1 + g1 * g1;
  const double q = p.eps1 * p.eps1 * p.eps2 * p.eps2 * g1;
  const auto [eta1, eta2] = eta_pair(p);

  AbResult r;
  r.a = ((4.0 * std::pow(p.eps1, 4) - std::pow(g1, 4)) * p.nu - q) / (2.0 * C * p.nu);
  const double denom = 2.0 * C * p.nu;
  r.b_squared = (q - C * p.nu * eta1) * (q - C * p.nu * eta2) / (denom * denom);
  return r;
}

LambdaPair lambdas(const SystemParams& p, double critical_tol) {
  const AbResult r = ab(p);
  LambdaPair out;
  out.a = r.a;
  out.b_squared = r.b_squared;
  out.regime.b_squared = r.b_squared;

  if (r.b_squared < -critical_tol) {
    // b imaginary: conjugate pair. The principal square root of a + i|b|
    // has non-negative real and imaginary parts, which fixes the branch.
    out.regime.tag = RegimeTag::Ats;
    out.lambda1 = std::sqrt(std::complex<double>(r.a, std::sqrt(-r.b_squared)));
    out.lambda2 = std::conj(out.lambda1);
    out.lambda0 = out.lambda1.real();
    out.gamma0 = out.lambda1.imag();
  } else if (r.b_squared > critical_tol) {
    // b real; a +- b is negative throughout the regime (verified over the
    // tested grids rather than assumed), making both values purely
    // imaginary. The principal root of a negative real is +i sqrt|.|.
    out.regime.tag = RegimeTag::Cic;
    const double b = std::sqrt(r.b_squared);
    out.lambda1 = std::sqrt(std::complex<double>(r.a + b, 0.0));
    out.lambda2 = std::sqrt(std::complex<double>(r.a - b, 0.0));
  } else {
    out.regime.tag = RegimeTag::Critical;
    out.lambda1 = out.lambda2 = std::sqrt(std::complex<double>(r.a, 0.0));
  }
  return out;
}

double rho11_closed(const SystemParams& p, double delta2) {
  require_resonant_pump(p, "rho11_closed");
  require_positive_nu(p);
  const double g1 = p.gamma1;
  const double C = 2.0 * p.eps1 * p.eps1 + g1 * g1;
  const double B = p.eps1 * p.eps1 / C;
  const double K = p.eps1 * p.eps1 * p.eps2 * p.eps2 * g1 / (C * p.nu);
  const AbResult r = ab(p);
  const double d2sq = delta2 * delta2;
  // (d2^2 - l1^2)(d2^2 - l2^2) = (d2^2 - a)^2 - b^2, real for either sign
  // of b^2.
  const double denom = (d2sq - r.a) * (d2sq - r.a) - r.b_squared;
  return B * (1.0 - K * (d2sq + g1 * g1) / denom);
}

double ats_position(const SystemParams& p) {
  require_resonant_pump(p, "ats_position");
  require_positive_nu(p);
  if (!(p.eps1 > 0.0))
    throw Error(Errc::InvalidParameter, "ats_position requires eps1 > 0");
  const double r = (p.gamma1 / p.eps1) * (p.gamma1 / p.eps1);
  const double ratio = p.eps2 / p.eps1;
  const double inner = std::sqrt(1.0 + 2.0 * r + ratio * ratio * p.gamma1 / p.nu);
  const double radicand = inner - p.gamma_l / p.gamma1 - r;
  if (radicand < 0.0)
    throw Error(Errc::NegativeRadicand,
                "ATS position radicand is negative (regime breakdown)");
  return p.eps1 * std::sqrt(radicand);
}

double critical_eps2(const SystemParams& p) {
  require_positive_nu(p);
  if (!(p.eps1 > 0.0))
    throw Error(Errc::InvalidParameter, "critical_eps2 requires eps1 > 0");
  const double r = (p.gamma1 / p.eps1) * (p.gamma1 / p.eps1);
  const double inner =
      (2.0 + r) * (6.0 + 3.0 * r + 2.0 * std::sqrt(9.0 + 10.0 * r + 2.0 * r * r));
  return p.eps1 * std::sqrt(inner * p.nu / p.gamma1);
}

double critical_eps2_strong(const SystemParams& p) {
  require_positive_nu(p);
  return p.eps1 * std::sqrt(24.0) * std::sqrt(p.nu / p.gamma1);
}

CicDecomposition cic_decomposition(const SystemParams& p) {
  require_resonant_pump(p, "cic_decomposition");
  require_positive_nu(p);
  const double g1 = p.gamma1;
  const double e1sq = p.eps1 * p.eps1;
  const double C = 2.0 * e1sq + g1 * g1;

  CicDecomposition d;
  d.baseline = e1sq / C;
  d.w_broad = std::sqrt(2.0 * (e1sq + g1 * g1));
  d.w_narrow = std::sqrt(e1sq * p.eps2 * p.eps2 * g1 / (C * p.nu));
  d.amp_broad = e1sq;
  d.amp_narrow = d.baseline * d.w_narrow * d.w_narrow;
  d.width_ratio = std::sqrt(6.0) * p.eps2 / critical_eps2(p);
  return d;
}

}  // namespace vsys
