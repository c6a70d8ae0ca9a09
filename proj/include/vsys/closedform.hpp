#pragma once

#include <complex>

#include "vsys/params.hpp"

namespace vsys {

// Analytical steady-state results for resonant pumping (delta1 = 0) in the
// limit gamma1, eps1 >> gamma_l, eps2 >> nu. The excited-state population
// factorizes as
//
//   rho11(d2) = B * (1 - K (d2^2 + g1^2) / ((d2^2 - l1^2)(d2^2 - l2^2)))
//
// with B = e1^2/(2 e1^2 + g1^2), K = e1^2 e2^2 g1 / ((2 e1^2 + g1^2) nu)
// and denominator zeros l1,2 = sqrt(a +- b). gamma_l does not appear.

struct AbResult {
  double a;          // always real
  double b_squared;  // signed; the regime is read off its sign
};

// Denominator zeros plus regime classification. In the ATS regime the pair
// is complex conjugate, lambda1 = conj(lambda2) = lambda0 + i Gamma0, and
// lambda0/gamma0 hold the resonance position and half width. In the CIC
// regime both values are purely imaginary with moduli |lambda1| <= |lambda2|
// ordering not imposed.
struct LambdaPair {
  std::complex<double> lambda1;
  std::complex<double> lambda2;
  double a = 0.0;
  double b_squared = 0.0;
  Regime regime{RegimeTag::Critical, 0.0};
  // Valid when regime.tag == Ats; both non-negative by branch choice.
  double lambda0 = 0.0;
  double gamma0 = 0.0;
};

// Three-term line-center decomposition of rho11 in the CIC regime,
// obtained from the nu -> 0 limit:
//   rho11(d2) ~= baseline + broad_lorentzian(d2) + narrow_lorentzian(d2)
// The second term is positive for all d2, the third negative. Despite the
// field names (which follow the widths at the border), for eps2 well above
// the critical value the third term is the *broader* of the two: its width
// grows linearly with the clock Rabi frequency.
struct CicDecomposition {
  double baseline;     // e1^2/(2 e1^2 + g1^2); also the d2 -> inf limit
  double w_broad;      // sqrt(2 (e1^2 + g1^2))
  double w_narrow;     // sqrt(e1^2 e2^2 g1 / ((2 e1^2 + g1^2) nu))
  double amp_broad;    // e1^2
  double amp_narrow;   // baseline * w_narrow^2 (applied with negative sign)
  double width_ratio;  // sqrt(6) * eps2 / eps2_c, the large-eps1 estimate

  double broad_lorentzian(double d2) const {
    return amp_broad / (d2 * d2 + w_broad * w_broad);
  }
  double narrow_lorentzian(double d2) const {
    return -amp_narrow / (d2 * d2 + w_narrow * w_narrow);
  }
  double sum(double d2) const {
    return baseline + broad_lorentzian(d2) + narrow_lorentzian(d2);
  }
};

// eta1 >= eta2; eta1*eta2 == g1^2 (g1^2 - 4 e1^2) identically.
std::pair<double, double> eta_pair(const SystemParams& p);

AbResult ab(const SystemParams& p);

LambdaPair lambdas(const SystemParams& p, double critical_tol = kCriticalTol);

// Evaluate the closed-form rho11 at one probe detuning. Requires delta1 == 0
// (throws WrongBranch otherwise) and nu > 0. Independent of gamma_l by
// construction.
double rho11_closed(const SystemParams& p, double delta2);

// Approximate ATS resonance position
//   lambda0 = e1 sqrt( sqrt(1 + 2 r + (e2/e1)^2 g1/nu) - gamma_l/g1 - r ),
// r = (g1/e1)^2. Note that gamma_l enters here although the full lineshape
// formula is gamma_l-free; both are kept exactly as derived. Throws
// NegativeRadicand when the outer radicand is negative (regime breakdown).
double ats_position(const SystemParams& p);

// Critical clock Rabi frequency separating ATS from CIC (the b = 0 border).
double critical_eps2(const SystemParams& p);

// Strong-saturation (eps1 >> g1) limit of the border: eps1 sqrt(24 nu/g1).
double critical_eps2_strong(const SystemParams& p);

// Requires delta1 == 0 and nu > 0; meaningful in the CIC regime.
CicDecomposition cic_decomposition(const SystemParams& p);

}  // namespace vsys
