#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "vsys/params.hpp"

namespace vsys {

// Pole machinery for arbitrary pump detuning: det A(delta2) is a quartic in
// delta2 (the detuning enters four rows affinely), its complex zeros are the
// poles of rho11(delta2). Residues separate genuine poles from zeros shared
// with the Cramer numerator.

struct Pole {
  std::complex<double> location;  // delta2-plane position, units of gamma1
  std::complex<double> residue;   // weight in rho11(delta2)
  bool cancelled = false;         // |residue| below the cancellation threshold
};

struct PoleSet {
  std::vector<Pole> poles;              // all quartic roots, flagged
  std::array<double, 5> denom_coeffs{}; // monic, descending powers of delta2
  double denom_scale = 1.0;             // leading coefficient before normalization

  std::vector<Pole> physical() const {
    std::vector<Pole> out;
    for (const auto& p : poles)
      if (!p.cancelled) out.push_back(p);
    return out;
  }
};

struct SweepSpec {
  enum class Variable { Eps2, Delta1 };
  Variable variable = Variable::Eps2;
  std::vector<double> grid;  // sorted, nonempty
};

struct TrackResult {
  std::vector<PoleSet> sets;          // one per grid point, pole order continued
  std::vector<std::string> warnings;  // trajectory jumps / degenerate collisions
};

// Coefficients (descending powers, normalized monic) of det A(delta2),
// recovered by evaluating the determinant at 5 Chebyshev-spaced nodes on
// [-max(10, 3 eps1), +same] and solving the Vandermonde system. A held-out
// 6th node guards the fit; deviation beyond 1e-8 relative throws
// IllConditionedFit.
std::array<double, 5> denominator_poly(const SystemParams& p);

// Quartic roots via companion-matrix eigenvalues with Newton polish;
// residues by contour quadrature on a small circle around each root,
// evaluating the Cramer numerator over the fitted denominator. Roots whose
// |residue| falls below threshold * (peak spectral amplitude) are tagged
// cancelled.
PoleSet physical_poles(const SystemParams& p, double cancel_threshold = 1e-10);

// Sweep eps2 or delta1 over a grid, matching poles between adjacent points
// by the permutation minimizing total complex displacement. Warns when the
// minimal displacement jumps by more than 10x the previous step (missed
// crossing) and when roots collide (pairing arbitrary at the transition).
TrackResult track(const SystemParams& p, const SweepSpec& sweep);

}  // namespace vsys
