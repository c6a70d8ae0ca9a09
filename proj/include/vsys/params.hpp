#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vsys/errors.hpp"

namespace vsys {

// Laser-driven V-system: ground state |3> coupled to a fast-decaying upper
// state |1> (cooling transition, half decay rate gamma1) and to a highly
// metastable upper state |2> (clock transition, half decay rate nu).
// All quantities are angular frequencies expressed in units of gamma1;
// after normalize() the gamma1 field is identically 1.
struct SystemParams {
  double gamma1 = 1.0;  // half decay rate of |1>, the frequency unit
  double nu = 0.0;      // half decay rate of |2>
  double gamma_l = 0.0; // clock laser linewidth
  double eps1 = 0.0;    // Rabi frequency of the cooling laser, real >= 0
  double eps2 = 0.0;    // Rabi frequency of the clock laser, real >= 0
  double delta1 = 0.0;  // cooling laser detuning
  double delta2 = 0.0;  // clock laser detuning (the scan variable)
};

using StateVec = Eigen::Matrix<double, 8, 1>;

// Component order of the reduced Bloch vector. rho33 is eliminated through
// the trace constraint and rho21/rho31/rho32 through hermiticity, leaving
// 8 real unknowns.
enum StateIndex : int {
  kRho11 = 0,
  kRho22,
  kReRho12,
  kImRho12,
  kReRho13,
  kImRho13,
  kReRho23,
  kImRho23,
};

struct BlochState {
  StateVec x = StateVec::Zero();

  double rho11() const { return x[kRho11]; }
  double rho22() const { return x[kRho22]; }
  double rho33() const { return 1.0 - x[kRho11] - x[kRho22]; }

  // Population bounds; coherence magnitudes are checked through the
  // eigenvalues of the reconstructed matrix where needed.
  bool populations_physical(double tol = 1e-9) const {
    return x[kRho11] >= -tol && x[kRho22] >= -tol &&
           x[kRho11] <= 1.0 + tol && x[kRho22] <= 1.0 + tol &&
           x[kRho11] + x[kRho22] <= 1.0 + tol;
  }
};

enum class RegimeTag { Ats, Cic, Critical };

inline const char* to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::Ats: return "ATS";
    case RegimeTag::Cic: return "CIC";
    case RegimeTag::Critical: return "Critical";
  }
  return "?";
}

// The sign of b^2 decides the spectral regime: b^2 < 0 gives a split pair
// of resonances (ATS), b^2 > 0 two line-center Lorentzians (CIC).
struct Regime {
  RegimeTag tag;
  double b_squared;
};

// |b^2| below this (in gamma1^4-scaled units) is treated as the degenerate
// borderline case.
inline constexpr double kCriticalTol = 1e-12;

// Rescale all rates, Rabi frequencies and detunings so gamma1 == 1.
// Throws NonPositiveRate for gamma1 <= 0 or nu <= 0, InvalidParameter for
// negative gamma_l/eps1/eps2. Idempotent bit-for-bit.
SystemParams normalize(const SystemParams& raw);

// Check the working limit gamma1, eps1 >> gamma_l, eps2 >> nu, with ">>"
// taken as a ratio of at least `factor`. Returns one message per violated
// inequality; never rejects (the numeric solver is valid everywhere, only
// the closed forms degrade). gamma_l == 0 skips the gamma_l >> nu clause,
// since all gamma_l terms then vanish identically.
std::vector<std::string> check_limit_hierarchy(const SystemParams& p, double factor = 10.0);

// Rebuild the full 3x3 density matrix: rho33 from the trace constraint,
// lower triangle by conjugation. Unit trace and hermiticity hold exactly.
Eigen::Matrix3cd reconstruct(const BlochState& s);

}  // namespace vsys
