#include "vsys/poleatlas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vsys/master.hpp"

namespace vsys {

namespace {

using Cplx = std::complex<double>;
using Matrix8c = Eigen::Matrix<Cplx, 8, 8>;

// Generator matrix continued to complex probe detuning; only the four
// coherence rows carry delta2.
Matrix8c generator_at(const SystemParams& p, Cplx d2) {
  SystemParams q = p;
  q.delta2 = 0.0;
  const AffineGenerator g = build_generator(q);
  Matrix8c A = g.A.cast<Cplx>();
  A(kReRho12, kImRho12) -= d2;
  A(kImRho12, kReRho12) += d2;
  A(kReRho23, kImRho23) += d2;
  A(kImRho23, kReRho23) -= d2;
  return A;
}

// Cramer numerator for rho11: column kRho11 replaced by -c.
Cplx numerator_at(const SystemParams& p, Cplx d2) {
  SystemParams q = p;
  q.delta2 = 0.0;
  const AffineGenerator g = build_generator(q);
  Matrix8c A = generator_at(p, d2);
  A.col(kRho11) = (-g.c).cast<Cplx>();
  return A.determinant();
}

double fit_span(const SystemParams& p) { return std::max(10.0, 3.0 * p.eps1); }

std::array<double, 6> fit_nodes(double span) {
  // Roots of the degree-5 Chebyshev polynomial plus one held-out node.
  std::array<double, 6> x{};
  for (int k = 1; k <= 5; ++k)
    x[k - 1] = span * std::cos((2.0 * k - 1.0) / 10.0 * M_PI);
  x[5] = span * std::cos(M_PI / 5.0);
  return x;
}

struct RawFit {
  std::array<double, 5> coeffs;  // descending powers, un-normalized
  double scale;                  // max |det| over the evaluation nodes
};

RawFit fit_determinant(const SystemParams& p) {
  const double span = fit_span(p);
  const auto nodes = fit_nodes(span);

  std::array<double, 6> dets{};
  for (int i = 0; i < 6; ++i) {
    SystemParams q = p;
    q.delta2 = nodes[i];
    dets[i] = build_generator(q).A.determinant();
  }

  Eigen::Matrix<double, 5, 5> V;
  Eigen::Matrix<double, 5, 1> rhs;
  for (int i = 0; i < 5; ++i) {
    double pw = 1.0;
    for (int j = 4; j >= 0; --j) {
      V(i, j) = pw;
      pw *= nodes[i];
    }
    rhs(i) = dets[i];
  }
  const Eigen::Matrix<double, 5, 1> coef = V.partialPivLu().solve(rhs);

  double scale = 0.0;
  for (double d : dets) scale = std::max(scale, std::abs(d));
  if (!(scale > 0.0))
    throw Error(Errc::IllConditionedFit, "determinant vanished at every fit node");

  // Held-out node guards the degree-4 assumption and the conditioning.
  double fitted = 0.0;
  for (int j = 0; j < 5; ++j) fitted = fitted * nodes[5] + coef(j);
  if (std::abs(fitted - dets[5]) > 1e-8 * scale)
    throw Error(Errc::IllConditionedFit, "held-out node deviates from the quartic fit");

  RawFit out;
  for (int j = 0; j < 5; ++j) out.coeffs[j] = coef(j);
  out.scale = scale;
  return out;
}

Cplx poly_eval(const std::array<double, 5>& c, Cplx z) {
  Cplx v = 0.0;
  for (double ck : c) v = v * z + ck;
  return v;
}

Cplx poly_deriv_eval(const std::array<double, 5>& c, Cplx z) {
  Cplx v = 0.0;
  for (int j = 0; j < 4; ++j) v = v * z + (4.0 - j) * c[j];
  return v;
}

std::array<Cplx, 4> quartic_roots(const std::array<double, 5>& monic) {
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  for (int j = 0; j < 4; ++j) comp(j, 3) = -monic[4 - j];
  Eigen::EigenSolver<Eigen::Matrix4d> es(comp, /*computeEigenvectors=*/false);

  std::array<Cplx, 4> roots;
  for (int j = 0; j < 4; ++j) {
    Cplx z = es.eigenvalues()(j);
    for (int it = 0; it < 3; ++it) {
      const Cplx dp = poly_deriv_eval(monic, z);
      if (std::abs(dp) == 0.0) break;  // collided root, companion value stands
      z -= poly_eval(monic, z) / dp;
    }
    roots[j] = z;
  }
  return roots;
}

}  // namespace poleatlas detail

std::array<double, 5> denominator_poly(const SystemParams& p) {
  const RawFit fit = fit_determinant(p);
  const double lead = fit.coeffs[0];
  if (!(std::abs(lead) > 0.0))
    throw Error(Errc::IllConditionedFit, "quartic leading coefficient vanished");
  std::array<double, 5> monic;
  for (int j = 0; j < 5; ++j) monic[j] = fit.coeffs[j] / lead;
  return monic;
}

PoleSet physical_poles(const SystemParams& p, double cancel_threshold) {
  const RawFit fit = fit_determinant(p);
  const double lead = fit.coeffs[0];
  if (!(std::abs(lead) > 0.0))
    throw Error(Errc::IllConditionedFit, "quartic leading coefficient vanished");

  PoleSet set;
  set.denom_scale = lead;
  for (int j = 0; j < 5; ++j) set.denom_coeffs[j] = fit.coeffs[j] / lead;

  const auto roots = quartic_roots(set.denom_coeffs);

  // rho11 as a rational function of complex delta2, with the fitted quartic
  // as denominator so the poles sit exactly at the computed roots.
  auto rho11_at = [&](Cplx z) -> Cplx {
    return numerator_at(p, z) / (lead * poly_eval(set.denom_coeffs, z));
  };

  // Reference amplitude on the real axis for the cancellation threshold.
  double amp = 0.0;
  for (double node : fit_nodes(fit_span(p))) {
    const Cplx v = rho11_at(Cplx(node, 0.0));
    if (std::isfinite(std::abs(v))) amp = std::max(amp, std::abs(v));
  }

  for (const Cplx& root : roots) {
    // Contour quadrature around the root: residue = mean of f(z)(z - root)
    // over a small circle.
    const double radius = 1e-3 * std::abs(root) + 1e-6;
    constexpr int kCirclePoints = 16;
    Cplx resid = 0.0;
    for (int k = 0; k < kCirclePoints; ++k) {
      const double th = 2.0 * M_PI * k / kCirclePoints;
      const Cplx dz = radius * Cplx(std::cos(th), std::sin(th));
      resid += rho11_at(root + dz) * dz;
    }
    resid /= static_cast<double>(kCirclePoints);

    Pole pole;
    pole.location = root;
    pole.residue = resid;
    pole.cancelled = std::abs(resid) < cancel_threshold * amp;
    set.poles.push_back(pole);
  }
  return set;
}

TrackResult track(const SystemParams& p, const SweepSpec& sweep) {
  if (sweep.grid.empty())
    throw Error(Errc::BadInput, "sweep grid is empty");
  if (!std::is_sorted(sweep.grid.begin(), sweep.grid.end()))
    throw Error(Errc::BadInput, "sweep grid must be sorted");

  TrackResult result;
  result.sets.reserve(sweep.grid.size());
  for (double value : sweep.grid) {
    SystemParams q = p;
    if (sweep.variable == SweepSpec::Variable::Eps2)
      q.eps2 = value;
    else
      q.delta1 = value;
    result.sets.push_back(physical_poles(q));
  }

  // Continuation: permute each step's poles to minimize the total complex
  // displacement from the previous step.
  double prev_disp = -1.0;
  for (size_t i = 1; i < result.sets.size(); ++i) {
    auto& cur = result.sets[i].poles;
    const auto& prev = result.sets[i - 1].poles;

    std::array<int, 4> idx = {0, 1, 2, 3};
    std::array<int, 4> best = idx;
    double best_disp = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
      double disp = 0.0;
      for (int j = 0; j < 4; ++j) disp += std::abs(cur[idx[j]].location - prev[j].location);
      if (disp < best_disp) {
        best_disp = disp;
        best = idx;
      }
    } while (std::next_permutation(idx.begin(), idx.end()));

    std::vector<Pole> reordered(4);
    for (int j = 0; j < 4; ++j) reordered[j] = cur[best[j]];
    cur = reordered;

    double scale = 0.0;
    for (const auto& pl : cur) scale = std::max(scale, std::abs(pl.location));

    if (prev_disp >= 0.0 && best_disp > 10.0 * std::max(prev_disp, 1e-12 * scale)) {
      result.warnings.push_back("trajectory jump at sweep index " + std::to_string(i) +
                                " (displacement " + std::to_string(best_disp) +
                                "); refine the grid");
    }
    // Near-degenerate roots make the pairing arbitrary (labels exchange at
    // the critical collision).
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (std::abs(cur[a].location - cur[b].location) < 1e-6 * scale) {
          result.warnings.push_back("poles nearly degenerate at sweep index " +
                                    std::to_string(i) + "; pairing is arbitrary");
          a = b = 4;
        }
    prev_disp = best_disp;
  }
  return result;
}

}  // namespace vsys
