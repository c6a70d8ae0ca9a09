#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "vsys/closedform.hpp"
#include "vsys/poleatlas.hpp"

using namespace vsys;

namespace {

using Cplx = std::complex<double>;

SystemParams indium(double eps1, double eps2, double delta1 = 0.0) {
  SystemParams p;
  p.nu = 2.28e-6;
  p.gamma_l = 1e-4;
  p.eps1 = eps1;
  p.eps2 = eps2;
  p.delta1 = delta1;
  return p;
}

// Greedy best-permutation distance between a root set and a reference set.
double match_distance(const std::vector<Cplx>& roots, std::vector<Cplx> ref) {
  double worst = 0.0;
  for (const Cplx& r : roots) {
    auto best = std::min_element(ref.begin(), ref.end(), [&](Cplx a, Cplx b) {
      return std::abs(r - a) < std::abs(r - b);
    });
    worst = std::max(worst, std::abs(r - *best));
    ref.erase(best);
  }
  return worst;
}

std::vector<Cplx> quadruplet(const LambdaPair& lp) {
  return {lp.lambda1, -lp.lambda1, lp.lambda2, -lp.lambda2};
}

double poly_eval(const std::array<double, 5>& c, Cplx z, double* max_coeff = nullptr) {
  Cplx v = 0.0;
  double m = 0.0;
  for (double ck : c) {
    v = v * z + ck;
    m = std::max(m, std::abs(ck));
  }
  if (max_coeff) *max_coeff = m;
  return std::abs(v);
}

}  // namespace

TEST_CASE("lasers off: the quartic factors into the two free coherence blocks") {
  SystemParams p;
  p.nu = 1e-3;
  p.gamma_l = 1e-2;
  p.delta1 = 0.8;
  const auto c = denominator_poly(p);

  // ((d2 - d1)^2 + (g1+nu)^2) * (d2^2 + (nu+gl)^2), expanded monic
  const double w12 = 1.0 + p.nu;      // pump-probe coherence damping
  const double w23 = p.nu + p.gamma_l;  // clock coherence damping
  const double q2[3] = {1.0, -2.0 * p.delta1, p.delta1 * p.delta1 + w12 * w12};
  const double q3[3] = {1.0, 0.0, w23 * w23};
  double expect[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) expect[i + j] += q2[i] * q3[j];

  for (int k = 0; k < 5; ++k)
    CHECK(c[k] == doctest::Approx(expect[k]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("resonant pump gives an even quartic") {
  SystemParams p = indium(2.0, 0.01);
  const auto c = denominator_poly(p);
  double maxc = 0.0;
  for (double ck : c) maxc = std::max(maxc, std::abs(ck));
  CHECK(std::abs(c[1]) < 1e-10 * maxc);
  CHECK(std::abs(c[3]) < 1e-10 * maxc);
}

TEST_CASE("roots satisfy the polished-residual contract") {
  for (const SystemParams& p :
       {indium(2.0, 0.01), indium(10.0, 1e-3, 7.0), indium(0.8, 0.2, 3.0)}) {
    const PoleSet set = physical_poles(p);
    double maxc = 0.0;
    for (double ck : set.denom_coeffs) maxc = std::max(maxc, std::abs(ck));
    for (const auto& pl : set.poles)
      CHECK(poly_eval(set.denom_coeffs, pl.location) < 1e-9 * maxc);
  }
}

TEST_CASE("no clock drive: every pole cancels against the numerator") {
  SystemParams p = indium(2.0, 0.0);
  const PoleSet set = physical_poles(p);
  CHECK(set.poles.size() == 4);
  CHECK(set.physical().empty());
}

TEST_CASE("resonant pump below the border: poles match the closed-form quadruplet") {
  SystemParams base = indium(2.0, 0.0);
  const double ec = critical_eps2(base);
  for (double fac : {0.3, 0.8, 1.5, 5.0}) {
    SystemParams p = base;
    p.eps2 = fac * ec;
    const PoleSet set = physical_poles(p);
    CHECK(set.physical().size() == 4);

    std::vector<Cplx> roots;
    for (const auto& pl : set.poles) roots.push_back(pl.location);
    const LambdaPair lp = lambdas(p);
    const double scale = std::max(std::abs(lp.lambda1), std::abs(lp.lambda2));
    CHECK(match_distance(roots, quadruplet(lp)) / scale < 1e-3);
  }
}

TEST_CASE("resonant-pump reduction holds for randomized parameters with matching tags") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    SystemParams p;
    p.nu = std::pow(10.0, -7.0 + 1.5 * u(rng));
    p.gamma_l = (u(rng) < 0.3) ? 0.0 : 1e-4 * std::pow(10.0, u(rng) - 0.5);
    p.eps1 = 0.8 + 3.2 * u(rng);
    const double ec = critical_eps2(p);
    // stay clear of the border so the tags are unambiguous
    const double fac = (u(rng) < 0.5) ? 0.2 + 0.6 * u(rng) : 1.25 + 2.75 * u(rng);
    p.eps2 = fac * ec;

    const PoleSet set = physical_poles(p);
    const LambdaPair lp = lambdas(p);
    std::vector<Cplx> roots;
    double max_re = 0.0, scale = 0.0;
    for (const auto& pl : set.poles) {
      roots.push_back(pl.location);
      max_re = std::max(max_re, std::abs(pl.location.real()));
      scale = std::max(scale, std::abs(pl.location));
    }
    CAPTURE(p.eps1);
    CAPTURE(p.eps2);
    CAPTURE(p.nu);
    CHECK(match_distance(roots, quadruplet(lp)) / scale < 2e-3);

    const bool poles_cic = max_re < 1e-5 * scale;
    CHECK(poles_cic == (lp.regime.tag == RegimeTag::Cic));
  }
}

TEST_CASE("off-resonant split regime: unequal shifts and widths") {
  SystemParams p = indium(10.0, 1e-3, 7.0);
  const PoleSet set = physical_poles(p);
  std::vector<Cplx> upper;
  for (const auto& pl : set.physical())
    if (pl.location.imag() > 0.0) upper.push_back(pl.location);
  REQUIRE(upper.size() == 2);
  std::sort(upper.begin(), upper.end(),
            [](Cplx a, Cplx b) { return a.real() < b.real(); });
  CHECK(upper[0].real() < 0.0);
  CHECK(upper[1].real() > 0.0);
  CHECK(std::abs(upper[0].real()) != doctest::Approx(std::abs(upper[1].real())).epsilon(0.01));
  CHECK(std::abs(upper[0].imag()) != doctest::Approx(std::abs(upper[1].imag())).epsilon(0.01));
}

TEST_CASE("off-resonant line-center regime: the sharp resonance follows the pump") {
  for (double d1 : {3.0, 7.0}) {
    SystemParams p = indium(0.8, 0.2, d1);
    const PoleSet set = physical_poles(p);
    std::vector<Cplx> upper;
    for (const auto& pl : set.physical())
      if (pl.location.imag() > 0.0) upper.push_back(pl.location);
    REQUIRE(upper.size() == 2);
    std::sort(upper.begin(), upper.end(),
              [](Cplx a, Cplx b) { return a.imag() < b.imag(); });
    CHECK(upper[0].real() > 0.0);  // blue-shifted for positive pump detuning
  }
  SystemParams m = indium(0.8, 0.2, -3.0);
  const PoleSet set = physical_poles(m);
  std::vector<Cplx> upper;
  for (const auto& pl : set.physical())
    if (pl.location.imag() > 0.0) upper.push_back(pl.location);
  std::sort(upper.begin(), upper.end(), [](Cplx a, Cplx b) { return a.imag() < b.imag(); });
  CHECK(upper[0].real() < 0.0);  // red-shifted for negative pump detuning
}

TEST_CASE("track: a single-point sweep reduces to physical_poles") {
  SystemParams p = indium(2.0, 0.01);
  SweepSpec sweep;
  sweep.variable = SweepSpec::Variable::Eps2;
  sweep.grid = {0.01};
  const TrackResult tr = track(p, sweep);
  REQUIRE(tr.sets.size() == 1);
  const PoleSet direct = physical_poles(p);
  for (int j = 0; j < 4; ++j) {
    double best = 1e300;
    for (int k = 0; k < 4; ++k)
      best = std::min(best, std::abs(tr.sets[0].poles[j].location - direct.poles[k].location));
    CHECK(best == 0.0);
  }
}

TEST_CASE("track: continuation keeps trajectories smooth through the border") {
  SystemParams p = indium(2.0, 0.0);
  const double ec = critical_eps2(p);
  SweepSpec sweep;
  sweep.variable = SweepSpec::Variable::Eps2;
  sweep.grid.clear();
  for (int i = 0; i < 60; ++i)
    sweep.grid.push_back(ec * (0.5 * std::pow(4.0, i / 59.0)));  // 0.5 ec .. 2 ec
  const TrackResult tr = track(p, sweep);
  REQUIRE(tr.sets.size() == 60);

  // real parts collapse and imaginary moduli split as the border is crossed
  int flip = -1;
  for (size_t i = 0; i < tr.sets.size(); ++i) {
    double max_re = 0.0, scale = 0.0;
    for (const auto& pl : tr.sets[i].poles) {
      max_re = std::max(max_re, std::abs(pl.location.real()));
      scale = std::max(scale, std::abs(pl.location));
    }
    const bool cic_like = max_re < 1e-8 * std::max(scale, 1.0);
    if (cic_like && flip < 0) flip = static_cast<int>(i);
    if (!cic_like && flip >= 0) FAIL("regime flipped back after the transition");
  }
  REQUIRE(flip > 0);
  CHECK(sweep.grid[flip - 1] <= ec * 1.0000001);
  CHECK(sweep.grid[flip] >= ec * 0.98);
}

TEST_CASE("track: sweeping the pump detuning narrows the broad resonance") {
  SystemParams p = indium(0.8, 0.2);
  SweepSpec sweep;
  sweep.variable = SweepSpec::Variable::Delta1;
  sweep.grid.clear();
  for (int i = 0; i <= 28; ++i) sweep.grid.push_back(i * 0.25);  // 0 .. 7
  const TrackResult tr = track(p, sweep);

  std::vector<double> broad_im;
  for (const auto& set : tr.sets) {
    double widest = 0.0;
    for (const auto& pl : set.physical())
      widest = std::max(widest, std::abs(pl.location.imag()));
    broad_im.push_back(widest);
  }
  for (size_t i = 1; i < broad_im.size(); ++i) CHECK(broad_im[i] < broad_im[i - 1]);
}

TEST_CASE("track warns about under-resolved sweeps") {
  SystemParams p = indium(0.8, 0.2);
  SweepSpec sweep;
  sweep.variable = SweepSpec::Variable::Delta1;
  sweep.grid = {0.0, 0.05, 0.1, 7.0};  // last step is wildly coarser
  const TrackResult tr = track(p, sweep);
  CHECK(!tr.warnings.empty());
}

TEST_CASE("track validates its grid") {
  SystemParams p = indium(2.0, 0.01);
  SweepSpec sweep;
  sweep.variable = SweepSpec::Variable::Eps2;
  CHECK_THROWS_AS(track(p, sweep), Error);
  sweep.grid = {0.2, 0.1};
  CHECK_THROWS_AS(track(p, sweep), Error);
}
