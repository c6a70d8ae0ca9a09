#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>

#include "vsys/closedform.hpp"
#include "vsys/master.hpp"

using namespace vsys;

namespace {

SystemParams resonant(double eps1, double eps2, double nu, double gamma_l = 0.0) {
  SystemParams p;
  p.eps1 = eps1;
  p.eps2 = eps2;
  p.nu = nu;
  p.gamma_l = gamma_l;
  return p;
}

// Sign-bisection on b^2 between 0.5 and 2 times a bracket guess; independent
// route to the critical clock power.
double critical_eps2_bisection(SystemParams p, double guess) {
  double lo = 0.5 * guess, hi = 2.0 * guess;
  SystemParams q = p;
  q.eps2 = lo;
  REQUIRE(ab(q).b_squared < 0.0);
  q.eps2 = hi;
  REQUIRE(ab(q).b_squared > 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    q.eps2 = mid;
    (ab(q).b_squared < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("eta pair: limits and the exact product identity") {
  // vanishing gamma1 (evaluated un-normalized; the formulas are homogeneous)
  SystemParams tiny;
  tiny.gamma1 = 1e-9;
  tiny.eps1 = 1.0;
  tiny.nu = 1e-6;
  auto [h1, h2] = eta_pair(tiny);
  CHECK(h1 == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(std::abs(h2) < 1e-8 * h1);

  // no pump
  SystemParams off;
  off.nu = 1e-6;
  std::tie(h1, h2) = eta_pair(off);
  CHECK(h1 == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h2 == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-15));

  // eps1 = gamma1 = 1
  std::tie(h1, h2) = eta_pair(resonant(1.0, 0.0, 1e-6));
  CHECK(h1 == doctest::Approx(9.0 + 2.0 * std::sqrt(21.0)).epsilon(1e-15));
  CHECK(h2 == doctest::Approx(9.0 - 2.0 * std::sqrt(21.0)).epsilon(1e-15));

  // eta1*eta2 = gamma1^4 - 4 eps1^2 gamma1^2 for any drive
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int i = 0; i < 40; ++i) {
    const double e1 = u(rng);
    auto [a1, a2] = eta_pair(resonant(e1, 0.0, 1e-6));
    CHECK(a1 * a2 == doctest::Approx(1.0 - 4.0 * e1 * e1).epsilon(1e-10));
  }
}

TEST_CASE("ab: sign structure at zero clock power and across the border") {
  // eps2 = 0 collapses b^2 to eta1*eta2/4, negative for eps1 = 2
  const AbResult r0 = ab(resonant(2.0, 0.0, 1e-5));
  CHECK(r0.b_squared == doctest::Approx(-3.75).epsilon(1e-10));

  // sign change happens at the closed-form border to 1e-9 relative
  SystemParams p = resonant(2.0, 0.0, 1e-5);
  const double ec = critical_eps2(p);
  const double bisected = critical_eps2_bisection(p, ec);
  CHECK(std::abs(bisected - ec) / ec < 1e-9);

  // well into the line-center side
  SystemParams cic = resonant(2.0, 10.0 * ec, 1e-5);
  CHECK(ab(cic).b_squared > 0.0);
}

TEST_CASE("lambdas: split-resonance side is a conjugate pair near the position formula") {
  SystemParams p = resonant(2.0, 1e-3, 1e-5);
  const LambdaPair lp = lambdas(p);
  CHECK(lp.regime.tag == RegimeTag::Ats);
  CHECK(std::abs(lp.lambda1 - std::conj(lp.lambda2)) < 1e-12);
  CHECK(lp.lambda0 >= 0.0);
  CHECK(lp.gamma0 >= 0.0);
  // the approximate position formula carries O((gamma1/eps1)^2) error;
  // at eps1 = 2 the measured gap is ~2.3%
  CHECK(std::abs(lp.lambda0 - ats_position(p)) / lp.lambda0 < 0.03);
}

TEST_CASE("lambdas: line-center side is purely imaginary with distinct moduli") {
  SystemParams p = resonant(2.0, 0.1, 1e-5);
  const double ec = critical_eps2(p);
  REQUIRE(p.eps2 > ec);
  const LambdaPair lp = lambdas(p);
  CHECK(lp.regime.tag == RegimeTag::Cic);
  CHECK(std::abs(lp.lambda1.real()) < 1e-12);
  CHECK(std::abs(lp.lambda2.real()) < 1e-12);
  CHECK(std::abs(std::abs(lp.lambda1) - std::abs(lp.lambda2)) > 1e-6);
}

TEST_CASE("lambdas: a +- b stays negative over the line-center grid") {
  SystemParams p = resonant(2.0, 0.0, 1e-5);
  const double ec = critical_eps2(p);
  for (int i = 1; i <= 100; ++i) {
    SystemParams q = p;
    q.eps2 = ec * (1.0 + 9.0 * i / 100.0);  // (ec, 10 ec]
    const AbResult r = ab(q);
    REQUIRE(r.b_squared > 0.0);
    const double b = std::sqrt(r.b_squared);
    CHECK(r.a + b < 0.0);
    CHECK(r.a - b < 0.0);
  }
}

TEST_CASE("rho11_closed: baseline limits") {
  SystemParams p = resonant(2.0, 0.0, 1e-5);
  const double baseline = 4.0 / 9.0;
  for (double d2 : {0.0, 0.3, 2.0, 50.0})
    CHECK(rho11_closed(p, d2) == doctest::Approx(baseline).epsilon(1e-12));

  SystemParams q = resonant(2.0, 0.05, 1e-5);
  CHECK(rho11_closed(q, 1e7) == doctest::Approx(baseline).epsilon(1e-6));
}

TEST_CASE("rho11_closed rejects off-resonant pump") {
  SystemParams p = resonant(2.0, 0.05, 1e-5);
  p.delta1 = 0.5;
  CHECK_THROWS_AS(rho11_closed(p, 0.0), Error);
}

TEST_CASE("closed-form accuracy degrades gracefully at a factor-10 hierarchy") {
  // the tightest rate ordering still admitted at factor 10
  SystemParams p = resonant(1.0, 0.1, 0.01, 0.1);
  REQUIRE(check_limit_hierarchy(p, 10.0).empty());
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double d2 = -10.0 + 20.0 * i / 199.0;
    SystemParams q = p;
    q.delta2 = d2;
    const double num = steady_state(build_generator(q)).rho11();
    worst = std::max(worst, std::abs(rho11_closed(p, d2) - num) / num);
  }
  CHECK(worst < 0.10);
}

TEST_CASE("rho11_closed tracks the numeric solver at an indium-like point") {
  SystemParams p = resonant(2.0, 0.03, 2.28e-6, 1e-4);
  double worst = 0.0;
  for (int i = 0; i < 240; ++i) {
    const double d2 = -6.0 + 12.0 * i / 239.0;
    SystemParams q = p;
    q.delta2 = d2;
    const double num = steady_state(build_generator(q)).rho11();
    worst = std::max(worst, std::abs(rho11_closed(p, d2) - num) / num);
  }
  CHECK(worst < 0.02);
}

TEST_CASE("factored lineshapes match the direct evaluation in both regimes") {
  // split-resonance factorization [(d2-l0)^2+G0^2][(d2+l0)^2+G0^2]
  SystemParams ats = resonant(2.0, 5e-3, 2.28e-6);
  const LambdaPair la = lambdas(ats);
  REQUIRE(la.regime.tag == RegimeTag::Ats);
  const double C = 2.0 * ats.eps1 * ats.eps1 + 1.0;
  const double B = ats.eps1 * ats.eps1 / C;
  const double K = ats.eps1 * ats.eps1 * ats.eps2 * ats.eps2 / (C * ats.nu);
  for (int i = 0; i < 100; ++i) {
    const double d2 = -8.0 + 16.0 * i / 99.0;
    const double den = ((d2 - la.lambda0) * (d2 - la.lambda0) + la.gamma0 * la.gamma0) *
                       ((d2 + la.lambda0) * (d2 + la.lambda0) + la.gamma0 * la.gamma0);
    const double factored = B * (1.0 - K * (d2 * d2 + 1.0) / den);
    CHECK(rho11_closed(ats, d2) == doctest::Approx(factored).epsilon(1e-10));
  }

  // line-center factorization (d2^2+|l1|^2)(d2^2+|l2|^2)
  SystemParams cic = resonant(2.0, 0.1, 2.28e-6);
  const LambdaPair lc = lambdas(cic);
  REQUIRE(lc.regime.tag == RegimeTag::Cic);
  const double Kc = cic.eps1 * cic.eps1 * cic.eps2 * cic.eps2 / (C * cic.nu);
  for (int i = 0; i < 100; ++i) {
    const double d2 = -8.0 + 16.0 * i / 99.0;
    const double den = (d2 * d2 + std::norm(lc.lambda1)) * (d2 * d2 + std::norm(lc.lambda2));
    const double factored = B * (1.0 - Kc * (d2 * d2 + 1.0) / den);
    CHECK(rho11_closed(cic, d2) == doctest::Approx(factored).epsilon(1e-10));
  }
}

TEST_CASE("rho11_closed is bit-identical under the clock laser linewidth") {
  for (double d2 : {0.0, 0.7, 3.3}) {
    SystemParams p = resonant(2.0, 0.05, 1e-5, 0.0);
    const double base = rho11_closed(p, d2);
    for (double gl : {1e-4, 1e-2}) {
      p.gamma_l = gl;
      const double v = rho11_closed(p, d2);
      CHECK(std::memcmp(&base, &v, sizeof(double)) == 0);
    }
  }
}

TEST_CASE("ats_position: strong-pump limit and pinned working point") {
  SystemParams strong = resonant(1000.0, 0.0, 1e-6);
  CHECK(ats_position(strong) == doctest::Approx(1000.0).epsilon(1e-4));

  SystemParams pinned = resonant(10.0, 1e-3, 2.28e-6);
  CHECK(ats_position(pinned) == doctest::Approx(10.010592094483128).epsilon(1e-12));

  // gamma_l enters this formula although the full lineshape is gamma_l-free
  SystemParams gl = pinned;
  gl.gamma_l = 1e-4;
  CHECK(ats_position(gl) == doctest::Approx(10.010092611066497).epsilon(1e-12));
  CHECK(ats_position(gl) != ats_position(pinned));

  SystemParams broken = resonant(1.0, 0.0, 1.0, 3.0);
  CHECK_THROWS_AS(ats_position(broken), Error);
}

TEST_CASE("critical_eps2: pinned value, scaling, and the strong-pump law") {
  SystemParams p = resonant(2.0, 0.0, 1e-5);
  CHECK(critical_eps2(p) == doctest::Approx(0.03494593218622682).epsilon(1e-12));

  // scales as sqrt(nu)
  SystemParams p4 = p;
  p4.nu = 4e-5;
  CHECK(critical_eps2(p4) / critical_eps2(p) == doctest::Approx(2.0).epsilon(1e-12));

  // strong-pump law: direct arithmetic and exact linearity in eps1
  SystemParams s = resonant(100.0, 0.0, 1e-5);
  CHECK(critical_eps2_strong(s) == doctest::Approx(1.5491933384829666).epsilon(1e-12));
  SystemParams s2 = resonant(200.0, 0.0, 1e-5);
  CHECK(critical_eps2_strong(s2) == doctest::Approx(2.0 * critical_eps2_strong(s)).epsilon(1e-15));

  // agreement improves towards the limit
  CHECK(critical_eps2_strong(s) == doctest::Approx(critical_eps2(s)).epsilon(0.01));
  SystemParams s3 = resonant(1000.0, 0.0, 1e-5);
  CHECK(critical_eps2_strong(s3) == doctest::Approx(critical_eps2(s3)).epsilon(1e-3));
}

TEST_CASE("regime dichotomy around the border, bisection-verified") {
  for (double nu : {1e-3, 1e-5}) {
    for (int i = 0; i < 10; ++i) {
      const double eps1 = 0.1 * std::pow(1000.0, i / 9.0);  // 0.1 .. 100
      SystemParams p = resonant(eps1, 0.0, nu);
      const double ec = critical_eps2(p);
      const double bisected = critical_eps2_bisection(p, ec);
      CHECK(std::abs(bisected - ec) / ec < 1e-9);
      for (int k = 0; k < 8; ++k) {
        SystemParams below = p, above = p;
        below.eps2 = ec * (0.55 + 0.44 * k / 7.0);
        above.eps2 = ec * (2.0 - 0.99 * k / 7.0);
        CHECK(lambdas(below).regime.tag == RegimeTag::Ats);
        CHECK(lambdas(above).regime.tag == RegimeTag::Cic);
      }
    }
  }
}

TEST_CASE("cic_decomposition: term structure and widths") {
  SystemParams p = resonant(2.0, 0.1, 1e-5);
  const CicDecomposition d = cic_decomposition(p);
  CHECK(d.baseline == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  for (double d2 : {0.0, 1.0, 10.0, 300.0}) {
    CHECK(d.broad_lorentzian(d2) > 0.0);
    CHECK(d.narrow_lorentzian(d2) < 0.0);
  }

  // the negative term broadens linearly with the clock drive
  SystemParams p2 = p;
  p2.eps2 = 2.0 * p.eps2;
  CHECK(cic_decomposition(p2).w_narrow ==
        doctest::Approx(2.0 * d.w_narrow).epsilon(1e-14));

  p.delta1 = 1.0;
  CHECK_THROWS_AS(cic_decomposition(p), Error);
}

TEST_CASE("cic_decomposition sums to the closed form at line center") {
  for (double eps1 : {5.0, 10.0}) {
    SystemParams p = resonant(eps1, 0.0, 2.28e-6);
    const double ec = critical_eps2(p);
    for (double fac : {3.0, 5.0, 10.0}) {
      p.eps2 = fac * ec;
      const CicDecomposition d = cic_decomposition(p);
      const double closed = rho11_closed(p, 0.0);
      CHECK(std::abs(d.sum(0.0) - closed) / closed < 0.01);
    }
  }
}
