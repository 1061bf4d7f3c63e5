#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "perzyna/convex_kernel.hpp"

using namespace perzyna;
using doctest::Approx;

namespace {

const MaterialParams kStd = MaterialParams::make(2.0, 1.0, 1.0, 1.0);

bool close(const SymTensor2& a, const SymTensor2& b, double tol) { return norm(a - b) <= tol; }

SymTensor2 rnd(std::mt19937_64& rng, double s) {
  std::uniform_real_distribution<double> u(-s, s);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("material parameters") {
  const auto p = MaterialParams::make(2.0, 1.0, 0.3, 1.0);
  CHECK(p.K0 == 3.0);
  CHECK(p.beta == Approx(1.0 / (1.0 + 1.0 / (2 * 0.09 * 3.0))));
  CHECK(p.a0 == Approx(std::min(p.K0, p.mu)).epsilon(1e-8));
  CHECK(p.Cstar == Approx(std::max({2 * p.K0, 2 * p.mu, 2 * p.beta * (1 + 1 / (2 * 0.09))})).epsilon(1e-8));
  CHECK_FALSE(p.regularity_warning());
  CHECK(MaterialParams::make(1, 1, 1 / std::sqrt(2.0), 1).regularity_warning());

  CHECK_THROWS_AS(MaterialParams::make(1, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(MaterialParams::make(-2, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(MaterialParams::make(1, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(MaterialParams::make(1, 1, 1, -1), std::invalid_argument);
}

TEST_CASE("elasticity and compliance") {
  CHECK(apply_elastic(SymTensor2::zero(), kStd) == SymTensor2::zero());
  CHECK(apply_elastic(SymTensor2::identity(), kStd) == 6.0 * SymTensor2::identity());
  CHECK(apply_elastic(SymTensor2::offdiag(1), kStd) == SymTensor2::offdiag(2));
  CHECK(apply_compliance(SymTensor2::zero(), kStd) == SymTensor2::zero());
  CHECK(close(apply_compliance(SymTensor2::identity(), kStd), SymTensor2::identity() / 6.0, 1e-15));

  std::mt19937_64 rng(3);
  const double c0 = std::min(2 * kStd.K0, 2 * kStd.mu), c1 = std::max(2 * kStd.K0, 2 * kStd.mu);
  for (int i = 0; i < 1000; ++i) {
    const SymTensor2 e = rnd(rng, 10);
    CHECK(close(apply_compliance(apply_elastic(e, kStd), kStd), e, 1e-12 * norm(e)));
    const double q = inner(apply_elastic(e, kStd), e);
    CHECK(q >= c0 * norm2(e) * (1 - 1e-12));
    CHECK(q <= c1 * norm2(e) * (1 + 1e-12));
  }
  CHECK((elastic_map(kStd) * compliance_map(kStd)).isIdentity(1e-14));
}

TEST_CASE("yield gap") {
  CHECK(yield_gap(SymTensor2::zero(), kStd) == -1.0);
  CHECK(yield_gap(SymTensor2::identity(), kStd) == 1.0);
  CHECK(yield_gap(0.5 * SymTensor2::identity(), kStd) == 0.0);
}

TEST_CASE("projection examples and cases") {
  const SymTensor2 inside{0.1, -0.2, 0.05};
  CHECK(project_K(inside, kStd).proj == inside);
  CHECK(project_K(inside, kStd).kind == ProjectionCase::interior);

  const auto apex = project_K(SymTensor2::identity(), kStd);
  CHECK(apex.kind == ProjectionCase::apex);
  CHECK(close(apex.proj, 0.5 * SymTensor2::identity(), 1e-15));
  CHECK(close(apex.proj, oracle::project_dual_ascent(SymTensor2::identity(), kStd), 1e-8));

  const auto lat = project_K(SymTensor2::offdiag(2), kStd);
  CHECK(lat.kind == ProjectionCase::lateral);
  CHECK(close(lat.proj, oracle::project_dual_ascent(SymTensor2::offdiag(2), kStd), 1e-8));
}

TEST_CASE("projection against the dual-ascent oracle") {
  std::mt19937_64 rng(11);
  for (double alpha : {0.1, 0.5, 1.0 / std::sqrt(2.0), 2.0}) {
    const auto p = MaterialParams::make(1.0, 1.5, alpha, 0.7);
    for (int i = 0; i < 300; ++i) {
      const SymTensor2 s = rnd(rng, 5);
      CHECK(close(project_K(s, p).proj, oracle::project_dual_ascent(s, p), 1e-8 * (1 + norm(s))));
    }
  }
}

TEST_CASE("projection Jacobian") {
  CHECK(dproject_K(SymTensor2{0.1, 0, 0}, kStd).isIdentity(0));
  CHECK(dproject_K(3.0 * SymTensor2::identity(), kStd).isZero(0));

  std::mt19937_64 rng(5);
  int checked = 0;
  for (int i = 0; i < 2000 && checked < 300; ++i) {
    const SymTensor2 s = rnd(rng, 3);
    if (project_K(s, kStd).kind != ProjectionCase::lateral) continue;
    const double h = 1e-6;
    bool same = true;
    TensorMap fd;
    for (int c = 0; c < 3; ++c) {
      SymTensor2 dir;
      (c == 0 ? dir.xx : c == 1 ? dir.yy : dir.xy) = 1.0;
      for (double f : {-1e3 * h, 1e3 * h}) same = same && project_K(s + f * dir, kStd).kind == ProjectionCase::lateral;
      fd.col(c) = ((project_K(s + h * dir, kStd).proj - project_K(s - h * dir, kStd).proj) / (2 * h)).vec();
    }
    if (!same) continue;
    ++checked;
    const TensorMap j = dproject_K(s, kStd);
    CHECK((fd - j).cwiseAbs().maxCoeff() <= 1e-5 * j.cwiseAbs().maxCoeff());
  }
  CHECK(checked > 100);
}

TEST_CASE("support function") {
  const auto p = MaterialParams::make(1.0, 1.0, 0.5, 1.0);
  CHECK(support_H(SymTensor2::zero(), p).value() == 0.0);
  CHECK(support_H(SymTensor2::identity(), p).value() == Approx(2.0));
  CHECK(support_H(SymTensor2::diag(1, -1), p).is_infinite());
  CHECK(support_H(SymTensor2{1, 1, 1e-9}, p).is_finite());
  // slack widens the membership test only
  const SymTensor2 edge{1.0, 1.0, std::sqrt(2.0) * (1.0 + 1e-9)};
  CHECK(support_H(edge, p).is_infinite());
  CHECK(support_H(edge, p, 1e-6).is_finite());

  // dense sample of K
  double best = -1e300;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double d = 2.0 * j / 40;
      const double t = (p.kappa - d) / p.alpha - 0.01 * i;
      const double th = 2 * M_PI * i / 400;
      const SymTensor2 s = 0.5 * t * SymTensor2::identity() +
                           d * SymTensor2{std::cos(th) / std::sqrt(2.0), -std::cos(th) / std::sqrt(2.0),
                                          std::sin(th) / std::sqrt(2.0)};
      best = std::max(best, inner(s, SymTensor2::identity()));
    }
  }
  CHECK(best == Approx(2.0).epsilon(1e-3));
}

TEST_CASE("Perzyna conjugate") {
  const ConjugateEval in = perzyna_conjugate(SymTensor2{0.1, 0, 0}, 0.1, kStd);
  CHECK(in.value == 0.0);
  CHECK(in.grad == SymTensor2::zero());

  const ConjugateEval c = perzyna_conjugate(SymTensor2::identity(), 0.1, kStd);
  CHECK(close(c.grad, 5.0 * SymTensor2::identity(), 1e-12));
  CHECK(c.value == Approx(2.5));
  CHECK(perzyna_conjugate(SymTensor2::identity(), 0.2, kStd).value == Approx(c.value / 2));
  CHECK_THROWS_AS(perzyna_conjugate(SymTensor2::identity(), 0.0, kStd), std::invalid_argument);
}

TEST_CASE("reduced potential") {
  const auto p = MaterialParams::make(2.0, 1.0, 0.3, 1.0);
  const GEval z = g_eval(SymTensor2::zero(), p);
  CHECK(z.value == 0.0);
  CHECK(z.grad == SymTensor2::zero());
  CHECK(z.branch == GBranch::elastic);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const SymTensor2 xi = rnd(rng, 2.0);
    const GEval g = g_eval(xi, p);
    CHECK(g.value == Approx(oracle::g_inf_convolution(xi, p)).epsilon(1e-7));
    CHECK(yield_gap(g.grad, p) <= 1e-10);
    CHECK(std::abs(g.value + 0.5 * inner(apply_compliance(g.grad, p), g.grad) - inner(xi, g.grad)) <=
          1e-10 * (1 + norm(xi) * norm(g.grad)));
  }
}

TEST_CASE("region classification and G") {
  const auto p = MaterialParams::make(2.0, 1.0, 0.3, 1.0);
  CHECK(classify_region(-1.0 * SymTensor2::identity(), p) == RegionTag::A1);
  CHECK(classify_region(SymTensor2::identity(), p) == RegionTag::A2);
  CHECK(classify_region(SymTensor2::zero(), p) == RegionTag::A2);
  CHECK(classify_region(SymTensor2::diag(1, -1), p) == RegionTag::A3);

  const SymTensor2 apex = p.kappa / (2 * p.alpha) * SymTensor2::identity();
  CHECK(close(G_map(SymTensor2::zero(), p), apex, 1e-14));
  CHECK(close(G_map(SymTensor2{2.0, 1.5, 0.1}, p), apex, 1e-14));

  std::mt19937_64 rng(19);
  int a1 = 0;
  while (a1 < 100) {
    const SymTensor2 xi = rnd(rng, 3.0);
    if (classify_region(xi, p) != RegionTag::A1) continue;
    ++a1;
    const SymTensor2 expect = apex + p.K0 * xi.trace() * SymTensor2::identity() + 2 * p.mu * xi.deviator();
    CHECK(close(G_map(xi, p), expect, 1e-12 * (1 + norm(expect))));
    CHECK(close(G_map(xi, p), g_eval(xi + g_shift(p) * SymTensor2::identity(), p).grad, 1e-12 * (1 + norm(expect))));
    CHECK(close(calG(xi, SymTensor2::identity(), p), 2 * p.K0 * SymTensor2::identity(), 1e-12));
  }
  CHECK(calG(SymTensor2::identity(), SymTensor2{1, 2, 3}, p) == SymTensor2::zero());
}

TEST_CASE("calG matches finite differences in the plastic region") {
  const auto p = MaterialParams::make(2.0, 1.0, 0.3, 1.0);
  std::mt19937_64 rng(23);
  int n = 0;
  while (n < 200) {
    const SymTensor2 xi = rnd(rng, 3.0), eta = rnd(rng, 1.0);
    if (classify_region(xi, p) != RegionTag::A3) continue;
    const double h = 1e-6;
    if (classify_region(xi + 1e3 * h * eta, p) != RegionTag::A3 || classify_region(xi - 1e3 * h * eta, p) != RegionTag::A3)
      continue;
    ++n;
    const SymTensor2 fd = (G_map(xi + h * eta, p) - G_map(xi - h * eta, p)) / (2 * h);
    const SymTensor2 cg = calG(xi, eta, p);
    CHECK(norm(fd - cg) <= 1e-4 * std::max(norm(cg), 1e-8));
    CHECK(close(apply(calG_map(xi, p), eta), cg, 1e-13 * (1 + norm(cg))));
  }
}
