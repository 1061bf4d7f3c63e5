#include <random>

#include "doctest.h"
#include "perzyna/tensor2d.hpp"

using namespace perzyna;

TEST_CASE("split of basic tensors") {
  auto [tr, dev] = split(SymTensor2::identity());
  CHECK(tr == 2.0);
  CHECK(dev == SymTensor2::zero());

  auto s2 = split(SymTensor2::diag(1, -1));
  CHECK(s2.tr == 0.0);
  CHECK(s2.dev == SymTensor2::diag(1, -1));

  auto s3 = split(SymTensor2::diag(3, 1));
  CHECK(s3.tr == 4.0);
  CHECK(s3.dev == SymTensor2::diag(1, -1));
}

TEST_CASE("inner product examples") {
  CHECK(inner(SymTensor2::identity(), SymTensor2::identity()) == 2.0);
  CHECK(inner(SymTensor2{1.5, -2, 3}, SymTensor2::zero()) == 0.0);
  CHECK(inner(SymTensor2::offdiag(1), SymTensor2::offdiag(1)) == 2.0);
}

TEST_CASE("random tensors: split identities") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 10000; ++i) {
    const SymTensor2 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const auto [tr, dev] = split(a);
    CHECK(std::abs(dev.trace()) <= 1e-14);
    CHECK(norm(0.5 * tr * SymTensor2::identity() + dev - a) <= 1e-14 * (1 + norm(a)));
    CHECK(std::abs(inner(0.5 * tr * SymTensor2::identity(), b.deviator())) <= 1e-14 * (1 + norm(a) * norm(b)));
    const double lhs = norm2(a), rhs = tr * tr / 2 + norm2(dev);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * lhs);
    CHECK(inner(a, b) == doctest::Approx(inner(b, a)));
    CHECK(norm2(a) >= 0.0);
  }
}

TEST_CASE("vector form and maps") {
  const SymTensor2 a{1, 2, 3};
  CHECK(SymTensor2::from_vec(a.vec()) == a);
  CHECK(a.vec().dot(frobenius_metric() * a.vec()) == inner(a, a));
  CHECK(apply(TensorMap::Identity(), a) == a);
}
