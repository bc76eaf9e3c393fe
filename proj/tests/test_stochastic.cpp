#include <catch_amalgamated.hpp>

#include <cmath>

#include "qcopier/stochastic.hpp"

using namespace qcopier;
using Catch::Matchers::WithinAbs;

namespace {

double channel_diff(const AffineChannel& x, const AffineChannel& y) {
  return std::max((x.m - y.m).cwiseAbs().maxCoeff(), (x.d - y.d).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("copier validation") {
  const Isometry v = canonical_isometry({0.2, 0.9});
  CHECK_THROWS_AS(StochasticCopier({{0.6, v}, {0.6, v}}), ValidationError);
  CHECK_THROWS_AS(StochasticCopier({{-0.1, v}, {1.1, v}}), ValidationError);
  CHECK_THROWS_AS(StochasticCopier(std::vector<CopierBranch>{}), ValidationError);
  CHECK_NOTHROW(StochasticCopier({{0.25, v}, {0.75, v}}));
}

TEST_CASE("averaged_channel of trivial mixtures") {
  std::mt19937_64 rng(1);
  const Isometry v = isometry_from_unitary(random_unitary(4, rng), random_state(2, rng));
  for (const Qubit q : {Qubit::a, Qubit::b}) {
    const AffineChannel one = channel_of_isometry(v, q);
    CHECK(channel_diff(averaged_channel(StochasticCopier::single(v), q), one) < 1e-15);
    CHECK(channel_diff(averaged_channel(StochasticCopier({{0.5, v}, {0.5, v}}), q), one) < 1e-15);
  }
}

TEST_CASE("averaged channel equals density-level mixing") {
  std::mt19937_64 rng(2);
  const Isometry v0 = isometry_from_unitary(random_unitary(4, rng), random_state(2, rng));
  const Isometry v1 = isometry_from_unitary(random_unitary(4, rng), random_state(2, rng));
  const StochasticCopier sc({{0.3, v0}, {0.7, v1}});
  const AffineChannel a = averaged_channel(sc, Qubit::a);
  const AffineChannel b = averaged_channel(sc, Qubit::b);
  for (int k = 0; k < 100; ++k) {
    const COp rho = random_density(rng);
    const Eigen::Vector3d r = density_to_bloch(rho).r;
    const ReducedOutputs mix = mixed_output(sc, rho);
    CHECK((density_to_bloch(mix.rho_a).r - a.apply(r)).norm() <= 1e-10);
    CHECK((density_to_bloch(mix.rho_b).r - b.apply(r)).norm() <= 1e-10);
  }
}

TEST_CASE("centered copier identities") {
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const GammaDelta gd{kPi * i / 8.0, kPi * j / 8.0};
      const StochasticCopier sc = centered_copier(gd, 0.5);
      for (const Qubit q : {Qubit::a, Qubit::b}) {
        const AffineChannel c0 = channel_of_isometry(sc.branches()[0].v, q);
        const AffineChannel c1 = channel_of_isometry(sc.branches()[1].v, q);
        CHECK((c0.m - c1.m).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((c0.d + c1.d).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(averaged_channel(sc, q).d.norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("centered copier at gamma0 = delta0 = pi/4") {
  const StochasticCopier sc = centered_copier({kPi / 4, kPi / 4}, 0.5);
  const double h = std::sqrt(2.0) / 2.0;
  for (const Qubit q : {Qubit::a, Qubit::b}) {
    const AffineChannel ch = averaged_channel(sc, q);
    Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
    expect.diagonal() << h, h, 0.5;
    CHECK((ch.m - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ch.d.norm() < 1e-12);
  }
}

TEST_CASE("centered copier offset scales with 2 p0 - 1") {
  const GammaDelta gd{0.7, 0.4};
  const StochasticCopier full = centered_copier(gd, 1.0);
  for (const Qubit q : {Qubit::a, Qubit::b}) {
    CHECK(channel_diff(averaged_channel(full, q), canonical_channel(gd, q)) < 1e-12);
    for (const double p0 : {0.0, 0.2, 0.5, 0.9}) {
      const AffineChannel ch = averaged_channel(centered_copier(gd, p0), q);
      const Eigen::Vector3d expect = (2.0 * p0 - 1.0) * canonical_channel(gd, q).d;
      CHECK((ch.d - expect).norm() < 1e-12);
    }
  }
}

TEST_CASE("unitary branches match the isometry copier") {
  const GammaDelta gd{1.1, 0.35};
  const UnitaryBranches ub = centered_unitary_branches(gd, 0.3);
  const StochasticCopier a = ub.copier();
  const StochasticCopier b = centered_copier(gd, 0.3);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(equal_up_to_phase(a.branches()[i].v, b.branches()[i].v, 1e-12));
  }
}

TEST_CASE("coin embedding") {
  std::mt19937_64 rng(3);
  SECTION("structure and unitarity") {
    const CoinEmbedding ce = coin_embedding(centered_unitary_branches({0.5, 0.9}, 0.25));
    CHECK(ce.u8.is_unitary(1e-12));
    CHECK_THAT(std::abs(ce.coin_state[0]), WithinAbs(0.5, 1e-15));
    CHECK_THAT(std::abs(ce.coin_state[1]), WithinAbs(std::sqrt(0.75), 1e-15));
  }
  SECTION("identical branches: the coin factors out") {
    const COp u = random_unitary(4, rng);
    const CVec b = random_state(2, rng);
    const CoinEmbedding ce = coin_embedding({{0.4, 0.6}, {u, u}, b});
    const Isometry v = isometry_from_unitary(u, b);
    for (const Qubit q : {Qubit::a, Qubit::b}) {
      CHECK(channel_diff(embedded_channel(ce, q), channel_of_isometry(v, q)) < 1e-12);
    }
  }
  SECTION("reproduces the averaged channel") {
    for (int k = 0; k < 10; ++k) {
      const UnitaryBranches ub{{0.1 * k, 1.0 - 0.1 * k},
                               {random_unitary(4, rng), random_unitary(4, rng)},
                               random_state(2, rng)};
      const CoinEmbedding ce = coin_embedding(ub);
      for (const Qubit q : {Qubit::a, Qubit::b}) {
        CHECK(channel_diff(embedded_channel(ce, q), averaged_channel(ub.copier(), q)) <= 1e-10);
      }
    }
  }
  SECTION("centered branches at p0 = 1/2 give centered outputs") {
    const CoinEmbedding ce = coin_embedding(centered_unitary_branches({0.8, 0.5}, 0.5));
    CHECK(embedded_channel(ce, Qubit::a).d.norm() < 1e-12);
    CHECK(embedded_channel(ce, Qubit::b).d.norm() < 1e-12);
  }
  SECTION("p0 = 1 keeps branch 0") {
    const GammaDelta gd{0.8, 0.5};
    const CoinEmbedding ce = coin_embedding(centered_unitary_branches(gd, 1.0));
    for (const Qubit q : {Qubit::a, Qubit::b}) {
      CHECK(channel_diff(embedded_channel(ce, q), canonical_channel(gd, q)) < 1e-12);
    }
  }
  SECTION("wrong branch count") {
    const COp u = COp::identity(4);
    CHECK_THROWS_AS(coin_embedding({{1.0}, {u}, CVec::basis(2, 0)}), ValidationError);
    CHECK_THROWS_AS(coin_embedding({{0.2, 0.3, 0.5}, {u, u, u}, CVec::basis(2, 0)}),
                    ValidationError);
  }
}

TEST_CASE("sample_branch") {
  const Isometry v = canonical_isometry({0.1, 0.2});
  const StochasticCopier det({{1.0, v}, {0.0, v}});
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(5, i);
    CHECK(sample_branch(det, rng) == 0);
  }

  const StochasticCopier fair({{0.5, v}, {0.5, v}});
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(77, static_cast<std::uint64_t>(i));
    if (sample_branch(fair, rng) == 0) ++zeros;
  }
  const double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(zeros / static_cast<double>(n) - 0.5) < 4 * sigma);

  std::vector<std::size_t> first, second;
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng r1(9, i), r2(9, i);
    first.push_back(sample_branch(fair, r1));
    second.push_back(sample_branch(fair, r2));
  }
  CHECK(first == second);
}

TEST_CASE("counter streams are independent of evaluation order") {
  std::vector<std::uint64_t> forward, backward(100);
  for (std::uint64_t i = 0; i < 100; ++i) forward.push_back(CounterRng(42, i)());
  for (std::uint64_t i = 100; i-- > 0;) backward[i] = CounterRng(42, i)();
  CHECK(forward == backward);
  CHECK(CounterRng(42, 0)() != CounterRng(43, 0)());
  CHECK(CounterRng(42, 0)() != CounterRng(42, 1)());
}
