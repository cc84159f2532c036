#include <cmath>

#include <gtest/gtest.h>

#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/qmath.hpp"
#include "oracles.hpp"

using namespace msqkd;

namespace {

constexpr int R = kReflect;

ObservedStats relabel_bits(const ObservedStats& s) {
  ObservedStats out;
  auto flip = [](int x) { return x == R ? R : 1 - x; };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.joint[i][j] = s.joint[1 - i][1 - j];
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) out.msg[x][y] = s.msg[flip(x)][flip(y)];
  return out;
}

// Attack whose four key branches sit in orthogonal ancilla directions.
AttackModel orthogonal_attack() {
  AttackModel a;
  a.eve_dim = 4;
  a.alphas = {std::sqrt(0.4), std::sqrt(0.1), std::sqrt(0.1), std::sqrt(0.4)};
  for (int ij = 0; ij < 4; ++ij)
    for (int m = 0; m < 4; ++m) {
      a.vectors[ij][m] = qmath::Vector::Zero(4);
      if (m == ij) a.vectors[ij][m](ij) = 1.0;
    }
  return a;
}

}  // namespace

TEST(Constraints, HonestNoiseless) {
  const auto c = assemble_constraints(predict_depolarization(0, 0));
  const std::array<double, 4> s{0.5, -0.5, 0.0, 0.0};
  for (int m = 0; m < 4; ++m) {
    EXPECT_NEAR(c.s[m], s[m], 1e-12);
    EXPECT_NEAR(c.cs_0110[m], 0.0, 1e-12);
  }
  EXPECT_NEAR(c.cs_0011[0], 0.5, 1e-12);
}

TEST(Constraints, FullyMixedKillsCrossTerms) {
  const auto c = assemble_constraints(predict_depolarization(0.5, 0.5));
  for (int m = 0; m < 4; ++m) {
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(c.r_i0i1[k][m], 0.0, 1e-12);
      EXPECT_NEAR(c.r_0j1j[k][m], 0.0, 1e-12);
    }
    EXPECT_NEAR(c.s[m], 0.0, 1e-12);
  }
}

TEST(Constraints, PointOneValues) {
  const auto c = assemble_constraints(predict_depolarization(0.1, 0.1));
  const std::array<double, 4> s{0.32, -0.32, 0.0, 0.0};
  const std::array<double, 4> cs0011{0.405, 0.405, 0.045, 0.045};
  const std::array<double, 4> cs0110{0.005, 0.005, 0.045, 0.045};
  for (int m = 0; m < 4; ++m) {
    EXPECT_NEAR(c.s[m], s[m], 1e-12);
    EXPECT_NEAR(c.cs_0011[m], cs0011[m], 1e-12);
    EXPECT_NEAR(c.cs_0110[m], cs0110[m], 1e-12);
  }
}

TEST(Constraints, MatchAttackInnerProducts) {
  RoundStream rng(1, 0);
  for (int t = 0; t < 50; ++t) {
    const auto a = AttackModel::random(rng, 1 + t % 4);
    const auto c = assemble_constraints(predict_from_attack(a));
    const auto truth = oracle::true_splits(a);
    for (int m = 0; m < 4; ++m) {
      const double r0110 = 2 * a.alpha(0, 1) * a.alpha(1, 0) * a.e(0, 1, m).dot(a.e(1, 0, m)).real();
      EXPECT_NEAR(c.s[m], truth[m] + r0110, 1e-9);
      for (int i = 0; i < 2; ++i) {
        const double r = 2 * a.alpha(i, 0) * a.alpha(i, 1) * a.e(i, 0, m).dot(a.e(i, 1, m)).real();
        EXPECT_NEAR(c.r_i0i1[i][m], r, 1e-9);
      }
      EXPECT_GE(truth[m], c.lower(m) - 1e-9);
      EXPECT_LE(truth[m], c.upper(m) + 1e-9);
    }
  }
}

TEST(Constraints, InfeasibleRejected) {
  auto s = predict_depolarization(0.1, 0.1);
  // Push the both-Reflect row far from anything a state could produce.
  s.msg[R][R] = {0.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(assemble_constraints(s), Error);
  try {
    assemble_constraints(s);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleStats);
  }
}

TEST(Constraints, MissingCellsNamed) {
  auto s = predict_depolarization(0.1, 0.1);
  s.msg[R][R][0].reset();
  s.msg[0][R][3].reset();
  try {
    assemble_constraints(s);
    FAIL() << "expected MissingCellsError";
  } catch (const MissingCellsError& e) {
    EXPECT_EQ(e.cells(), (std::vector<std::string>{"Pm_0R_3", "Pm_RR_0"}));
    EXPECT_EQ(e.code(), ErrorCode::MissingCells);
  }
}

TEST(Constraints, ZeroProbabilityConditionsNotNeeded) {
  auto s = predict_depolarization(0, 0);
  s.msg[0][1] = {};
  s.msg[1][0] = {};
  EXPECT_NO_THROW(assemble_constraints(s));
}

TEST(BoundTerm, Cases) {
  EXPECT_NEAR(bound_term(0.25, 0.25, 0.5), 0.5, 1e-12);   // E = F
  EXPECT_NEAR(bound_term(0.25, 0.25, 0.0), 0.0, 1e-12);   // orthogonal
  EXPECT_EQ(bound_term(0.0, 0.0, 0.0), 0.0);
  const double e = 0.3, f = 0.1, x = 0.2;
  const double lambda = 0.5 * (1 + std::sqrt((e - f) * (e - f) + x * x) / (e + f));
  EXPECT_NEAR(bound_term(e, f, x), (e + f) * (qmath::binary_entropy(e / (e + f)) - qmath::binary_entropy(lambda)), 1e-15);
  // lambda clamps at the Cauchy-Schwarz edge instead of leaving [1/2, 1]
  EXPECT_NEAR(bound_term(0.25, 0.25, 0.5 + 1e-13), 0.5, 1e-9);
}

TEST(EntropyBound, HonestNoiselessAtForcedSplits) {
  const auto s = predict_depolarization(0, 0);
  EXPECT_NEAR(entropy_bound(s, {0.5, -0.5, 0.0, 0.0}), 1.0, 1e-12);
}

TEST(EntropyBound, NeverExceedsOracleAtTrueSplits) {
  RoundStream rng(2, 0);
  for (int t = 0; t < 100; ++t) {
    const auto a = AttackModel::random(rng, 1 + t % 4);
    EXPECT_LE(entropy_bound(predict_from_attack(a), oracle::true_splits(a)), oracle::h_ae(a) + 1e-9);
  }
}

TEST(Minimize, HonestNoiseless) {
  const auto s = predict_depolarization(0, 0);
  const auto r = minimize_entropy(s, assemble_constraints(s));
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_NEAR(r.splits[0], 0.5, 1e-9);
  EXPECT_NEAR(r.splits[1], -0.5, 1e-9);
}

TEST(Minimize, CollapsedIntervalUsesForcedValue) {
  const auto s = predict_depolarization(0.0, 0.2);
  const auto c = assemble_constraints(s);
  const auto r = minimize_entropy(s, c);
  for (int m = 0; m < 4; ++m)
    if (c.cs_0110[m] == 0.0) EXPECT_NEAR(r.splits[m], c.s[m], 1e-9);
  EXPECT_NEAR(r.value, entropy_bound(s, c, r.splits), 1e-12);
}

TEST(Minimize, NoWorseThanDenseScan) {
  RoundStream rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    const auto s = predict_depolarization(0.3 * rng.uniform(), 0.3 * rng.uniform());
    const auto c = assemble_constraints(s);
    EXPECT_LE(minimize_entropy(s, c).value, oracle::scan_minimum(s, c, 20000) + 1e-9);
  }
}

TEST(Minimize, BelowBoundAtTrueSplits) {
  RoundStream rng(4, 0);
  for (int t = 0; t < 100; ++t) {
    const auto a = AttackModel::random(rng, 1 + t % 4);
    const auto s = predict_from_attack(a);
    EXPECT_LE(minimize_entropy(s, assemble_constraints(s)).value, entropy_bound(s, oracle::true_splits(a)) + 1e-9);
  }
}

TEST(ConditionalEntropy, SymmetricPointOne) {
  const auto s = predict_depolarization(0.1, 0.1);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::NoFlip), 0.4689955935892812, 1e-12);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::Flip), conditional_entropy_ab(s, Mode::NoFlip), 1e-12);
}

TEST(ConditionalEntropy, FlipUndoesForwardNoise) {
  const auto s = predict_depolarization(0.1, 0.0);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::Flip), 0.0, 1e-12);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::NoFlip), qmath::binary_entropy(0.1), 1e-12);
  const auto k = key_distribution(s, Mode::Flip);
  EXPECT_NEAR(k[0][1], 0.0, 1e-15);
  EXPECT_NEAR(k[1][0], 0.0, 1e-15);
}

TEST(ConditionalEntropy, ReverseNoiseOnlyFavoursNoFlip) {
  const auto s = predict_depolarization(0.0, 0.1);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::NoFlip), 0.0, 1e-12);
  EXPECT_NEAR(conditional_entropy_ab(s, Mode::Flip), qmath::binary_entropy(0.1), 1e-12);
}

TEST(ConditionalEntropy, SymmetricDiagonalModesAgree) {
  for (int k = 0; k <= 50; ++k) {
    const auto s = predict_depolarization(0.01 * k, 0.01 * k);
    EXPECT_NEAR(conditional_entropy_ab(s, Mode::Flip), conditional_entropy_ab(s, Mode::NoFlip), 1e-12);
  }
}

TEST(KeyRate, Noiseless) {
  const auto r = key_rate(predict_depolarization(0, 0));
  EXPECT_NEAR(r.rate_noflip, 1.0, 1e-6);
  EXPECT_NEAR(r.rate_flip, 1.0, 1e-6);
  EXPECT_EQ(r.chosen_mode, Mode::NoFlip);
}

TEST(KeyRate, FullyMixedIsNotPositive) {
  const auto r = key_rate(predict_depolarization(0.5, 0.5));
  EXPECT_LE(r.best_rate(), 1e-12);
}

TEST(KeyRate, ForwardNoiseChoosesFlip) {
  const auto r = key_rate(predict_depolarization(0.1, 0.0));
  EXPECT_EQ(r.chosen_mode, Mode::Flip);
  EXPECT_GT(r.rate_flip, r.rate_noflip);
}

TEST(KeyRate, ReportInvariants) {
  RoundStream rng(5, 0);
  for (int t = 0; t < 40; ++t) {
    const auto s = predict_depolarization(0.3 * rng.uniform(), 0.3 * rng.uniform());
    const auto r = key_rate(s);
    EXPECT_NEAR(r.rate_noflip, r.h_ae_lower - r.h_ab_noflip, 1e-12);
    EXPECT_NEAR(r.rate_flip, r.h_ae_lower - r.h_ab_flip, 1e-12);
    double expect = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 4; ++m) expect += s.p(i, j) * s.pm(i, j, m);
    double nf = 0.0, f = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        nf += r.p_key_noflip[a][b];
        f += r.p_key_flip[a][b];
      }
    EXPECT_NEAR(nf, expect, 1e-9);
    EXPECT_NEAR(f, expect, 1e-9);
    EXPECT_GE(r.best_rate(), std::max(r.rate_flip, r.rate_noflip) - 1e-12);
  }
}

TEST(KeyRate, RelabelingSymmetry) {
  RoundStream rng(6, 0);
  for (int t = 0; t < 30; ++t) {
    const auto s = predict_from_attack(AttackModel::random(rng, 2 + t % 3));
    const auto a = key_rate(s);
    const auto b = key_rate(relabel_bits(s));
    EXPECT_NEAR(a.rate_noflip, b.rate_noflip, 1e-9);
    EXPECT_NEAR(a.rate_flip, b.rate_flip, 1e-9);
  }
}

TEST(KeyRate, MonotoneOnSymmetricDiagonal) {
  double previous = 2.0;
  for (int k = 0; k <= 20; ++k) {
    const double rate = key_rate(predict_depolarization(0.005 * k, 0.005 * k)).best_rate();
    EXPECT_LE(rate, previous + 1e-12) << "q=" << 0.005 * k;
    previous = rate;
  }
}

TEST(KeyRate, PropagatesInfeasible) {
  auto s = predict_depolarization(0.1, 0.1);
  s.msg[R][R] = {0.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(key_rate(s), Error);
}

TEST(Oracle, HonestNoiselessIsOne) {
  EXPECT_NEAR(exact_entropy_oracle(AttackModel::honest()), 1.0, 1e-12);
  EXPECT_NEAR(oracle::h_ae(AttackModel::honest()), 1.0, 1e-12);
}

TEST(Oracle, OrthogonalBranchesGiveZero) {
  const auto a = orthogonal_attack();
  ASSERT_NO_THROW(a.validate());
  EXPECT_NEAR(exact_entropy_oracle(a), 0.0, 1e-12);
}

TEST(Oracle, AgreesWithBlockComputation) {
  RoundStream rng(7, 0);
  for (int t = 0; t < 50; ++t) {
    const auto a = AttackModel::random(rng, 1 + t % 5);
    EXPECT_NEAR(exact_entropy_oracle(a), oracle::h_ae(a), 1e-9);
  }
}

TEST(Oracle, Soundness) {
  RoundStream rng(8, 0);
  for (int t = 0; t < 100; ++t) {
    const auto a = AttackModel::random(rng, 1 + t % 4);
    const auto s = predict_from_attack(a);
    EXPECT_LE(minimize_entropy(s, assemble_constraints(s)).value, exact_entropy_oracle(a) + 1e-9);
  }
}

TEST(Oracle, RejectsInvalidAttack) {
  auto a = AttackModel::honest();
  a.alphas[0] = 2.0;
  EXPECT_THROW(exact_entropy_oracle(a), Error);
}
