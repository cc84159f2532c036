#include <gtest/gtest.h>

#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/sweep.hpp"

using namespace msqkd;

TEST(Sweep, GridHasStepsPlusOnePoints) {
  SweepConfig cfg;
  cfg.q_max = 0.1;
  cfg.steps = 10;
  cfg.reverse_multiplier = 2.0;
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 11u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_DOUBLE_EQ(rows[k].q, 0.1 * double(k) / 10.0);
    EXPECT_DOUBLE_EQ(rows[k].qf, rows[k].q);
    EXPECT_DOUBLE_EQ(rows[k].qr, 2.0 * rows[k].q);
  }
}

TEST(Sweep, RowsMatchKeyRate) {
  SweepConfig cfg;
  cfg.steps = 6;
  for (const auto& row : run_sweep(cfg)) {
    const auto r = key_rate(predict_depolarization(row.qf, row.qr));
    EXPECT_EQ(row.h_ae, r.h_ae_lower);
    EXPECT_EQ(row.rate_noflip, r.rate_noflip);
    EXPECT_EQ(row.rate_flip, r.rate_flip);
    EXPECT_EQ(row.rate_best, r.best_rate());
    EXPECT_EQ(row.mode, r.chosen_mode);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeRows) {
  SweepConfig a;
  a.steps = 12;
  a.forward_multiplier = 1.5;
  SweepConfig b = a;
  b.threads = 4;
  const auto ra = run_sweep(a), rb = run_sweep(b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k].rate_best, rb[k].rate_best);
    EXPECT_EQ(ra[k].h_ae, rb[k].h_ae);
  }
}

TEST(Sweep, RejectsBadConfig) {
  SweepConfig cfg;
  cfg.steps = 0;
  EXPECT_THROW(run_sweep(cfg), Error);
  cfg.steps = 5;
  cfg.q_max = 0.3;
  cfg.forward_multiplier = 2.0;
  EXPECT_THROW(run_sweep(cfg), Error);
  cfg.q_max = -0.1;
  EXPECT_THROW(run_sweep(cfg), Error);
}

TEST(Threshold, SymmetricChannel) {
  EXPECT_NEAR(find_zero_rate_threshold(1, 1, 0.0, 0.25), 0.0917663574, 1e-10);
  const double q = find_zero_rate_threshold(1, 1, 0.0, 0.25, 1e-9);
  EXPECT_NEAR(q, 0.0917663574, 1e-4);
  EXPECT_GT(evaluate_point(q - 1e-5, 1, 1).rate_best, 0.0);
  EXPECT_LE(evaluate_point(q + 1e-5, 1, 1).rate_best, 0.0);
}

TEST(Threshold, AsymmetricIsLowerAndMirrored) {
  const double sym = find_zero_rate_threshold(1, 1, 0.0, 0.25);
  const double fwd = find_zero_rate_threshold(2, 1, 0.0, 0.25);
  const double rev = find_zero_rate_threshold(1, 2, 0.0, 0.25);
  EXPECT_LT(fwd, sym);
  EXPECT_NEAR(fwd, rev, 2e-4);
}

TEST(Threshold, RequiresSignChange) {
  EXPECT_THROW(find_zero_rate_threshold(1, 1, 0.0, 0.05), Error);
  EXPECT_THROW(find_zero_rate_threshold(1, 1, 0.1, 0.05), Error);
}
