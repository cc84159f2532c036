#pragma once

// Key-rate curves over the depolarization grid q_k = q_max * k / steps,
// with Q_F = forward_multiplier * q and Q_R = reverse_multiplier * q.

#include <cstddef>
#include <vector>

#include "msqkd/protocol.hpp"

namespace msqkd {

struct SweepConfig {
  double q_max = 0.15;
  std::size_t steps = 30;
  double forward_multiplier = 1.0;
  double reverse_multiplier = 1.0;
  unsigned threads = 1;

  void validate() const;
};

struct SweepRow {
  double q = 0.0;
  double qf = 0.0;
  double qr = 0.0;
  double h_ae = 0.0;
  double h_ab_noflip = 0.0;
  double h_ab_flip = 0.0;
  double rate_noflip = 0.0;
  double rate_flip = 0.0;
  double rate_best = 0.0;
  Mode mode = Mode::NoFlip;
};

SweepRow evaluate_point(double q, double forward_multiplier, double reverse_multiplier);

// steps + 1 rows in grid order.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

// Smallest q in [lo, hi] where the best rate reaches zero, by bisection to
// `tol`. Requires rate(lo) > 0 >= rate(hi).
double find_zero_rate_threshold(double forward_multiplier, double reverse_multiplier, double lo,
                                double hi, double tol = 1e-4);

}  // namespace msqkd
