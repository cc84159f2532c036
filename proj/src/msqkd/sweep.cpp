#include "msqkd/sweep.hpp"

#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/parallel.hpp"
#include "msqkd/stats.hpp"

namespace msqkd {

void SweepConfig::validate() const {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be at least 1");
  require(q_max >= 0.0, ErrorCode::InvalidArgument, "q_max must be non-negative");
  require(forward_multiplier >= 0.0 && reverse_multiplier >= 0.0, ErrorCode::InvalidArgument,
          "multipliers must be non-negative");
  require(q_max * forward_multiplier <= 0.5 && q_max * reverse_multiplier <= 0.5, ErrorCode::InvalidArgument,
          "q_max times a multiplier exceeds 0.5");
}

SweepRow evaluate_point(double q, double forward_multiplier, double reverse_multiplier) {
  SweepRow row;
  row.q = q;
  row.qf = q * forward_multiplier;
  row.qr = q * reverse_multiplier;
  const KeyRateReport rep = key_rate(predict_depolarization(row.qf, row.qr));
  row.h_ae = rep.h_ae_lower;
  row.h_ab_noflip = rep.h_ab_noflip;
  row.h_ab_flip = rep.h_ab_flip;
  row.rate_noflip = rep.rate_noflip;
  row.rate_flip = rep.rate_flip;
  row.rate_best = rep.best_rate();
  row.mode = rep.chosen_mode;
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows(cfg.steps + 1);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double q = cfg.q_max * static_cast<double>(k) / static_cast<double>(cfg.steps);
      rows[k] = evaluate_point(q, cfg.forward_multiplier, cfg.reverse_multiplier);
    }
  });
  return rows;
}

double find_zero_rate_threshold(double forward_multiplier, double reverse_multiplier, double lo,
                                double hi, double tol) {
  require(lo < hi && tol > 0.0, ErrorCode::InvalidArgument, "threshold search needs lo < hi and tol > 0");
  auto rate = [&](double q) { return evaluate_point(q, forward_multiplier, reverse_multiplier).rate_best; };
  require(rate(lo) > 0.0 && rate(hi) <= 0.0, ErrorCode::InvalidArgument,
          "rate does not change sign on the search interval");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (rate(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace msqkd
