#include "msqkd/keyrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "msqkd/error.hpp"
#include "msqkd/qmath.hpp"

namespace msqkd {
namespace {

constexpr double kFeasibilitySlack = 1e-9;
constexpr std::size_t kGridPoints = 2001;
constexpr double kSplitTolerance = 1e-9;

// Reads cells on demand, recording every absent one so callers can report
// the full list at once.
class CellReader {
 public:
  explicit CellReader(const ObservedStats& s) : s_(s) {}

  double p(int i, int j) {
    if (const auto& v = s_.joint[i][j]) return *v;
    missing_.push_back(joint_cell_name(i, j));
    return 0.0;
  }

  double pm(int x, int y, int m) {
    if (const auto& v = s_.msg[x][y][m]) return *v;
    missing_.push_back(message_cell_name(x, y, m));
    return 0.0;
  }

  // alpha_ij^2 <e^m_ij|e^m_ij> = P_ij P^m_ij; the message cell is only read
  // when its conditioning event has non-zero probability.
  double weight(int i, int j, int m) {
    const double pij = p(i, j);
    return pij > 0.0 ? pij * pm(i, j, m) : 0.0;
  }

  void throw_if_missing() {
    if (missing_.empty()) return;
    std::sort(missing_.begin(), missing_.end());
    missing_.erase(std::unique(missing_.begin(), missing_.end()), missing_.end());
    throw MissingCellsError(missing_);
  }

 private:
  const ObservedStats& s_;
  std::vector<std::string> missing_;
};

ConstraintSet compute_constraints(const ObservedStats& stats) {
  CellReader read(stats);
  ConstraintSet c;
  for (int m = 0; m < 4; ++m) {
    std::array<std::array<double, 2>, 2> w{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) w[i][j] = read.weight(i, j, m);

    for (int i = 0; i < 2; ++i) {
      const double denom = read.p(i, 0) + read.p(i, 1);
      c.r_i0i1[i][m] = denom > 0.0 ? denom * read.pm(i, kReflect, m) - w[i][0] - w[i][1] : 0.0;
    }
    for (int j = 0; j < 2; ++j) {
      const double denom = read.p(0, j) + read.p(1, j);
      c.r_0j1j[j][m] = denom > 0.0 ? denom * read.pm(kReflect, j, m) - w[0][j] - w[1][j] : 0.0;
    }
    const double diagonal = w[0][0] + w[0][1] + w[1][0] + w[1][1];
    c.s[m] = read.pm(kReflect, kReflect, m) - diagonal - c.r_i0i1[0][m] - c.r_i0i1[1][m] -
             c.r_0j1j[0][m] - c.r_0j1j[1][m];
    c.cs_0011[m] = 2.0 * std::sqrt(w[0][0] * w[1][1]);
    c.cs_0110[m] = 2.0 * std::sqrt(w[0][1] * w[1][0]);
  }
  read.throw_if_missing();
  return c;
}

double raw_lower(const ConstraintSet& c, int m) { return std::max(-c.cs_0011[m], c.s[m] - c.cs_0110[m]); }
double raw_upper(const ConstraintSet& c, int m) { return std::min(c.cs_0011[m], c.s[m] + c.cs_0110[m]); }

struct MessageWeights {
  double w00, w01, w10, w11;
};

MessageWeights message_weights(const ObservedStats& stats, int m) {
  CellReader read(stats);
  MessageWeights w{read.weight(0, 0, m), read.weight(0, 1, m), read.weight(1, 0, m), read.weight(1, 1, m)};
  read.throw_if_missing();
  return w;
}

// Bound contribution of message m at split t.
double message_term(const MessageWeights& w, double s, double t) {
  return bound_term(w.w00, w.w11, t) + bound_term(w.w01, w.w10, s - t);
}

std::pair<double, double> minimize_message(const MessageWeights& w, double s, double lo, double hi) {
  auto f = [&](double t) { return message_term(w, s, t); };
  if (hi - lo <= kSplitTolerance) {
    const double t = 0.5 * (lo + hi);
    return {t, f(t)};
  }

  const double step = (hi - lo) / static_cast<double>(kGridPoints - 1);
  std::size_t best = 0;
  double best_value = f(lo);
  for (std::size_t k = 1; k < kGridPoints; ++k) {
    const double v = f(k + 1 == kGridPoints ? hi : lo + step * static_cast<double>(k));
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  double best_t = best + 1 == kGridPoints ? hi : lo + step * static_cast<double>(best);

  // Golden-section refinement on the neighbouring grid cells.
  double a = std::max(lo, best_t - step);
  double b = std::min(hi, best_t + step);
  const double inv_phi = 1.0 / std::numbers::phi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > kSplitTolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double refined_t = 0.5 * (a + b);
  const double refined = f(refined_t);
  if (refined < best_value) {
    best_value = refined;
    best_t = refined_t;
  }
  return {best_t, best_value};
}

}  // namespace

double ConstraintSet::lower(int m) const {
  const double lo = raw_lower(*this, m);
  const double hi = raw_upper(*this, m);
  return lo <= hi ? lo : 0.5 * (lo + hi);
}

double ConstraintSet::upper(int m) const {
  const double lo = raw_lower(*this, m);
  const double hi = raw_upper(*this, m);
  return lo <= hi ? hi : 0.5 * (lo + hi);
}

ConstraintSet assemble_constraints(const ObservedStats& stats) {
  ConstraintSet c = compute_constraints(stats);

  CellReader read(stats);
  for (int m = 0; m < 4; ++m) {
    for (int i = 0; i < 2; ++i) {
      const double radius = 2.0 * std::sqrt(read.weight(i, 0, m) * read.weight(i, 1, m));
      require(std::abs(c.r_i0i1[i][m]) <= radius + kFeasibilitySlack, ErrorCode::InfeasibleStats,
              "infeasible statistics: R^" + std::to_string(m) + "_" + std::to_string(i) + "0" +
                  std::to_string(i) + "1 exceeds its Cauchy-Schwarz radius");
    }
    for (int j = 0; j < 2; ++j) {
      const double radius = 2.0 * std::sqrt(read.weight(0, j, m) * read.weight(1, j, m));
      require(std::abs(c.r_0j1j[j][m]) <= radius + kFeasibilitySlack, ErrorCode::InfeasibleStats,
              "infeasible statistics: R^" + std::to_string(m) + "_0" + std::to_string(j) + "1" +
                  std::to_string(j) + " exceeds its Cauchy-Schwarz radius");
    }
    require(raw_lower(c, m) <= raw_upper(c, m) + kFeasibilitySlack, ErrorCode::InfeasibleStats,
            "infeasible statistics: empty split interval for message " + std::to_string(m));
  }
  return c;
}

double bound_term(double e_norm, double f_norm, double cross) {
  const double total = e_norm + f_norm;
  if (total <= 0.0) return 0.0;
  const double spread = std::sqrt((e_norm - f_norm) * (e_norm - f_norm) + cross * cross);
  const double lambda = std::clamp(0.5 * (1.0 + spread / total), 0.5, 1.0);
  const double ratio = std::clamp(e_norm / total, 0.0, 1.0);
  return total * (qmath::binary_entropy(ratio) - qmath::binary_entropy(lambda));
}

double entropy_bound(const ObservedStats& stats, const ConstraintSet& cons,
                     const std::array<double, 4>& splits) {
  double total = 0.0;
  for (int m = 0; m < 4; ++m) total += message_term(message_weights(stats, m), cons.s[m], splits[m]);
  return total;
}

double entropy_bound(const ObservedStats& stats, const std::array<double, 4>& splits) {
  return entropy_bound(stats, compute_constraints(stats), splits);
}

EntropyMinimum minimize_entropy(const ObservedStats& stats, const ConstraintSet& cons) {
  EntropyMinimum out;
  for (int m = 0; m < 4; ++m) {
    require(raw_lower(cons, m) <= raw_upper(cons, m) + kFeasibilitySlack, ErrorCode::InfeasibleStats,
            "infeasible statistics: empty split interval for message " + std::to_string(m));
    const auto [t, value] = minimize_message(message_weights(stats, m), cons.s[m], cons.lower(m), cons.upper(m));
    out.splits[m] = t;
    out.per_message[m] = value;
    out.value += value;
  }
  return out;
}

JointTable<double> key_distribution(const ObservedStats& stats, Mode mode) {
  CellReader read(stats);
  JointTable<double> key{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (mode == Mode::NoFlip) {
        for (int m = 0; m < 4; ++m) key[i][j] += read.weight(i, j, m);
      } else {
        // Bob keeps his bit on messages 0/1 and flips it on 2/3.
        key[i][j] += read.weight(i, j, 0) + read.weight(i, j, 1);
        key[i][j] += read.weight(i, 1 - j, 2) + read.weight(i, 1 - j, 3);
      }
    }
  }
  read.throw_if_missing();
  return key;
}

double conditional_entropy_ab(const ObservedStats& stats, Mode mode) {
  const auto key = key_distribution(stats, mode);
  const std::array<double, 4> flat{key[0][0], key[0][1], key[1][0], key[1][1]};
  const double total = flat[0] + flat[1] + flat[2] + flat[3];
  require(total > 0.0, ErrorCode::InvalidArgument, "raw-key distribution is identically zero");
  const double bob_zero = (key[0][0] + key[1][0]) / total;
  return qmath::shannon_entropy(flat) - qmath::binary_entropy(std::clamp(bob_zero, 0.0, 1.0));
}

KeyRateReport key_rate(const ObservedStats& stats) {
  const ConstraintSet cons = assemble_constraints(stats);
  const EntropyMinimum bound = minimize_entropy(stats, cons);

  KeyRateReport r;
  r.h_ae_lower = bound.value;
  r.splits = bound.splits;
  r.h_ab_noflip = conditional_entropy_ab(stats, Mode::NoFlip);
  r.h_ab_flip = conditional_entropy_ab(stats, Mode::Flip);
  r.rate_noflip = r.h_ae_lower - r.h_ab_noflip;
  r.rate_flip = r.h_ae_lower - r.h_ab_flip;
  r.chosen_mode = choose_mode(stats);
  r.p_key_noflip = key_distribution(stats, Mode::NoFlip);
  r.p_key_flip = key_distribution(stats, Mode::Flip);
  return r;
}

double exact_entropy_oracle(const AttackModel& attack) {
  attack.validate();
  const auto d = static_cast<Eigen::Index>(attack.eve_dim);
  const qmath::Dims dims{2, 2, 4, attack.eve_dim};
  const Eigen::Index n = 16 * d;

  // rho_ABE = sum_ij alpha_ij^2 |ij><ij| (x) sum_m |m, e^m_ij><m, e^m_ij|.
  qmath::Matrix rho = qmath::Matrix::Zero(n, n);
  for (int ij = 0; ij < 4; ++ij) {
    const double weight = attack.alphas[ij] * attack.alphas[ij];
    if (weight == 0.0) continue;
    for (int m = 0; m < 4; ++m) {
      qmath::Vector v = qmath::Vector::Zero(n);
      v.segment((ij * 4 + m) * d, d) = attack.vectors[ij][m];
      rho += weight * v * v.adjoint();
    }
  }
  const qmath::DensityMatrix rho_abe(std::move(rho), dims);
  const std::array<std::size_t, 3> keep_ae{0, 2, 3};
  const qmath::DensityMatrix rho_ae = qmath::partial_trace(rho_abe, keep_ae);
  const std::array<std::size_t, 2> keep_e{1, 2};
  const qmath::DensityMatrix rho_e = qmath::partial_trace(rho_ae, keep_e);
  return qmath::von_neumann_entropy(rho_ae) - qmath::von_neumann_entropy(rho_e);
}

}  // namespace msqkd
