#pragma once

// Reference computations for the tests. Each one takes a different route from
// the library code it checks: density matrices instead of closed forms,
// per-message block entropies instead of a partial trace, dense scans instead
// of the grid/golden-section minimizer.

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "msqkd/attack.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/stats.hpp"

namespace oracle {

using C = std::complex<double>;
using M4 = Eigen::Matrix4cd;

struct Table {
  std::array<std::array<double, 2>, 2> joint{};
  std::array<std::array<std::array<double, 4>, 3>, 3> msg{};
};

inline M4 bell_projector(int m) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (m) {
    case 0: v << r, 0, 0, r; break;
    case 1: v << r, 0, 0, -r; break;
    case 2: v << 0, r, r, 0; break;
    default: v << 0, r, -r, 0; break;
  }
  return v * v.adjoint();
}

inline M4 depolarize(const M4& rho, double q) {
  return (1.0 - 2.0 * q) * rho + (q / 2.0) * M4::Identity();
}

// Projector onto outcome `bit` of one qubit (0 = Alice, 1 = Bob); the other
// qubit is untouched. bit == 2 means "no measurement".
inline M4 z_projector(int qubit, int bit) {
  if (bit == 2) return M4::Identity();
  M4 p = M4::Zero();
  for (int k = 0; k < 4; ++k) {
    const int b = qubit == 0 ? k >> 1 : k & 1;
    if (b == bit) p(k, k) = 1.0;
  }
  return p;
}

// Honest server sends phi_0 through E_{Q_F}; users act; the returning pair
// passes E_{Q_R} before the Bell measurement.
inline Table depolarized_by_density_matrix(double qf, double qr) {
  const M4 phi0 = bell_projector(0);
  const M4 sent = depolarize(phi0, qf);
  Table t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const M4 proj = z_projector(0, i) * z_projector(1, j);
      t.joint[i][j] = (proj * sent).trace().real();
    }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      const M4 proj = z_projector(0, x) * z_projector(1, y);
      const M4 collapsed = proj * sent * proj;
      const double norm = collapsed.trace().real();
      const M4 back = depolarize(collapsed / norm, qr);
      for (int m = 0; m < 4; ++m) t.msg[x][y][m] = (bell_projector(m) * back).trace().real();
    }
  return t;
}

// -sum lambda log2 lambda over the eigenvalues of an unnormalized PSD matrix.
inline double raw_entropy(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double l = es.eigenvalues()(k);
    if (l > 1e-300) s -= l * std::log2(l);
  }
  return s;
}

// H(A|E) for a collective attack. The message is classical, so rho_AE and
// rho_E are block diagonal in m and in Alice's bit.
inline double h_ae(const msqkd::AttackModel& a) {
  const auto d = static_cast<Eigen::Index>(a.eve_dim);
  double total = 0.0;
  for (int m = 0; m < 4; ++m) {
    Eigen::MatrixXcd eve = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < 2; ++i) {
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(d, d);
      for (int j = 0; j < 2; ++j) {
        const auto& e = a.e(i, j, m);
        block += a.alpha(i, j) * a.alpha(i, j) * e * e.adjoint();
      }
      total += raw_entropy(block);
      eve += block;
    }
    total -= raw_entropy(eve);
  }
  return total;
}

// The attack's actual R^m_{0011} = 2 alpha_00 alpha_11 Re<e^m_00|e^m_11>.
inline std::array<double, 4> true_splits(const msqkd::AttackModel& a) {
  std::array<double, 4> t{};
  for (int m = 0; m < 4; ++m)
    t[m] = 2.0 * a.alpha(0, 0) * a.alpha(1, 1) * a.e(0, 0, m).dot(a.e(1, 1, m)).real();
  return t;
}

// Minimum of the bound by a uniform scan with `points` samples per message.
inline double scan_minimum(const msqkd::ObservedStats& s, const msqkd::ConstraintSet& c, int points) {
  std::array<double, 4> best{};
  std::array<double, 4> splits{};
  for (int m = 0; m < 4; ++m) splits[m] = c.lower(m);
  for (int m = 0; m < 4; ++m) {
    best[m] = 1e300;
    for (int k = 0; k <= points; ++k) {
      const double t = c.lower(m) + (c.upper(m) - c.lower(m)) * k / points;
      std::array<double, 4> probe = splits;
      probe[m] = t;
      // Other messages held fixed, so differences isolate message m.
      const double v = msqkd::entropy_bound(s, c, probe) - msqkd::entropy_bound(s, c, splits);
      best[m] = std::min(best[m], v);
    }
  }
  double total = msqkd::entropy_bound(s, c, splits);
  for (double b : best) total += b;
  return total;
}

}  // namespace oracle
