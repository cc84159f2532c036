#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "msqkd/qmath.hpp"
#include "msqkd/rng.hpp"

namespace msqkd {

// The server's collective attack: it sends sum_ij alpha_ij |i,j> (alpha real,
// non-negative) and on return applies the isometry
//   U|i,j> = sum_m |m> (x) |e^m_ij>
// with sub-normalized ancilla vectors e^m_ij of a common dimension.
//
// Pairs (i, j) are indexed as 2*i + j throughout.
struct AttackModel {
  static constexpr std::size_t kMaxEveDim = 16;

  std::array<double, 4> alphas{};
  std::size_t eve_dim = 1;
  std::array<std::array<qmath::Vector, 4>, 4> vectors;  // [2*i + j][m]

  double alpha(int i, int j) const { return alphas[static_cast<std::size_t>(2 * i + j)]; }
  const qmath::Vector& e(int i, int j, int m) const {
    return vectors[static_cast<std::size_t>(2 * i + j)][static_cast<std::size_t>(m)];
  }

  // Throws InvalidArgument for bad amplitudes or shapes and
  // IsometryViolation when sum_m <e^m_ij|e^m_kl> != delta within `tol`.
  void validate(double tol = 1e-9) const;

  // The dilated return isometry as a (4 * eve_dim) x 4 matrix; row m*eve_dim + k,
  // column 2*i + j.
  qmath::Matrix isometry() const;

  static AttackModel from_isometry(const std::array<double, 4>& alphas, const qmath::Matrix& v,
                                   std::size_t eve_dim);

  // Honest server, noiseless channel: |phi_0> and a Bell measurement.
  static AttackModel honest();

  // Honest server whose Bell measurement is preceded by a reverse
  // depolarizing channel, dilated with a 16-dimensional Pauli register.
  static AttackModel honest_reverse_noise(double q_reverse);

  // Random amplitudes and a Haar-like random isometry.
  static AttackModel random(RoundStream& rng, std::size_t eve_dim);
};

// Attack files are JSON:
//   {"alphas": [a00, a01, a10, a11], "eve_dim": d,
//    "vectors": [[[[re, im] x d] x 4 messages] x 4 pairs]}
AttackModel parse_attack_json(const std::string& text);
std::string attack_to_json(const AttackModel& attack);

}  // namespace msqkd
