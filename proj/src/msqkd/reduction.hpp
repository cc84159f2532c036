#pragma once

// Brute-force check, for one or two rounds, that the prepare-and-measure
// protocol and the entanglement-based protocol (untrusted source, trusted
// measuring server, users abort on an X-basis "-") leave identical states
// once the entanglement protocol does not abort.
//
// Register layout of every state built here (big-endian):
//   Alice private [2] x N, Bob private [2] x N, messages [4] x N, Eve [d].
// Bit strings over rounds are big-endian as well: round 0 is the most
// significant bit of a pair index.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msqkd/attack.hpp"
#include "msqkd/qmath.hpp"
#include "msqkd/rng.hpp"

namespace msqkd::reduction {

inline constexpr std::size_t kMaxRounds = 2;
inline constexpr std::size_t kMaxStateDim = 4096;

// 1 = Measure-Resend (CNOT into the private register / Z measurement),
// 0 = Reflect (X measurement in the entanglement protocol).
struct BasisChoice {
  std::vector<std::uint8_t> theta_a;
  std::vector<std::uint8_t> theta_b;

  std::size_t rounds() const { return theta_a.size(); }
  static BasisChoice from_bits(std::size_t rounds, unsigned bits_a, unsigned bits_b);
};

// General N-round attack: the server sends sum_{i,j} alpha_ij |i, j>
// (i, j in {0,1}^N, amplitudes complex) and returns
//   U|i, j> = sum_{m in {0..3}^N} |m> (x) |f^m_ij>.
struct MultiRoundAttack {
  std::size_t rounds = 1;
  std::size_t eve_dim = 1;
  std::vector<qmath::Complex> alphas;  // index i * 2^N + j
  std::vector<qmath::Vector> vectors;  // index (i * 2^N + j) * 4^N + m

  std::size_t pairs() const { return std::size_t{1} << (2 * rounds); }
  std::size_t messages() const { return std::size_t{1} << (2 * rounds); }
  const qmath::Vector& f(std::size_t pair, std::size_t m) const { return vectors[pair * messages() + m]; }

  void validate(double tol = 1e-9) const;

  // (4^N * eve_dim) x 4^N matrix of the return map.
  qmath::Matrix isometry() const;

  static MultiRoundAttack from_single(const AttackModel& attack);

  // `rounds` independent copies of a single-round attack.
  static MultiRoundAttack collective(const AttackModel& attack, std::size_t rounds);

  static MultiRoundAttack random(RoundStream& rng, std::size_t rounds, std::size_t eve_dim);
};

qmath::Dims output_dims(std::size_t rounds, std::size_t eve_dim);

// Prepare-and-measure: the users CNOT the incoming qubits into private
// registers where theta is 1, then the server applies U to the returning
// qubits.
qmath::StateVector build_pm_state(const MultiRoundAttack& attack, const BasisChoice& choice);

// The source state sum_ij alpha_ij |i, j>_AB sum_m |m>_C |f^m_ij>_E.
qmath::StateVector build_source_state(const MultiRoundAttack& attack);

struct EntanglementOutcome {
  qmath::StateVector state;  // normalized; empty amplitudes when abort_only
  double non_abort_prob = 0.0;
  bool abort_only = false;
};

// Users measure Z where theta is 1 and X where theta is 0, aborting on "-".
// The conditional state has "+" relabeled to |0> in the measured registers.
EntanglementOutcome run_entanglement(const qmath::StateVector& source, const BasisChoice& choice);
EntanglementOutcome run_entanglement(const MultiRoundAttack& attack, const BasisChoice& choice);

struct EquivalenceResult {
  double fidelity = 0.0;
  double non_abort_prob = 0.0;
  bool abort_only = false;
  bool passed = false;
};

EquivalenceResult verify_equivalence(const MultiRoundAttack& attack, const BasisChoice& choice,
                                     double tol);

}  // namespace msqkd::reduction
