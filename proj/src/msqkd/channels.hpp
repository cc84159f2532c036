#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "msqkd/qmath.hpp"

namespace msqkd::channels {

// Two-qubit Pauli operator sigma_first (x) sigma_second, each index in
// {0 = I, 1 = X, 2 = Y, 3 = Z}. Index 0 of the 16 is the identity.
struct PauliPair {
  std::uint8_t first = 0;
  std::uint8_t second = 0;

  static PauliPair from_index(std::size_t k) {
    return {static_cast<std::uint8_t>(k / 4), static_cast<std::uint8_t>(k % 4)};
  }
  std::size_t index() const { return std::size_t{first} * 4 + second; }
  bool is_identity() const { return first == 0 && second == 0; }
};

qmath::Matrix pauli_matrix(std::uint8_t which);
qmath::Matrix pauli_matrix(PauliPair p);

// Depolarizing map E_Q(rho) = (1 - 2Q) rho + Q I/2 on two qubits, with
// Q in [0, 1/2] so that Q is the induced Z-basis flip rate.
class DepolarizingChannel {
 public:
  explicit DepolarizingChannel(double q);

  double q() const { return q_; }

  qmath::DensityMatrix apply(const qmath::DensityMatrix& rho) const;

  // Probability of each of the 16 two-qubit Paulis in the twirl that
  // unravels E_Q: 1 - 2Q + Q/8 for the identity and Q/8 otherwise.
  std::array<double, 16> pauli_weights() const;

  PauliPair sample_pauli(double u) const;

 private:
  double q_;
};

using ChannelMap = std::function<qmath::DensityMatrix(const qmath::DensityMatrix&)>;

// `second` after `first`.
ChannelMap compose(DepolarizingChannel first, DepolarizingChannel second);

qmath::StateVector apply_pauli(const qmath::StateVector& psi, PauliPair p);

}  // namespace msqkd::channels
