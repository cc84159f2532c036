#include "msqkd/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msqkd/error.hpp"

namespace msqkd::channels {

using qmath::Complex;
using qmath::Matrix;

Matrix pauli_matrix(std::uint8_t which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: fail(ErrorCode::InvalidArgument, "pauli_matrix: index must be 0..3");
  }
  return m;
}

Matrix pauli_matrix(PauliPair p) {
  const Matrix a = pauli_matrix(p.first);
  const Matrix b = pauli_matrix(p.second);
  Matrix out(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return out;
}

DepolarizingChannel::DepolarizingChannel(double q) : q_(q) {
  require(q >= 0.0 && q <= 0.5, ErrorCode::InvalidArgument,
          "depolarizing parameter " + std::to_string(q) + " outside [0, 0.5]");
}

qmath::DensityMatrix DepolarizingChannel::apply(const qmath::DensityMatrix& rho) const {
  require(rho.size() == 4, ErrorCode::DimensionMismatch, "depolarizing channel acts on two qubits (dim 4)");
  Matrix out = (1.0 - 2.0 * q_) * rho.entries + (q_ / 2.0) * Matrix::Identity(4, 4);
  return {std::move(out), rho.dims};
}

std::array<double, 16> DepolarizingChannel::pauli_weights() const {
  std::array<double, 16> w;
  w.fill(q_ / 8.0);
  w[0] = 1.0 - 2.0 * q_ + q_ / 8.0;
  return w;
}

PauliPair DepolarizingChannel::sample_pauli(double u) const {
  const double identity = 1.0 - 2.0 * q_ + q_ / 8.0;
  if (u < identity || q_ == 0.0) return {};
  const auto k = static_cast<std::size_t>((u - identity) / (q_ / 8.0));
  return PauliPair::from_index(1 + std::min<std::size_t>(k, 14));
}

ChannelMap compose(DepolarizingChannel first, DepolarizingChannel second) {
  return [first, second](const qmath::DensityMatrix& rho) { return second.apply(first.apply(rho)); };
}

qmath::StateVector apply_pauli(const qmath::StateVector& psi, PauliPair p) {
  require(psi.size() == 4, ErrorCode::DimensionMismatch, "apply_pauli: two-qubit state expected");
  if (p.is_identity()) return psi;
  return {pauli_matrix(p) * psi.amplitudes, psi.dims};
}

}  // namespace msqkd::channels
