#pragma once

// Dense complex linear algebra and entropy primitives for the small systems
// that appear in the protocol analysis (two qubits, message registers and
// server ancillas).
//
// Subsystem ordering is big-endian over the dims list: the leftmost
// subsystem is the slowest-varying index of the flattened vector.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace msqkd::qmath {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Dims = std::vector<std::size_t>;

std::size_t total_dim(const Dims& dims);

struct StateVector {
  Vector amplitudes;
  Dims dims;

  StateVector() = default;
  StateVector(Vector amps, Dims d);

  // |index> in the product space described by `dims`.
  static StateVector basis(Dims dims, std::size_t index);

  std::size_t size() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm_squared() const { return amplitudes.squaredNorm(); }
  bool is_normalized(double tol = 1e-9) const;
};

struct DensityMatrix {
  Matrix entries;
  Dims dims;

  DensityMatrix() = default;
  DensityMatrix(Matrix m, Dims d);

  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(Dims dims);

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  double trace() const { return entries.trace().real(); }
  bool is_hermitian(double tol = 1e-9) const;
};

StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Reduced state on the subsystems listed in `keep` (any order, no repeats).
// The kept subsystems stay in their original relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

// Applies `op` to the listed subsystems of `psi`. The operator acts on the
// product of the target dimensions, ordered as given in `targets`.
StateVector apply_operator(const StateVector& psi, const Matrix& op,
                           std::span<const std::size_t> targets);

// Replaces the trailing subsystems of `psi` (whose dimensions multiply to
// `map.cols()`) with new subsystems `out_dims` via the linear map `map`.
StateVector apply_trailing_map(const StateVector& psi, const Matrix& map,
                               const Dims& out_dims);

struct MeasurementResult {
  std::size_t outcome = 0;
  StateVector post_state;
  double probability = 0.0;
};

// A validated complete set of orthogonal projectors. Validation happens once
// at construction so the set can be reused across many rounds.
class ProjectiveMeasurement {
 public:
  explicit ProjectiveMeasurement(std::vector<Matrix> projectors, double tol = 1e-9);

  std::size_t outcomes() const { return projectors_.size(); }
  const Matrix& projector(std::size_t k) const { return projectors_[k]; }

  std::vector<double> probabilities(const StateVector& psi) const;

  // Draws an outcome with the Born rule using the uniform sample `u` in
  // [0, 1) and returns the renormalized post-measurement state.
  MeasurementResult measure(const StateVector& psi, double u) const;

 private:
  std::vector<Matrix> projectors_;
};

MeasurementResult measure_projective(const StateVector& psi,
                                     std::span<const Matrix> projectors, double u);

// -sum lambda log2 lambda over the eigenvalues; 0 log 0 := 0 and eigenvalues
// in [-1e-9, 0) count as zero.
double von_neumann_entropy(const DensityMatrix& rho);

// h(x) in bits. Arguments within 1e-12 of [0, 1] are clamped.
double binary_entropy(double x);

// Shannon entropy in bits of a (not necessarily normalized) weight vector;
// weights are normalized by their sum first.
double shannon_entropy(std::span<const double> weights);

// Bell states |phi_0>..|phi_3> = (|00>+|11>, |00>-|11>, |01>+|10>, |01>-|10>)/sqrt2.
StateVector bell_state(std::size_t k);
std::vector<Matrix> bell_projectors();

// Computational-basis projectors of one qubit embedded in a two-qubit space.
std::vector<Matrix> z_projectors(std::size_t qubit);

}  // namespace msqkd::qmath
