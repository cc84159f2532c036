#include "msqkd/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "msqkd/error.hpp"

namespace msqkd::qmath {
namespace {

// Row-major digit decomposition helpers for the big-endian layout.
std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

void check_dims(std::size_t length, const Dims& dims, const char* what) {
  require(!dims.empty(), ErrorCode::DimensionMismatch, std::string(what) + ": empty dims");
  for (std::size_t d : dims)
    require(d > 0, ErrorCode::DimensionMismatch, std::string(what) + ": zero subsystem dimension");
  require(total_dim(dims) == length, ErrorCode::DimensionMismatch,
          std::string(what) + ": length does not match product of dims");
}

void check_subsystems(std::span<const std::size_t> idx, std::size_t n, const char* what) {
  std::vector<bool> seen(n, false);
  for (std::size_t k : idx) {
    require(k < n, ErrorCode::InvalidArgument,
            std::string(what) + ": subsystem index " + std::to_string(k) + " out of range");
    require(!seen[k], ErrorCode::InvalidArgument,
            std::string(what) + ": repeated subsystem index " + std::to_string(k));
    seen[k] = true;
  }
}

}  // namespace

std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

StateVector::StateVector(Vector amps, Dims d) : amplitudes(std::move(amps)), dims(std::move(d)) {
  check_dims(size(), dims, "StateVector");
}

StateVector StateVector::basis(Dims dims, std::size_t index) {
  const std::size_t n = total_dim(dims);
  require(index < n, ErrorCode::InvalidArgument, "basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return {std::move(v), std::move(dims)};
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

DensityMatrix::DensityMatrix(Matrix m, Dims d) : entries(std::move(m)), dims(std::move(d)) {
  require(entries.rows() == entries.cols(), ErrorCode::DimensionMismatch,
          "DensityMatrix: matrix is not square");
  check_dims(size(), dims, "DensityMatrix");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return {psi.amplitudes * psi.amplitudes.adjoint(), psi.dims};
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  return {Matrix::Identity(n, n) / static_cast<double>(n), std::move(dims)};
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Vector out(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i)
    out.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return {std::move(out), std::move(dims)};
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const Eigen::Index nb = b.entries.rows();
  Matrix out(a.entries.rows() * nb, a.entries.cols() * nb);
  for (Eigen::Index i = 0; i < a.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < a.entries.cols(); ++j)
      out.block(i * nb, j * nb, nb, nb) = a.entries(i, j) * b.entries;
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return {std::move(out), std::move(dims)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t n = rho.dims.size();
  check_subsystems(keep, n, "partial_trace");

  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<bool> is_kept(n, false);
  for (std::size_t k : kept) is_kept[k] = true;

  Dims kept_dims;
  std::size_t traced_dim = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_kept[k])
      kept_dims.push_back(rho.dims[k]);
    else
      traced_dim *= rho.dims[k];
  }
  if (kept_dims.empty()) kept_dims.push_back(1);
  const std::size_t kept_dim = total_dim(kept_dims);

  // Split every full index into (kept index, traced index).
  const std::size_t full = rho.size();
  const auto strides = strides_of(rho.dims);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_traced(traced_dim);
  for (std::size_t f = 0; f < full; ++f) {
    std::size_t kidx = 0;
    std::size_t tidx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t digit = (f / strides[k]) % rho.dims[k];
      if (is_kept[k])
        kidx = kidx * rho.dims[k] + digit;
      else
        tidx = tidx * rho.dims[k] + digit;
    }
    by_traced[tidx].emplace_back(f, kidx);
  }

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (const auto& group : by_traced)
    for (const auto& [fi, ki] : group)
      for (const auto& [fj, kj] : group)
        out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) +=
            rho.entries(static_cast<Eigen::Index>(fi), static_cast<Eigen::Index>(fj));
  return {std::move(out), std::move(kept_dims)};
}

StateVector apply_operator(const StateVector& psi, const Matrix& op,
                           std::span<const std::size_t> targets) {
  const std::size_t n = psi.dims.size();
  check_subsystems(targets, n, "apply_operator");
  require(!targets.empty(), ErrorCode::InvalidArgument, "apply_operator: no target subsystems");

  std::size_t target_dim = 1;
  std::vector<bool> is_target(n, false);
  for (std::size_t t : targets) {
    target_dim *= psi.dims[t];
    is_target[t] = true;
  }
  require(op.rows() == op.cols() && static_cast<std::size_t>(op.rows()) == target_dim,
          ErrorCode::DimensionMismatch, "apply_operator: operator dimension mismatch");

  const std::size_t full = psi.size();
  const std::size_t rest_dim = full / target_dim;
  const auto strides = strides_of(psi.dims);

  // groups[rest * target_dim + t] = full index.
  std::vector<std::size_t> groups(full);
  for (std::size_t f = 0; f < full; ++f) {
    std::size_t tidx = 0;
    for (std::size_t t : targets) tidx = tidx * psi.dims[t] + (f / strides[t]) % psi.dims[t];
    std::size_t ridx = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (!is_target[k]) ridx = ridx * psi.dims[k] + (f / strides[k]) % psi.dims[k];
    groups[ridx * target_dim + tidx] = f;
  }

  Vector out = Vector::Zero(psi.amplitudes.size());
  Vector local(static_cast<Eigen::Index>(target_dim));
  for (std::size_t r = 0; r < rest_dim; ++r) {
    for (std::size_t t = 0; t < target_dim; ++t)
      local(static_cast<Eigen::Index>(t)) =
          psi.amplitudes(static_cast<Eigen::Index>(groups[r * target_dim + t]));
    const Vector mapped = op * local;
    for (std::size_t t = 0; t < target_dim; ++t)
      out(static_cast<Eigen::Index>(groups[r * target_dim + t])) = mapped(static_cast<Eigen::Index>(t));
  }
  return {std::move(out), psi.dims};
}

StateVector apply_trailing_map(const StateVector& psi, const Matrix& map, const Dims& out_dims) {
  const auto in_dim = static_cast<std::size_t>(map.cols());
  require(static_cast<std::size_t>(map.rows()) == total_dim(out_dims), ErrorCode::DimensionMismatch,
          "apply_trailing_map: output dims do not match map rows");

  std::size_t trailing = 1;
  std::size_t count = 0;
  while (trailing < in_dim && count < psi.dims.size()) trailing *= psi.dims[psi.dims.size() - ++count];
  require(trailing == in_dim && count > 0, ErrorCode::DimensionMismatch,
          "apply_trailing_map: map input does not match trailing subsystems");

  const auto rows = static_cast<Eigen::Index>(psi.size() / in_dim);
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> in(psi.amplitudes.data(), rows, map.cols());
  RowMajor mapped = in * map.transpose();

  Dims dims(psi.dims.begin(), psi.dims.end() - static_cast<std::ptrdiff_t>(count));
  dims.insert(dims.end(), out_dims.begin(), out_dims.end());
  Vector out = Eigen::Map<const Vector>(mapped.data(), mapped.size());
  return {std::move(out), std::move(dims)};
}

ProjectiveMeasurement::ProjectiveMeasurement(std::vector<Matrix> projectors, double tol)
    : projectors_(std::move(projectors)) {
  require(!projectors_.empty(), ErrorCode::InvalidArgument, "measurement: empty projector set");
  const Eigen::Index n = projectors_.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (const Matrix& p : projectors_) {
    require(p.rows() == n && p.cols() == n, ErrorCode::DimensionMismatch,
            "measurement: projectors have inconsistent dimensions");
    sum += p;
  }
  require((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol, ErrorCode::InvalidArgument,
          "measurement: projectors do not sum to the identity (incomplete set)");
  for (std::size_t i = 0; i < projectors_.size(); ++i) {
    for (std::size_t j = i; j < projectors_.size(); ++j) {
      const Matrix prod = projectors_[i] * projectors_[j];
      const Matrix expected = i == j ? projectors_[i] : Matrix::Zero(n, n);
      require((prod - expected).cwiseAbs().maxCoeff() <= tol, ErrorCode::InvalidArgument,
              "measurement: projectors are not mutually orthogonal idempotents");
    }
  }
}

std::vector<double> ProjectiveMeasurement::probabilities(const StateVector& psi) const {
  require(psi.amplitudes.size() == projectors_.front().rows(), ErrorCode::DimensionMismatch,
          "measurement: state dimension mismatch");
  std::vector<double> p;
  p.reserve(projectors_.size());
  for (const Matrix& proj : projectors_) p.push_back((proj * psi.amplitudes).squaredNorm());
  return p;
}

MeasurementResult ProjectiveMeasurement::measure(const StateVector& psi, double u) const {
  const auto p = probabilities(psi);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  require(total > 0.0, ErrorCode::InvalidArgument, "measurement: zero-norm state");

  std::size_t outcome = p.size();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    cumulative += p[k];
    outcome = k;
    if (u * total < cumulative) break;
  }
  Vector post = projectors_[outcome] * psi.amplitudes;
  post /= std::sqrt(p[outcome]);
  return {outcome, StateVector(std::move(post), psi.dims), p[outcome] / total};
}

MeasurementResult measure_projective(const StateVector& psi, std::span<const Matrix> projectors,
                                     double u) {
  return ProjectiveMeasurement({projectors.begin(), projectors.end()}).measure(psi, u);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  require(rho.is_hermitian(1e-9), ErrorCode::InvalidArgument, "von_neumann_entropy: matrix is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.entries, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lambda : solver.eigenvalues()) {
    require(lambda >= -1e-9, ErrorCode::InvalidArgument,
            "von_neumann_entropy: matrix is not positive semidefinite");
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  }
  return s;
}

double binary_entropy(double x) {
  require(x >= -1e-12 && x <= 1.0 + 1e-12, ErrorCode::InvalidArgument,
          "binary_entropy: argument " + std::to_string(x) + " outside [0, 1]");
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double shannon_entropy(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(total > 0.0, ErrorCode::InvalidArgument, "shannon_entropy: weights sum to zero");
  double s = 0.0;
  for (double w : weights) {
    require(w >= -1e-12, ErrorCode::InvalidArgument, "shannon_entropy: negative weight");
    const double p = w / total;
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

StateVector bell_state(std::size_t k) {
  require(k < 4, ErrorCode::InvalidArgument, "bell_state: index must be 0..3");
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (k) {
    case 0: v << r, 0, 0, r; break;
    case 1: v << r, 0, 0, -r; break;
    case 2: v << 0, r, r, 0; break;
    default: v << 0, r, -r, 0; break;
  }
  return {std::move(v), {2, 2}};
}

std::vector<Matrix> bell_projectors() {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < 4; ++k) {
    const Vector v = bell_state(k).amplitudes;
    out.emplace_back(v * v.adjoint());
  }
  return out;
}

std::vector<Matrix> z_projectors(std::size_t qubit) {
  require(qubit < 2, ErrorCode::InvalidArgument, "z_projectors: qubit must be 0 or 1");
  std::vector<Matrix> out;
  for (int bit = 0; bit < 2; ++bit) {
    Matrix p = Matrix::Zero(4, 4);
    for (int idx = 0; idx < 4; ++idx) {
      const int b = qubit == 0 ? (idx >> 1) : (idx & 1);
      if (b == bit) p(idx, idx) = 1.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace msqkd::qmath
