#include "msqkd/reduction.hpp"

#include <cmath>
#include <string>

#include "msqkd/error.hpp"

namespace msqkd::reduction {
namespace {

using qmath::Complex;
using qmath::Dims;
using qmath::Matrix;
using qmath::StateVector;
using qmath::Vector;

Dims qubits(std::size_t n) { return Dims(n, 2); }

Dims concat(Dims a, const Dims& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void check_choice(const BasisChoice& choice, std::size_t rounds) {
  require(choice.theta_a.size() == rounds && choice.theta_b.size() == rounds, ErrorCode::InvalidArgument,
          "basis choice length differs from the number of rounds");
  for (std::size_t k = 0; k < rounds; ++k)
    require(choice.theta_a[k] <= 1 && choice.theta_b[k] <= 1, ErrorCode::InvalidArgument,
            "basis choice entries must be 0 or 1");
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// |0><+|: keeps the non-abort branch of an X measurement and relabels + as 0.
Matrix plus_to_zero() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = r;
  m(0, 1) = r;
  return m;
}

}  // namespace

BasisChoice BasisChoice::from_bits(std::size_t rounds, unsigned bits_a, unsigned bits_b) {
  BasisChoice c;
  for (std::size_t k = 0; k < rounds; ++k) {
    const auto shift = static_cast<unsigned>(rounds - 1 - k);
    c.theta_a.push_back(static_cast<std::uint8_t>((bits_a >> shift) & 1u));
    c.theta_b.push_back(static_cast<std::uint8_t>((bits_b >> shift) & 1u));
  }
  return c;
}

void MultiRoundAttack::validate(double tol) const {
  require(rounds >= 1 && rounds <= kMaxRounds, ErrorCode::InvalidArgument, "reduction supports 1 or 2 rounds");
  require(eve_dim >= 1, ErrorCode::InvalidArgument, "eve_dim must be positive");
  require(qmath::total_dim(output_dims(rounds, eve_dim)) <= kMaxStateDim, ErrorCode::DimensionMismatch,
          "reduction state dimension exceeds " + std::to_string(kMaxStateDim));
  require(alphas.size() == pairs() && vectors.size() == pairs() * messages(), ErrorCode::InvalidArgument,
          "multi-round attack has the wrong number of amplitudes or vectors");
  double norm = 0.0;
  for (const Complex& a : alphas) norm += std::norm(a);
  require(std::abs(norm - 1.0) <= tol, ErrorCode::InvalidArgument, "attack amplitudes are not normalized");
  for (const Vector& v : vectors)
    require(static_cast<std::size_t>(v.size()) == eve_dim, ErrorCode::InvalidArgument,
            "ancilla vector length differs from eve_dim");
  const Matrix v = isometry();
  const auto n = static_cast<Eigen::Index>(pairs());
  require(((v.adjoint() * v) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= tol, ErrorCode::IsometryViolation,
          "multi-round return map is not an isometry");
}

Matrix MultiRoundAttack::isometry() const {
  const auto d = static_cast<Eigen::Index>(eve_dim);
  const auto msgs = static_cast<Eigen::Index>(messages());
  Matrix v = Matrix::Zero(msgs * d, static_cast<Eigen::Index>(pairs()));
  for (std::size_t pair = 0; pair < pairs(); ++pair)
    for (std::size_t m = 0; m < messages(); ++m)
      v.block(static_cast<Eigen::Index>(m) * d, static_cast<Eigen::Index>(pair), d, 1) = f(pair, m);
  return v;
}

MultiRoundAttack MultiRoundAttack::from_single(const AttackModel& attack) {
  return collective(attack, 1);
}

MultiRoundAttack MultiRoundAttack::collective(const AttackModel& attack, std::size_t rounds) {
  attack.validate();
  require(rounds >= 1 && rounds <= kMaxRounds, ErrorCode::InvalidArgument, "reduction supports 1 or 2 rounds");
  MultiRoundAttack out;
  out.rounds = rounds;
  out.eve_dim = 1;
  for (std::size_t k = 0; k < rounds; ++k) out.eve_dim *= attack.eve_dim;
  out.alphas.resize(out.pairs());
  out.vectors.resize(out.pairs() * out.messages());

  const std::size_t n_bits = std::size_t{1} << rounds;
  for (std::size_t i = 0; i < n_bits; ++i) {
    for (std::size_t j = 0; j < n_bits; ++j) {
      const std::size_t pair = i * n_bits + j;
      for (std::size_t m = 0; m < out.messages(); ++m) {
        Complex alpha = 1.0;
        Vector f = Vector::Ones(1);
        for (std::size_t k = 0; k < rounds; ++k) {
          const auto shift = rounds - 1 - k;
          const int ik = static_cast<int>((i >> shift) & 1u);
          const int jk = static_cast<int>((j >> shift) & 1u);
          const int mk = static_cast<int>((m >> (2 * shift)) & 3u);
          alpha *= attack.alpha(ik, jk);
          const Vector& e = attack.e(ik, jk, mk);
          Vector next(f.size() * e.size());
          for (Eigen::Index a = 0; a < f.size(); ++a) next.segment(a * e.size(), e.size()) = f(a) * e;
          f = std::move(next);
        }
        out.alphas[pair] = alpha;
        out.vectors[pair * out.messages() + m] = std::move(f);
      }
    }
  }
  return out;
}

MultiRoundAttack MultiRoundAttack::random(RoundStream& rng, std::size_t rounds, std::size_t eve_dim) {
  MultiRoundAttack out;
  out.rounds = rounds;
  out.eve_dim = eve_dim;
  require(rounds >= 1 && rounds <= kMaxRounds, ErrorCode::InvalidArgument, "reduction supports 1 or 2 rounds");
  require(eve_dim >= 1 && qmath::total_dim(output_dims(rounds, eve_dim)) <= kMaxStateDim,
          ErrorCode::DimensionMismatch, "reduction state dimension exceeds " + std::to_string(kMaxStateDim));

  double norm = 0.0;
  out.alphas.resize(out.pairs());
  for (Complex& a : out.alphas) {
    a = Complex(rng.normal(), rng.normal());
    norm += std::norm(a);
  }
  for (Complex& a : out.alphas) a /= std::sqrt(norm);

  const auto cols = static_cast<Eigen::Index>(out.pairs());
  const auto rows = static_cast<Eigen::Index>(out.messages() * eve_dim);
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = Complex(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);

  const auto d = static_cast<Eigen::Index>(eve_dim);
  out.vectors.resize(out.pairs() * out.messages());
  for (std::size_t pair = 0; pair < out.pairs(); ++pair)
    for (std::size_t m = 0; m < out.messages(); ++m)
      out.vectors[pair * out.messages() + m] =
          q.block(static_cast<Eigen::Index>(m) * d, static_cast<Eigen::Index>(pair), d, 1);
  return out;
}

Dims output_dims(std::size_t rounds, std::size_t eve_dim) {
  Dims dims = concat(qubits(rounds), qubits(rounds));
  dims.insert(dims.end(), rounds, 4);
  dims.push_back(eve_dim);
  return dims;
}

StateVector build_pm_state(const MultiRoundAttack& attack, const BasisChoice& choice) {
  attack.validate();
  const std::size_t n = attack.rounds;
  check_choice(choice, n);

  // Private registers |0...0>, then the transit qubits T1 (Alice) and T2 (Bob).
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(attack.pairs() * attack.pairs()));
  for (std::size_t pair = 0; pair < attack.pairs(); ++pair) amps(static_cast<Eigen::Index>(pair)) = attack.alphas[pair];
  StateVector state(std::move(amps), concat(concat(qubits(n), qubits(n)), concat(qubits(n), qubits(n))));

  const Matrix gate = cnot();
  for (std::size_t k = 0; k < n; ++k) {
    if (choice.theta_a[k] == 1) {
      const std::array<std::size_t, 2> targets{2 * n + k, k};
      state = qmath::apply_operator(state, gate, targets);
    }
    if (choice.theta_b[k] == 1) {
      const std::array<std::size_t, 2> targets{3 * n + k, n + k};
      state = qmath::apply_operator(state, gate, targets);
    }
  }

  Dims out(n, 4);
  out.push_back(attack.eve_dim);
  return qmath::apply_trailing_map(state, attack.isometry(), out);
}

StateVector build_source_state(const MultiRoundAttack& attack) {
  attack.validate();
  const std::size_t n = attack.rounds;
  const std::size_t pairs = attack.pairs();

  // sum_ij alpha_ij |i, j> |i, j>, then U on the copy.
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(pairs * pairs));
  for (std::size_t pair = 0; pair < pairs; ++pair)
    amps(static_cast<Eigen::Index>(pair * pairs + pair)) = attack.alphas[pair];
  const StateVector prepared(std::move(amps), concat(concat(qubits(n), qubits(n)), concat(qubits(n), qubits(n))));

  Dims out(n, 4);
  out.push_back(attack.eve_dim);
  return qmath::apply_trailing_map(prepared, attack.isometry(), out);
}

EntanglementOutcome run_entanglement(const StateVector& source, const BasisChoice& choice) {
  const std::size_t n = choice.rounds();
  require(n >= 1 && n <= kMaxRounds, ErrorCode::InvalidArgument, "reduction supports 1 or 2 rounds");
  check_choice(choice, n);
  require(source.dims.size() >= 2 * n, ErrorCode::DimensionMismatch, "source state has too few registers");
  for (std::size_t k = 0; k < 2 * n; ++k)
    require(source.dims[k] == 2, ErrorCode::DimensionMismatch, "source state must start with 2N qubits");
  require(source.size() <= kMaxStateDim, ErrorCode::DimensionMismatch,
          "reduction state dimension exceeds " + std::to_string(kMaxStateDim));

  StateVector state = source;
  const Matrix keep_plus = plus_to_zero();
  for (std::size_t k = 0; k < n; ++k) {
    if (choice.theta_a[k] == 0) {
      const std::array<std::size_t, 1> target{k};
      state = qmath::apply_operator(state, keep_plus, target);
    }
    if (choice.theta_b[k] == 0) {
      const std::array<std::size_t, 1> target{n + k};
      state = qmath::apply_operator(state, keep_plus, target);
    }
  }

  EntanglementOutcome out;
  out.non_abort_prob = state.norm_squared() / source.norm_squared();
  if (out.non_abort_prob <= 1e-14) {
    out.non_abort_prob = 0.0;
    out.abort_only = true;
    return out;
  }
  state.amplitudes /= std::sqrt(state.norm_squared());
  out.state = std::move(state);
  return out;
}

EntanglementOutcome run_entanglement(const MultiRoundAttack& attack, const BasisChoice& choice) {
  return run_entanglement(build_source_state(attack), choice);
}

EquivalenceResult verify_equivalence(const MultiRoundAttack& attack, const BasisChoice& choice, double tol) {
  const StateVector pm = build_pm_state(attack, choice);
  const EntanglementOutcome ent = run_entanglement(attack, choice);

  EquivalenceResult r;
  r.non_abort_prob = ent.non_abort_prob;
  r.abort_only = ent.abort_only;
  if (!ent.abort_only) r.fidelity = std::norm(pm.amplitudes.dot(ent.state.amplitudes));
  r.passed = !r.abort_only && r.non_abort_prob > 0.0 && r.fidelity >= 1.0 - tol;
  return r;
}

}  // namespace msqkd::reduction
