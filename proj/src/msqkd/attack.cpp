#include "msqkd/attack.hpp"

#include <cmath>

#include <json.hpp>

#include "msqkd/channels.hpp"
#include "msqkd/error.hpp"

namespace msqkd {

using qmath::Complex;
using qmath::Matrix;
using qmath::Vector;

void AttackModel::validate(double tol) const {
  require(eve_dim >= 1 && eve_dim <= kMaxEveDim, ErrorCode::InvalidArgument,
          "attack: eve_dim must be in [1, 16]");
  double norm = 0.0;
  for (double a : alphas) {
    require(std::isfinite(a) && a >= 0.0, ErrorCode::InvalidArgument,
            "attack: amplitudes must be real and non-negative");
    norm += a * a;
  }
  require(std::abs(norm - 1.0) <= tol, ErrorCode::InvalidArgument,
          "attack: squared amplitudes must sum to 1");
  for (const auto& per_pair : vectors)
    for (const Vector& v : per_pair)
      require(static_cast<std::size_t>(v.size()) == eve_dim, ErrorCode::InvalidArgument,
              "attack: ancilla vector length differs from eve_dim");

  const Matrix v = isometry();
  const Matrix gram = v.adjoint() * v;
  require((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= tol, ErrorCode::IsometryViolation,
          "attack: return map is not an isometry (sum_m <e^m_ij|e^m_kl> != delta)");
}

Matrix AttackModel::isometry() const {
  const auto d = static_cast<Eigen::Index>(eve_dim);
  Matrix v = Matrix::Zero(4 * d, 4);
  for (Eigen::Index col = 0; col < 4; ++col)
    for (Eigen::Index m = 0; m < 4; ++m)
      if (vectors[col][m].size() == d) v.block(m * d, col, d, 1) = vectors[col][m];
  return v;
}

AttackModel AttackModel::from_isometry(const std::array<double, 4>& alphas, const Matrix& v,
                                       std::size_t eve_dim) {
  const auto d = static_cast<Eigen::Index>(eve_dim);
  require(v.rows() == 4 * d && v.cols() == 4, ErrorCode::DimensionMismatch,
          "attack: isometry must be (4 * eve_dim) x 4");
  AttackModel a;
  a.alphas = alphas;
  a.eve_dim = eve_dim;
  for (Eigen::Index col = 0; col < 4; ++col)
    for (Eigen::Index m = 0; m < 4; ++m) a.vectors[col][m] = v.block(m * d, col, d, 1);
  return a;
}

AttackModel AttackModel::honest() {
  const double r = 1.0 / std::sqrt(2.0);
  // Column 2i+j holds the Bell-basis coefficients <phi_m|i,j>.
  Matrix v(4, 4);
  v << r, 0, 0, r,
       r, 0, 0, -r,
       0, r, r, 0,
       0, r, -r, 0;
  return from_isometry({r, 0.0, 0.0, r}, v, 1);
}

AttackModel AttackModel::honest_reverse_noise(double q_reverse) {
  const channels::DepolarizingChannel channel(q_reverse);
  const auto weights = channel.pauli_weights();
  const auto bells = qmath::bell_projectors();
  constexpr Eigen::Index d = 16;

  // e^m_ij = sum_P sqrt(w_P) <phi_m| P |i,j> |P>.
  Matrix v = Matrix::Zero(4 * d, 4);
  for (std::size_t p = 0; p < 16; ++p) {
    const Matrix pauli = channels::pauli_matrix(channels::PauliPair::from_index(p));
    for (Eigen::Index m = 0; m < 4; ++m) {
      const Vector phi = qmath::bell_state(static_cast<std::size_t>(m)).amplitudes;
      const Eigen::RowVectorXcd row = phi.adjoint() * pauli;
      for (Eigen::Index col = 0; col < 4; ++col)
        v(m * d + static_cast<Eigen::Index>(p), col) = std::sqrt(weights[p]) * row(col);
    }
  }
  const double r = 1.0 / std::sqrt(2.0);
  return from_isometry({r, 0.0, 0.0, r}, v, static_cast<std::size_t>(d));
}

AttackModel AttackModel::random(RoundStream& rng, std::size_t eve_dim) {
  require(eve_dim >= 1 && eve_dim <= kMaxEveDim, ErrorCode::InvalidArgument,
          "attack: eve_dim must be in [1, 16]");
  std::array<double, 4> alphas{};
  double norm = 0.0;
  for (double& a : alphas) {
    a = std::abs(rng.normal());
    norm += a * a;
  }
  for (double& a : alphas) a /= std::sqrt(norm);

  const auto rows = static_cast<Eigen::Index>(4 * eve_dim);
  Matrix g(rows, 4);
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, 4);
  return from_isometry(alphas, q, eve_dim);
}

AttackModel parse_attack_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("attack file: ") + e.what());
  }
  try {
    AttackModel a;
    const auto& alphas = doc.at("alphas");
    require(alphas.is_array() && alphas.size() == 4, ErrorCode::Parse, "attack file: alphas must have 4 entries");
    for (std::size_t k = 0; k < 4; ++k) a.alphas[k] = alphas[k].get<double>();
    a.eve_dim = doc.at("eve_dim").get<std::size_t>();
    require(a.eve_dim >= 1 && a.eve_dim <= AttackModel::kMaxEveDim, ErrorCode::InvalidArgument,
            "attack file: eve_dim must be in [1, 16]");
    const auto& vectors = doc.at("vectors");
    require(vectors.is_array() && vectors.size() == 4, ErrorCode::Parse, "attack file: vectors must have 4 pairs");
    for (std::size_t ij = 0; ij < 4; ++ij) {
      require(vectors[ij].is_array() && vectors[ij].size() == 4, ErrorCode::Parse,
              "attack file: each pair needs 4 message vectors");
      for (std::size_t m = 0; m < 4; ++m) {
        const auto& entries = vectors[ij][m];
        require(entries.is_array() && entries.size() == a.eve_dim, ErrorCode::Parse,
                "attack file: vector length differs from eve_dim");
        Vector v(static_cast<Eigen::Index>(a.eve_dim));
        for (std::size_t k = 0; k < a.eve_dim; ++k)
          v(static_cast<Eigen::Index>(k)) = Complex(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
        a.vectors[ij][m] = std::move(v);
      }
    }
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("attack file: ") + e.what());
  }
}

std::string attack_to_json(const AttackModel& attack) {
  nlohmann::json doc;
  doc["alphas"] = attack.alphas;
  doc["eve_dim"] = attack.eve_dim;
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& per_pair : attack.vectors) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const Vector& v : per_pair) {
      nlohmann::json entries = nlohmann::json::array();
      for (Eigen::Index k = 0; k < v.size(); ++k) entries.push_back({v(k).real(), v(k).imag()});
      msgs.push_back(std::move(entries));
    }
    vectors.push_back(std::move(msgs));
  }
  doc["vectors"] = std::move(vectors);
  return doc.dump(2);
}

}  // namespace msqkd
