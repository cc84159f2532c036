#include "msqkd/protocol.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "msqkd/channels.hpp"
#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/parallel.hpp"
#include "msqkd/stats.hpp"

namespace msqkd {
namespace {

using qmath::ProjectiveMeasurement;
using qmath::StateVector;

const ProjectiveMeasurement& alice_z() {
  static const ProjectiveMeasurement m(qmath::z_projectors(0));
  return m;
}

const ProjectiveMeasurement& bob_z() {
  static const ProjectiveMeasurement m(qmath::z_projectors(1));
  return m;
}

const ProjectiveMeasurement& bell_measurement() {
  static const ProjectiveMeasurement m(qmath::bell_projectors());
  return m;
}

struct RoundSamples {
  double choice_a, choice_b, forward, measure_a, measure_b, reverse, server;

  explicit RoundSamples(RoundStream& rng)
      : choice_a(rng.uniform()),
        choice_b(rng.uniform()),
        forward(rng.uniform()),
        measure_a(rng.uniform()),
        measure_b(rng.uniform()),
        reverse(rng.uniform()),
        server(rng.uniform()) {}
};

// Users' Measure-Resend: Z-measure and resend the observed basis state.
void user_operations(RoundRecord& rec, StateVector& state, const RoundSamples& u) {
  if (rec.choice_a == Choice::MeasureResend) {
    auto res = alice_z().measure(state, u.measure_a);
    rec.outcome_a = static_cast<std::uint8_t>(res.outcome);
    state = std::move(res.post_state);
  }
  if (rec.choice_b == Choice::MeasureResend) {
    auto res = bob_z().measure(state, u.measure_b);
    rec.outcome_b = static_cast<std::uint8_t>(res.outcome);
    state = std::move(res.post_state);
  }
}

std::uint8_t honest_round(const HonestNoise& noise, RoundRecord& rec, const RoundSamples& u) {
  const channels::DepolarizingChannel forward(noise.q_forward);
  const channels::DepolarizingChannel reverse(noise.q_reverse);

  StateVector state = channels::apply_pauli(qmath::bell_state(0), forward.sample_pauli(u.forward));
  user_operations(rec, state, u);
  state = channels::apply_pauli(state, reverse.sample_pauli(u.reverse));
  return static_cast<std::uint8_t>(bell_measurement().measure(state, u.server).outcome);
}

std::uint8_t attack_round(const AttackModel& attack, RoundRecord& rec, const RoundSamples& u) {
  qmath::Vector amps(4);
  for (Eigen::Index k = 0; k < 4; ++k) amps(k) = attack.alphas[static_cast<std::size_t>(k)];
  StateVector state(std::move(amps), {2, 2});
  user_operations(rec, state, u);

  // Apply U and measure the message register.
  std::array<double, 4> p{};
  for (int m = 0; m < 4; ++m) {
    qmath::Vector branch = qmath::Vector::Zero(static_cast<Eigen::Index>(attack.eve_dim));
    for (int ij = 0; ij < 4; ++ij) branch += state.amplitudes(ij) * attack.vectors[ij][m];
    p[m] = branch.squaredNorm();
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  double cumulative = 0.0;
  std::uint8_t msg = 0;
  for (std::uint8_t m = 0; m < 4; ++m) {
    if (p[m] <= 0.0) continue;
    cumulative += p[m];
    msg = m;
    if (u.server * total < cumulative) break;
  }
  return msg;
}

std::string outcome_field(const std::optional<std::uint8_t>& bit) {
  return bit ? std::to_string(*bit) : std::string("-");
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::Flip ? "FLIP" : "NO-FLIP"; }

void ProtocolConfig::validate() const {
  require(p_measure > 0.0 && p_measure < 1.0, ErrorCode::InvalidArgument, "p_m must lie in (0, 1)");
  require(sample_fraction > 0.0 && sample_fraction < 1.0, ErrorCode::InvalidArgument,
          "sample fraction must lie in (0, 1)");
  if (const auto* honest = std::get_if<HonestNoise>(&noise)) {
    channels::DepolarizingChannel{honest->q_forward};
    channels::DepolarizingChannel{honest->q_reverse};
  } else {
    std::get<AttackModel>(noise).validate();
  }
}

RoundRecord run_round(const ProtocolConfig& cfg, std::uint64_t index, RoundStream& rng) {
  const RoundSamples u(rng);
  RoundRecord rec;
  rec.index = index;
  rec.choice_a = u.choice_a < cfg.p_measure ? Choice::MeasureResend : Choice::Reflect;
  rec.choice_b = u.choice_b < cfg.p_measure ? Choice::MeasureResend : Choice::Reflect;

  std::uint8_t msg = 0;
  if (const auto* honest = std::get_if<HonestNoise>(&cfg.noise))
    msg = honest_round(*honest, rec, u);
  else
    msg = attack_round(std::get<AttackModel>(cfg.noise), rec, u);

  // A single classical message goes to both users.
  rec.msg_to_a = msg;
  rec.msg_to_b = msg;
  return rec;
}

std::vector<RoundRecord> simulate(const ProtocolConfig& cfg) {
  cfg.validate();
  std::vector<RoundRecord> records(cfg.rounds);
  parallel_for(records.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      RoundStream rng(cfg.seed, k);
      records[k] = run_round(cfg, k, rng);
    }
  });
  return records;
}

bool messages_consistent(std::span<const RoundRecord> records) {
  return std::all_of(records.begin(), records.end(),
                     [](const RoundRecord& r) { return r.msg_to_a == r.msg_to_b; });
}

SamplingOutcome sampling_stage(std::vector<RoundRecord> records, double sample_fraction,
                               RoundStream& rng) {
  require(!records.empty(), ErrorCode::InvalidArgument, "sampling stage needs at least one round");
  require(sample_fraction >= 0.0 && sample_fraction <= 1.0, ErrorCode::InvalidArgument,
          "sample fraction must lie in [0, 1]");
  const std::size_t n = records.size();
  const auto wanted = static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(n) - 1e-9));
  const std::size_t k = std::min(n, wanted);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    std::swap(order[i], order[j]);
  }
  for (auto& r : records) r.in_sample = false;
  for (std::size_t i = 0; i < k; ++i) records[order[i]].in_sample = true;

  const bool abort = !messages_consistent(records);
  return {std::move(records), abort};
}

Mode choose_mode(const ObservedStats& stats) {
  const double no_flip = conditional_entropy_ab(stats, Mode::NoFlip);
  const double flip = conditional_entropy_ab(stats, Mode::Flip);
  return flip < no_flip - 1e-12 ? Mode::Flip : Mode::NoFlip;
}

Mode resolve_mode(ModePolicy policy, const ObservedStats& stats) {
  switch (policy) {
    case ModePolicy::ForceFlip: return Mode::Flip;
    case ModePolicy::ForceNoFlip: return Mode::NoFlip;
    case ModePolicy::Auto: break;
  }
  return choose_mode(stats);
}

std::size_t RawKey::mismatches() const {
  std::size_t count = 0;
  for (std::size_t k = 0; k < alice.size(); ++k) count += alice[k] != bob[k];
  return count;
}

RawKey extract_raw_key(std::span<const RoundRecord> records, Mode mode) {
  RawKey key;
  for (const auto& r : records) {
    if (r.in_sample || !r.both_measure()) continue;
    std::uint8_t bob = *r.outcome_b;
    if (mode == Mode::Flip && r.msg_to_b >= 2) bob ^= 1u;
    key.alice.push_back(*r.outcome_a);
    key.bob.push_back(bob);
  }
  return key;
}

void write_transcript(std::ostream& out, std::span<const RoundRecord> records) {
  out << "index,choice_a,choice_b,outcome_a,outcome_b,msg,in_sample\n";
  for (const auto& r : records) {
    out << r.index << ',' << (r.choice_a == Choice::MeasureResend ? 'M' : 'R') << ','
        << (r.choice_b == Choice::MeasureResend ? 'M' : 'R') << ',' << outcome_field(r.outcome_a) << ','
        << outcome_field(r.outcome_b) << ',' << int{r.msg_to_a};
    if (r.msg_to_a != r.msg_to_b) out << ':' << int{r.msg_to_b};
    out << ',' << (r.in_sample ? 1 : 0) << '\n';
  }
}

namespace {

Choice parse_choice(const std::string& f, std::size_t line) {
  if (f == "M") return Choice::MeasureResend;
  if (f == "R") return Choice::Reflect;
  fail(ErrorCode::Parse, "transcript line " + std::to_string(line) + ": bad choice '" + f + "'");
}

std::optional<std::uint8_t> parse_outcome(const std::string& f, std::size_t line) {
  if (f == "-") return std::nullopt;
  if (f == "0" || f == "1") return static_cast<std::uint8_t>(f[0] - '0');
  fail(ErrorCode::Parse, "transcript line " + std::to_string(line) + ": bad outcome '" + f + "'");
}

std::uint8_t parse_msg(const std::string& f, std::size_t line) {
  if (f.size() == 1 && f[0] >= '0' && f[0] <= '3') return static_cast<std::uint8_t>(f[0] - '0');
  fail(ErrorCode::Parse, "transcript line " + std::to_string(line) + ": bad message '" + f + "'");
}

}  // namespace

std::vector<RoundRecord> read_transcript(std::istream& in) {
  std::vector<RoundRecord> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text.rfind("index,", 0) == 0) continue;

    std::vector<std::string> f;
    std::stringstream ss(text);
    for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
    require(f.size() == 7, ErrorCode::Parse, "transcript line " + std::to_string(line) + ": expected 7 fields");

    RoundRecord r;
    try {
      r.index = std::stoull(f[0]);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "transcript line " + std::to_string(line) + ": bad index");
    }
    r.choice_a = parse_choice(f[1], line);
    r.choice_b = parse_choice(f[2], line);
    r.outcome_a = parse_outcome(f[3], line);
    r.outcome_b = parse_outcome(f[4], line);
    require(r.outcome_a.has_value() == (r.choice_a == Choice::MeasureResend) &&
                r.outcome_b.has_value() == (r.choice_b == Choice::MeasureResend),
            ErrorCode::Parse,
            "transcript line " + std::to_string(line) + ": outcome present iff Measure-Resend");
    if (const auto colon = f[5].find(':'); colon != std::string::npos) {
      r.msg_to_a = parse_msg(f[5].substr(0, colon), line);
      r.msg_to_b = parse_msg(f[5].substr(colon + 1), line);
    } else {
      r.msg_to_a = r.msg_to_b = parse_msg(f[5], line);
    }
    require(f[6] == "0" || f[6] == "1", ErrorCode::Parse,
            "transcript line " + std::to_string(line) + ": in_sample must be 0 or 1");
    r.in_sample = f[6] == "1";
    records.push_back(r);
  }
  return records;
}

}  // namespace msqkd
