#pragma once

// Round-by-round simulation of the quantum communication, sampling and raw
// key stages. Each round: the server prepares a two-qubit state, Alice and
// Bob independently Measure-Resend (Z basis) or Reflect, and the server
// announces one of four messages.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "msqkd/attack.hpp"
#include "msqkd/rng.hpp"

namespace msqkd {

struct ObservedStats;

enum class Choice : std::uint8_t { MeasureResend, Reflect };
enum class Mode : std::uint8_t { NoFlip, Flip };
enum class ModePolicy : std::uint8_t { Auto, ForceFlip, ForceNoFlip };

const char* to_string(Mode mode);

struct RoundRecord {
  std::uint64_t index = 0;
  Choice choice_a = Choice::Reflect;
  Choice choice_b = Choice::Reflect;
  std::optional<std::uint8_t> outcome_a;  // present iff choice_a == MeasureResend
  std::optional<std::uint8_t> outcome_b;
  std::uint8_t msg_to_a = 0;
  std::uint8_t msg_to_b = 0;
  bool in_sample = false;

  bool both_measure() const {
    return choice_a == Choice::MeasureResend && choice_b == Choice::MeasureResend;
  }
  bool operator==(const RoundRecord&) const = default;
};

// Honest server behind independent forward and reverse depolarizing links.
struct HonestNoise {
  double q_forward = 0.0;
  double q_reverse = 0.0;
};

struct ProtocolConfig {
  std::uint64_t rounds = 0;
  double p_measure = 0.5;
  double sample_fraction = 0.5;
  std::variant<HonestNoise, AttackModel> noise = HonestNoise{};
  std::uint64_t seed = 0;
  ModePolicy mode_policy = ModePolicy::Auto;
  unsigned threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

// One round driven by `rng`. Draw order is fixed (choice A, choice B, forward
// noise, measurement A, measurement B, reverse noise, server measurement) so
// every branch consumes the same number of samples.
RoundRecord run_round(const ProtocolConfig& cfg, std::uint64_t index, RoundStream& rng);

// `cfg.rounds` records; round k uses the stream (cfg.seed, k), so the output
// is independent of cfg.threads.
std::vector<RoundRecord> simulate(const ProtocolConfig& cfg);

struct SamplingOutcome {
  std::vector<RoundRecord> records;
  bool abort = false;  // some round had msg_to_a != msg_to_b
};

// Flags ceil(fraction * N) rounds chosen by a seeded Fisher-Yates prefix.
SamplingOutcome sampling_stage(std::vector<RoundRecord> records, double sample_fraction,
                               RoundStream& rng);

// argmin over H(A|B); ties (within 1e-12) resolve to NoFlip.
Mode choose_mode(const ObservedStats& stats);

Mode resolve_mode(ModePolicy policy, const ObservedStats& stats);

struct RawKey {
  std::vector<std::uint8_t> alice;
  std::vector<std::uint8_t> bob;

  std::size_t mismatches() const;
};

RawKey extract_raw_key(std::span<const RoundRecord> records, Mode mode);

// Transcript text format, one round per line:
//   index,choice_a,choice_b,outcome_a,outcome_b,msg,in_sample
// choices are M (Measure-Resend) or R (Reflect), absent outcomes are '-',
// in_sample is 0/1. When the two parties received different messages the
// msg field is written as "a:b".
void write_transcript(std::ostream& out, std::span<const RoundRecord> records);
std::vector<RoundRecord> read_transcript(std::istream& in);

bool messages_consistent(std::span<const RoundRecord> records);

}  // namespace msqkd
