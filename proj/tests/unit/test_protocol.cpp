#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/protocol.hpp"
#include "msqkd/stats.hpp"

using namespace msqkd;

namespace {

ProtocolConfig honest(double qf, double qr, std::uint64_t rounds, std::uint64_t seed = 1) {
  ProtocolConfig cfg;
  cfg.rounds = rounds;
  cfg.noise = HonestNoise{qf, qr};
  cfg.seed = seed;
  return cfg;
}

RoundRecord mr_mr(std::uint8_t a, std::uint8_t b, std::uint8_t msg) {
  RoundRecord r;
  r.choice_a = r.choice_b = Choice::MeasureResend;
  r.outcome_a = a;
  r.outcome_b = b;
  r.msg_to_a = r.msg_to_b = msg;
  return r;
}

// Runs rounds until one with the requested choices turns up.
RoundRecord first_with(const ProtocolConfig& cfg, Choice a, Choice b, std::uint64_t start) {
  for (std::uint64_t k = start;; ++k) {
    RoundStream rng(cfg.seed, k);
    auto r = run_round(cfg, k, rng);
    if (r.choice_a == a && r.choice_b == b) return r;
  }
}

}  // namespace

TEST(RunRound, NoiselessBothReflectAlwaysPhi0) {
  const auto cfg = honest(0, 0, 1);
  for (std::uint64_t k = 0; k < 200; k += 1) {
    const auto r = first_with(cfg, Choice::Reflect, Choice::Reflect, k * 10);
    EXPECT_EQ(r.msg_to_a, 0);
    EXPECT_FALSE(r.outcome_a.has_value());
    EXPECT_FALSE(r.outcome_b.has_value());
  }
}

TEST(RunRound, NoiselessBothMeasureCorrelatedAndPhi01) {
  const auto cfg = honest(0, 0, 1);
  int ones = 0, n = 0;
  for (std::uint64_t k = 0; k < 4000; ++k) {
    RoundStream rng(cfg.seed, k);
    const auto r = run_round(cfg, k, rng);
    if (!r.both_measure()) continue;
    ++n;
    EXPECT_EQ(*r.outcome_a, *r.outcome_b);
    EXPECT_LE(r.msg_to_a, 1);
    ones += r.msg_to_a;
  }
  const double sigma = std::sqrt(0.25 / n);
  EXPECT_LE(std::abs(ones / double(n) - 0.5), 3 * sigma);
}

TEST(RunRound, FullyMixedForwardGivesIndependentBits) {
  const auto cfg = honest(0.5, 0, 1);
  std::array<int, 4> cell{};
  int n = 0;
  for (std::uint64_t k = 0; k < 40000; ++k) {
    RoundStream rng(cfg.seed, k);
    const auto r = run_round(cfg, k, rng);
    if (!r.both_measure()) continue;
    ++n;
    ++cell[2 * *r.outcome_a + *r.outcome_b];
  }
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  for (int c : cell) EXPECT_LE(std::abs(c / double(n) - 0.25), 3 * sigma);
}

TEST(RunRound, OutcomePresentIffMeasure) {
  const auto cfg = honest(0.1, 0.2, 1);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    RoundStream rng(3, k);
    const auto r = run_round(cfg, k, rng);
    EXPECT_EQ(r.outcome_a.has_value(), r.choice_a == Choice::MeasureResend);
    EXPECT_EQ(r.outcome_b.has_value(), r.choice_b == Choice::MeasureResend);
    EXPECT_EQ(r.msg_to_a, r.msg_to_b);
    EXPECT_LT(r.msg_to_a, 4);
  }
}

TEST(RunRound, AttackPathHonestModelMatchesHonestServer) {
  ProtocolConfig cfg;
  cfg.noise = AttackModel::honest();
  cfg.rounds = 1;
  for (std::uint64_t k = 0; k < 500; ++k) {
    RoundStream rng(5, k);
    const auto r = run_round(cfg, k, rng);
    if (r.both_measure()) {
      EXPECT_EQ(*r.outcome_a, *r.outcome_b);
      EXPECT_LE(r.msg_to_a, 1);
    } else if (!r.outcome_a && !r.outcome_b) {
      EXPECT_EQ(r.msg_to_a, 0);
    }
  }
}

TEST(Simulate, ZeroRoundsIsEmpty) { EXPECT_TRUE(simulate(honest(0, 0, 0)).empty()); }

TEST(Simulate, SameSeedSameTranscript) {
  EXPECT_EQ(simulate(honest(0.1, 0.1, 2000, 42)), simulate(honest(0.1, 0.1, 2000, 42)));
  EXPECT_NE(simulate(honest(0.1, 0.1, 2000, 42)), simulate(honest(0.1, 0.1, 2000, 43)));
}

TEST(Simulate, ThreadCountDoesNotChangeOutput) {
  auto cfg = honest(0.1, 0.05, 5000, 9);
  const auto serial = simulate(cfg);
  for (unsigned t : {2u, 3u, 8u}) {
    cfg.threads = t;
    EXPECT_EQ(simulate(cfg), serial) << t << " threads";
  }
}

TEST(Simulate, IndicesInOrder) {
  const auto recs = simulate(honest(0, 0, 300));
  for (std::size_t k = 0; k < recs.size(); ++k) EXPECT_EQ(recs[k].index, k);
}

TEST(Simulate, BothMeasureFractionWithinThreeSigma) {
  const auto recs = simulate(honest(0.1, 0.1, 100000, 11));
  const auto n = std::count_if(recs.begin(), recs.end(), [](const auto& r) { return r.both_measure(); });
  const double sigma = std::sqrt(0.25 * 0.75 / 1e5);
  EXPECT_LE(std::abs(n / 1e5 - 0.25), 3 * sigma);
}

TEST(Simulate, MessagesAlwaysConsistent) {
  const auto recs = simulate(honest(0.3, 0.2, 5000));
  EXPECT_TRUE(messages_consistent(recs));
}

TEST(Simulate, RejectsBadConfig) {
  auto cfg = honest(0, 0, 10);
  cfg.p_measure = 1.0;
  EXPECT_THROW(simulate(cfg), Error);
  cfg = honest(0.6, 0, 10);
  EXPECT_THROW(simulate(cfg), Error);
  cfg = honest(0, 0, 10);
  cfg.sample_fraction = 0.0;
  EXPECT_THROW(simulate(cfg), Error);
  AttackModel bad = AttackModel::honest();
  bad.vectors[0][0] *= 2.0;
  cfg.sample_fraction = 0.5;
  cfg.noise = bad;
  EXPECT_THROW(simulate(cfg), Error);
}

TEST(Sampling, ExactCount) {
  RoundStream rng(1, streams::kSampling);
  const auto out = sampling_stage(simulate(honest(0, 0, 1000)), 0.1, rng);
  EXPECT_EQ(std::count_if(out.records.begin(), out.records.end(), [](const auto& r) { return r.in_sample; }), 100);
  EXPECT_FALSE(out.abort);
}

TEST(Sampling, CeilingOfFraction) {
  RoundStream rng(2, 0);
  const auto out = sampling_stage(simulate(honest(0, 0, 7)), 0.5, rng);
  EXPECT_EQ(std::count_if(out.records.begin(), out.records.end(), [](const auto& r) { return r.in_sample; }), 4);
}

TEST(Sampling, InconsistentMessageAborts) {
  auto recs = simulate(honest(0, 0, 50));
  recs[17].msg_to_a = 0;
  recs[17].msg_to_b = 2;
  RoundStream rng(3, 0);
  EXPECT_TRUE(sampling_stage(recs, 0.5, rng).abort);
}

TEST(Sampling, EmptyInputRejected) {
  RoundStream rng(3, 0);
  EXPECT_THROW(sampling_stage({}, 0.5, rng), Error);
}

TEST(Sampling, KeyUsesEveryUnsampledBothMeasureRound) {
  RoundStream rng(4, 0);
  const auto out = sampling_stage(simulate(honest(0, 0, 2000)), 0.3, rng);
  const auto expected = std::count_if(out.records.begin(), out.records.end(),
                                      [](const auto& r) { return r.both_measure() && !r.in_sample; });
  EXPECT_EQ(static_cast<long>(extract_raw_key(out.records, Mode::NoFlip).alice.size()), expected);
}

TEST(RawKey, FlipInvertsBobOnMessages23) {
  const std::vector<RoundRecord> recs{mr_mr(0, 1, 2)};
  const auto flip = extract_raw_key(recs, Mode::Flip);
  EXPECT_EQ(flip.alice, std::vector<std::uint8_t>{0});
  EXPECT_EQ(flip.bob, std::vector<std::uint8_t>{0});
  const auto keep = extract_raw_key(recs, Mode::NoFlip);
  EXPECT_EQ(keep.bob, std::vector<std::uint8_t>{1});
  EXPECT_EQ(keep.mismatches(), 1u);
}

TEST(RawKey, FlipLeavesMessages01) {
  const std::vector<RoundRecord> recs{mr_mr(1, 1, 0), mr_mr(0, 0, 1)};
  const auto key = extract_raw_key(recs, Mode::Flip);
  EXPECT_EQ(key.bob, (std::vector<std::uint8_t>{1, 0}));
}

TEST(RawKey, MixedChoicesContributeNothing) {
  RoundRecord r = mr_mr(0, 0, 0);
  r.choice_b = Choice::Reflect;
  r.outcome_b.reset();
  const std::vector<RoundRecord> recs{r};
  EXPECT_TRUE(extract_raw_key(recs, Mode::Flip).alice.empty());
}

TEST(RawKey, HonestNoiselessKeysAgreeInEitherMode) {
  RoundStream rng(5, 0);
  const auto out = sampling_stage(simulate(honest(0, 0, 5000, 21)), 0.5, rng);
  for (Mode m : {Mode::NoFlip, Mode::Flip}) {
    const auto key = extract_raw_key(out.records, m);
    EXPECT_GT(key.alice.size(), 500u);
    EXPECT_EQ(key.alice, key.bob);
  }
}

TEST(Mode, ChooseModeExamples) {
  EXPECT_EQ(choose_mode(predict_depolarization(0.1, 0.1)), Mode::NoFlip);
  EXPECT_EQ(choose_mode(predict_depolarization(0.1, 0.0)), Mode::Flip);
  EXPECT_EQ(choose_mode(predict_depolarization(0.0, 0.1)), Mode::NoFlip);
}

TEST(Mode, PolicyOverrides) {
  const auto s = predict_depolarization(0.1, 0.0);
  EXPECT_EQ(resolve_mode(ModePolicy::ForceNoFlip, s), Mode::NoFlip);
  EXPECT_EQ(resolve_mode(ModePolicy::ForceFlip, predict_depolarization(0, 0.1)), Mode::Flip);
  EXPECT_EQ(resolve_mode(ModePolicy::Auto, s), Mode::Flip);
  EXPECT_STREQ(to_string(Mode::Flip), "FLIP");
  EXPECT_STREQ(to_string(Mode::NoFlip), "NO-FLIP");
}

TEST(Mode, IncompleteStatsRejected) {
  ObservedStats s = predict_depolarization(0.1, 0.1);
  s.msg[0][0][2].reset();
  EXPECT_THROW(choose_mode(s), MissingCellsError);
}

TEST(Transcript, RoundTrip) {
  RoundStream rng(6, 0);
  auto recs = sampling_stage(simulate(honest(0.1, 0.2, 500)), 0.4, rng).records;
  recs[3].msg_to_b = static_cast<std::uint8_t>((recs[3].msg_to_a + 1) % 4);
  std::stringstream ss;
  write_transcript(ss, recs);
  EXPECT_EQ(read_transcript(ss), recs);
}

TEST(Transcript, Format) {
  RoundRecord r = mr_mr(0, 1, 2);
  r.index = 5;
  r.in_sample = true;
  RoundRecord q;
  q.index = 6;
  q.choice_a = Choice::MeasureResend;
  q.outcome_a = 1;
  q.msg_to_a = 0;
  q.msg_to_b = 3;
  std::stringstream ss;
  const std::vector<RoundRecord> recs{r, q};
  write_transcript(ss, recs);
  EXPECT_EQ(ss.str(), "index,choice_a,choice_b,outcome_a,outcome_b,msg,in_sample\n5,M,M,0,1,2,1\n6,M,R,1,-,0:3,0\n");
}

TEST(Transcript, RejectsMalformedLines) {
  for (const char* bad : {"0,M,M,0,1,2\n", "0,X,M,0,1,2,0\n", "0,M,M,-,1,2,0\n", "0,R,R,1,-,0,0\n",
                          "0,M,M,0,1,4,0\n", "x,M,M,0,1,2,0\n", "0,M,M,0,1,2,2\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(read_transcript(ss), Error) << bad;
  }
}
