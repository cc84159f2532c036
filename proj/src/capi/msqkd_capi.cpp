#include "msqkd/msqkd.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "msqkd/attack.hpp"
#include "msqkd/error.hpp"
#include "msqkd/keyrate.hpp"
#include "msqkd/protocol.hpp"
#include "msqkd/reduction.hpp"
#include "msqkd/stats.hpp"
#include "msqkd/sweep.hpp"

struct msqkd_stats {
  msqkd::ObservedStats value;
};
struct msqkd_attack {
  msqkd::AttackModel value;
};
struct msqkd_transcript {
  std::vector<msqkd::RoundRecord> records;
  bool aborted = false;
};
struct msqkd_sweep {
  std::vector<msqkd::SweepRow> rows;
};

namespace {

thread_local std::string g_last_error;

msqkd_status to_status(msqkd::ErrorCode code) {
  using msqkd::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MSQKD_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return MSQKD_DIMENSION;
    case ErrorCode::IsometryViolation: return MSQKD_ISOMETRY;
    case ErrorCode::MissingCells: return MSQKD_MISSING_CELLS;
    case ErrorCode::InfeasibleStats: return MSQKD_INFEASIBLE;
    case ErrorCode::Io: return MSQKD_IO;
    case ErrorCode::Parse: return MSQKD_PARSE;
  }
  return MSQKD_INTERNAL;
}

msqkd_status set_error(msqkd_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class Fn>
msqkd_status guarded(Fn&& fn) {
  try {
    fn();
    return MSQKD_OK;
  } catch (const msqkd::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MSQKD_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MSQKD_INTERNAL, e.what());
  } catch (...) {
    return set_error(MSQKD_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  msqkd::require(p != nullptr, msqkd::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

std::ifstream open_in(const char* path) {
  need(path, "path");
  std::ifstream in(path, std::ios::binary);
  msqkd::require(in.good(), msqkd::ErrorCode::Io, std::string("cannot open ") + path);
  return in;
}

void write_file(const char* path, const std::string& text) {
  need(path, "path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  msqkd::require(out.good(), msqkd::ErrorCode::Io, std::string("cannot write ") + path);
  out << text;
  out.flush();
  msqkd::require(out.good(), msqkd::ErrorCode::Io, std::string("error writing ") + path);
}

void copy_text(const std::string& joined, char* buf, size_t buf_size, size_t* needed) {
  if (needed) *needed = joined.size() + 1;
  if (buf && buf_size > 0) {
    const size_t n = std::min(joined.size(), buf_size - 1);
    std::memcpy(buf, joined.data(), n);
    buf[n] = '\0';
  }
}

void copy_out(const std::vector<std::string>& names, char* buf, size_t buf_size, size_t* needed) {
  std::string joined;
  for (const auto& n : names) {
    if (!joined.empty()) joined += ' ';
    joined += n;
  }
  copy_text(joined, buf, buf_size, needed);
}

int side_index(char c) {
  if (c == '0') return 0;
  if (c == '1') return 1;
  if (c == 'R') return msqkd::kReflect;
  return -1;
}

msqkd::ModePolicy to_policy(msqkd_mode_policy p) {
  switch (p) {
    case MSQKD_POLICY_AUTO: return msqkd::ModePolicy::Auto;
    case MSQKD_POLICY_FORCE_FLIP: return msqkd::ModePolicy::ForceFlip;
    case MSQKD_POLICY_FORCE_NOFLIP: return msqkd::ModePolicy::ForceNoFlip;
  }
  msqkd::fail(msqkd::ErrorCode::InvalidArgument, "unknown mode policy");
}

msqkd_mode to_c(msqkd::Mode m) { return m == msqkd::Mode::Flip ? MSQKD_MODE_FLIP : MSQKD_MODE_NOFLIP; }

}  // namespace

extern "C" {

const char* msqkd_version(void) { return "1.0.0"; }

const char* msqkd_last_error(void) { return g_last_error.c_str(); }

msqkd_status msqkd_stats_predict_depolarization(double q_forward, double q_reverse, msqkd_stats** out) {
  return guarded([&] {
    need(out, "out");
    *out = new msqkd_stats{msqkd::predict_depolarization(q_forward, q_reverse)};
  });
}

msqkd_status msqkd_stats_predict_attack(const msqkd_attack* attack, msqkd_stats** out) {
  return guarded([&] {
    need(attack, "attack");
    need(out, "out");
    *out = new msqkd_stats{msqkd::predict_from_attack(attack->value)};
  });
}

msqkd_status msqkd_stats_read(const char* path, msqkd_stats** out) {
  return guarded([&] {
    need(out, "out");
    std::ifstream in = open_in(path);
    *out = new msqkd_stats{msqkd::read_stats(in)};
  });
}

msqkd_status msqkd_stats_write(const msqkd_stats* stats, const char* path) {
  return guarded([&] {
    need(stats, "stats");
    std::ostringstream os;
    msqkd::write_stats(os, stats->value);
    write_file(path, os.str());
  });
}

msqkd_status msqkd_stats_format(const msqkd_stats* stats, char* buf, size_t buf_size, size_t* needed) {
  return guarded([&] {
    need(stats, "stats");
    std::ostringstream os;
    msqkd::write_stats(os, stats->value);
    copy_text(os.str(), buf, buf_size, needed);
  });
}

msqkd_status msqkd_stats_get(const msqkd_stats* stats, const char* cell, double* value, int* present) {
  return guarded([&] {
    need(stats, "stats");
    need(cell, "cell");
    need(value, "value");
    const std::string name(cell);
    std::optional<double> v;
    bool known = false;
    if (name.size() == 4 && name.compare(0, 2, "P_") == 0) {
      const int i = side_index(name[2]);
      const int j = side_index(name[3]);
      if (i >= 0 && i < 2 && j >= 0 && j < 2) {
        v = stats->value.joint[static_cast<size_t>(i)][static_cast<size_t>(j)];
        known = true;
      }
    } else if (name.size() == 7 && name.compare(0, 3, "Pm_") == 0 && name[5] == '_') {
      const int x = side_index(name[3]);
      const int y = side_index(name[4]);
      const int m = name[6] - '0';
      if (x >= 0 && y >= 0 && m >= 0 && m < 4) {
        v = stats->value.msg[static_cast<size_t>(x)][static_cast<size_t>(y)][static_cast<size_t>(m)];
        known = true;
      }
    }
    msqkd::require(known, msqkd::ErrorCode::InvalidArgument, "unknown cell name " + name);
    *value = v.value_or(std::numeric_limits<double>::quiet_NaN());
    if (present) *present = v.has_value() ? 1 : 0;
  });
}

msqkd_status msqkd_stats_missing(const msqkd_stats* stats, char* buf, size_t buf_size, size_t* needed) {
  return guarded([&] {
    need(stats, "stats");
    copy_out(stats->value.missing_cells(), buf, buf_size, needed);
  });
}

msqkd_status msqkd_stats_low_confidence(const msqkd_stats* stats, uint64_t min_samples, char* buf,
                                        size_t buf_size, size_t* needed) {
  return guarded([&] {
    need(stats, "stats");
    copy_out(stats->value.low_confidence_rows(min_samples), buf, buf_size, needed);
  });
}

void msqkd_stats_free(msqkd_stats* stats) { delete stats; }

msqkd_status msqkd_attack_read(const char* path, msqkd_attack** out) {
  return guarded([&] {
    need(out, "out");
    std::ifstream in = open_in(path);
    std::ostringstream text;
    text << in.rdbuf();
    *out = new msqkd_attack{msqkd::parse_attack_json(text.str())};
  });
}

msqkd_status msqkd_attack_honest(msqkd_attack** out) {
  return guarded([&] {
    need(out, "out");
    *out = new msqkd_attack{msqkd::AttackModel::honest()};
  });
}

msqkd_status msqkd_attack_eve_dim(const msqkd_attack* attack, size_t* eve_dim) {
  return guarded([&] {
    need(attack, "attack");
    need(eve_dim, "eve_dim");
    *eve_dim = attack->value.eve_dim;
  });
}

msqkd_status msqkd_attack_exact_entropy(const msqkd_attack* attack, double* h_ae) {
  return guarded([&] {
    need(attack, "attack");
    need(h_ae, "h_ae");
    *h_ae = msqkd::exact_entropy_oracle(attack->value);
  });
}

void msqkd_attack_free(msqkd_attack* attack) { delete attack; }

void msqkd_sim_config_init(msqkd_sim_config* cfg) {
  if (!cfg) return;
  *cfg = msqkd_sim_config{};
  cfg->rounds = 1000;
  cfg->p_measure = 0.5;
  cfg->sample_fraction = 0.5;
  cfg->mode_policy = MSQKD_POLICY_AUTO;
  cfg->threads = 1;
}

msqkd_status msqkd_simulate(const msqkd_sim_config* cfg, msqkd_transcript** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    msqkd::ProtocolConfig pc;
    pc.rounds = cfg->rounds;
    pc.p_measure = cfg->p_measure;
    pc.sample_fraction = cfg->sample_fraction;
    if (cfg->attack)
      pc.noise = cfg->attack->value;
    else
      pc.noise = msqkd::HonestNoise{cfg->q_forward, cfg->q_reverse};
    pc.seed = cfg->seed;
    pc.mode_policy = to_policy(cfg->mode_policy);
    pc.threads = cfg->threads;
    msqkd::require(pc.rounds >= 1, msqkd::ErrorCode::InvalidArgument, "rounds must be at least 1");

    auto records = msqkd::simulate(pc);
    msqkd::RoundStream rng(pc.seed, msqkd::streams::kSampling);
    auto sampled = msqkd::sampling_stage(std::move(records), pc.sample_fraction, rng);
    *out = new msqkd_transcript{std::move(sampled.records), sampled.abort};
  });
}

msqkd_status msqkd_transcript_read(const char* path, msqkd_transcript** out) {
  return guarded([&] {
    need(out, "out");
    std::ifstream in = open_in(path);
    auto records = msqkd::read_transcript(in);
    const bool aborted = !msqkd::messages_consistent(records);
    *out = new msqkd_transcript{std::move(records), aborted};
  });
}

msqkd_status msqkd_transcript_write(const msqkd_transcript* t, const char* path) {
  return guarded([&] {
    need(t, "transcript");
    std::ostringstream os;
    msqkd::write_transcript(os, t->records);
    write_file(path, os.str());
  });
}

int msqkd_transcript_aborted(const msqkd_transcript* t) { return t && t->aborted ? 1 : 0; }

size_t msqkd_transcript_size(const msqkd_transcript* t) { return t ? t->records.size() : 0; }

msqkd_status msqkd_transcript_get(const msqkd_transcript* t, size_t i, msqkd_record* out) {
  return guarded([&] {
    need(t, "transcript");
    need(out, "out");
    msqkd::require(i < t->records.size(), msqkd::ErrorCode::InvalidArgument, "record index out of range");
    const auto& r = t->records[i];
    out->index = r.index;
    out->choice_a = r.choice_a == msqkd::Choice::MeasureResend ? 0 : 1;
    out->choice_b = r.choice_b == msqkd::Choice::MeasureResend ? 0 : 1;
    out->outcome_a = r.outcome_a ? *r.outcome_a : -1;
    out->outcome_b = r.outcome_b ? *r.outcome_b : -1;
    out->msg_to_a = r.msg_to_a;
    out->msg_to_b = r.msg_to_b;
    out->in_sample = r.in_sample ? 1 : 0;
  });
}

msqkd_status msqkd_transcript_tally(const msqkd_transcript* t, msqkd_stats** out) {
  return guarded([&] {
    need(t, "transcript");
    need(out, "out");
    *out = new msqkd_stats{msqkd::tally(t->records)};
  });
}

msqkd_status msqkd_transcript_raw_key(const msqkd_transcript* t, const msqkd_stats* stats,
                                      msqkd_mode_policy policy, msqkd_raw_key_summary* out) {
  return guarded([&] {
    need(t, "transcript");
    need(out, "out");
    msqkd::Mode mode = msqkd::Mode::NoFlip;
    if (policy == MSQKD_POLICY_FORCE_FLIP) {
      mode = msqkd::Mode::Flip;
    } else if (policy == MSQKD_POLICY_AUTO) {
      need(stats, "stats");
      mode = msqkd::choose_mode(stats->value);
    } else {
      to_policy(policy);
    }
    const auto key = msqkd::extract_raw_key(t->records, mode);
    out->mode = to_c(mode);
    out->length = key.alice.size();
    out->mismatches = key.mismatches();
  });
}

void msqkd_transcript_free(msqkd_transcript* t) { delete t; }

msqkd_status msqkd_keyrate(const msqkd_stats* stats, msqkd_keyrate_report* out) {
  return guarded([&] {
    need(stats, "stats");
    need(out, "out");
    const auto rep = msqkd::key_rate(stats->value);
    out->h_ae_lower = rep.h_ae_lower;
    for (size_t m = 0; m < 4; ++m) out->splits[m] = rep.splits[m];
    out->h_ab_noflip = rep.h_ab_noflip;
    out->h_ab_flip = rep.h_ab_flip;
    out->rate_noflip = rep.rate_noflip;
    out->rate_flip = rep.rate_flip;
    out->rate_best = rep.best_rate();
    out->chosen_mode = to_c(rep.chosen_mode);
    for (size_t a = 0; a < 2; ++a)
      for (size_t b = 0; b < 2; ++b) {
        out->p_key_noflip[a][b] = rep.p_key_noflip[a][b];
        out->p_key_flip[a][b] = rep.p_key_flip[a][b];
      }
  });
}

void msqkd_sweep_config_init(msqkd_sweep_config* cfg) {
  if (!cfg) return;
  const msqkd::SweepConfig d;
  cfg->q_max = d.q_max;
  cfg->steps = d.steps;
  cfg->forward_multiplier = d.forward_multiplier;
  cfg->reverse_multiplier = d.reverse_multiplier;
  cfg->threads = d.threads;
}

msqkd_status msqkd_sweep_run(const msqkd_sweep_config* cfg, msqkd_sweep** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    msqkd::SweepConfig sc;
    sc.q_max = cfg->q_max;
    sc.steps = cfg->steps;
    sc.forward_multiplier = cfg->forward_multiplier;
    sc.reverse_multiplier = cfg->reverse_multiplier;
    sc.threads = cfg->threads;
    *out = new msqkd_sweep{msqkd::run_sweep(sc)};
  });
}

size_t msqkd_sweep_size(const msqkd_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

msqkd_status msqkd_sweep_get(const msqkd_sweep* sweep, size_t i, msqkd_sweep_row* out) {
  return guarded([&] {
    need(sweep, "sweep");
    need(out, "out");
    msqkd::require(i < sweep->rows.size(), msqkd::ErrorCode::InvalidArgument, "row index out of range");
    const auto& r = sweep->rows[i];
    *out = msqkd_sweep_row{r.q,         r.qf,        r.qr,        r.h_ae,      r.h_ab_noflip,
                           r.h_ab_flip, r.rate_noflip, r.rate_flip, r.rate_best, to_c(r.mode)};
  });
}

void msqkd_sweep_free(msqkd_sweep* sweep) { delete sweep; }

msqkd_status msqkd_zero_rate_threshold(double forward_multiplier, double reverse_multiplier, double lo,
                                       double hi, double tol, double* q_star) {
  return guarded([&] {
    need(q_star, "q_star");
    *q_star = msqkd::find_zero_rate_threshold(forward_multiplier, reverse_multiplier, lo, hi, tol);
  });
}

void msqkd_reduce_config_init(msqkd_reduce_config* cfg) {
  if (!cfg) return;
  cfg->trials = 100;
  cfg->eve_dim = 4;
  cfg->seed = 1;
  cfg->rounds = 1;
  cfg->tolerance = 1e-9;
}

msqkd_status msqkd_reduce_check(const msqkd_reduce_config* cfg, const msqkd_attack* fixed,
                                msqkd_reduce_summary* out) {
  using namespace msqkd::reduction;
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    msqkd::require(cfg->rounds >= 1 && cfg->rounds <= kMaxRounds, msqkd::ErrorCode::InvalidArgument,
                   "rounds must be 1 or 2");
    msqkd::require(cfg->eve_dim >= 1 && cfg->eve_dim <= msqkd::AttackModel::kMaxEveDim,
                   msqkd::ErrorCode::DimensionMismatch, "eve dimension must be between 1 and 16");
    msqkd::require(cfg->tolerance >= 0.0, msqkd::ErrorCode::InvalidArgument, "tolerance must be non-negative");

    *out = msqkd_reduce_summary{0, 0, -1, 0, 1.0, 1.0};
    const unsigned bits = 1u << cfg->rounds;

    auto check = [&](const MultiRoundAttack& attack, msqkd::RoundStream* rng, uint64_t trial, uint64_t seed) {
      std::vector<BasisChoice> choices;
      if (cfg->rounds == 1 || rng == nullptr) {
        for (unsigned a = 0; a < bits; ++a)
          for (unsigned b = 0; b < bits; ++b) choices.push_back(BasisChoice::from_bits(cfg->rounds, a, b));
      } else {
        for (int k = 0; k < 4; ++k) {
          const auto a = static_cast<unsigned>(rng->next_u64() % bits);
          const auto b = static_cast<unsigned>(rng->next_u64() % bits);
          choices.push_back(BasisChoice::from_bits(cfg->rounds, a, b));
        }
      }
      for (const auto& choice : choices) {
        const auto r = verify_equivalence(attack, choice, cfg->tolerance);
        ++out->cases;
        out->min_fidelity = std::min(out->min_fidelity, r.fidelity);
        out->min_non_abort = std::min(out->min_non_abort, r.non_abort_prob);
        if (!r.passed) {
          if (out->failures == 0) {
            out->first_failing_trial = static_cast<int64_t>(trial);
            out->first_failing_seed = seed;
          }
          ++out->failures;
        }
      }
    };

    if (fixed) {
      check(MultiRoundAttack::collective(fixed->value, cfg->rounds), nullptr, 0, cfg->seed);
      return;
    }
    for (uint64_t t = 0; t < cfg->trials; ++t) {
      const uint64_t seed = cfg->seed + t;
      msqkd::RoundStream rng(seed, msqkd::streams::kReduction);
      const auto attack = MultiRoundAttack::random(rng, cfg->rounds, cfg->eve_dim);
      check(attack, &rng, t, seed);
    }
  });
}

}  // extern "C"
