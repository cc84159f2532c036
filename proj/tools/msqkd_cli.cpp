// msqkd command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msqkd/msqkd.h"

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kInfeasible = 2, kInvalid = 3, kAborted = 4 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(msqkd_status s) {
  switch (s) {
    case MSQKD_OK: return kOk;
    case MSQKD_INFEASIBLE:
    case MSQKD_MISSING_CELLS: return kInfeasible;
    default: return kInvalid;
  }
}

void check(msqkd_status s) {
  if (s != MSQKD_OK) throw Failure{exit_code(s), msqkd_last_error()};
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* mode_name(msqkd_mode m) { return m == MSQKD_MODE_FLIP ? "FLIP" : "NO-FLIP"; }

msqkd_mode_policy parse_policy(const std::string& s) {
  if (s == "auto") return MSQKD_POLICY_AUTO;
  if (s == "flip") return MSQKD_POLICY_FORCE_FLIP;
  return MSQKD_POLICY_FORCE_NOFLIP;
}

// RAII wrappers over the opaque handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
};
using Stats = Handle<msqkd_stats, msqkd_stats_free>;
using Attack = Handle<msqkd_attack, msqkd_attack_free>;
using Transcript = Handle<msqkd_transcript, msqkd_transcript_free>;
using Sweep = Handle<msqkd_sweep, msqkd_sweep_free>;

std::string list_string(msqkd_status (*fn)(const msqkd_stats*, uint64_t, char*, size_t, size_t*),
                        const msqkd_stats* s, uint64_t arg) {
  size_t needed = 0;
  check(fn(s, arg, nullptr, 0, &needed));
  std::string buf(needed, '\0');
  check(fn(s, arg, buf.data(), buf.size(), &needed));
  buf.resize(needed ? needed - 1 : 0);
  return buf;
}

msqkd_status low_conf(const msqkd_stats* s, uint64_t n, char* b, size_t bs, size_t* need) {
  return msqkd_stats_low_confidence(s, n, b, bs, need);
}

void warn_low_confidence(const msqkd_stats* s, uint64_t min_samples) {
  const std::string rows = list_string(low_conf, s, min_samples);
  if (!rows.empty())
    std::fprintf(stderr, "warning: fewer than %llu samples in: %s\n",
                 static_cast<unsigned long long>(min_samples), rows.c_str());
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kInvalid, "cannot write " + path};
  out << text;
}

// ---- config files -------------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kInvalid, "cannot open config " + path};
  std::vector<std::pair<std::string, std::string>> items;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Failure{kInvalid, path + ":" + std::to_string(lineno) + ": expected key=value"};
    items.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return items;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

// Appends config entries for flags absent from the command line, so explicit
// flags always win.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  CLI::App* sub = nullptr;
  for (const auto& a : args)
    if (auto* s = app.get_subcommand_no_throw(a)) {
      sub = s;
      break;
    }
  if (!sub) throw Failure{kInvalid, "--config needs a subcommand"};

  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config") throw Failure{kInvalid, "unknown config key '" + key + "'"};
    if (given_on_command_line(args, flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") args.push_back(flag);
    } else {
      args.push_back(flag + "=" + value);
    }
  }
  return args;
}

// ---- commands -----------------------------------------------------------

struct SimulateArgs {
  std::string config;
  uint64_t rounds = 0;
  double pm = 0.5;
  double qf = 0.0;
  double qr = 0.0;
  double sample_fraction = 0.5;
  std::string attack;
  uint64_t seed = 0;
  std::string mode = "auto";
  unsigned threads = 1;
  std::string transcript = "transcript.csv";
  std::string stats = "stats.csv";
  uint64_t min_samples = 100;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.rounds == 0) throw Failure{kInvalid, "--rounds must be at least 1"};
  Attack attack;
  msqkd_sim_config cfg;
  msqkd_sim_config_init(&cfg);
  cfg.rounds = a.rounds;
  cfg.p_measure = a.pm;
  cfg.sample_fraction = a.sample_fraction;
  cfg.q_forward = a.qf;
  cfg.q_reverse = a.qr;
  cfg.seed = a.seed;
  cfg.mode_policy = parse_policy(a.mode);
  cfg.threads = a.threads;
  if (!a.attack.empty()) {
    check(msqkd_attack_read(a.attack.c_str(), attack.out()));
    cfg.attack = attack.p;
  }

  Transcript t;
  check(msqkd_simulate(&cfg, t.out()));
  check(msqkd_transcript_write(t.p, a.transcript.c_str()));
  Stats s;
  check(msqkd_transcript_tally(t.p, s.out()));
  check(msqkd_stats_write(s.p, a.stats.c_str()));

  std::printf("rounds %llu\n", static_cast<unsigned long long>(msqkd_transcript_size(t.p)));
  std::printf("transcript %s\n", a.transcript.c_str());
  std::printf("stats %s\n", a.stats.c_str());
  if (msqkd_transcript_aborted(t.p)) {
    std::printf("aborted yes\n");
    std::fprintf(stderr, "error: server sent different messages to Alice and Bob; protocol aborted\n");
    return kAborted;
  }
  std::printf("aborted no\n");
  warn_low_confidence(s.p, a.min_samples);

  msqkd_raw_key_summary key{};
  const msqkd_status ks = msqkd_transcript_raw_key(t.p, s.p, cfg.mode_policy, &key);
  if (ks == MSQKD_OK) {
    std::printf("mode %s\n", mode_name(key.mode));
    std::printf("raw_key_bits %llu\n", static_cast<unsigned long long>(key.length));
    std::printf("raw_key_mismatches %llu\n", static_cast<unsigned long long>(key.mismatches));
  } else {
    std::fprintf(stderr, "warning: no raw key: %s\n", msqkd_last_error());
  }
  return kOk;
}

struct KeyrateArgs {
  std::string config;
  std::optional<double> qf;
  std::optional<double> qr;
  std::string from_stats;
  std::string attack;
  std::string csv;
  uint64_t min_samples = 100;
};

int cmd_keyrate(const KeyrateArgs& a) {
  const int sources = (a.qf || a.qr ? 1 : 0) + (a.from_stats.empty() ? 0 : 1) + (a.attack.empty() ? 0 : 1);
  if (sources != 1) throw Failure{kInvalid, "give exactly one of --qf/--qr, --from-stats or --attack"};

  Stats s;
  Attack attack;
  std::optional<double> exact;
  if (!a.from_stats.empty()) {
    check(msqkd_stats_read(a.from_stats.c_str(), s.out()));
    warn_low_confidence(s.p, a.min_samples);
  } else if (!a.attack.empty()) {
    check(msqkd_attack_read(a.attack.c_str(), attack.out()));
    check(msqkd_stats_predict_attack(attack.p, s.out()));
    double h = 0.0;
    check(msqkd_attack_exact_entropy(attack.p, &h));
    exact = h;
  } else {
    check(msqkd_stats_predict_depolarization(a.qf.value_or(0.0), a.qr.value_or(0.0), s.out()));
  }

  msqkd_keyrate_report r{};
  check(msqkd_keyrate(s.p, &r));

  std::printf("h_ae_lower   %.9f\n", r.h_ae_lower);
  if (exact) std::printf("h_ae_exact   %.9f\n", *exact);
  std::printf("h_ab_noflip  %.9f\n", r.h_ab_noflip);
  std::printf("h_ab_flip    %.9f\n", r.h_ab_flip);
  std::printf("rate_noflip  %.9f  (clamped %.9f)\n", r.rate_noflip, std::max(r.rate_noflip, 0.0));
  std::printf("rate_flip    %.9f  (clamped %.9f)\n", r.rate_flip, std::max(r.rate_flip, 0.0));
  std::printf("rate_best    %.9f  (clamped %.9f)\n", r.rate_best, std::max(r.rate_best, 0.0));
  std::printf("chosen_mode  %s\n", mode_name(r.chosen_mode));

  if (!a.csv.empty()) {
    std::string text = "h_ae,h_ab_noflip,h_ab_flip,rate_noflip,rate_flip,rate_best,mode\n";
    text += fmt9(r.h_ae_lower) + "," + fmt9(r.h_ab_noflip) + "," + fmt9(r.h_ab_flip) + "," + fmt9(r.rate_noflip) +
            "," + fmt9(r.rate_flip) + "," + fmt9(r.rate_best) + "," + mode_name(r.chosen_mode) + "\n";
    write_text(a.csv, text);
  }
  return kOk;
}

struct SweepArgs {
  std::string config;
  double q_max = 0.15;
  std::size_t steps = 30;
  double forward_multiplier = 1.0;
  double reverse_multiplier = 1.0;
  unsigned threads = 1;
  std::string out = "-";
  std::string baseline;
  std::string threshold_baseline;
  bool threshold = false;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

double to_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw Failure{kInvalid, where + ": not a number: '" + s + "'"};
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kInvalid, "cannot open " + path};
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) rows.push_back(split_csv(line));
  }
  return rows;
}

constexpr double kBaselineTol = 1e-6;

bool compare_baseline(const std::string& path, const std::vector<msqkd_sweep_row>& rows) {
  const auto csv = read_csv(path);
  if (csv.empty()) throw Failure{kInvalid, path + ": empty baseline"};
  const auto& header = csv.front();
  const std::vector<std::string> wanted{"q", "rate_noflip", "rate_flip", "rate_best"};
  std::map<std::string, std::size_t> col;
  for (const auto& w : wanted) {
    const auto it = std::find(header.begin(), header.end(), w);
    if (it == header.end()) throw Failure{kInvalid, path + ": missing column " + w};
    col[w] = static_cast<std::size_t>(it - header.begin());
  }
  bool ok = csv.size() - 1 == rows.size();
  if (!ok)
    std::fprintf(stderr, "baseline drift: %zu rows in baseline, %zu computed\n", csv.size() - 1, rows.size());
  for (std::size_t k = 0; ok && k < rows.size(); ++k) {
    const auto& b = csv[k + 1];
    const std::string where = path + ":" + std::to_string(k + 2);
    if (b.size() != header.size()) throw Failure{kInvalid, where + ": wrong number of fields"};
    const double got[] = {rows[k].q, rows[k].rate_noflip, rows[k].rate_flip, rows[k].rate_best};
    for (std::size_t c = 0; c < wanted.size(); ++c) {
      const double expect = to_double(b[col[wanted[c]]], where);
      if (!(std::abs(expect - got[c]) <= kBaselineTol)) {
        std::fprintf(stderr, "baseline drift at q=%s: %s %s vs baseline %s\n", fmt9(rows[k].q).c_str(),
                     wanted[c].c_str(), fmt9(got[c]).c_str(), fmt9(expect).c_str());
        ok = false;
      }
    }
  }
  return ok;
}

double compute_threshold(const SweepArgs& a) {
  const double m = std::max(a.forward_multiplier, a.reverse_multiplier);
  const double hi = m > 0.0 ? std::min(0.25, 0.5 / m) : 0.25;
  double q = 0.0;
  check(msqkd_zero_rate_threshold(a.forward_multiplier, a.reverse_multiplier, 0.0, hi, 1e-4, &q));
  return q;
}

bool compare_threshold(const std::string& path, const SweepArgs& a, double q_star) {
  const auto csv = read_csv(path);
  if (csv.size() < 2 || csv[0] != std::vector<std::string>{"forward_multiplier", "reverse_multiplier", "q_star"})
    throw Failure{kInvalid, path + ": expected header forward_multiplier,reverse_multiplier,q_star"};
  for (std::size_t k = 1; k < csv.size(); ++k) {
    const std::string where = path + ":" + std::to_string(k + 1);
    if (csv[k].size() != 3) throw Failure{kInvalid, where + ": wrong number of fields"};
    if (to_double(csv[k][0], where) != a.forward_multiplier || to_double(csv[k][1], where) != a.reverse_multiplier)
      continue;
    const double pinned = to_double(csv[k][2], where);
    if (std::abs(pinned - q_star) <= kBaselineTol) return true;
    std::fprintf(stderr, "threshold drift: q_star %s vs pinned %s\n", fmt9(q_star).c_str(), fmt9(pinned).c_str());
    return false;
  }
  throw Failure{kInvalid, path + ": no pinned threshold for these multipliers"};
}

int cmd_sweep(const SweepArgs& a) {
  msqkd_sweep_config cfg;
  msqkd_sweep_config_init(&cfg);
  cfg.q_max = a.q_max;
  cfg.steps = a.steps;
  cfg.forward_multiplier = a.forward_multiplier;
  cfg.reverse_multiplier = a.reverse_multiplier;
  cfg.threads = a.threads;
  Sweep sweep;
  check(msqkd_sweep_run(&cfg, sweep.out()));

  std::vector<msqkd_sweep_row> rows(msqkd_sweep_size(sweep.p));
  std::string text = "q,qf,qr,h_ae,h_ab_noflip,h_ab_flip,rate_noflip,rate_flip,rate_best,mode\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    check(msqkd_sweep_get(sweep.p, k, &rows[k]));
    const auto& r = rows[k];
    text += fmt9(r.q) + "," + fmt9(r.qf) + "," + fmt9(r.qr) + "," + fmt9(r.h_ae) + "," + fmt9(r.h_ab_noflip) + "," +
            fmt9(r.h_ab_flip) + "," + fmt9(r.rate_noflip) + "," + fmt9(r.rate_flip) + "," + fmt9(r.rate_best) + "," +
            mode_name(r.mode) + "\n";
  }
  write_text(a.out, text);

  bool ok = true;
  if (!a.baseline.empty()) ok = compare_baseline(a.baseline, rows) && ok;
  if (a.threshold || !a.threshold_baseline.empty()) {
    const double q_star = compute_threshold(a);
    std::fprintf(stderr, "q_star %s\n", fmt9(q_star).c_str());
    if (!a.threshold_baseline.empty()) ok = compare_threshold(a.threshold_baseline, a, q_star) && ok;
  }
  return ok ? kOk : kCheckFailed;
}

struct ReduceArgs {
  std::string config;
  uint64_t trials = 100;
  std::size_t dim = 4;
  uint64_t seed = 1;
  std::size_t rounds = 1;
  double tolerance = 1e-9;
  std::string attack;
};

int cmd_reduce_check(const ReduceArgs& a) {
  msqkd_reduce_config cfg;
  msqkd_reduce_config_init(&cfg);
  cfg.trials = a.trials;
  cfg.eve_dim = a.dim;
  cfg.seed = a.seed;
  cfg.rounds = a.rounds;
  cfg.tolerance = a.tolerance;
  Attack attack;
  if (!a.attack.empty()) check(msqkd_attack_read(a.attack.c_str(), attack.out()));

  msqkd_reduce_summary s{};
  check(msqkd_reduce_check(&cfg, attack.p, &s));
  std::printf("cases %llu\n", static_cast<unsigned long long>(s.cases));
  std::printf("failures %llu\n", static_cast<unsigned long long>(s.failures));
  std::printf("min_fidelity %.12f\n", s.cases ? s.min_fidelity : 1.0);
  std::printf("min_non_abort %.12f\n", s.cases ? s.min_non_abort : 1.0);
  if (s.failures > 0) {
    std::printf("first_failure trial %lld seed %llu\n", static_cast<long long>(s.first_failing_trial),
                static_cast<unsigned long long>(s.first_failing_seed));
    std::printf("FAIL\n");
    return kCheckFailed;
  }
  std::printf("PASS\n");
  return kOk;
}

struct StatsArgs {
  std::string config;
  std::optional<double> qf;
  std::optional<double> qr;
  std::string from_transcript;
  std::string attack;
  std::string out = "-";
  uint64_t min_samples = 100;
};

int cmd_stats(const StatsArgs& a) {
  const int sources = (a.qf || a.qr ? 1 : 0) + (a.from_transcript.empty() ? 0 : 1) + (a.attack.empty() ? 0 : 1);
  if (sources != 1) throw Failure{kInvalid, "give exactly one of --qf/--qr, --from-transcript or --attack"};
  Stats s;
  if (!a.from_transcript.empty()) {
    Transcript t;
    check(msqkd_transcript_read(a.from_transcript.c_str(), t.out()));
    if (msqkd_transcript_aborted(t.p))
      throw Failure{kAborted, "transcript has rounds with different messages to Alice and Bob; protocol aborted"};
    check(msqkd_transcript_tally(t.p, s.out()));
    warn_low_confidence(s.p, a.min_samples);
  } else if (!a.attack.empty()) {
    Attack attack;
    check(msqkd_attack_read(a.attack.c_str(), attack.out()));
    check(msqkd_stats_predict_attack(attack.p, s.out()));
  } else {
    check(msqkd_stats_predict_depolarization(a.qf.value_or(0.0), a.qr.value_or(0.0), s.out()));
  }
  if (a.out == "-") {
    size_t needed = 0;
    check(msqkd_stats_format(s.p, nullptr, 0, &needed));
    std::string text(needed, '\0');
    check(msqkd_stats_format(s.p, text.data(), text.size(), &needed));
    text.resize(needed - 1);
    write_text("-", text);
  } else {
    check(msqkd_stats_write(s.p, a.out.c_str()));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"M-SQKD simulation and key-rate laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", msqkd_version());

  const auto probability = CLI::Range(0.0, 0.5);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate rounds, sample, tally statistics");
  s->add_option("--config", sim.config, "key=value config file");
  s->add_option("--rounds", sim.rounds, "number of rounds")->required();
  s->add_option("--pm", sim.pm, "probability of Measure-Resend")->check(CLI::Range(0.0, 1.0));
  s->add_option("--qf", sim.qf, "forward depolarization")->check(probability);
  s->add_option("--qr", sim.qr, "reverse depolarization")->check(probability);
  s->add_option("--sample-fraction", sim.sample_fraction, "fraction of rounds disclosed for estimation");
  s->add_option("--attack", sim.attack, "attack JSON file (replaces the honest server)");
  s->add_option("--seed", sim.seed, "random seed")->envname("MSQKD_SEED");
  s->add_option("--mode", sim.mode, "auto, flip or noflip")->check(CLI::IsMember({"auto", "flip", "noflip"}));
  s->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  s->add_option("--transcript", sim.transcript, "transcript output path");
  s->add_option("--stats", sim.stats, "statistics output path");
  s->add_option("--min-samples", sim.min_samples, "low-confidence warning threshold");

  KeyrateArgs kr;
  auto* k = app.add_subcommand("keyrate", "key-rate bound from closed-form or observed statistics");
  k->add_option("--config", kr.config, "key=value config file");
  k->add_option("--qf", kr.qf, "forward depolarization")->check(probability);
  k->add_option("--qr", kr.qr, "reverse depolarization")->check(probability);
  k->add_option("--from-stats", kr.from_stats, "statistics file");
  k->add_option("--attack", kr.attack, "attack JSON file");
  k->add_option("--csv", kr.csv, "also write a CSV row to this path");
  k->add_option("--min-samples", kr.min_samples, "low-confidence warning threshold");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "key-rate curve over q = q_max * k / steps");
  w->add_option("--config", sw.config, "key=value config file");
  w->add_option("--q-max", sw.q_max, "largest q")->check(CLI::NonNegativeNumber);
  w->add_option("--steps", sw.steps, "grid intervals")->check(CLI::PositiveNumber);
  w->add_option("--forward-multiplier", sw.forward_multiplier, "Q_F = multiplier * q")->check(CLI::NonNegativeNumber);
  w->add_option("--reverse-multiplier", sw.reverse_multiplier, "Q_R = multiplier * q")->check(CLI::NonNegativeNumber);
  w->add_option("--threads", sw.threads, "worker threads (0 = all cores)");
  w->add_option("--out", sw.out, "CSV output path ('-' for stdout)");
  w->add_option("--baseline", sw.baseline, "compare rate columns against this CSV");
  w->add_option("--threshold-baseline", sw.threshold_baseline, "compare the zero-rate threshold against this CSV");
  w->add_flag("--threshold", sw.threshold, "print the zero-rate threshold to stderr");

  ReduceArgs rc;
  auto* r = app.add_subcommand("reduce-check", "check the prepare-and-measure / entanglement equivalence");
  r->add_option("--config", rc.config, "key=value config file");
  r->add_option("--trials", rc.trials, "random attacks to check");
  r->add_option("--dim", rc.dim, "Eve dimension per round (<= 16)");
  r->add_option("--seed", rc.seed, "random seed")->envname("MSQKD_SEED");
  r->add_option("--rounds", rc.rounds, "rounds per instance (1 or 2)");
  r->add_option("--tolerance", rc.tolerance, "fidelity tolerance");
  r->add_option("--attack", rc.attack, "check this attack file instead of random ones");

  StatsArgs st;
  auto* t = app.add_subcommand("stats", "print a statistics table");
  t->add_option("--config", st.config, "key=value config file");
  t->add_option("--qf", st.qf, "forward depolarization")->check(probability);
  t->add_option("--qr", st.qr, "reverse depolarization")->check(probability);
  t->add_option("--from-transcript", st.from_transcript, "tally this transcript");
  t->add_option("--attack", st.attack, "attack JSON file");
  t->add_option("--out", st.out, "output path ('-' for stdout)");
  t->add_option("--min-samples", st.min_samples, "low-confidence warning threshold");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int rc_parse = app.exit(e);
      return rc_parse == 0 ? kOk : kInvalid;
    }
    if (*s) return cmd_simulate(sim);
    if (*k) return cmd_keyrate(kr);
    if (*w) return cmd_sweep(sw);
    if (*r) return cmd_reduce_check(rc);
    if (*t) return cmd_stats(st);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  }
  return kInvalid;
}
