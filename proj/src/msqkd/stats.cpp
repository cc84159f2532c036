#include "msqkd/stats.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "msqkd/channels.hpp"
#include "msqkd/error.hpp"

namespace msqkd {
namespace {

char side_char(int x) { return x == kReflect ? 'R' : static_cast<char>('0' + x); }

int side_index(Choice c, const std::optional<std::uint8_t>& outcome) {
  return c == Choice::Reflect ? kReflect : int{*outcome};
}

std::string format_value(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size() && std::isfinite(v), ErrorCode::Parse,
          "stats line " + std::to_string(line) + ": bad value '" + s + "'");
  return v;
}

}  // namespace

void Tally::add(const RoundRecord& r) {
  const int x = side_index(r.choice_a, r.outcome_a);
  const int y = side_index(r.choice_b, r.outcome_b);
  const bool measured = x != kReflect || y != kReflect;
  if (measured && !r.in_sample) return;
  if (x != kReflect && y != kReflect) ++joint[x][y];
  ++msg[x][y][r.msg_to_a];
}

Tally& Tally::merge(const Tally& other) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) joint[i][j] += other.joint[i][j];
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int m = 0; m < 4; ++m) msg[x][y][m] += other.msg[x][y][m];
  return *this;
}

std::uint64_t Tally::joint_total() const {
  return joint[0][0] + joint[0][1] + joint[1][0] + joint[1][1];
}

std::uint64_t Tally::row_total(int x, int y) const {
  const auto& row = msg[x][y];
  return row[0] + row[1] + row[2] + row[3];
}

ObservedStats ObservedStats::from_tally(const Tally& t) {
  ObservedStats s;
  if (const auto total = t.joint_total(); total > 0)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s.joint[i][j] = static_cast<double>(t.joint[i][j]) / static_cast<double>(total);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (const auto total = t.row_total(x, y); total > 0)
        for (int m = 0; m < 4; ++m)
          s.msg[x][y][m] = static_cast<double>(t.msg[x][y][m]) / static_cast<double>(total);
  s.counts = t;
  return s;
}

double ObservedStats::p(int i, int j) const {
  if (!joint[i][j]) throw MissingCellsError({joint_cell_name(i, j)});
  return *joint[i][j];
}

double ObservedStats::pm(int x, int y, int m) const {
  if (!msg[x][y][m]) throw MissingCellsError({message_cell_name(x, y, m)});
  return *msg[x][y][m];
}

std::vector<std::string> ObservedStats::missing_cells() const {
  std::vector<std::string> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!joint[i][j]) out.push_back(joint_cell_name(i, j));
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int m = 0; m < 4; ++m)
        if (!msg[x][y][m]) out.push_back(message_cell_name(x, y, m));
  return out;
}

std::vector<std::string> ObservedStats::low_confidence_rows(std::uint64_t min_samples) const {
  std::vector<std::string> out;
  if (!counts) return out;
  if (counts->joint_total() < min_samples) out.emplace_back("P");
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      if (counts->row_total(x, y) < min_samples)
        out.push_back(std::string("Pm_") + side_char(x) + side_char(y));
  return out;
}

std::string joint_cell_name(int i, int j) {
  return std::string("P_") + side_char(i) + side_char(j);
}

std::string message_cell_name(int x, int y, int m) {
  return std::string("Pm_") + side_char(x) + side_char(y) + '_' + std::to_string(m);
}

ObservedStats tally(std::span<const RoundRecord> records) {
  require(!records.empty(), ErrorCode::InvalidArgument, "tally: no records");
  Tally t;
  for (const auto& r : records) t.add(r);
  return ObservedStats::from_tally(t);
}

ObservedStats predict_depolarization(double q_forward, double q_reverse) {
  // Range checks live in the channel type.
  const channels::DepolarizingChannel forward(q_forward);
  const channels::DepolarizingChannel reverse(q_reverse);
  const double qf = forward.q();
  const double qr = reverse.q();

  ObservedStats s;
  s.joint[0][0] = s.joint[1][1] = 0.5 * (1.0 - qf);
  s.joint[0][1] = s.joint[1][0] = 0.5 * qf;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double agree = 0.5 * (1.0 - qr);
      const double disagree = 0.5 * qr;
      // Matching outcomes favour phi_0/phi_1; mismatched ones phi_2/phi_3.
      const bool same = i == j;
      s.msg[i][j] = {same ? agree : disagree, same ? agree : disagree, same ? disagree : agree,
                     same ? disagree : agree};
    }
  }

  // Both reflect: the Bell pair crosses both channels.
  const double both = (1.0 - 2.0 * qr) * (1.0 - 2.0 * qf);
  const double off = 0.5 * (1.0 - 2.0 * qr) * qf + 0.5 * qr;
  s.msg[kReflect][kReflect] = {both + off, off, off, off};

  // One reflects, the other measured after the forward channel.
  const double low = 0.5 * (both + (1.0 - 2.0 * qr) * qf + qr);
  const double high = 0.5 * ((1.0 - 2.0 * qr) * qf + qr);
  for (int k = 0; k < 2; ++k) {
    s.msg[kReflect][k] = {low, low, high, high};
    s.msg[k][kReflect] = {low, low, high, high};
  }
  return s;
}

ObservedStats predict_from_attack(const AttackModel& attack) {
  attack.validate();
  ObservedStats s;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      s.joint[i][j] = attack.alpha(i, j) * attack.alpha(i, j);
      for (int m = 0; m < 4; ++m) s.msg[i][j][m] = attack.e(i, j, m).squaredNorm();
    }

  // Conditioned on one party's outcome (or nothing), the server receives a
  // superposition over the other party's bit.
  auto branch = [&](auto include, int m) {
    qmath::Vector v = qmath::Vector::Zero(static_cast<Eigen::Index>(attack.eve_dim));
    double weight = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (include(i, j)) {
          v += attack.alpha(i, j) * attack.e(i, j, m);
          weight += attack.alpha(i, j) * attack.alpha(i, j);
        }
    return std::pair{v.squaredNorm(), weight};
  };

  for (int k = 0; k < 2; ++k) {
    for (int m = 0; m < 4; ++m) {
      const auto [a_norm, a_weight] = branch([k](int i, int) { return i == k; }, m);
      if (a_weight > 0.0) s.msg[k][kReflect][m] = a_norm / a_weight;
      const auto [b_norm, b_weight] = branch([k](int, int j) { return j == k; }, m);
      if (b_weight > 0.0) s.msg[kReflect][k][m] = b_norm / b_weight;
    }
  }
  for (int m = 0; m < 4; ++m) s.msg[kReflect][kReflect][m] = branch([](int, int) { return true; }, m).first;
  return s;
}

void write_stats(std::ostream& out, const ObservedStats& stats) {
  out << "cell,value,count\n";
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      out << joint_cell_name(i, j) << ',' << format_value(stats.joint[i][j]) << ',';
      if (stats.counts)
        out << stats.counts->joint[i][j];
      else
        out << '-';
      out << '\n';
    }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int m = 0; m < 4; ++m) {
        out << message_cell_name(x, y, m) << ',' << format_value(stats.msg[x][y][m]) << ',';
        if (stats.counts)
          out << stats.counts->msg[x][y][m];
        else
          out << '-';
        out << '\n';
      }
}

ObservedStats read_stats(std::istream& in) {
  std::map<std::string, std::pair<std::optional<double>*, std::uint64_t*>> slots;
  ObservedStats s;
  Tally t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) slots[joint_cell_name(i, j)] = {&s.joint[i][j], &t.joint[i][j]};
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int m = 0; m < 4; ++m) slots[message_cell_name(x, y, m)] = {&s.msg[x][y][m], &t.msg[x][y][m]};

  std::size_t with_counts = 0;
  std::size_t rows = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text == "cell,value,count") continue;

    std::vector<std::string> f;
    std::stringstream ss(text);
    for (std::string field; std::getline(ss, field, ',');) f.push_back(field);
    require(f.size() == 3, ErrorCode::Parse, "stats line " + std::to_string(line) + ": expected 3 fields");

    const auto slot = slots.find(f[0]);
    require(slot != slots.end(), ErrorCode::Parse, "stats line " + std::to_string(line) + ": unknown cell '" + f[0] + "'");
    if (f[1] != "-") *slot->second.first = parse_double(f[1], line);
    if (f[2] != "-") {
      try {
        std::size_t used = 0;
        *slot->second.second = std::stoull(f[2], &used);
        require(used == f[2].size(), ErrorCode::Parse, "stats line " + std::to_string(line) + ": bad count");
      } catch (const std::logic_error&) {
        fail(ErrorCode::Parse, "stats line " + std::to_string(line) + ": bad count '" + f[2] + "'");
      }
      ++with_counts;
    }
    ++rows;
  }
  require(rows > 0, ErrorCode::Parse, "stats file contains no cells");
  if (with_counts == slots.size()) s.counts = t;
  return s;
}

}  // namespace msqkd
