#pragma once

// Observable statistics entering the key-rate bound, estimated from
// transcripts or predicted in closed form.
//
// Conditioning cells are indexed by each user's side: 0 or 1 for a
// Measure-Resend outcome, kReflect for Reflect.
//   joint[i][j]   P_{i,j}: Pr[Alice sees i, Bob sees j | both Measure-Resend]
//   msg[x][y][m]  P^m_{x,y}: Pr[server announces m | cell (x, y)]

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msqkd/attack.hpp"
#include "msqkd/protocol.hpp"

namespace msqkd {

inline constexpr int kReflect = 2;

template <class T>
using JointTable = std::array<std::array<T, 2>, 2>;
template <class T>
using MessageTable = std::array<std::array<std::array<T, 4>, 3>, 3>;

struct Tally {
  JointTable<std::uint64_t> joint{};
  MessageTable<std::uint64_t> msg{};

  void add(const RoundRecord& r);
  Tally& merge(const Tally& other);

  std::uint64_t joint_total() const;
  std::uint64_t row_total(int x, int y) const;

  bool operator==(const Tally&) const = default;
};

struct ObservedStats {
  JointTable<std::optional<double>> joint;
  MessageTable<std::optional<double>> msg;
  std::optional<Tally> counts;

  static ObservedStats from_tally(const Tally& t);

  // Value accessors; absent cells throw MissingCellsError naming the cell.
  double p(int i, int j) const;
  double pm(int x, int y, int m) const;

  std::vector<std::string> missing_cells() const;

  // Conditioning rows estimated from fewer than `min_samples` rounds, named
  // "P" for the joint table and "Pm_xy" for message rows. Closed-form tables
  // (no counts) never report low confidence.
  std::vector<std::string> low_confidence_rows(std::uint64_t min_samples = 100) const;

  bool operator==(const ObservedStats&) const = default;
};

std::string joint_cell_name(int i, int j);
std::string message_cell_name(int x, int y, int m);

// Measurement-conditioned cells use in-sample rounds only; the both-Reflect
// row uses every round since choices and messages are disclosed for all.
ObservedStats tally(std::span<const RoundRecord> records);

ObservedStats predict_depolarization(double q_forward, double q_reverse);
ObservedStats predict_from_attack(const AttackModel& attack);

// Flat table "cell,value,count"; values use 17 significant digits so reading
// back reproduces the in-memory table exactly. Absent entries are '-'.
void write_stats(std::ostream& out, const ObservedStats& stats);
ObservedStats read_stats(std::istream& in);

}  // namespace msqkd
