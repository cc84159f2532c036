#pragma once

// Asymptotic key rate H(A|E) - H(A|B) from observed statistics.
//
// H(A|E) is lower-bounded with the two-term entropy bound for
// classical-quantum states, pairing Alice's key-bit-0 branch
// alpha_{0,j} |m, e^m_{0,j}> with the key-bit-1 branch
// alpha_{1,1-j} |m, e^m_{1,1-j}>. Norms come straight from the statistics;
// the cross terms R^m_{0011} and R^m_{0110} are only known through their sum
// s_m (from the both-Reflect row) and Cauchy-Schwarz, so the bound is
// minimized over the split t_m = R^m_{0011}. The bound never reads Mode.

#include <array>

#include "msqkd/attack.hpp"
#include "msqkd/protocol.hpp"
#include "msqkd/stats.hpp"

namespace msqkd {

// R^m_{xyzw} = 2 sqrt(P_{x,y} P_{z,w}) Re<e^m_{x,y}|e^m_{z,w}>.
struct ConstraintSet {
  std::array<std::array<double, 4>, 2> r_i0i1{};  // [i][m], exact, from P^m_{i,R}
  std::array<std::array<double, 4>, 2> r_0j1j{};  // [j][m], exact, from P^m_{R,j}
  std::array<double, 4> s{};                      // R^m_{0011} + R^m_{0110}
  std::array<double, 4> cs_0011{};                // |R^m_{0011}| <= cs_0011
  std::array<double, 4> cs_0110{};                // |R^m_{0110}| <= cs_0110

  // Feasible range of t_m = R^m_{0011}. When rounding leaves lower > upper by
  // less than the feasibility slack, both collapse to the midpoint.
  double lower(int m) const;
  double upper(int m) const;
};

// Throws MissingCellsError when a needed cell is absent and InfeasibleStats
// when an exact inner product breaks its Cauchy-Schwarz radius or a split
// interval is empty (slack 1e-9). Cells behind a zero-probability condition
// are not needed: the matching constraint is dropped and its weight is zero.
ConstraintSet assemble_constraints(const ObservedStats& stats);

// One term of the bound for branches with squared norms `e_norm`, `f_norm`
// and cross term `cross` = 2 Re<E|F>:
//   (e + f) * (h(e / (e + f)) - h(lambda)),
//   lambda = (1 + sqrt((e - f)^2 + cross^2) / (e + f)) / 2.
double bound_term(double e_norm, double f_norm, double cross);

double entropy_bound(const ObservedStats& stats, const ConstraintSet& cons,
                     const std::array<double, 4>& splits);
double entropy_bound(const ObservedStats& stats, const std::array<double, 4>& splits);

struct EntropyMinimum {
  double value = 0.0;
  std::array<double, 4> splits{};
  std::array<double, 4> per_message{};
};

// The terms separate by message, so each m is a 1-D problem: a 2001-point
// grid over the feasible interval, then golden-section refinement around the
// best grid point to 1e-9 in t.
EntropyMinimum minimize_entropy(const ObservedStats& stats, const ConstraintSet& cons);

// Unnormalized raw-key distribution P^key_{a,b} for the given Mode.
JointTable<double> key_distribution(const ObservedStats& stats, Mode mode);

// H(A|B) of the renormalized raw-key distribution.
double conditional_entropy_ab(const ObservedStats& stats, Mode mode);

struct KeyRateReport {
  double h_ae_lower = 0.0;
  std::array<double, 4> splits{};
  double h_ab_noflip = 0.0;
  double h_ab_flip = 0.0;
  double rate_noflip = 0.0;
  double rate_flip = 0.0;
  Mode chosen_mode = Mode::NoFlip;
  JointTable<double> p_key_noflip{};
  JointTable<double> p_key_flip{};

  double rate(Mode mode) const { return mode == Mode::Flip ? rate_flip : rate_noflip; }
  double best_rate() const { return rate(chosen_mode); }
};

KeyRateReport key_rate(const ObservedStats& stats);

// H(A|E) computed directly: builds rho_ABE for the attack, traces out B and
// diagonalizes rho_AE and rho_E.
double exact_entropy_oracle(const AttackModel& attack);

}  // namespace msqkd
