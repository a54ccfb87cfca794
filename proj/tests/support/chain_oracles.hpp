#pragma once

// Exhaustive-enumeration oracles for linear-chain scoring over the 3-label
// BIO lattice. Everything here walks all 3^n tag sequences, so keep n small
// (tests stay at n <= 8). Deliberately independent of the tagger code: the
// only shared assumptions are the score decomposition (sum of per-token label
// scores plus transition scores, with a start row) and the label order
// O=0 < B=1 < I=2.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace chain_oracle {

constexpr int kLabels = 3;
constexpr int kStart = 3;  // transition row used before the first token

using NodeScores = std::vector<std::array<double, 3>>;      // [token][label]
using Transitions = std::array<std::array<double, 3>, 4>;   // [prev][next], row 3 = start

inline double sequence_score(const NodeScores& node, const Transitions& trans,
                             const std::vector<int>& seq) {
  double s = trans[kStart][seq[0]] + node[0][seq[0]];
  for (size_t i = 1; i < seq.size(); ++i)
    s += trans[seq[i - 1]][seq[i]] + node[i][seq[i]];
  return s;
}

// Advances seq as a base-3 odometer (position 0 least significant); false
// once all sequences have been produced.
inline bool next_sequence(std::vector<int>& seq) {
  for (size_t i = 0; i < seq.size(); ++i) {
    if (++seq[i] < kLabels) return true;
    seq[i] = 0;
  }
  return false;
}

// True when a beats b among equally scored sequences: the decoder resolves
// ties from the sentence end backwards, preferring lower label ids, so the
// winner is the reverse-lexicographically smallest optimum.
inline bool tie_beats(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

struct BestSequence {
  std::vector<int> seq;
  double score = -std::numeric_limits<double>::infinity();
};

// Argmax over all tag sequences. `forbid_i_after` marks sequences invalid
// when I follows O or starts the sentence (the decoder's hard constraint).
inline BestSequence best_sequence(const NodeScores& node, const Transitions& trans,
                                  bool forbid_bad_i) {
  const size_t n = node.size();
  std::vector<int> seq(n, 0);
  BestSequence best;
  do {
    if (forbid_bad_i) {
      bool ok = seq[0] != 2;
      for (size_t i = 1; ok && i < n; ++i)
        if (seq[i] == 2 && seq[i - 1] == 0) ok = false;
      if (!ok) continue;
    }
    double s = sequence_score(node, trans, seq);
    if (best.seq.empty() || s > best.score ||
        (s == best.score && tie_beats(seq, best.seq))) {
      best.score = s;
      best.seq = seq;
    }
  } while (next_sequence(seq));
  return best;
}

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double hi = a > b ? a : b;
  return hi + std::log1p(std::exp((a < b ? a : b) - hi));
}

// log of the partition function: log sum over all sequences of exp(score).
inline double log_partition(const NodeScores& node, const Transitions& trans) {
  std::vector<int> seq(node.size(), 0);
  double lse = -std::numeric_limits<double>::infinity();
  do {
    lse = log_add(lse, sequence_score(node, trans, seq));
  } while (next_sequence(seq));
  return lse;
}

// Per-token weighted negative log-likelihood of `gold`, computed from raw
// conditional probabilities: at each position the chain's next-label
// distribution given the gold prefix is obtained by summing exp(score) over
// full sequences, never via forward/backward tables. Token i carries weight
// 1 + boost when its gold label is non-O.
inline double weighted_nll(const NodeScores& node, const Transitions& trans,
                           const std::vector<int>& gold, double boost) {
  const size_t n = node.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double num = -std::numeric_limits<double>::infinity();
    double den = -std::numeric_limits<double>::infinity();
    std::vector<int> seq(n, 0);
    do {
      bool prefix_ok = true;
      for (size_t j = 0; prefix_ok && j < i; ++j)
        if (seq[j] != gold[j]) prefix_ok = false;
      if (!prefix_ok) continue;
      double s = sequence_score(node, trans, seq);
      den = log_add(den, s);
      if (seq[i] == gold[i]) num = log_add(num, s);
    } while (next_sequence(seq));
    double w = gold[i] == 0 ? 1.0 : 1.0 + boost;
    total += w * (den - num);
  }
  return total;
}

}  // namespace chain_oracle
