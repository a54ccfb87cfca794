#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skg/bio.hpp"

namespace skg::scoring {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One entity span in a specific sentence, as a half-open token range.
struct Span {
  std::string doc_id;
  size_t sentence_index = 0;
  size_t start = 0;
  size_t end = 0;

  bool operator==(const Span&) const = default;
  bool operator<(const Span& o) const {
    if (doc_id != o.doc_id) return doc_id < o.doc_id;
    if (sentence_index != o.sentence_index) return sentence_index < o.sentence_index;
    if (start != o.start) return start < o.start;
    return end < o.end;
  }
};

// The four match regimes. B counts entities by their first token, I scores
// the remaining tokens of multi-word names token by token, partial accepts
// any overlap (greedy one-to-one, left to right), exact requires identical
// spans.
enum class MatchMode { B = 0, I = 1, Partial = 2, Exact = 3 };

inline constexpr std::array<std::string_view, 4> kModeNames = {
    "B-software", "I-software", "partial match", "exact match"};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
};

// Precision/recall/F from raw counts; 0/0 ratios resolve to 0.
Metrics metrics_from_counts(size_t tp, size_t fp, size_t fn);

// Scores predictions against gold. Spans within either input must not
// overlap each other (inputs are span sets); violations are an error, as are
// empty or inverted spans.
Metrics evaluate(const std::vector<Span>& pred, const std::vector<Span>& gold, MatchMode mode);

// All four modes at once, indexed like MatchMode.
std::array<Metrics, 4> evaluate_all_modes(const std::vector<Span>& pred,
                                          const std::vector<Span>& gold);

// Tab-separated mode-by-scores table, one row per match mode.
std::string report_table(const std::array<Metrics, 4>& per_mode);

// Entity spans of a tagged corpus, for feeding evaluate(). Sentences are
// indexed by their running position within each document block.
std::vector<Span> spans_from_tagged(const std::vector<bio::TaggedSentence>& sentences);

// Token-level inter-rater agreement over two annotations of the same tokens:
// kappa = (p_o - p_e) / (1 - p_e). Identical inputs give exactly 1; when
// chance agreement is already perfect (both annotators constant) the
// convention is 1 as well. Length mismatch is an error.
double cohen_kappa(const std::vector<bio::Tag>& a1, const std::vector<bio::Tag>& a2);

}  // namespace skg::scoring
