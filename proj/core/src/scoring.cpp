#include "skg/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace skg::scoring {

namespace {

// Spans must form a set: sorted, no two ranges of the same sentence touch.
void check_span_set(const std::vector<Span>& spans, const char* which) {
  for (const Span& s : spans)
    if (s.start >= s.end)
      throw EvalError(std::string("empty or inverted span in ") + which + " set: " + s.doc_id +
                      " tokens " + std::to_string(s.start) + ".." + std::to_string(s.end));
  std::vector<const Span*> sorted;
  sorted.reserve(spans.size());
  for (const Span& s : spans) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const Span* a, const Span* b) { return *a < *b; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    const Span& a = *sorted[i - 1];
    const Span& b = *sorted[i];
    if (a.doc_id == b.doc_id && a.sentence_index == b.sentence_index && b.start < a.end)
      throw EvalError(std::string("overlapping spans in ") + which + " set: " + a.doc_id +
                      " sentence " + std::to_string(a.sentence_index));
  }
}

using TokenKey = std::tuple<std::string, size_t, size_t>;  // doc, sentence, token

Metrics from_sets(size_t n_pred, size_t n_gold, size_t tp) {
  return metrics_from_counts(tp, n_pred - tp, n_gold - tp);
}

Metrics eval_first_token(const std::vector<Span>& pred, const std::vector<Span>& gold) {
  std::set<TokenKey> g;
  for (const Span& s : gold) g.emplace(s.doc_id, s.sentence_index, s.start);
  size_t tp = 0;
  for (const Span& s : pred) tp += g.count({s.doc_id, s.sentence_index, s.start});
  return from_sets(pred.size(), gold.size(), tp);
}

// Non-first tokens of every span, scored token by token.
Metrics eval_inner_tokens(const std::vector<Span>& pred, const std::vector<Span>& gold) {
  auto inner = [](const std::vector<Span>& spans) {
    std::set<TokenKey> out;
    for (const Span& s : spans)
      for (size_t t = s.start + 1; t < s.end; ++t) out.emplace(s.doc_id, s.sentence_index, t);
    return out;
  };
  std::set<TokenKey> p = inner(pred), g = inner(gold);
  size_t tp = 0;
  for (const auto& k : p) tp += g.count(k);
  return from_sets(p.size(), g.size(), tp);
}

Metrics eval_partial(std::vector<Span> pred, std::vector<Span> gold) {
  std::sort(pred.begin(), pred.end());
  std::sort(gold.begin(), gold.end());
  std::vector<bool> used(gold.size(), false);
  size_t tp = 0;
  for (const Span& p : pred) {
    for (size_t j = 0; j < gold.size(); ++j) {
      const Span& g = gold[j];
      if (used[j] || g.doc_id != p.doc_id || g.sentence_index != p.sentence_index) continue;
      if (std::max(g.start, p.start) < std::min(g.end, p.end)) {
        used[j] = true;
        ++tp;
        break;
      }
    }
  }
  return from_sets(pred.size(), gold.size(), tp);
}

Metrics eval_exact(const std::vector<Span>& pred, const std::vector<Span>& gold) {
  std::set<Span> g(gold.begin(), gold.end());
  size_t tp = 0;
  for (const Span& s : pred) tp += g.count(s);
  return from_sets(pred.size(), gold.size(), tp);
}

}  // namespace

Metrics metrics_from_counts(size_t tp, size_t fp, size_t fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
  m.f_score = m.precision + m.recall == 0.0
                  ? 0.0
                  : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics evaluate(const std::vector<Span>& pred, const std::vector<Span>& gold, MatchMode mode) {
  check_span_set(pred, "prediction");
  check_span_set(gold, "gold");
  switch (mode) {
    case MatchMode::B:
      return eval_first_token(pred, gold);
    case MatchMode::I:
      return eval_inner_tokens(pred, gold);
    case MatchMode::Partial:
      return eval_partial(pred, gold);
    case MatchMode::Exact:
      return eval_exact(pred, gold);
  }
  throw EvalError("unknown match mode");
}

std::array<Metrics, 4> evaluate_all_modes(const std::vector<Span>& pred,
                                          const std::vector<Span>& gold) {
  return {evaluate(pred, gold, MatchMode::B), evaluate(pred, gold, MatchMode::I),
          evaluate(pred, gold, MatchMode::Partial), evaluate(pred, gold, MatchMode::Exact)};
}

std::string report_table(const std::array<Metrics, 4>& per_mode) {
  std::ostringstream out;
  out << "mode\tprecision\trecall\tf_score\ttp\tfp\tfn\n";
  char buf[64];
  for (size_t i = 0; i < per_mode.size(); ++i) {
    const Metrics& m = per_mode[i];
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.4f", m.precision, m.recall, m.f_score);
    out << kModeNames[i] << "\t" << buf << "\t" << m.tp << "\t" << m.fp << "\t" << m.fn << "\n";
  }
  return out.str();
}

std::vector<Span> spans_from_tagged(const std::vector<bio::TaggedSentence>& sentences) {
  std::vector<Span> out;
  std::map<std::string, size_t> next_index;
  for (const auto& ts : sentences) {
    size_t idx = next_index[ts.doc_id]++;
    for (const bio::TokenSpan& t : bio::spans_from_tags(ts.tags)) {
      Span s;
      s.doc_id = ts.doc_id;
      s.sentence_index = idx;
      s.start = t.begin;
      s.end = t.end;
      out.push_back(std::move(s));
    }
  }
  return out;
}

double cohen_kappa(const std::vector<bio::Tag>& a1, const std::vector<bio::Tag>& a2) {
  if (a1.size() != a2.size())
    throw EvalError("annotation lengths differ: " + std::to_string(a1.size()) + " vs " +
                    std::to_string(a2.size()));
  const size_t n = a1.size();
  if (n == 0) return 1.0;

  double agree = 0;
  std::array<double, bio::kNumTags> c1{}, c2{};
  for (size_t i = 0; i < n; ++i) {
    if (a1[i] == a2[i]) ++agree;
    ++c1[bio::id(a1[i])];
    ++c2[bio::id(a2[i])];
  }
  double po = agree / double(n);
  double pe = 0;
  for (int t = 0; t < bio::kNumTags; ++t) pe += (c1[t] / double(n)) * (c2[t] / double(n));
  if (pe >= 1.0) return 1.0;  // both annotators constant and identical
  return (po - pe) / (1.0 - pe);
}

}  // namespace skg::scoring
