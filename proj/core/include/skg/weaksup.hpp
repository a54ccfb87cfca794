#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skg/bio.hpp"
#include "skg/ingest.hpp"

namespace skg::weaksup {

enum class Vote { Abstain = 0, Positive = 1, Negative = 2 };

struct Candidate {
  std::string doc_id;
  size_t sentence_index = 0;
  size_t start_token = 0;  // half-open token span
  size_t end_token = 0;
  std::string surface;     // exact sentence text slice
  bool pn_headed = false;  // first token capitalized and not sentence-initial

  size_t n() const { return end_token - start_token; }
};

// All token n-grams (1..max_n) that contain at least one token which is
// neither a stopword nor punctuation.
std::vector<Candidate> generate_candidates(const ingest::Sentence& s, size_t max_n = 6);

struct DictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Alias -> canonical id, distilled from a KB export. Aliases that are common
// English words are dropped at load time so "analysis" never becomes software.
struct KbAliasDictionary {
  std::map<std::string, std::string> entries;
  std::set<std::string> english_wordlist;

  static KbAliasDictionary load(const std::string& dict_path, const std::string& wordlist_path);

  bool contains(std::string_view surface) const;
  // Canonical id for an alias, nullptr when absent.
  const std::string* lookup(std::string_view surface) const;
};

// One exact context rule: lemmatized tokens before/after the `<>` slot.
struct ExactPattern {
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::string source;  // original rule text, for reports
};

std::vector<ExactPattern> load_exact_rules(const std::string& path);
ExactPattern parse_exact_rule(std::string_view line);

std::set<std::string> load_negative_list(const std::string& path);

// The four labeling functions. Pure; identical inputs give identical votes.
Vote lf_dictionary(const Candidate& c, const KbAliasDictionary& dict);
Vote lf_general_context(const Candidate& c, const ingest::Sentence& s);
Vote lf_exact_context(const Candidate& c, const ingest::Sentence& s,
                      const std::vector<ExactPattern>& patterns);
Vote lf_negative_list(const Candidate& c, const std::set<std::string>& neglist);

inline constexpr std::array<std::string_view, 4> kLfIds = {
    "dictionary", "general_context", "exact_context", "negative_list"};

struct WeakRules {
  KbAliasDictionary dict;
  std::vector<ExactPattern> patterns;
  std::set<std::string> negative_list;
  ingest::TextConfig text;
};

std::vector<Vote> apply_lfs(const Candidate& c, const ingest::Sentence& s, const WeakRules& rules);

struct VoteMatrix {
  std::vector<std::string> lf_ids;
  std::vector<std::vector<Vote>> rows;  // one row per candidate, one column per LF
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Latent-class generative model over LF votes: each LF fires with some
// propensity and, when it fires, agrees with the latent label with some
// accuracy. Fit with EM; votes are treated as conditionally independent.
struct LabelModel {
  std::vector<std::string> lf_ids;
  std::vector<double> accuracies;    // P(vote agrees with latent label | fired)
  std::vector<double> propensities;  // P(fired)
  double class_prior = 0.5;
  double threshold = 0.5;

  // Posterior P(positive | votes); votes ordered like lf_ids.
  double predict_marginal(const std::vector<Vote>& votes) const;
  // Same, with votes named by lf_id; unknown ids are an error.
  double predict_marginal(const std::vector<std::pair<std::string, Vote>>& votes) const;
};

// Regularization for the EM fit. Maximum likelihood alone is degenerate on
// matrices whose LFs each vote a single polarity (the usual case here): the
// trivial everything-positive / everything-negative fits explain any such
// matrix perfectly. The Beta pseudo-votes on each accuracy and the anchor on
// the class prior make the sensible fit a stable optimum on small matrices
// while washing out once an LF has fired a few thousand times.
struct FitOptions {
  // Per-LF prior accuracy means, ordered like VoteMatrix::lf_ids; empty
  // means 0.85 for every LF.
  std::vector<double> trust;
  double trust_strength = 100.0;  // pseudo-votes behind each trust mean
  double prior_strength = 500.0;  // pseudo-candidates behind the class prior
  double prior_floor = 0.1;       // lower clamp for the anchored class prior
};

LabelModel fit_label_model(const VoteMatrix& votes, uint64_t seed = 42,
                           const FitOptions& opts = {});

void save_label_model(const LabelModel& m, const std::string& path);
LabelModel load_label_model(const std::string& path);

struct ScoredCandidate {
  Candidate candidate;
  double marginal = 0.0;
};

// Candidates above threshold become BIO spans. Overlaps resolve by marginal,
// then proper-noun-headed spans, then longer spans, then leftmost.
bio::TaggedSentence tag_sentence(const ingest::Sentence& s,
                                 std::vector<ScoredCandidate> scored, double threshold);

struct WeakLabelResult {
  std::vector<bio::TaggedSentence> ssc;
  LabelModel model;
  size_t n_candidates = 0;
  size_t n_positive = 0;  // candidates above threshold
};

// Full weak-labeling stage over the M&M sentences of a corpus.
WeakLabelResult weak_label_corpus(const std::vector<ingest::Document>& docs,
                                  const WeakRules& rules, uint64_t seed = 42);

}  // namespace skg::weaksup
