#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skg/bio.hpp"
#include "skg/ingest.hpp"
#include "skg/weaksup.hpp"

namespace skg::crf {

struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Feature names are interned to dense ids so weights can live in flat arrays.
struct FeatureVocab {
  std::map<std::string, int, std::less<>> index;
  std::vector<std::string> names;

  int intern(std::string_view name);
  // -1 when the feature was never interned.
  int find(std::string_view name) const;
  size_t size() const { return names.size(); }
};

// Identifies the feature template set baked into token_features; stored in
// model files so a model is never applied with templates it was not trained
// with.
inline constexpr std::string_view kFeatureTemplateId = "w2-shape-affix-dict-v1";

// Feature names for one token: lowercased surface, character shape, 2-4 char
// prefixes/suffixes, digit/capitalization flags, dictionary hit, version
// pattern nearby, and the same set for the neighbors within +-2 under
// positional prefixes.
std::vector<std::string> token_features(const std::vector<std::string>& tokens, size_t i,
                                        const weaksup::KbAliasDictionary& dict);

inline std::vector<std::string> surfaces(const ingest::Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(t.surface);
  return out;
}

// Per-token feature ids, each list sorted ascending.
struct SentenceFeatures {
  std::vector<std::vector<int>> ids;
  size_t size() const { return ids.size(); }
};

// Training path: unseen feature names are added to the vocabulary.
SentenceFeatures intern_features(const std::vector<std::string>& tokens,
                                 const weaksup::KbAliasDictionary& dict, FeatureVocab& vocab);
// Inference path: unseen feature names are dropped.
SentenceFeatures lookup_features(const std::vector<std::string>& tokens,
                                 const weaksup::KbAliasDictionary& dict,
                                 const FeatureVocab& vocab);

using LabelScores = std::array<double, 3>;            // indexed by bio tag id
using TransitionTable = std::array<LabelScores, 4>;   // [prev][next]; row 3 = start

constexpr int kStartState = 3;

struct CrfModel {
  FeatureVocab vocab;
  std::vector<LabelScores> weights;  // parallel to vocab.names
  TransitionTable transitions{};
  std::string template_id = std::string(kFeatureTemplateId);
};

// Sum of feature weights per token and label.
std::vector<LabelScores> node_scores(const CrfModel& m, const SentenceFeatures& f);

// Highest-scoring tag path under the hard constraint that I never follows O
// or the sentence start. Ties resolve from the sentence end backwards toward
// lower tag ids (O < B < I), so all-zero scores decode to all-O.
std::vector<bio::Tag> viterbi_path(const std::vector<LabelScores>& node,
                                   const TransitionTable& trans);
std::vector<bio::Tag> viterbi_tags(const CrfModel& m, const SentenceFeatures& f);
bio::TaggedSentence viterbi_decode(const CrfModel& m, const ingest::Sentence& s,
                                   const weaksup::KbAliasDictionary& dict);

// log of the partition function, by the forward recursion in log space. The
// constraint above applies to decoding only; the probability model itself is
// unconstrained.
double forward_log_partition(const std::vector<LabelScores>& node,
                             const TransitionTable& trans);
double log_partition(const CrfModel& m, const SentenceFeatures& f);

struct Gradient {
  std::vector<LabelScores> feature_grad;  // parallel to vocab.names
  TransitionTable transition_grad{};
  std::vector<int> touched;  // feature ids with (possibly) nonzero gradient, sorted
};

// Weighted negative log-likelihood of the gold tags: the chain rule splits
// the sequence NLL into one conditional term per token, and the term of a
// token whose gold tag is non-O is scaled by 1 + boost. With boost 0 this is
// exactly the sequence NLL. Throws when the computation leaves log-space
// (non-finite scores), which signals a bug or a diverged model.
double sentence_loss_and_gradient(const CrfModel& m, const SentenceFeatures& f,
                                  const std::vector<bio::Tag>& gold, double boost,
                                  Gradient* grad = nullptr);

struct TrainingConfig {
  double learning_rate = 0.002;
  enum class Decay { Linear, Exponential };
  Decay decay_kind = Decay::Linear;
  double decay_rate = 0.0001;  // applied per epoch
  double feature_dropout = 0.5;
  double positive_class_weight_boost = 0.1;
  int epochs = 2;
  uint64_t seed = 42;
  double negative_sampling_ratio = 1.0;  // negatives drawn per positive sentence

  static TrainingConfig pretrain_defaults();  // 0.002, linear 0.0001, dropout .5, 2 epochs
  static TrainingConfig finetune_defaults();  // 0.0015, exponential 0.0007, dropout .4, 22 epochs
};

// Draws negative sentence indices without replacement; once every negative
// has been seen the pool reshuffles and starts over.
class NegativeSampler {
 public:
  NegativeSampler(std::vector<size_t> negatives, std::mt19937_64& rng);
  std::vector<size_t> draw(size_t k, std::mt19937_64& rng);
  size_t remaining() const { return pool_.size() - next_; }

 private:
  std::vector<size_t> pool_;
  size_t next_ = 0;
};

enum class Sampling {
  BalancedNegatives,  // per epoch: all positive sentences + ratio * as many negatives
  FullPass,           // per epoch: every sentence
};

// One training stage of stochastic gradient descent with RMS-scaled updates
// (decay 0.9, epsilon 1e-8) and per-epoch learning-rate decay. New features
// in the corpus are interned into the model; optimizer state is local to the
// stage. Deterministic for a fixed config.
void train_stage(CrfModel& m, const std::vector<bio::TaggedSentence>& corpus,
                 const TrainingConfig& cfg, Sampling sampling,
                 const weaksup::KbAliasDictionary& dict,
                 std::vector<double>* epoch_avg_loss = nullptr);

// Two-stage transfer: pretrain on the weakly labeled corpus with balanced
// negative sampling, then fine-tune on the gold corpus with full passes.
// Empty pretraining corpus degrades to fine-tuning only; an empty gold corpus
// is an error. Either stage runs zero epochs when so configured.
CrfModel train(const std::vector<bio::TaggedSentence>& ssc,
               const std::vector<bio::TaggedSentence>& gsc,
               const TrainingConfig& ssc_cfg, const TrainingConfig& gsc_cfg,
               const weaksup::KbAliasDictionary& dict);

void save_crf_model(const CrfModel& m, const std::string& path);
CrfModel load_crf_model(const std::string& path);

// One tagged mention, with character offsets into the document full text.
struct Mention {
  std::string doc_id;
  size_t sentence_index = 0;
  size_t start_token = 0;  // half-open token span
  size_t end_token = 0;
  size_t char_start = 0;  // half-open char span in Document::full_text()
  size_t char_end = 0;
  std::string surface;
};

struct TagStats {
  size_t n_docs = 0;
  size_t n_docs_skipped = 0;  // no usable methods section
  size_t n_sentences = 0;
  size_t n_mentions = 0;
  double mentions_per_article = 0.0;  // over non-skipped docs
};

// Decodes every methods-section sentence of every document. Sentences are
// independent, so decoding fans out over `jobs` threads; results are merged
// in document order and identical for any thread count.
std::vector<Mention> tag_corpus(const CrfModel& m, const std::vector<ingest::Document>& docs,
                                const ingest::TextConfig& cfg,
                                const weaksup::KbAliasDictionary& dict, int jobs = 1,
                                TagStats* stats = nullptr);

}  // namespace skg::crf
