#include "skg/crf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include "skg/strings.hpp"

namespace skg::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool contains_digit(const std::string& s) {
  for (char c : s)
    if (ascii_digit(c)) return true;
  return false;
}

bool capitalized(const std::string& s) { return !s.empty() && ascii_upper(s[0]); }

// Character-class transcription: SPSS -> XXXX, the -> xxx, v12.1 -> xdd.d.
std::string shape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (ascii_upper(c))
      out += 'X';
    else if (ascii_lower(c))
      out += 'x';
    else if (ascii_digit(c))
      out += 'd';
    else
      out += c;
  }
  return out;
}

// v12 / V1.2 style, or a dotted number like 3.4.1.
bool version_like(const std::string& s) {
  if (s.size() >= 2 && (s[0] == 'v' || s[0] == 'V') && ascii_digit(s[1])) return true;
  bool dot = false, prev_digit = false;
  for (char c : s) {
    if (ascii_digit(c)) {
      prev_digit = true;
    } else if (c == '.' && prev_digit) {
      dot = true;
      prev_digit = false;
    } else {
      return false;
    }
  }
  return dot && prev_digit;
}

// The per-token templates, evaluated at position j; window copies get these
// same names under a positional prefix.
void append_base(std::vector<std::string>& out, const std::string& prefix,
                 const std::vector<std::string>& tokens, size_t j,
                 const weaksup::KbAliasDictionary& dict) {
  const std::string& tok = tokens[j];
  out.push_back(prefix + "low=" + lowercased(tok));
  out.push_back(prefix + "shape=" + shape(tok));
  for (size_t k = 2; k <= 4 && k <= tok.size(); ++k) {
    out.push_back(prefix + "p" + std::to_string(k) + "=" + tok.substr(0, k));
    out.push_back(prefix + "s" + std::to_string(k) + "=" + tok.substr(tok.size() - k));
  }
  if (contains_digit(tok)) out.push_back(prefix + "digit");
  if (j > 0 && capitalized(tok)) out.push_back(prefix + "cap");
  if (dict.contains(tok)) out.push_back(prefix + "dict");
  for (size_t k = j >= 2 ? j - 2 : 0; k < std::min(tokens.size(), j + 3); ++k) {
    if (k == j) continue;
    if (version_like(tokens[k]) || lowercased(tokens[k]) == "version") {
      out.push_back(prefix + "vernear");
      break;
    }
  }
}

}  // namespace

int FeatureVocab::intern(std::string_view name) {
  auto it = index.find(name);
  if (it != index.end()) return it->second;
  int id = static_cast<int>(names.size());
  index.emplace(std::string(name), id);
  names.emplace_back(name);
  return id;
}

int FeatureVocab::find(std::string_view name) const {
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

std::vector<std::string> token_features(const std::vector<std::string>& tokens, size_t i,
                                        const weaksup::KbAliasDictionary& dict) {
  static const char* kPrefix[5] = {"-2:", "-1:", "0:", "+1:", "+2:"};
  std::vector<std::string> out;
  out.reserve(64);
  for (int d = -2; d <= 2; ++d) {
    if (d < 0 && i < size_t(-d)) continue;
    size_t j = i + d;
    if (j >= tokens.size()) continue;
    append_base(out, kPrefix[d + 2], tokens, j, dict);
  }
  return out;
}

SentenceFeatures intern_features(const std::vector<std::string>& tokens,
                                 const weaksup::KbAliasDictionary& dict, FeatureVocab& vocab) {
  SentenceFeatures f;
  f.ids.resize(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (const std::string& name : token_features(tokens, i, dict))
      f.ids[i].push_back(vocab.intern(name));
    std::sort(f.ids[i].begin(), f.ids[i].end());
  }
  return f;
}

SentenceFeatures lookup_features(const std::vector<std::string>& tokens,
                                 const weaksup::KbAliasDictionary& dict,
                                 const FeatureVocab& vocab) {
  SentenceFeatures f;
  f.ids.resize(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (const std::string& name : token_features(tokens, i, dict)) {
      int id = vocab.find(name);
      if (id >= 0) f.ids[i].push_back(id);
    }
    std::sort(f.ids[i].begin(), f.ids[i].end());
  }
  return f;
}

std::vector<LabelScores> node_scores(const CrfModel& m, const SentenceFeatures& f) {
  std::vector<LabelScores> node(f.size(), LabelScores{0, 0, 0});
  for (size_t i = 0; i < f.size(); ++i)
    for (int fid : f.ids[i])
      for (int t = 0; t < bio::kNumTags; ++t) node[i][t] += m.weights[fid][t];
  return node;
}

std::vector<bio::Tag> viterbi_path(const std::vector<LabelScores>& node,
                                   const TransitionTable& trans) {
  const size_t n = node.size();
  if (n == 0) return {};
  const int I = bio::id(bio::Tag::I);

  // The BIO constraint lives in an effective transition copy so the model's
  // own weights stay untouched.
  TransitionTable eff = trans;
  eff[kStartState][I] = kNegInf;
  eff[bio::id(bio::Tag::O)][I] = kNegInf;

  LabelScores delta;
  std::vector<std::array<int, 3>> bp(n);
  for (int t = 0; t < bio::kNumTags; ++t) delta[t] = eff[kStartState][t] + node[0][t];
  for (size_t i = 1; i < n; ++i) {
    LabelScores next;
    for (int t = 0; t < bio::kNumTags; ++t) {
      double best = kNegInf;
      int arg = 0;
      for (int u = 0; u < bio::kNumTags; ++u) {
        double v = delta[u] + eff[u][t];
        if (v > best) {  // strict: ties keep the lower previous tag
          best = v;
          arg = u;
        }
      }
      next[t] = best + node[i][t];
      bp[i][t] = arg;
    }
    delta = next;
  }

  int t = 0;
  for (int u = 1; u < bio::kNumTags; ++u)
    if (delta[u] > delta[t]) t = u;  // strict: ties keep the lower tag
  std::vector<bio::Tag> tags(n);
  for (size_t i = n; i-- > 0;) {
    tags[i] = static_cast<bio::Tag>(t);
    if (i > 0) t = bp[i][t];
  }
  return tags;
}

std::vector<bio::Tag> viterbi_tags(const CrfModel& m, const SentenceFeatures& f) {
  return viterbi_path(node_scores(m, f), m.transitions);
}

bio::TaggedSentence viterbi_decode(const CrfModel& m, const ingest::Sentence& s,
                                   const weaksup::KbAliasDictionary& dict) {
  bio::TaggedSentence out;
  out.doc_id = s.doc_id;
  out.tokens = surfaces(s);
  out.tags = viterbi_tags(m, lookup_features(out.tokens, dict, m.vocab));
  return out;
}

namespace {

double lse3(const LabelScores& a) {
  double mx = std::max({a[0], a[1], a[2]});
  if (mx == kNegInf) return kNegInf;
  return mx + std::log(std::exp(a[0] - mx) + std::exp(a[1] - mx) + std::exp(a[2] - mx));
}

}  // namespace

double forward_log_partition(const std::vector<LabelScores>& node,
                             const TransitionTable& trans) {
  const size_t n = node.size();
  if (n == 0) return 0.0;
  LabelScores alpha;
  for (int t = 0; t < bio::kNumTags; ++t) alpha[t] = trans[kStartState][t] + node[0][t];
  for (size_t i = 1; i < n; ++i) {
    LabelScores next;
    for (int t = 0; t < bio::kNumTags; ++t) {
      LabelScores in;
      for (int u = 0; u < bio::kNumTags; ++u) in[u] = alpha[u] + trans[u][t];
      next[t] = lse3(in) + node[i][t];
    }
    alpha = next;
  }
  return lse3(alpha);
}

double log_partition(const CrfModel& m, const SentenceFeatures& f) {
  return forward_log_partition(node_scores(m, f), m.transitions);
}

double sentence_loss_and_gradient(const CrfModel& m, const SentenceFeatures& f,
                                  const std::vector<bio::Tag>& gold, double boost,
                                  Gradient* grad) {
  const size_t n = f.size();
  if (gold.size() != n) throw TrainError("tag count does not match token count");
  if (grad) {
    grad->feature_grad.assign(m.vocab.size(), LabelScores{0, 0, 0});
    grad->transition_grad = TransitionTable{};
    grad->touched.clear();
  }
  if (n == 0) return 0.0;

  std::vector<LabelScores> node = node_scores(m, f);
  const TransitionTable& trans = m.transitions;

  // Suffix log-sums: beta[i][t] aggregates every continuation after fixing
  // tag t at token i.
  std::vector<LabelScores> beta(n);
  beta[n - 1] = {0, 0, 0};
  for (size_t i = n - 1; i-- > 0;) {
    for (int t = 0; t < bio::kNumTags; ++t) {
      LabelScores in;
      for (int u = 0; u < bio::kNumTags; ++u)
        in[u] = trans[t][u] + node[i + 1][u] + beta[i + 1][u];
      beta[i][t] = lse3(in);
    }
  }

  // The chain rule writes the sequence NLL as one conditional per token:
  // -log P(y_i | y_<i). Each term is weighted on its own, which is where the
  // non-O boost enters.
  double loss = 0.0;
  std::vector<LabelScores> node_adj(n, LabelScores{0, 0, 0});
  std::vector<LabelScores> beta_adj(n, LabelScores{0, 0, 0});
  TransitionTable trans_adj{};
  for (size_t i = 0; i < n; ++i) {
    const int prev = i == 0 ? kStartState : bio::id(gold[i - 1]);
    const int y = bio::id(gold[i]);
    LabelScores s;
    for (int u = 0; u < bio::kNumTags; ++u) s[u] = trans[prev][u] + node[i][u] + beta[i][u];
    double z = lse3(s);
    double w = gold[i] == bio::Tag::O ? 1.0 : 1.0 + boost;
    loss += w * (z - s[y]);
    if (grad) {
      for (int u = 0; u < bio::kNumTags; ++u) {
        double g = w * (std::exp(s[u] - z) - (u == y ? 1.0 : 0.0));
        trans_adj[prev][u] += g;
        node_adj[i][u] += g;
        beta_adj[i][u] += g;
      }
    }
  }
  if (!std::isfinite(loss))
    throw TrainError("sequence loss is not finite; scores left log-space");
  if (!grad) return loss;

  // Adjoints flow through the beta recursion front to back: by the time
  // level i is expanded, every contribution to beta_adj[i] has arrived.
  for (size_t i = 0; i + 1 < n; ++i) {
    for (int t = 0; t < bio::kNumTags; ++t) {
      double ba = beta_adj[i][t];
      if (ba == 0.0) continue;
      for (int u = 0; u < bio::kNumTags; ++u) {
        double r = std::exp(trans[t][u] + node[i + 1][u] + beta[i + 1][u] - beta[i][t]);
        trans_adj[t][u] += ba * r;
        node_adj[i + 1][u] += ba * r;
        beta_adj[i + 1][u] += ba * r;
      }
    }
  }

  grad->transition_grad = trans_adj;
  for (size_t i = 0; i < n; ++i) {
    for (int fid : f.ids[i]) {
      for (int t = 0; t < bio::kNumTags; ++t) grad->feature_grad[fid][t] += node_adj[i][t];
      grad->touched.push_back(fid);
    }
  }
  std::sort(grad->touched.begin(), grad->touched.end());
  grad->touched.erase(std::unique(grad->touched.begin(), grad->touched.end()),
                      grad->touched.end());
  return loss;
}

TrainingConfig TrainingConfig::pretrain_defaults() { return TrainingConfig{}; }

TrainingConfig TrainingConfig::finetune_defaults() {
  TrainingConfig cfg;
  cfg.learning_rate = 0.0015;
  cfg.decay_kind = Decay::Exponential;
  cfg.decay_rate = 0.0007;
  cfg.feature_dropout = 0.4;
  cfg.epochs = 22;
  return cfg;
}

namespace {

void validate(const TrainingConfig& cfg) {
  if (!(cfg.learning_rate > 0)) throw TrainError("learning rate must be positive");
  if (!(cfg.feature_dropout >= 0 && cfg.feature_dropout < 1))
    throw TrainError("feature dropout must lie in [0, 1)");
  if (cfg.epochs < 0) throw TrainError("epoch count must be non-negative");
  if (!(cfg.decay_rate >= 0)) throw TrainError("decay rate must be non-negative");
  if (!(cfg.negative_sampling_ratio >= 0))
    throw TrainError("negative sampling ratio must be non-negative");
}

double epoch_lr(const TrainingConfig& cfg, int epoch) {
  switch (cfg.decay_kind) {
    case TrainingConfig::Decay::Linear:
      return std::max(cfg.learning_rate - cfg.decay_rate * epoch, 0.0);
    case TrainingConfig::Decay::Exponential:
      return cfg.learning_rate * std::exp(-cfg.decay_rate * epoch);
  }
  return cfg.learning_rate;
}

// Library shuffle/bernoulli helpers vary between standard libraries; the
// hand-rolled versions keep trained weights identical everywhere.
double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

SentenceFeatures apply_dropout(const SentenceFeatures& f, double p, std::mt19937_64& rng) {
  SentenceFeatures out;
  out.ids.resize(f.ids.size());
  for (size_t i = 0; i < f.ids.size(); ++i) {
    out.ids[i].reserve(f.ids[i].size());
    for (int fid : f.ids[i])
      if (uniform01(rng) >= p) out.ids[i].push_back(fid);
  }
  return out;
}

}  // namespace

NegativeSampler::NegativeSampler(std::vector<size_t> negatives, std::mt19937_64& rng)
    : pool_(std::move(negatives)) {
  shuffle_vec(pool_, rng);
}

std::vector<size_t> NegativeSampler::draw(size_t k, std::mt19937_64& rng) {
  std::vector<size_t> out;
  if (pool_.empty()) return out;
  out.reserve(k);
  while (out.size() < k) {
    if (next_ >= pool_.size()) {
      shuffle_vec(pool_, rng);
      next_ = 0;
    }
    out.push_back(pool_[next_++]);
  }
  return out;
}

void train_stage(CrfModel& m, const std::vector<bio::TaggedSentence>& corpus,
                 const TrainingConfig& cfg, Sampling sampling,
                 const weaksup::KbAliasDictionary& dict,
                 std::vector<double>* epoch_avg_loss) {
  validate(cfg);
  if (corpus.empty() || cfg.epochs == 0) return;

  std::vector<SentenceFeatures> feats;
  feats.reserve(corpus.size());
  for (const auto& ts : corpus) {
    if (ts.tokens.size() != ts.tags.size())
      throw TrainError("tag count does not match token count");
    feats.push_back(intern_features(ts.tokens, dict, m.vocab));
  }
  m.weights.resize(m.vocab.size(), LabelScores{0, 0, 0});

  std::vector<size_t> positives, negatives;
  for (size_t i = 0; i < corpus.size(); ++i) {
    bool pos = std::any_of(corpus[i].tags.begin(), corpus[i].tags.end(),
                           [](bio::Tag t) { return t != bio::Tag::O; });
    (pos ? positives : negatives).push_back(i);
  }

  std::mt19937_64 rng(cfg.seed);
  NegativeSampler sampler(negatives, rng);

  // RMS-scaled SGD state; lives and dies with the stage so fine-tuning
  // starts from the pretrained weights but a fresh optimizer.
  std::vector<LabelScores> w_cache(m.vocab.size(), LabelScores{0, 0, 0});
  TransitionTable t_cache{};
  constexpr double kRmsDecay = 0.9;
  constexpr double kRmsEps = 1e-8;

  Gradient grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = epoch_lr(cfg, epoch);
    std::vector<size_t> order;
    if (sampling == Sampling::BalancedNegatives) {
      order = positives;
      size_t k = size_t(std::llround(cfg.negative_sampling_ratio * double(positives.size())));
      for (size_t idx : sampler.draw(k, rng)) order.push_back(idx);
    } else {
      order.resize(corpus.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    }
    shuffle_vec(order, rng);

    double loss_sum = 0.0;
    for (size_t idx : order) {
      const SentenceFeatures* sf = &feats[idx];
      SentenceFeatures dropped;
      if (cfg.feature_dropout > 0) {
        dropped = apply_dropout(*sf, cfg.feature_dropout, rng);
        sf = &dropped;
      }
      loss_sum += sentence_loss_and_gradient(m, *sf, corpus[idx].tags,
                                             cfg.positive_class_weight_boost, &grad);
      for (int fid : grad.touched) {
        for (int t = 0; t < bio::kNumTags; ++t) {
          double g = grad.feature_grad[fid][t];
          double& c = w_cache[fid][t];
          c = kRmsDecay * c + (1 - kRmsDecay) * g * g;
          m.weights[fid][t] -= lr * g / (std::sqrt(c) + kRmsEps);
        }
      }
      for (int s = 0; s < 4; ++s) {
        for (int t = 0; t < bio::kNumTags; ++t) {
          double g = grad.transition_grad[s][t];
          double& c = t_cache[s][t];
          c = kRmsDecay * c + (1 - kRmsDecay) * g * g;
          m.transitions[s][t] -= lr * g / (std::sqrt(c) + kRmsEps);
        }
      }
    }
    if (epoch_avg_loss)
      epoch_avg_loss->push_back(order.empty() ? 0.0 : loss_sum / double(order.size()));
  }
}

CrfModel train(const std::vector<bio::TaggedSentence>& ssc,
               const std::vector<bio::TaggedSentence>& gsc,
               const TrainingConfig& ssc_cfg, const TrainingConfig& gsc_cfg,
               const weaksup::KbAliasDictionary& dict) {
  validate(ssc_cfg);
  validate(gsc_cfg);
  if (gsc.empty()) throw TrainError("gold corpus is empty; nothing to fine-tune on");
  CrfModel m;
  train_stage(m, ssc, ssc_cfg, Sampling::BalancedNegatives, dict);
  train_stage(m, gsc, gsc_cfg, Sampling::FullPass, dict);
  return m;
}

void save_crf_model(const CrfModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TrainError("cannot write tagger model: " + path);
  char buf[80];
  out << "crfmodel v1\n";
  out << "templates " << m.template_id << "\n";
  out << "transitions\n";
  for (int s = 0; s < 4; ++s) {
    std::snprintf(buf, sizeof buf, "%a %a %a\n", m.transitions[s][0], m.transitions[s][1],
                  m.transitions[s][2]);
    out << buf;
  }
  out << "features " << m.vocab.size() << "\n";
  for (size_t i = 0; i < m.vocab.size(); ++i) {
    std::snprintf(buf, sizeof buf, "\t%a\t%a\t%a\n", m.weights[i][0], m.weights[i][1],
                  m.weights[i][2]);
    out << m.vocab.names[i] << buf;
  }
}

CrfModel load_crf_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TrainError("cannot open tagger model: " + path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != "crfmodel v1")
    throw TrainError("not a tagger model file: " + path);
  CrfModel m;
  if (!std::getline(in, line) || !line.starts_with("templates "))
    throw TrainError("tagger model missing template id: " + path);
  m.template_id = std::string(trimmed(line.substr(10)));
  if (m.template_id != kFeatureTemplateId)
    throw TrainError("tagger model uses unknown feature templates: " + m.template_id);
  if (!std::getline(in, line) || trimmed(line) != "transitions")
    throw TrainError("tagger model missing transitions: " + path);
  for (int s = 0; s < 4; ++s) {
    if (!std::getline(in, line)) throw TrainError("tagger model truncated: " + path);
    auto parts = split_ws(line);
    if (parts.size() != 3) throw TrainError("bad transition line: " + line);
    for (int t = 0; t < bio::kNumTags; ++t)
      m.transitions[s][t] = std::strtod(parts[t].c_str(), nullptr);
  }
  if (!std::getline(in, line) || !line.starts_with("features "))
    throw TrainError("tagger model missing feature table: " + path);
  size_t count = std::strtoull(line.c_str() + 9, nullptr, 10);
  for (size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw TrainError("tagger model truncated: " + path);
    auto parts = split(line, '\t');
    if (parts.size() != 4) throw TrainError("bad feature line: " + line);
    if (m.vocab.intern(parts[0]) != int(i))
      throw TrainError("duplicate feature in tagger model: " + parts[0]);
    m.weights.push_back(LabelScores{std::strtod(parts[1].c_str(), nullptr),
                                    std::strtod(parts[2].c_str(), nullptr),
                                    std::strtod(parts[3].c_str(), nullptr)});
  }
  if (std::getline(in, line) && !trimmed(line).empty())
    throw TrainError("trailing content in tagger model: " + path);
  return m;
}

std::vector<Mention> tag_corpus(const CrfModel& m, const std::vector<ingest::Document>& docs,
                                const ingest::TextConfig& cfg,
                                const weaksup::KbAliasDictionary& dict, int jobs,
                                TagStats* stats) {
  std::vector<ingest::Sentence> work;
  size_t skipped = 0;
  for (const auto& doc : docs) {
    std::vector<ingest::Sentence> ss = ingest::mm_sentences(doc, cfg);
    if (ss.empty()) {
      ++skipped;
      continue;
    }
    for (auto& s : ss) work.push_back(std::move(s));
  }

  std::vector<std::vector<Mention>> per_sentence(work.size());
  auto decode_range = [&](size_t begin, size_t stride) {
    for (size_t i = begin; i < work.size(); i += stride) {
      const ingest::Sentence& s = work[i];
      std::vector<bio::Tag> tags =
          viterbi_tags(m, lookup_features(surfaces(s), dict, m.vocab));
      for (const bio::TokenSpan& sp : bio::spans_from_tags(tags)) {
        Mention mn;
        mn.doc_id = s.doc_id;
        mn.sentence_index = s.index;
        mn.start_token = sp.begin;
        mn.end_token = sp.end;
        size_t from = s.tokens[sp.begin].start;
        size_t to = s.tokens[sp.end - 1].end;
        mn.char_start = s.char_start + from;
        mn.char_end = s.char_start + to;
        mn.surface = s.text.substr(from, to - from);
        per_sentence[i].push_back(std::move(mn));
      }
    }
  };

  if (jobs <= 1 || work.size() < 2) {
    decode_range(0, 1);
  } else {
    size_t n_threads = std::min<size_t>(jobs, work.size());
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t)
      threads.emplace_back(decode_range, t, n_threads);
    for (auto& th : threads) th.join();
  }

  std::vector<Mention> out;
  for (auto& ms : per_sentence)
    for (auto& mn : ms) out.push_back(std::move(mn));
  if (stats) {
    stats->n_docs = docs.size();
    stats->n_docs_skipped = skipped;
    stats->n_sentences = work.size();
    stats->n_mentions = out.size();
    size_t tagged_docs = docs.size() - skipped;
    stats->mentions_per_article =
        tagged_docs == 0 ? 0.0 : double(out.size()) / double(tagged_docs);
  }
  return out;
}

}  // namespace skg::crf
