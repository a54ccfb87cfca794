#include "skg/weaksup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "skg/strings.hpp"

namespace skg::weaksup {

namespace {

bool is_word_token(const std::string& surface) {
  for (char c : surface)
    if (ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80) return true;
  return false;
}

bool capitalized(const std::string& surface) {
  return !surface.empty() && ascii_upper(surface[0]);
}

std::string surface_key(std::string_view surface) {
  return collapse_spaces(surface);
}

}  // namespace

std::vector<Candidate> generate_candidates(const ingest::Sentence& s, size_t max_n) {
  std::vector<Candidate> out;
  const auto& toks = s.tokens;
  for (size_t start = 0; start < toks.size(); ++start) {
    for (size_t n = 1; n <= max_n && start + n <= toks.size(); ++n) {
      size_t end = start + n;
      bool has_content = false;
      for (size_t i = start; i < end && !has_content; ++i)
        has_content = is_word_token(toks[i].surface) && !toks[i].is_stopword;
      if (!has_content) continue;
      Candidate c;
      c.doc_id = s.doc_id;
      c.sentence_index = s.index;
      c.start_token = start;
      c.end_token = end;
      c.surface = s.text.substr(toks[start].start, toks[end - 1].end - toks[start].start);
      c.pn_headed = start > 0 && capitalized(toks[start].surface);
      out.push_back(std::move(c));
    }
  }
  return out;
}

KbAliasDictionary KbAliasDictionary::load(const std::string& dict_path,
                                          const std::string& wordlist_path) {
  KbAliasDictionary dict;
  {
    std::ifstream in(wordlist_path);
    if (!in) throw DictError("cannot open english wordlist: " + wordlist_path);
    std::string line;
    while (std::getline(in, line)) {
      std::string w = lowercased(trimmed(line));
      if (!w.empty()) dict.english_wordlist.insert(std::move(w));
    }
  }
  std::ifstream in(dict_path);
  if (!in) throw DictError("cannot open alias dictionary: " + dict_path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split(t, '\t');
    if (fields.size() < 2)
      throw DictError(dict_path + ":" + std::to_string(lineno) +
                      ": expected canonical_id<TAB>alias[<TAB>language]");
    std::string alias = collapse_spaces(fields[1]);
    if (alias.empty()) continue;
    if (dict.english_wordlist.count(lowercased(alias))) continue;
    dict.entries.emplace(std::move(alias), std::string(trimmed(fields[0])));
  }
  return dict;
}

bool KbAliasDictionary::contains(std::string_view surface) const {
  return entries.count(surface_key(surface)) > 0;
}

const std::string* KbAliasDictionary::lookup(std::string_view surface) const {
  auto it = entries.find(surface_key(surface));
  return it == entries.end() ? nullptr : &it->second;
}

ExactPattern parse_exact_rule(std::string_view line) {
  ExactPattern p;
  p.source = std::string(trimmed(line));
  bool seen_slot = false;
  for (const std::string& tok : split_ws(line)) {
    if (tok == "<>") {
      if (seen_slot) throw DictError("rule has more than one <> slot: " + p.source);
      seen_slot = true;
      continue;
    }
    (seen_slot ? p.after : p.before).push_back(ingest::lemma(tok));
  }
  if (!seen_slot) throw DictError("rule is missing the <> slot: " + p.source);
  if (p.before.empty() && p.after.empty())
    throw DictError("rule has no context around the slot: " + p.source);
  return p;
}

std::vector<ExactPattern> load_exact_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DictError("cannot open exact-rule file: " + path);
  std::vector<ExactPattern> rules;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    rules.push_back(parse_exact_rule(t));
  }
  if (rules.empty()) throw DictError("exact-rule file has no rules: " + path);
  return rules;
}

std::set<std::string> load_negative_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DictError("cannot open negative list: " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = trimmed(line);
    if (!t.empty() && t[0] != '#') out.insert(collapse_spaces(t));
  }
  return out;
}

Vote lf_dictionary(const Candidate& c, const KbAliasDictionary& dict) {
  return dict.contains(c.surface) ? Vote::Positive : Vote::Abstain;
}

namespace {

const char* kHeadWords[] = {"software", "tool", "toolbox", "package", "program", "script"};

bool is_head_word(const std::string& surface) {
  std::string w = lowercased(surface);
  if (w.size() > 2 && w.ends_with("es")) w.pop_back();  // crude plural fold
  if (w.size() > 1 && w.ends_with("s")) w.pop_back();
  for (const char* h : kHeadWords)
    if (w == h) return true;
  return false;
}

bool is_dotted_number(const std::string& s) {
  size_t dots = 0, digits = 0;
  for (char c : s) {
    if (c == '.') {
      ++dots;
    } else if (ascii_digit(c)) {
      ++digits;
    } else {
      return false;
    }
  }
  return dots >= 1 && digits >= 2 && !s.starts_with(".") && !s.ends_with(".");
}

bool is_v_number(const std::string& s) {
  return s.size() >= 2 && (s[0] == 'v' || s[0] == 'V') && ascii_digit(s[1]);
}

const char* kCorpTokens[] = {"Inc", "Ltd", "GmbH", "Corp", "Co"};

bool is_corp_token(const std::string& s) {
  for (const char* c : kCorpTokens)
    if (s == c) return true;
  return false;
}

}  // namespace

Vote lf_general_context(const Candidate& c, const ingest::Sentence& s) {
  // Indices of non-stopword tokens (punctuation kept: the developer pattern
  // needs parentheses and commas).
  std::vector<size_t> kept;
  kept.reserve(s.tokens.size());
  for (size_t i = 0; i < s.tokens.size(); ++i)
    if (!s.tokens[i].is_stopword) kept.push_back(i);

  // Window: up to 4 kept tokens on each side of the span.
  size_t lo = 0;
  while (lo < kept.size() && kept[lo] < c.start_token) ++lo;  // first kept >= span start
  size_t hi = lo;
  while (hi < kept.size() && kept[hi] < c.end_token) ++hi;  // first kept past span
  size_t wbegin = lo >= 4 ? lo - 4 : 0;
  size_t wend = std::min(kept.size(), hi + 4);

  auto tok = [&](size_t k) -> const std::string& { return s.tokens[kept[k]].surface; };

  for (size_t k = wbegin; k < wend; ++k) {
    if (k >= lo && k < hi) continue;  // the candidate itself is not context
    const std::string& t = tok(k);
    if (is_head_word(t)) return Vote::Positive;
    if (is_v_number(t) || is_dotted_number(t)) return Vote::Positive;
    if (lowercased(t) == "version" && k + 1 < kept.size() && starts_with_digit(tok(k + 1)))
      return Vote::Positive;
    if (is_corp_token(t) && k > 0 && capitalized(tok(k - 1))) return Vote::Positive;
    if (t == "(" && k + 1 < kept.size() && capitalized(tok(k + 1))) {
      for (size_t j = k + 2; j < std::min(kept.size(), k + 6); ++j) {
        if (tok(j) == ")") break;
        if (tok(j) == ",") return Vote::Positive;
      }
    }
  }
  return Vote::Abstain;
}

Vote lf_exact_context(const Candidate& c, const ingest::Sentence& s,
                      const std::vector<ExactPattern>& patterns) {
  std::vector<std::string> lemmas;
  lemmas.reserve(s.tokens.size());
  for (const auto& t : s.tokens) lemmas.push_back(ingest::lemma(t.surface));

  for (const ExactPattern& p : patterns) {
    if (c.start_token < p.before.size()) continue;
    if (c.end_token + p.after.size() > lemmas.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < p.before.size() && ok; ++i)
      ok = lemmas[c.start_token - p.before.size() + i] == p.before[i];
    for (size_t i = 0; i < p.after.size() && ok; ++i)
      ok = lemmas[c.end_token + i] == p.after[i];
    if (ok) return Vote::Positive;
  }
  return Vote::Abstain;
}

Vote lf_negative_list(const Candidate& c, const std::set<std::string>& neglist) {
  return neglist.count(surface_key(c.surface)) ? Vote::Negative : Vote::Abstain;
}

std::vector<Vote> apply_lfs(const Candidate& c, const ingest::Sentence& s,
                            const WeakRules& rules) {
  return {lf_dictionary(c, rules.dict), lf_general_context(c, s),
          lf_exact_context(c, s, rules.patterns), lf_negative_list(c, rules.negative_list)};
}

namespace {

constexpr double kProbFloor = 1e-4;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

// log P(votes | label) under the conditional-independence model.
double log_class_likelihood(const LabelModel& m, const std::vector<Vote>& votes, bool positive) {
  double ll = 0.0;
  for (size_t j = 0; j < votes.size(); ++j) {
    double p = m.propensities[j], a = m.accuracies[j];
    switch (votes[j]) {
      case Vote::Abstain:
        ll += std::log(1.0 - p);
        break;
      case Vote::Positive:
        ll += std::log(p) + std::log(positive ? a : 1.0 - a);
        break;
      case Vote::Negative:
        ll += std::log(p) + std::log(positive ? 1.0 - a : a);
        break;
    }
  }
  return ll;
}

double posterior_positive(const LabelModel& m, const std::vector<Vote>& votes) {
  double lp = std::log(m.class_prior) + log_class_likelihood(m, votes, true);
  double ln = std::log(1.0 - m.class_prior) + log_class_likelihood(m, votes, false);
  double mx = std::max(lp, ln);
  double wp = std::exp(lp - mx), wn = std::exp(ln - mx);
  return wp / (wp + wn);
}

}  // namespace

double LabelModel::predict_marginal(const std::vector<Vote>& votes) const {
  if (votes.size() != lf_ids.size())
    throw ModelError("vote vector has " + std::to_string(votes.size()) + " entries, model has " +
                     std::to_string(lf_ids.size()) + " labeling functions");
  return posterior_positive(*this, votes);
}

double LabelModel::predict_marginal(
    const std::vector<std::pair<std::string, Vote>>& votes) const {
  std::vector<Vote> ordered(lf_ids.size(), Vote::Abstain);
  for (const auto& [id, v] : votes) {
    auto it = std::find(lf_ids.begin(), lf_ids.end(), id);
    if (it == lf_ids.end()) throw ModelError("unknown labeling function: " + id);
    ordered[size_t(it - lf_ids.begin())] = v;
  }
  return posterior_positive(*this, ordered);
}

LabelModel fit_label_model(const VoteMatrix& votes, uint64_t seed, const FitOptions& opts) {
  const size_t n = votes.rows.size();
  const size_t k = votes.lf_ids.size();
  if (n == 0 || k == 0) throw ModelError("need at least one labeling function and one candidate");
  for (const auto& row : votes.rows)
    if (row.size() != k) throw ModelError("ragged vote matrix");
  if (!opts.trust.empty() && opts.trust.size() != k)
    throw ModelError("trust vector has " + std::to_string(opts.trust.size()) +
                     " entries for " + std::to_string(k) + " labeling functions");

  bool any_signal = false;
  for (const auto& row : votes.rows)
    for (Vote v : row)
      if (v != Vote::Abstain) any_signal = true;
  if (!any_signal) throw ModelError("no signal: every labeling function abstained everywhere");

  std::vector<double> trust(k, 0.85);
  for (size_t j = 0; j < opts.trust.size(); ++j) trust[j] = opts.trust[j];
  const double c = opts.trust_strength;
  const double d = opts.prior_strength;

  LabelModel m;
  m.lf_ids = votes.lf_ids;
  m.accuracies.resize(k);
  m.propensities.resize(k);

  // Propensity has a closed form: it does not depend on the latent label.
  for (size_t j = 0; j < k; ++j) {
    size_t fired = 0;
    for (const auto& row : votes.rows) fired += row[j] != Vote::Abstain;
    m.propensities[j] = clamp_prob(double(fired) / double(n));
  }

  // Start accuracies optimistically (jittered to break symmetry) and the
  // prior at the majority-vote positive rate. The optimistic start steers
  // EM away from the label-flipped mirror optimum that abstain-heavy
  // matrices always have.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.05);
  for (size_t j = 0; j < k; ++j) m.accuracies[j] = 0.9 + jitter(rng);

  size_t majority_pos = 0;
  for (const auto& row : votes.rows) {
    int score = 0;
    for (Vote v : row) score += v == Vote::Positive ? 1 : v == Vote::Negative ? -1 : 0;
    majority_pos += score > 0;
  }
  const double anchor = std::clamp(double(majority_pos) / double(n), opts.prior_floor, 0.95);
  m.class_prior = anchor;

  // The per-accuracy Beta(c*trust, c*(1-trust)) and class-prior
  // Dirichlet(d*anchor, d*(1-anchor)) pseudo-counts enter both the M-step
  // and the objective, so the monotonicity check below is on the quantity
  // EM actually maximizes.
  auto penalty = [&]() {
    double pen = d * (anchor * std::log(m.class_prior) +
                      (1.0 - anchor) * std::log(1.0 - m.class_prior));
    for (size_t j = 0; j < k; ++j)
      pen += c * (trust[j] * std::log(m.accuracies[j]) +
                  (1.0 - trust[j]) * std::log(1.0 - m.accuracies[j]));
    return pen;
  };

  std::vector<double> q(n);
  double prev_obj = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    // E-step, accumulating the observed-data log-likelihood.
    double ll = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double lp = std::log(m.class_prior) + log_class_likelihood(m, votes.rows[i], true);
      double ln = std::log(1.0 - m.class_prior) + log_class_likelihood(m, votes.rows[i], false);
      double mx = std::max(lp, ln);
      ll += mx + std::log(std::exp(lp - mx) + std::exp(ln - mx));
      q[i] = 1.0 / (1.0 + std::exp(ln - lp));
    }
    double obj = ll + penalty();
    if (obj + 1e-9 < prev_obj)
      throw ModelError("EM objective decreased; this is a bug");
    bool converged = obj - prev_obj < 1e-6 && iter > 0;
    prev_obj = obj;
    if (converged) break;

    // M-step.
    double qsum = 0.0;
    for (double qi : q) qsum += qi;
    m.class_prior = clamp_prob((qsum + d * anchor) / (double(n) + d));
    for (size_t j = 0; j < k; ++j) {
      double agree = 0.0, fired = 0.0;
      for (size_t i = 0; i < n; ++i) {
        Vote v = votes.rows[i][j];
        if (v == Vote::Abstain) continue;
        fired += 1.0;
        agree += v == Vote::Positive ? q[i] : 1.0 - q[i];
      }
      // Floor at chance: an LF's polarity is part of its definition, so the
      // fit may neutralize a noisy LF but never invert it.
      m.accuracies[j] =
          std::clamp((agree + c * trust[j]) / (fired + c), 0.5, 1.0 - kProbFloor);
    }
  }
  return m;
}

void save_label_model(const LabelModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write label model: " + path);
  char buf[64];
  out << "labelmodel v1\n";
  std::snprintf(buf, sizeof buf, "%a", m.class_prior);
  out << "prior " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%a", m.threshold);
  out << "threshold " << buf << "\n";
  for (size_t j = 0; j < m.lf_ids.size(); ++j) {
    out << "lf " << m.lf_ids[j];
    std::snprintf(buf, sizeof buf, " %a", m.accuracies[j]);
    out << buf;
    std::snprintf(buf, sizeof buf, " %a", m.propensities[j]);
    out << buf << "\n";
  }
}

LabelModel load_label_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open label model: " + path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != "labelmodel v1")
    throw ModelError("not a label model file: " + path);
  LabelModel m;
  while (std::getline(in, line)) {
    auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts[0] == "prior" && parts.size() == 2) {
      m.class_prior = std::strtod(parts[1].c_str(), nullptr);
    } else if (parts[0] == "threshold" && parts.size() == 2) {
      m.threshold = std::strtod(parts[1].c_str(), nullptr);
    } else if (parts[0] == "lf" && parts.size() == 4) {
      m.lf_ids.push_back(parts[1]);
      m.accuracies.push_back(std::strtod(parts[2].c_str(), nullptr));
      m.propensities.push_back(std::strtod(parts[3].c_str(), nullptr));
    } else {
      throw ModelError("bad label model line: " + line);
    }
  }
  return m;
}

bio::TaggedSentence tag_sentence(const ingest::Sentence& s, std::vector<ScoredCandidate> scored,
                                 double threshold) {
  std::erase_if(scored, [&](const ScoredCandidate& sc) { return !(sc.marginal > threshold); });
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& x, const ScoredCandidate& y) {
    if (x.marginal != y.marginal) return x.marginal > y.marginal;
    if (x.candidate.pn_headed != y.candidate.pn_headed) return x.candidate.pn_headed;
    if (x.candidate.n() != y.candidate.n()) return x.candidate.n() > y.candidate.n();
    return x.candidate.start_token < y.candidate.start_token;
  });

  std::vector<bool> taken(s.tokens.size(), false);
  std::vector<bio::TokenSpan> spans;
  for (const ScoredCandidate& sc : scored) {
    bool overlap = false;
    for (size_t i = sc.candidate.start_token; i < sc.candidate.end_token && !overlap; ++i)
      overlap = taken[i];
    if (overlap) continue;
    for (size_t i = sc.candidate.start_token; i < sc.candidate.end_token; ++i) taken[i] = true;
    spans.push_back({sc.candidate.start_token, sc.candidate.end_token});
  }
  std::sort(spans.begin(), spans.end());

  bio::TaggedSentence out;
  out.doc_id = s.doc_id;
  for (const auto& t : s.tokens) out.tokens.push_back(t.surface);
  out.tags = bio::tags_from_spans(s.tokens.size(), spans);
  return out;
}

WeakLabelResult weak_label_corpus(const std::vector<ingest::Document>& docs,
                                  const WeakRules& rules, uint64_t seed) {
  struct SentenceRecord {
    ingest::Sentence sentence;
    size_t cand_begin = 0, cand_end = 0;  // row range in the vote matrix
  };
  std::vector<SentenceRecord> records;
  std::vector<Candidate> candidates;
  VoteMatrix votes;
  for (std::string_view id : kLfIds) votes.lf_ids.emplace_back(id);

  for (const auto& doc : docs) {
    for (auto& s : ingest::mm_sentences(doc, rules.text)) {
      SentenceRecord rec;
      rec.cand_begin = candidates.size();
      for (auto& c : generate_candidates(s)) {
        votes.rows.push_back(apply_lfs(c, s, rules));
        candidates.push_back(std::move(c));
      }
      rec.cand_end = candidates.size();
      rec.sentence = std::move(s);
      records.push_back(std::move(rec));
    }
  }

  WeakLabelResult result;
  result.n_candidates = candidates.size();
  // Trust reflects how the rules are built: dictionary and negative-list
  // entries are curated, exact patterns are precise but match n-gram
  // extensions too, and the general context rules are recall-oriented.
  FitOptions opts;
  opts.trust = {0.95, 0.6, 0.75, 0.9};  // ordered like kLfIds
  result.model = fit_label_model(votes, seed, opts);

  for (const SentenceRecord& rec : records) {
    std::vector<ScoredCandidate> scored;
    for (size_t i = rec.cand_begin; i < rec.cand_end; ++i) {
      double p = result.model.predict_marginal(votes.rows[i]);
      if (p > result.model.threshold) ++result.n_positive;
      scored.push_back({candidates[i], p});
    }
    result.ssc.push_back(tag_sentence(rec.sentence, std::move(scored), result.model.threshold));
  }
  return result;
}

}  // namespace skg::weaksup
