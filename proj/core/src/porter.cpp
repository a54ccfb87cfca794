#include "skg/porter.hpp"

#include <array>
#include <cstddef>

#include "skg/strings.hpp"

namespace skg {
namespace {

bool is_consonant(const std::string& w, size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// Number of VC sequences in w[0..len).
int measure(const std::string& w, size_t len) {
  int m = 0;
  size_t i = 0;
  while (i < len && is_consonant(w, i)) ++i;
  while (i < len) {
    while (i < len && !is_consonant(w, i)) ++i;
    if (i == len) break;
    ++m;
    while (i < len && is_consonant(w, i)) ++i;
  }
  return m;
}

bool has_vowel(const std::string& w, size_t len) {
  for (size_t i = 0; i < len; ++i)
    if (!is_consonant(w, i)) return true;
  return false;
}

bool double_consonant(const std::string& w) {
  size_t n = w.size();
  if (n < 2 || w[n - 1] != w[n - 2]) return false;
  return is_consonant(w, n - 1);
}

// cvc at the end, where the final c is not w, x or y.
bool ends_cvc(const std::string& w, size_t len) {
  if (len < 3) return false;
  if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) || !is_consonant(w, len - 1))
    return false;
  char c = w[len - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suf) {
  return w.size() >= suf.size() && std::string_view(w).substr(w.size() - suf.size()) == suf;
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Longest listed suffix wins; if its m-condition fails no other rule of the
// step applies. That matches the original algorithm's per-step dispatch.
bool apply_step(std::string& w, const Rule* rules, size_t n_rules, int min_measure) {
  const Rule* best = nullptr;
  for (size_t r = 0; r < n_rules; ++r) {
    if (ends_with(w, rules[r].suffix)) {
      if (!best || rules[r].suffix.size() > best->suffix.size()) best = &rules[r];
    }
  }
  if (!best) return false;
  size_t stem_len = w.size() - best->suffix.size();
  if (measure(w, stem_len) <= min_measure) return false;
  w.resize(stem_len);
  w.append(best->replacement);
  return true;
}

void step1a(std::string& w) {
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ss")) {
    // keep
  } else if (ends_with(w, "s")) {
    w.resize(w.size() - 1);
  }
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
    return;
  }
  bool stripped = false;
  if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
    w.resize(w.size() - 2);
    stripped = true;
  } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
    w.resize(w.size() - 3);
    stripped = true;
  }
  if (!stripped) return;
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w.push_back('e');
  } else if (double_consonant(w)) {
    char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.resize(w.size() - 1);
  } else if (measure(w, w.size()) == 1 && ends_cvc(w, w.size())) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';
}

constexpr Rule kStep2[] = {
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
    {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
    {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
    {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
};

constexpr Rule kStep3[] = {
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
};

constexpr Rule kStep4[] = {
    {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
    {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
    {"ent", ""}, {"ou", ""},   {"ism", ""},  {"ate", ""}, {"iti", ""},
    {"ous", ""}, {"ive", ""},  {"ize", ""},
};

void step4(std::string& w) {
  // "ion" only counts with a preceding s or t; handled apart from the table.
  const Rule* best = nullptr;
  for (const Rule& r : kStep4) {
    if (ends_with(w, r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
      best = &r;
  }
  bool ion = ends_with(w, "ion") && w.size() >= 4 &&
             (w[w.size() - 4] == 's' || w[w.size() - 4] == 't');
  if (ion && (!best || best->suffix.size() < 3)) {
    if (measure(w, w.size() - 3) > 1) w.resize(w.size() - 3);
    return;
  }
  if (!best) return;
  size_t stem_len = w.size() - best->suffix.size();
  if (measure(w, stem_len) > 1) w.resize(stem_len);
}

void step5a(std::string& w) {
  if (!ends_with(w, "e")) return;
  int m = measure(w, w.size() - 1);
  if (m > 1 || (m == 1 && !ends_cvc(w, w.size() - 1))) w.resize(w.size() - 1);
}

void step5b(std::string& w) {
  if (double_consonant(w) && w.back() == 'l' && measure(w, w.size()) > 1)
    w.resize(w.size() - 1);
}

std::string porter_pass(std::string w) {
  step1a(w);
  step1b(w);
  step1c(w);
  apply_step(w, kStep2, std::size(kStep2), 0);
  apply_step(w, kStep3, std::size(kStep3), 0);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

}  // namespace

std::string stem(std::string_view word) {
  std::string w = lowercased(word);
  for (char c : w)
    if (!ascii_lower(c)) return w;
  if (w.size() <= 2) return w;
  // Iterate to a fixed point so stemming is idempotent. This deliberately
  // diverges from the textbook algorithm for the few words whose textbook
  // output would stem further (agreed -> agre -> agr): downstream code
  // compares stems with stems, so stability matters more than the exact
  // textbook form.
  for (int i = 0; i < 4; ++i) {
    std::string next = porter_pass(w);
    if (next == w || next.size() <= 2) return next;
    w = std::move(next);
  }
  return w;
}

}  // namespace skg
