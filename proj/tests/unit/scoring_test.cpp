#include "skg/scoring.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace skg;
using namespace skg::scoring;

namespace {

Span span(const std::string& doc, size_t sent, size_t start, size_t end) {
  Span s;
  s.doc_id = doc;
  s.sentence_index = sent;
  s.start = start;
  s.end = end;
  return s;
}

// Non-overlapping spans per sentence via a random walk with gaps.
std::vector<Span> random_spans(std::mt19937_64& rng, const std::vector<std::string>& docs) {
  std::vector<Span> out;
  for (const auto& d : docs) {
    for (size_t sent = 0; sent < 3; ++sent) {
      size_t pos = rng() % 3;
      while (pos < 12) {
        size_t len = 1 + rng() % 3;
        if (rng() % 2) out.push_back(span(d, sent, pos, pos + len));
        pos += len + 1 + rng() % 3;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("the four modes count a hand-scored fixture correctly") {
  std::vector<Span> gold = {
      span("d1", 0, 2, 5),  // three-token name
      span("d1", 1, 0, 1),
      span("d1", 1, 4, 6),
      span("d2", 0, 3, 4),
  };
  std::vector<Span> pred = {
      span("d1", 0, 2, 4),  // truncated but same first token
      span("d1", 1, 0, 1),  // exact hit
      span("d1", 1, 5, 7),  // overlaps without matching boundaries
      span("d2", 0, 0, 1),  // miss
      span("d2", 2, 1, 3),  // spurious sentence
  };

  Metrics b = evaluate(pred, gold, MatchMode::B);
  CHECK(b.tp == 2);
  CHECK(b.fp == 3);
  CHECK(b.fn == 2);
  CHECK(b.precision == doctest::Approx(0.4));
  CHECK(b.recall == doctest::Approx(0.5));

  Metrics i = evaluate(pred, gold, MatchMode::I);
  CHECK(i.tp == 1);
  CHECK(i.fp == 2);
  CHECK(i.fn == 2);
  CHECK(i.precision == doctest::Approx(1.0 / 3));
  CHECK(i.recall == doctest::Approx(1.0 / 3));

  Metrics p = evaluate(pred, gold, MatchMode::Partial);
  CHECK(p.tp == 3);
  CHECK(p.fp == 2);
  CHECK(p.fn == 1);
  CHECK(p.precision == doctest::Approx(0.6));
  CHECK(p.recall == doctest::Approx(0.75));

  Metrics e = evaluate(pred, gold, MatchMode::Exact);
  CHECK(e.tp == 1);
  CHECK(e.fp == 4);
  CHECK(e.fn == 3);
  CHECK(e.precision == doctest::Approx(0.2));
  CHECK(e.recall == doctest::Approx(0.25));

  std::string table = report_table(evaluate_all_modes(pred, gold));
  CHECK(table.find("mode\tprecision\trecall\tf_score") != std::string::npos);
  CHECK(table.find("B-software\t0.4000\t0.5000\t0.4444") != std::string::npos);
  CHECK(table.find("partial match\t0.6000\t0.7500\t0.6667") != std::string::npos);
  CHECK(table.find("exact match\t") != std::string::npos);
  CHECK(table.find("I-software\t") != std::string::npos);
}

TEST_CASE("a truncated multi-word name scores per mode as expected") {
  std::vector<Span> gold = {span("d", 0, 2, 5)};
  std::vector<Span> pred = {span("d", 0, 2, 4)};

  CHECK(evaluate(pred, gold, MatchMode::Exact).f_score == 0.0);
  Metrics p = evaluate(pred, gold, MatchMode::Partial);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  Metrics b = evaluate(pred, gold, MatchMode::B);
  CHECK(b.precision == 1.0);
  CHECK(b.recall == 1.0);
  Metrics i = evaluate(pred, gold, MatchMode::I);
  CHECK(i.tp == 1);
  CHECK(i.fn == 1);
  CHECK(i.precision == 1.0);
  CHECK(i.recall == 0.5);
}

TEST_CASE("identical span sets are perfect in every mode") {
  std::vector<Span> spans = {span("a", 0, 1, 4), span("a", 2, 0, 1), span("b", 0, 5, 7)};
  for (const Metrics& m : evaluate_all_modes(spans, spans)) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f_score == 1.0);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
  }
}

TEST_CASE("degenerate inputs follow the zero-division rule") {
  std::vector<Span> gold = {span("a", 0, 1, 2)};
  Metrics m = evaluate({}, gold, MatchMode::Exact);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f_score == 0.0);
  CHECK(m.fn == 1);

  // a corpus of single-token names has no inner tokens at all
  Metrics i = evaluate(gold, gold, MatchMode::I);
  CHECK(i.tp == 0);
  CHECK(i.precision == 0.0);
  CHECK(i.recall == 0.0);

  Metrics empty = evaluate({}, {}, MatchMode::Partial);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
}

TEST_CASE("partial matching consumes each gold span once") {
  // two predictions overlap the same gold name; only one may count
  std::vector<Span> gold = {span("d", 0, 2, 6)};
  std::vector<Span> pred = {span("d", 0, 1, 3), span("d", 0, 4, 7)};
  Metrics m = evaluate(pred, gold, MatchMode::Partial);
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);
  CHECK(m.fn == 0);

  // and symmetrically one prediction cannot consume two gold names
  Metrics r = evaluate(gold, pred, MatchMode::Partial);
  CHECK(r.tp == 1);
  CHECK(r.fp == 0);
  CHECK(r.fn == 1);
}

TEST_CASE("span sets are validated") {
  std::vector<Span> overlapping = {span("d", 0, 1, 4), span("d", 0, 3, 5)};
  std::vector<Span> gold = {span("d", 0, 1, 2)};
  CHECK_THROWS_WITH_AS(evaluate(overlapping, gold, MatchMode::Exact),
                       doctest::Contains("prediction"), EvalError);
  CHECK_THROWS_WITH_AS(evaluate(gold, overlapping, MatchMode::Exact),
                       doctest::Contains("gold"), EvalError);
  // duplicates overlap themselves
  std::vector<Span> dup = {span("d", 0, 1, 2), span("d", 0, 1, 2)};
  CHECK_THROWS_AS(evaluate(dup, gold, MatchMode::B), EvalError);
  // inverted range
  std::vector<Span> bad = {span("d", 0, 3, 3)};
  CHECK_THROWS_WITH_AS(evaluate(bad, gold, MatchMode::B),
                       doctest::Contains("empty or inverted"), EvalError);
  // same token ranges in different sentences do not conflict
  std::vector<Span> ok = {span("d", 0, 1, 4), span("d", 1, 1, 4)};
  CHECK_NOTHROW(evaluate(ok, gold, MatchMode::Exact));
}

TEST_CASE("exact true positives never exceed partial true positives") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    auto pred = random_spans(rng, {"a", "b"});
    auto gold = random_spans(rng, {"a", "b"});
    Metrics ex = evaluate(pred, gold, MatchMode::Exact);
    Metrics pa = evaluate(pred, gold, MatchMode::Partial);
    CAPTURE(rep);
    CHECK(ex.tp <= pa.tp);
  }
}

TEST_CASE("doc id relabeling leaves metrics unchanged") {
  std::mt19937_64 rng(29);
  auto pred = random_spans(rng, {"a", "b", "c"});
  auto gold = random_spans(rng, {"a", "b", "c"});
  auto relabel = [](std::vector<Span> spans) {
    for (auto& s : spans) s.doc_id = "renamed-" + s.doc_id;
    return spans;
  };
  auto before = evaluate_all_modes(pred, gold);
  auto after = evaluate_all_modes(relabel(pred), relabel(gold));
  for (size_t m = 0; m < 4; ++m) {
    CHECK(before[m].tp == after[m].tp);
    CHECK(before[m].fp == after[m].fp);
    CHECK(before[m].fn == after[m].fn);
  }
}

TEST_CASE("counts over disjoint halves add up to the full-corpus counts") {
  std::mt19937_64 rng(41);
  auto pred = random_spans(rng, {"a", "b", "c", "d"});
  auto gold = random_spans(rng, {"a", "b", "c", "d"});
  auto filter = [](const std::vector<Span>& spans, bool first_half) {
    std::vector<Span> out;
    for (const auto& s : spans)
      if ((s.doc_id <= "b") == first_half) out.push_back(s);
    return out;
  };
  for (MatchMode mode :
       {MatchMode::B, MatchMode::I, MatchMode::Partial, MatchMode::Exact}) {
    Metrics full = evaluate(pred, gold, mode);
    Metrics lo = evaluate(filter(pred, true), filter(gold, true), mode);
    Metrics hi = evaluate(filter(pred, false), filter(gold, false), mode);
    CHECK(full.tp == lo.tp + hi.tp);
    CHECK(full.fp == lo.fp + hi.fp);
    CHECK(full.fn == lo.fn + hi.fn);
  }
}

TEST_CASE("tagged sentences convert to spans with per-document indices") {
  std::vector<bio::TaggedSentence> corpus(4);
  corpus[0].doc_id = "A";
  corpus[0].tokens = {"x", "y", "z", "w"};
  corpus[0].tags = {bio::Tag::O, bio::Tag::B, bio::Tag::I, bio::Tag::O};
  corpus[1].doc_id = "A";
  corpus[1].tokens = {"x", "y"};
  corpus[1].tags = {bio::Tag::O, bio::Tag::O};
  corpus[2].doc_id = "B";
  corpus[2].tokens = {"x", "y", "z"};
  corpus[2].tags = {bio::Tag::B, bio::Tag::O, bio::Tag::B};
  corpus[3].doc_id = "A";  // a later block of the same document keeps counting
  corpus[3].tokens = {"q"};
  corpus[3].tags = {bio::Tag::B};

  auto spans = spans_from_tagged(corpus);
  REQUIRE(spans.size() == 4);
  CHECK(spans[0] == span("A", 0, 1, 3));
  CHECK(spans[1] == span("B", 0, 0, 1));
  CHECK(spans[2] == span("B", 0, 2, 3));
  CHECK(spans[3] == span("A", 2, 0, 1));
}

TEST_CASE("kappa is exactly one on identical annotations") {
  std::vector<bio::Tag> a = {bio::Tag::O, bio::Tag::B, bio::Tag::I, bio::Tag::O, bio::Tag::B};
  CHECK(cohen_kappa(a, a) == 1.0);
  // both annotators constant on the same label: chance agreement is total
  std::vector<bio::Tag> o(10, bio::Tag::O);
  CHECK(cohen_kappa(o, o) == 1.0);
  CHECK(cohen_kappa({}, {}) == 1.0);
}

TEST_CASE("kappa matches the closed form on a planted confusion table") {
  // joint counts: rows annotator 1, columns annotator 2
  const size_t m[3][3] = {{50, 5, 2}, {4, 30, 3}, {1, 2, 20}};
  std::vector<bio::Tag> a1, a2;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (size_t k = 0; k < m[r][c]; ++k) {
        a1.push_back(static_cast<bio::Tag>(r));
        a2.push_back(static_cast<bio::Tag>(c));
      }

  const double n = 117;
  const double po = (50.0 + 30.0 + 20.0) / n;
  const double pe = (57.0 * 55 + 37.0 * 37 + 23.0 * 25) / (n * n);
  const double want = (po - pe) / (1 - pe);
  CHECK(std::fabs(cohen_kappa(a1, a2) - want) < 1e-9);
}

TEST_CASE("kappa of independent annotations trends to zero") {
  std::mt19937_64 r1(101), r2(202);
  std::vector<bio::Tag> a1, a2;
  for (int i = 0; i < 20000; ++i) {
    a1.push_back(static_cast<bio::Tag>(r1() % 3));
    a2.push_back(static_cast<bio::Tag>(r2() % 3));
  }
  CHECK(std::fabs(cohen_kappa(a1, a2)) < 0.05);
}

TEST_CASE("kappa rejects mismatched lengths and handles disagreement") {
  std::vector<bio::Tag> a = {bio::Tag::O, bio::Tag::B};
  std::vector<bio::Tag> b = {bio::Tag::O};
  CHECK_THROWS_WITH_AS(cohen_kappa(a, b), doctest::Contains("lengths differ"), EvalError);

  // constant but different annotators: no agreement, no chance agreement
  std::vector<bio::Tag> all_o(8, bio::Tag::O), all_b(8, bio::Tag::B);
  CHECK(cohen_kappa(all_o, all_b) == 0.0);
}
