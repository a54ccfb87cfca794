#include "skg/bio.hpp"

#include <doctest.h>

#include <sstream>

using namespace skg::bio;

TEST_CASE("tag names round-trip") {
  CHECK(tag_from_string("O") == Tag::O);
  CHECK(tag_from_string("B-software") == Tag::B);
  CHECK(tag_from_string("I-software") == Tag::I);
  CHECK(tag_to_string(Tag::I) == "I-software");
  CHECK(id(Tag::O) == 0);
  CHECK(id(Tag::B) == 1);
  CHECK(id(Tag::I) == 2);
  CHECK_THROWS_AS(tag_from_string("B-person"), FormatError);
}

TEST_CASE("span extraction") {
  using T = Tag;
  // He used IBM SPSS Statistics and R .
  std::vector<Tag> tags = {T::O, T::O, T::B, T::I, T::I, T::O, T::B, T::O};
  auto spans = spans_from_tags(tags);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == TokenSpan{2, 5});
  CHECK(spans[1] == TokenSpan{6, 7});
  CHECK(tags_from_spans(tags.size(), spans) == tags);

  // Adjacent mentions: B directly after I closes the first span.
  std::vector<Tag> adj = {T::B, T::I, T::B, T::I};
  auto s2 = spans_from_tags(adj);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0] == TokenSpan{0, 2});
  CHECK(s2[1] == TokenSpan{2, 4});

  // Stray I opens a span rather than being dropped.
  std::vector<Tag> stray = {T::I, T::O, T::I, T::I};
  auto s3 = spans_from_tags(stray);
  REQUIRE(s3.size() == 2);
  CHECK(s3[0] == TokenSpan{0, 1});
  CHECK(s3[1] == TokenSpan{2, 4});

  CHECK(spans_from_tags({}).empty());
  CHECK_THROWS_AS(tags_from_spans(2, {TokenSpan{1, 3}}), FormatError);
}

TEST_CASE("tagged file format round-trips") {
  std::vector<TaggedSentence> sentences = {
      {"doc1", {"We", "used", "SPSS", "."}, {Tag::O, Tag::O, Tag::B, Tag::O}},
      {"doc1", {"It", "worked", "."}, {Tag::O, Tag::O, Tag::O}},
      {"doc2", {"R", "was", "used", "."}, {Tag::B, Tag::O, Tag::O, Tag::O}},
  };
  std::ostringstream out;
  write_tagged(out, sentences);

  std::istringstream in(out.str());
  auto back = read_tagged(in);
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].doc_id == sentences[i].doc_id);
    CHECK(back[i].tokens == sentences[i].tokens);
    CHECK(back[i].tags == sentences[i].tags);
  }
}

TEST_CASE("tagged reader tolerates layout variations") {
  std::istringstream in(
      "-DOCSTART- d1\n"
      "We\tO\n"
      "SPSS\tB-software\n"
      "\n"
      "\n"
      "-DOCSTART- d2\n"
      "\n"
      "R\tB-software\n");
  auto sents = read_tagged(in);
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].doc_id == "d1");
  CHECK(sents[0].tokens.size() == 2);
  CHECK(sents[1].doc_id == "d2");
  CHECK(sents[1].tokens == std::vector<std::string>{"R"});
}

TEST_CASE("tagged reader reports bad lines") {
  std::istringstream no_tab("just a token\n");
  CHECK_THROWS_WITH_AS(read_tagged(no_tab), doctest::Contains("line 1"), FormatError);
  std::istringstream bad_tag("x\tB-thing\n");
  CHECK_THROWS_WITH_AS(read_tagged(bad_tag), doctest::Contains("unknown tag"), FormatError);
}
