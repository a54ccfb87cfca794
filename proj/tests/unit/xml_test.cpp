#include "skg/xml.hpp"

#include <doctest.h>

#include <string>

using namespace skg;

TEST_CASE("elements, attributes, text") {
  auto root = xml::parse(R"(<a x="1" y='two'><b>hi</b><b>there</b><c/></a>)");
  CHECK(root->name == "a");
  REQUIRE(root->attr("x"));
  CHECK(*root->attr("x") == "1");
  CHECK(*root->attr("y") == "two");
  CHECK(root->attr("z") == nullptr);

  const xml::Node* b = root->first("b");
  REQUIRE(b);
  CHECK(b->all_text() == "hi");

  std::vector<const xml::Node*> bs;
  root->find_all("b", bs);
  REQUIRE(bs.size() == 2);
  CHECK(bs[1]->all_text() == "there");

  CHECK(root->first("c") != nullptr);
  CHECK(root->first("c")->children.empty());
}

TEST_CASE("entities and CDATA") {
  auto root = xml::parse("<t a=\"x&amp;y\">1 &lt; 2 &amp; &#65;&#x42; &quot;q&apos;</t>");
  CHECK(*root->attr("a") == "x&y");
  CHECK(root->all_text() == "1 < 2 & AB \"q'");

  auto cd = xml::parse("<t><![CDATA[a < b & c]]></t>");
  CHECK(cd->all_text() == "a < b & c");
}

TEST_CASE("prolog, comments, doctype, PIs are skipped") {
  auto root = xml::parse(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<!DOCTYPE article PUBLIC \"-//NLM//DTD JATS\" \"x.dtd\">\n"
      "<!-- a comment -->\n"
      "<?pi data?>\n"
      "<root><!-- inner --><x>ok</x></root>\n");
  CHECK(root->name == "root");
  CHECK(root->first("x")->all_text() == "ok");
}

TEST_CASE("nested text gathers in document order") {
  auto root = xml::parse("<p>We used <italic>SPSS</italic> version 23.</p>");
  CHECK(root->all_text() == "We used SPSS version 23.");
}

TEST_CASE("errors carry the byte offset") {
  CHECK_THROWS_AS(xml::parse("<a><b></a>"), xml::ParseError);
  try {
    xml::parse("<a><b></a>");
    FAIL("expected a parse error");
  } catch (const xml::ParseError& e) {
    CHECK(e.offset > 0);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(xml::parse("<a>unterminated"), xml::ParseError);
  CHECK_THROWS_AS(xml::parse("no markup"), xml::ParseError);
  CHECK_THROWS_AS(xml::parse("<a attr=oops></a>"), xml::ParseError);
}
