#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skg::xml {

// Minimal non-validating XML DOM, enough for JATS article files. Handles
// elements, attributes, character data, entities, comments, CDATA, PIs and
// skips DOCTYPE. Namespaces are kept as literal prefixes.

struct ParseError : std::runtime_error {
  size_t offset;  // byte offset into the input
  ParseError(const std::string& msg, size_t offset);
};

struct Node {
  std::string name;                       // empty for text nodes
  std::string text;                       // set for text nodes
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<Node>> children;

  bool is_text() const { return name.empty(); }
  const std::string* attr(const std::string& key) const;
  const Node* first(std::string_view tag) const;  // first child element named tag
  void find_all(std::string_view tag, std::vector<const Node*>& out) const;
  std::string all_text() const;  // concatenated text of the whole subtree
};

// Parses a complete document and returns its root element.
std::unique_ptr<Node> parse(std::string_view input);

}  // namespace skg::xml
