#include "skg/xml.hpp"

#include "skg/strings.hpp"

namespace skg::xml {

ParseError::ParseError(const std::string& msg, size_t offset)
    : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"), offset(offset) {}

const std::string* Node::attr(const std::string& key) const {
  auto it = attrs.find(key);
  return it == attrs.end() ? nullptr : &it->second;
}

const Node* Node::first(std::string_view tag) const {
  for (const auto& c : children)
    if (!c->is_text() && c->name == tag) return c.get();
  return nullptr;
}

void Node::find_all(std::string_view tag, std::vector<const Node*>& out) const {
  for (const auto& c : children) {
    if (c->is_text()) continue;
    if (c->name == tag) out.push_back(c.get());
    c->find_all(tag, out);
  }
}

std::string Node::all_text() const {
  std::string out;
  if (is_text()) return text;
  for (const auto& c : children) out += c->all_text();
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  std::unique_ptr<Node> run() {
    skip_misc();
    if (eof()) throw ParseError("no root element", pos_);
    auto root = element();
    skip_misc();
    if (!eof()) throw ParseError("trailing content after root element", pos_);
    return root;
  }

 private:
  std::string_view in_;
  size_t pos_ = 0;

  bool eof() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool looking_at(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_ws() {
    while (!eof() && ascii_space(peek())) ++pos_;
  }

  // Whitespace, comments, PIs, XML decl, DOCTYPE.
  void skip_misc() {
    while (true) {
      skip_ws();
      if (looking_at("<!--")) {
        size_t end = in_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) throw ParseError("unterminated comment", pos_);
        pos_ = end + 3;
      } else if (looking_at("<?")) {
        size_t end = in_.find("?>", pos_ + 2);
        if (end == std::string_view::npos) throw ParseError("unterminated processing instruction", pos_);
        pos_ = end + 2;
      } else if (looking_at("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  void skip_doctype() {
    size_t start = pos_;
    int depth = 0;
    while (!eof()) {
      char c = in_[pos_++];
      if (c == '<') ++depth;
      if (c == '>') {
        if (depth == 1) return;
        --depth;
      }
    }
    throw ParseError("unterminated DOCTYPE", start);
  }

  std::string name() {
    size_t start = pos_;
    while (!eof()) {
      char c = peek();
      if (ascii_alnum(c) || c == '_' || c == '-' || c == '.' || c == ':')
        ++pos_;
      else
        break;
    }
    if (pos_ == start) throw ParseError("expected name", pos_);
    return std::string(in_.substr(start, pos_ - start));
  }

  char32_t entity() {
    size_t start = pos_;  // at '&'
    size_t end = in_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 10)
      throw ParseError("unterminated entity reference", start);
    std::string_view body = in_.substr(pos_ + 1, end - pos_ - 1);
    pos_ = end + 1;
    if (body == "amp") return '&';
    if (body == "lt") return '<';
    if (body == "gt") return '>';
    if (body == "quot") return '"';
    if (body == "apos") return '\'';
    if (!body.empty() && body[0] == '#') {
      int base = 10;
      std::string_view digits = body.substr(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits = digits.substr(1);
      }
      char32_t cp = 0;
      if (digits.empty()) throw ParseError("bad character reference", start);
      for (char c : digits) {
        int d;
        if (ascii_digit(c))
          d = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
          d = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
          d = c - 'A' + 10;
        else
          throw ParseError("bad character reference", start);
        cp = cp * base + static_cast<char32_t>(d);
      }
      return cp;
    }
    throw ParseError("unknown entity '" + std::string(body) + "'", start);
  }

  std::string attr_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') throw ParseError("expected quoted attribute value", pos_);
    ++pos_;
    std::string out;
    while (true) {
      if (eof()) throw ParseError("unterminated attribute value", pos_);
      char c = peek();
      if (c == quote) {
        ++pos_;
        return out;
      }
      if (c == '&') {
        utf8_append(out, entity());
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
  }

  std::unique_ptr<Node> element() {
    if (eof() || peek() != '<') throw ParseError("expected element", pos_);
    size_t open_pos = pos_;
    ++pos_;
    auto node = std::make_unique<Node>();
    node->name = name();
    while (true) {
      skip_ws();
      if (eof()) throw ParseError("unterminated start tag", open_pos);
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (looking_at("/>")) {
        pos_ += 2;
        return node;
      }
      std::string key = name();
      skip_ws();
      if (eof() || peek() != '=') throw ParseError("expected '=' in attribute", pos_);
      ++pos_;
      skip_ws();
      node->attrs[key] = attr_value();
    }
    content(*node);
    // at '</'
    pos_ += 2;
    std::string close = name();
    if (close != node->name)
      throw ParseError("mismatched closing tag '" + close + "' for '" + node->name + "'", pos_);
    skip_ws();
    if (eof() || peek() != '>') throw ParseError("expected '>' in closing tag", pos_);
    ++pos_;
    return node;
  }

  void content(Node& parent) {
    std::string text;
    auto flush = [&] {
      if (text.empty()) return;
      auto t = std::make_unique<Node>();
      t->text = std::move(text);
      text.clear();
      parent.children.push_back(std::move(t));
    };
    while (true) {
      if (eof()) throw ParseError("unterminated element '" + parent.name + "'", pos_);
      char c = peek();
      if (c == '<') {
        if (looking_at("</")) {
          flush();
          return;
        }
        if (looking_at("<!--")) {
          size_t end = in_.find("-->", pos_ + 4);
          if (end == std::string_view::npos) throw ParseError("unterminated comment", pos_);
          pos_ = end + 3;
        } else if (looking_at("<![CDATA[")) {
          size_t end = in_.find("]]>", pos_ + 9);
          if (end == std::string_view::npos) throw ParseError("unterminated CDATA section", pos_);
          text.append(in_.substr(pos_ + 9, end - pos_ - 9));
          pos_ = end + 3;
        } else if (looking_at("<?")) {
          size_t end = in_.find("?>", pos_ + 2);
          if (end == std::string_view::npos) throw ParseError("unterminated processing instruction", pos_);
          pos_ = end + 2;
        } else {
          flush();
          parent.children.push_back(element());
        }
      } else if (c == '&') {
        utf8_append(text, entity());
      } else {
        text.push_back(c);
        ++pos_;
      }
    }
  }
};

}  // namespace

std::unique_ptr<Node> parse(std::string_view input) {
  Parser p(input);
  return p.run();
}

}  // namespace skg::xml
