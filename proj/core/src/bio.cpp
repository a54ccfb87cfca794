#include "skg/bio.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "skg/strings.hpp"

namespace skg::bio {

Tag tag_from_string(std::string_view s) {
  if (s == "O") return Tag::O;
  if (s == "B-software") return Tag::B;
  if (s == "I-software") return Tag::I;
  throw FormatError("unknown tag: " + std::string(s));
}

std::string_view tag_to_string(Tag t) {
  switch (t) {
    case Tag::O: return "O";
    case Tag::B: return "B-software";
    case Tag::I: return "I-software";
  }
  return "O";
}

std::vector<TokenSpan> spans_from_tags(const std::vector<Tag>& tags) {
  std::vector<TokenSpan> spans;
  size_t i = 0;
  while (i < tags.size()) {
    if (tags[i] == Tag::O) {
      ++i;
      continue;
    }
    size_t begin = i++;
    while (i < tags.size() && tags[i] == Tag::I) ++i;
    spans.push_back({begin, i});
  }
  return spans;
}

std::vector<Tag> tags_from_spans(size_t n_tokens, const std::vector<TokenSpan>& spans) {
  std::vector<Tag> tags(n_tokens, Tag::O);
  for (const TokenSpan& s : spans) {
    if (s.begin >= s.end || s.end > n_tokens) throw FormatError("span out of range");
    tags[s.begin] = Tag::B;
    for (size_t i = s.begin + 1; i < s.end; ++i) tags[i] = Tag::I;
  }
  return tags;
}

std::vector<TaggedSentence> read_tagged(std::istream& in) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string doc_id;
  std::string line;
  size_t lineno = 0;

  auto flush = [&] {
    if (cur.tokens.empty()) return;
    cur.doc_id = doc_id;
    out.push_back(std::move(cur));
    cur = {};
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) {
      flush();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) {
      flush();
      doc_id = std::string(trimmed(line.substr(10)));
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("line " + std::to_string(lineno) + ": expected surface<TAB>tag");
    try {
      cur.tags.push_back(tag_from_string(trimmed(line.substr(tab + 1))));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    cur.tokens.push_back(line.substr(0, tab));
  }
  flush();
  return out;
}

std::vector<TaggedSentence> read_tagged_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open tagged file: " + path);
  return read_tagged(in);
}

void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& sentences) {
  std::string current_doc;
  bool first_doc = true;
  for (const TaggedSentence& s : sentences) {
    if (first_doc || s.doc_id != current_doc) {
      current_doc = s.doc_id;
      first_doc = false;
      out << "-DOCSTART- " << current_doc << "\n\n";
    }
    for (size_t i = 0; i < s.tokens.size(); ++i)
      out << s.tokens[i] << '\t' << tag_to_string(s.tags[i]) << '\n';
    out << '\n';
  }
}

void write_tagged_file(const std::string& path, const std::vector<TaggedSentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file: " + path);
  write_tagged(out, sentences);
}

}  // namespace skg::bio
