#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skg::bio {

// Tag ids are fixed (O=0, B=1, I=2); the tagger's weight layout and the
// decoder's tie-breaking both rely on this order.
enum class Tag : int { O = 0, B = 1, I = 2 };

constexpr int kNumTags = 3;

inline int id(Tag t) { return static_cast<int>(t); }

Tag tag_from_string(std::string_view s);
std::string_view tag_to_string(Tag t);

struct TaggedSentence {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<Tag> tags;
};

// Half-open token index range of one mention.
struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
  bool operator<(const TokenSpan& o) const {
    return begin != o.begin ? begin < o.begin : end < o.end;
  }
};

// Maximal B I* runs. A stray I (after O or at sentence start) opens a new
// span, so unconstrained tag sequences still yield usable mentions.
std::vector<TokenSpan> spans_from_tags(const std::vector<Tag>& tags);

// Inverse of spans_from_tags for non-overlapping, sorted spans.
std::vector<Tag> tags_from_spans(size_t n_tokens, const std::vector<TokenSpan>& spans);

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Token-per-line exchange format: `surface<TAB>tag`, blank line between
// sentences, `-DOCSTART- <doc_id>` line before each document's sentences.
std::vector<TaggedSentence> read_tagged(std::istream& in);
std::vector<TaggedSentence> read_tagged_file(const std::string& path);
void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& sentences);
void write_tagged_file(const std::string& path, const std::vector<TaggedSentence>& sentences);

}  // namespace skg::bio
