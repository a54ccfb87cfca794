#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skg::ingest {

struct AuthorRef {
  std::string name;
  std::string orcid;        // empty when absent
  std::string affiliation;  // empty when absent
};

struct Token {
  std::string surface;
  size_t start = 0;  // char offset in sentence text
  size_t end = 0;
  bool is_stopword = false;
  std::string stem;
};

struct Sentence {
  std::string doc_id;
  size_t index = 0;
  std::string text;
  size_t char_start = 0;  // offset of the sentence in its section text
  std::vector<Token> tokens;
};

struct Section {
  std::string heading;
  std::string text;
  size_t char_offset = 0;  // start in the document full text
  bool is_mm = false;
};

struct Document {
  std::string id;  // DOI or filename stem
  std::string title;
  int year = 0;  // 0 when unknown
  std::vector<AuthorRef> authors;
  std::vector<Section> sections;
  std::string source_path;
  std::string publisher;

  // Sections of a document concatenate (in order, separated by blank lines)
  // to the full text the section char offsets refer to.
  std::string full_text() const;
};

enum class ArticleFormat { JatsXml, PlainTextWithHeadings };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Heading synonyms, stopwords and splitter abbreviations, all overridable.
struct TextConfig {
  std::set<std::string> mm_headings;     // normalized heading forms
  std::set<std::string> stopwords;       // lowercase
  std::set<std::string> abbreviations;   // lowercase, no trailing dot

  static TextConfig defaults();
  bool is_stopword(std::string_view word) const;
};

std::string normalize_heading(std::string_view heading);

Document parse_article(std::string_view bytes, ArticleFormat format);

// First section whose normalized heading is in the synonym set and whose text
// is non-empty; nullptr when the document has no such section.
const Section* find_mm_section(const Document& doc, const TextConfig& cfg);
// Sets is_mm on every matching section.
void mark_mm_sections(Document& doc, const TextConfig& cfg);

std::vector<Sentence> split_sentences(std::string_view text, const TextConfig& cfg);

std::vector<Token> tokenize(std::string_view sentence_text, const TextConfig& cfg);

// Tokenized sentences of every Methods & Materials section, with char offsets
// relative to the document full text and a per-document running index.
std::vector<Sentence> mm_sentences(const Document& doc, const TextConfig& cfg);
// The same over all sections, regardless of heading.
std::vector<Sentence> all_sentences(const Document& doc, const TextConfig& cfg);

// Verb-normalized lowercase form used by the exact context rules: a small
// irregular table first, Porter stem after.
std::string lemma(std::string_view word);

// Corpus manifest: one `path<TAB>doi<TAB>year` line per article (doi and year
// optional). Relative paths resolve against the manifest's directory.
struct ManifestEntry {
  std::string path;
  std::string doi;
  int year = 0;
};

std::vector<ManifestEntry> read_manifest(const std::string& manifest_path);

// Loads and parses every article in the manifest. Format is chosen per file:
// .xml parses as JATS, anything else as plain text with headings.
std::vector<Document> load_corpus(const std::string& manifest_path, const TextConfig& cfg);

}  // namespace skg::ingest
