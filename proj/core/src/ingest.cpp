#include "skg/ingest.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "skg/porter.hpp"
#include "skg/strings.hpp"
#include "skg/xml.hpp"

namespace skg::ingest {

namespace {

const char* kStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
    "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "could", "did", "do", "does",
    "doing", "down", "during", "each", "few", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
    "me", "more", "most", "my", "myself", "no", "nor", "not", "of", "off", "on",
    "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out",
    "over", "own", "same", "she", "should", "so", "some", "such", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up",
    "very", "was", "we", "were", "what", "when", "where", "which", "while", "who",
    "whom", "why", "with", "would", "you", "your", "yours", "yourself",
    "yourselves", "also", "may", "might", "must", "shall", "will", "upon", "via",
    "within", "without", "per", "versus", "respectively", "however", "thus",
    "therefore", "hence", "whereas", "although", "though", "either", "neither",
    "whether", "since", "due", "using", "used",
};

const char* kAbbreviations[] = {
    "e.g", "i.e", "cf", "vs", "v", "et", "al", "etc", "fig", "figs", "eq",
    "eqs", "no", "nos", "inc", "ltd", "co", "corp", "dr", "prof", "mr", "mrs",
    "ms", "st", "jr", "sr", "ca", "approx", "resp", "ref", "refs", "vol", "pp",
    "ed", "eds", "univ", "dept", "tab", "max", "min", "sec", "ver", "vers",
};

const char* kMmHeadings[] = {
    "methods",
    "materials and methods",
    "methods and materials",
    "materials & methods",
    "study design and methods",
};

bool is_word_punct(char c) { return c == '.' || c == '-' || c == '\''; }

// Bytes >= 0x80 are parts of multi-byte UTF-8 letters; treat them as word
// characters so non-ASCII names stay single tokens.
bool is_word_char(char c) {
  return ascii_alnum(c) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

TextConfig TextConfig::defaults() {
  TextConfig cfg;
  for (const char* w : kStopwords) cfg.stopwords.insert(w);
  for (const char* a : kAbbreviations) cfg.abbreviations.insert(a);
  for (const char* h : kMmHeadings) cfg.mm_headings.insert(h);
  return cfg;
}

bool TextConfig::is_stopword(std::string_view word) const {
  return stopwords.count(lowercased(word)) > 0;
}

std::string normalize_heading(std::string_view heading) {
  std::string s = collapse_spaces(lowercased(heading));
  size_t b = 0;
  while (b < s.size() && (ascii_digit(s[b]) || s[b] == '.' || s[b] == ':' || s[b] == ';' ||
                          s[b] == ')' || s[b] == '(' || s[b] == '-' || s[b] == ' '))
    ++b;
  size_t e = s.size();
  while (e > b && (s[e - 1] == '.' || s[e - 1] == ':' || s[e - 1] == ';' || s[e - 1] == '-' ||
                   s[e - 1] == ' '))
    --e;
  return s.substr(b, e - b);
}

std::string Document::full_text() const {
  std::string out;
  for (size_t i = 0; i < sections.size(); ++i) {
    if (i) out += "\n\n";
    out += sections[i].text;
  }
  return out;
}

namespace {

void assign_offsets(Document& doc) {
  size_t off = 0;
  for (size_t i = 0; i < doc.sections.size(); ++i) {
    if (i) off += 2;
    doc.sections[i].char_offset = off;
    off += doc.sections[i].text.size();
  }
}

// --- JATS ---

std::string gather_paragraphs(const xml::Node& sec) {
  std::vector<const xml::Node*> paragraphs;
  sec.find_all("p", paragraphs);
  std::vector<std::string> texts;
  for (const xml::Node* p : paragraphs) {
    std::string t = collapse_spaces(p->all_text());
    if (!t.empty()) texts.push_back(std::move(t));
  }
  return join(texts, "\n");
}

std::string contrib_name(const xml::Node& contrib) {
  if (const xml::Node* name = contrib.first("name")) {
    std::string given = name->first("given-names") ? collapse_spaces(name->first("given-names")->all_text()) : "";
    std::string family = name->first("surname") ? collapse_spaces(name->first("surname")->all_text()) : "";
    if (!given.empty() && !family.empty()) return given + " " + family;
    return given + family;
  }
  if (const xml::Node* sn = contrib.first("string-name")) return collapse_spaces(sn->all_text());
  return "";
}

Document parse_jats(std::string_view bytes) {
  std::unique_ptr<xml::Node> root;
  try {
    root = xml::parse(bytes);
  } catch (const xml::ParseError& e) {
    throw ParseError(std::string("malformed XML: ") + e.what());
  }

  Document doc;
  const xml::Node* front = root->first("front");
  const xml::Node* meta = front ? front->first("article-meta") : nullptr;
  if (meta) {
    if (const xml::Node* tg = meta->first("title-group"))
      if (const xml::Node* t = tg->first("article-title")) doc.title = collapse_spaces(t->all_text());
    std::vector<const xml::Node*> ids;
    meta->find_all("article-id", ids);
    for (const xml::Node* id : ids) {
      const std::string* kind = id->attr("pub-id-type");
      if (kind && *kind == "doi") {
        doc.id = std::string(trimmed(id->all_text()));
        break;
      }
    }
    if (const xml::Node* pd = meta->first("pub-date"))
      if (const xml::Node* y = pd->first("year")) {
        std::string ys(trimmed(y->all_text()));
        doc.year = std::atoi(ys.c_str());
      }
    // Affiliations keyed by id, for contrib xref references.
    std::map<std::string, std::string> affs;
    std::vector<const xml::Node*> aff_nodes;
    meta->find_all("aff", aff_nodes);
    for (const xml::Node* a : aff_nodes) {
      std::string text = collapse_spaces(a->all_text());
      if (const std::string* id = a->attr("id")) affs[*id] = text;
    }
    std::vector<const xml::Node*> contribs;
    meta->find_all("contrib", contribs);
    for (const xml::Node* c : contribs) {
      const std::string* kind = c->attr("contrib-type");
      if (kind && *kind != "author") continue;
      AuthorRef author;
      author.name = contrib_name(*c);
      if (author.name.empty()) continue;
      std::vector<const xml::Node*> cids;
      c->find_all("contrib-id", cids);
      for (const xml::Node* cid : cids) {
        const std::string* t = cid->attr("contrib-id-type");
        if (t && *t == "orcid") author.orcid = std::string(trimmed(cid->all_text()));
      }
      if (const xml::Node* aff = c->first("aff")) author.affiliation = collapse_spaces(aff->all_text());
      std::vector<const xml::Node*> xrefs;
      c->find_all("xref", xrefs);
      for (const xml::Node* x : xrefs) {
        const std::string* rt = x->attr("ref-type");
        const std::string* rid = x->attr("rid");
        if (rt && *rt == "aff" && rid && affs.count(*rid) && author.affiliation.empty())
          author.affiliation = affs[*rid];
      }
      doc.authors.push_back(std::move(author));
    }
  }
  if (front)
    if (const xml::Node* jm = front->first("journal-meta"))
      if (const xml::Node* pub = jm->first("publisher"))
        if (const xml::Node* pn = pub->first("publisher-name"))
          doc.publisher = collapse_spaces(pn->all_text());

  const xml::Node* body = root->first("body");
  if (body) {
    for (const auto& child : body->children) {
      if (child->is_text() || child->name != "sec") continue;
      Section section;
      if (const xml::Node* t = child->first("title")) section.heading = collapse_spaces(t->all_text());
      section.text = gather_paragraphs(*child);
      doc.sections.push_back(std::move(section));
    }
    if (doc.sections.empty()) {
      std::string text = gather_paragraphs(*body);
      if (!text.empty()) doc.sections.push_back(Section{"body", text, 0, false});
    }
  }
  if (doc.sections.empty()) throw ParseError("no content: article body is empty");
  assign_offsets(doc);
  return doc;
}

// --- plain text with headings ---

bool is_heading_line(std::string_view line) {
  std::string_view t = trimmed(line);
  if (t.empty() || t.size() > 80) return false;
  if (t.find_first_of(".!?,;") != std::string_view::npos) return false;
  auto words = split_ws(t);
  if (words.size() > 8) return false;
  for (char c : t)
    if (ascii_alpha(c)) return ascii_upper(c);
  return false;
}

Document parse_plain(std::string_view bytes) {
  Document doc;
  std::vector<std::string> lines = split(bytes, '\n');
  Section current;
  bool have_heading = false;
  std::vector<std::string> body_lines;

  auto flush = [&] {
    while (!body_lines.empty() && trimmed(body_lines.back()).empty()) body_lines.pop_back();
    std::string text = join(body_lines, "\n");
    body_lines.clear();
    if (!have_heading && trimmed(text).empty()) return;
    Section s;
    s.heading = have_heading ? current.heading : "body";
    s.text = text;
    doc.sections.push_back(std::move(s));
  };

  for (const std::string& raw : lines) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_heading_line(line)) {
      flush();
      current.heading = std::string(trimmed(line));
      have_heading = true;
    } else {
      if (body_lines.empty() && trimmed(line).empty()) continue;
      body_lines.push_back(line);
    }
  }
  flush();

  bool any_text = false;
  for (const Section& s : doc.sections)
    if (!trimmed(s.text).empty() || !s.heading.empty()) any_text = true;
  if (doc.sections.empty() || !any_text) throw ParseError("no content: empty document");
  assign_offsets(doc);
  return doc;
}

}  // namespace

Document parse_article(std::string_view bytes, ArticleFormat format) {
  switch (format) {
    case ArticleFormat::JatsXml:
      return parse_jats(bytes);
    case ArticleFormat::PlainTextWithHeadings:
      return parse_plain(bytes);
  }
  throw ParseError("unknown article format");
}

const Section* find_mm_section(const Document& doc, const TextConfig& cfg) {
  for (const Section& s : doc.sections) {
    if (trimmed(s.text).empty()) continue;
    if (cfg.mm_headings.count(normalize_heading(s.heading))) return &s;
  }
  return nullptr;
}

void mark_mm_sections(Document& doc, const TextConfig& cfg) {
  for (Section& s : doc.sections)
    s.is_mm = !trimmed(s.text).empty() && cfg.mm_headings.count(normalize_heading(s.heading)) > 0;
}

namespace {

bool is_closer(char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }
bool is_opener(char c) { return c == '(' || c == '[' || c == '"' || c == '\''; }

// Word-ish run (letters and dots) ending right before `i`, for abbreviation
// checks: "e.g." at the final dot yields "e.g".
std::string_view preceding_word(std::string_view text, size_t i) {
  size_t b = i;
  while (b > 0 && (ascii_alpha(text[b - 1]) || text[b - 1] == '.')) --b;
  std::string_view w = text.substr(b, i - b);
  while (!w.empty() && w.front() == '.') w.remove_prefix(1);
  return w;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text, const TextConfig& cfg) {
  std::vector<Sentence> out;
  size_t n = text.size();
  size_t start = 0;
  while (start < n && ascii_space(text[start])) ++start;
  if (start >= n) return out;

  auto emit = [&](size_t from, size_t to) {
    while (to > from && ascii_space(text[to - 1])) --to;
    if (to <= from) return;
    Sentence s;
    s.index = out.size();
    s.char_start = from;
    s.text = std::string(text.substr(from, to - from));
    out.push_back(std::move(s));
  };

  size_t i = start;
  while (i < n) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    size_t punct_begin = i;
    size_t j = i;
    while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    while (j < n && is_closer(text[j])) ++j;
    if (j >= n) {
      emit(start, j);
      start = j;
      break;
    }
    if (!ascii_space(text[j])) {
      i = j;
      continue;
    }
    // Candidate boundary: require the next sentence to open with an
    // uppercase letter or a digit (possibly behind quotes or brackets).
    size_t k = j;
    while (k < n && ascii_space(text[k])) ++k;
    size_t look = k;
    while (look < n && is_opener(text[look])) ++look;
    bool next_ok = look < n && (ascii_upper(text[look]) || ascii_digit(text[look]));
    bool boundary = next_ok;
    if (boundary && text[punct_begin] == '.' && j - punct_begin == 1) {
      std::string_view w = preceding_word(text, punct_begin);
      if (!w.empty()) {
        bool single_initial = w.size() == 1 && ascii_alpha(w[0]);
        std::string lw = lowercased(w);
        while (!lw.empty() && lw.back() == '.') lw.pop_back();
        if (single_initial || cfg.abbreviations.count(lw)) boundary = false;
      }
    }
    if (boundary) {
      emit(start, j);
      start = k;
      i = k;
    } else {
      i = j;
    }
  }
  if (start < n) emit(start, n);
  return out;
}

std::vector<Token> tokenize(std::string_view text, const TextConfig& cfg) {
  std::vector<Token> out;
  size_t n = text.size();
  size_t i = 0;
  while (i < n) {
    if (ascii_space(text[i])) {
      ++i;
      continue;
    }
    size_t start = i;
    if (is_word_char(text[i])) {
      while (i < n && is_word_char(text[i])) ++i;
      // Version strings and hyphenated names stay together: a ./-/' glues
      // two word runs when flanked by word characters on both sides.
      while (i < n && is_word_punct(text[i]) && i + 1 < n && is_word_char(text[i + 1])) {
        ++i;
        while (i < n && is_word_char(text[i])) ++i;
      }
    } else {
      ++i;
    }
    Token t;
    t.surface = std::string(text.substr(start, i - start));
    t.start = start;
    t.end = i;
    t.is_stopword = cfg.is_stopword(t.surface);
    t.stem = stem(t.surface);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

void append_section_sentences(const Document& doc, const Section& sec, const TextConfig& cfg,
                              std::vector<Sentence>& out) {
  for (Sentence& s : split_sentences(sec.text, cfg)) {
    s.doc_id = doc.id;
    s.index = out.size();
    s.char_start += sec.char_offset;
    s.tokens = tokenize(s.text, cfg);
    out.push_back(std::move(s));
  }
}

}  // namespace

std::vector<Sentence> mm_sentences(const Document& doc, const TextConfig& cfg) {
  std::vector<Sentence> out;
  for (const Section& sec : doc.sections)
    if (!trimmed(sec.text).empty() && cfg.mm_headings.count(normalize_heading(sec.heading)))
      append_section_sentences(doc, sec, cfg, out);
  return out;
}

std::vector<Sentence> all_sentences(const Document& doc, const TextConfig& cfg) {
  std::vector<Sentence> out;
  for (const Section& sec : doc.sections) append_section_sentences(doc, sec, cfg, out);
  return out;
}

std::string lemma(std::string_view word) {
  static const std::map<std::string, std::string, std::less<>> kIrregular = {
      {"used", "use"},     {"using", "use"},      {"performed", "perform"},
      {"was", "be"},       {"were", "be"},        {"analysed", "analyze"},
      {"analyzed", "analyze"},
  };
  std::string lower = lowercased(word);
  auto it = kIrregular.find(lower);
  return stem(it == kIrregular.end() ? lower : it->second);
}

std::vector<ManifestEntry> read_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest: " + manifest_path);
  std::vector<ManifestEntry> entries;
  std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split(t, '\t');
    ManifestEntry e;
    std::filesystem::path p(fields[0]);
    e.path = (p.is_absolute() ? p : base / p).string();
    if (fields.size() > 1) e.doi = std::string(trimmed(fields[1]));
    if (fields.size() > 2) {
      std::string y(trimmed(fields[2]));
      if (!y.empty()) e.year = std::atoi(y.c_str());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<Document> load_corpus(const std::string& manifest_path, const TextConfig& cfg) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  for (const ManifestEntry& e : read_manifest(manifest_path)) {
    std::ifstream in(e.path, std::ios::binary);
    if (!in) throw ParseError("cannot open article file: " + e.path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    std::filesystem::path p(e.path);
    ArticleFormat fmt =
        p.extension() == ".xml" ? ArticleFormat::JatsXml : ArticleFormat::PlainTextWithHeadings;
    Document doc;
    try {
      doc = parse_article(bytes, fmt);
    } catch (const ParseError& err) {
      throw ParseError(e.path + ": " + err.what());
    }
    if (!e.doi.empty()) doc.id = e.doi;
    if (doc.id.empty()) doc.id = p.stem().string();
    if (e.year > 0) doc.year = e.year;
    doc.source_path = e.path;
    if (!seen.insert(doc.id).second) throw ParseError("duplicate document id: " + doc.id);
    mark_mm_sections(doc, cfg);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace skg::ingest
