#include "skg/disambig.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "skg/porter.hpp"
#include "skg/strings.hpp"

namespace skg::disambig {

namespace {

using ordered_json = nlohmann::ordered_json;

const ingest::TextConfig& default_text_config() {
  static const ingest::TextConfig cfg = ingest::TextConfig::defaults();
  return cfg;
}

// "v23", "v2.1" — version tokens vanish entirely; bare numbers die in the
// symbol strip instead. Input is already lowercased.
bool version_token(const std::string& t) {
  if (t.size() < 2 || t[0] != 'v' || !ascii_digit(t[1])) return false;
  for (size_t i = 1; i < t.size(); ++i)
    if (!ascii_digit(t[i]) && t[i] != '.') return false;
  return true;
}

bool stripped_cp(char32_t cp) {
  if (cp < 0x80) return !ascii_alpha(static_cast<char>(cp));  // digits + punctuation
  if (cp >= 0x0370 && cp <= 0x03FF) return true;              // Greek block
  if (cp >= 0x2000 && cp <= 0x206F) return true;              // general punctuation
  return cp == 0x00A9 || cp == 0x00AE || cp == 0x2122;        // (c) (R) TM
}

std::string strip_symbols(const std::string& tok) {
  std::string out;
  std::string_view sv = tok;
  size_t i = 0;
  while (i < sv.size()) {
    char32_t cp = utf8_next(sv, i);
    if (!stripped_cp(cp)) utf8_append(out, cp);
  }
  return out;
}

// Most frequent member; ties go to the lexicographically smallest surface.
const MentionString& anchor_member(const std::vector<MentionString>& members) {
  const MentionString* best = &members.front();
  for (const auto& m : members)
    if (m.frequency > best->frequency ||
        (m.frequency == best->frequency && m.surface < best->surface))
      best = &m;
  return *best;
}

void sort_members(std::vector<MentionString>& members) {
  std::sort(members.begin(), members.end(),
            [](const MentionString& a, const MentionString& b) { return a.surface < b.surface; });
}

std::string strip_corporate_suffix(const std::string& developer) {
  static const std::set<std::string> kSuffixes = {
      "co",   "co.",  "company", "corp", "corp.", "corporation",
      "gmbh", "inc",  "inc.",    "llc",  "llc.",  "ltd",
      "ltd.",
  };
  std::vector<std::string> words = split_ws(developer);
  while (!words.empty() && kSuffixes.count(lowercased(words.back()))) words.pop_back();
  return join(words, " ");
}

// Clusters that resolved to the same entry collapse into the heaviest one.
void merge_shared_ids(std::vector<MentionCluster>& clusters) {
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < clusters.size(); ++i)
    if (!clusters[i].kb_id.empty()) groups[clusters[i].kb_id].push_back(i);

  std::vector<size_t> dead;
  for (const auto& [id, idx] : groups) {
    if (idx.size() < 2) continue;
    size_t keep = idx.front();
    for (size_t i : idx) {
      size_t fi = clusters[i].total_frequency();
      size_t fk = clusters[keep].total_frequency();
      if (fi > fk || (fi == fk && clusters[i].normal_form < clusters[keep].normal_form))
        keep = i;
    }
    for (size_t i : idx) {
      if (i == keep) continue;
      auto& from = clusters[i].members;
      clusters[keep].members.insert(clusters[keep].members.end(),
                                    std::make_move_iterator(from.begin()),
                                    std::make_move_iterator(from.end()));
      dead.push_back(i);
    }
    sort_members(clusters[keep].members);
  }
  std::sort(dead.begin(), dead.end(), std::greater<size_t>());
  for (size_t i : dead) clusters.erase(clusters.begin() + i);
}

}  // namespace

std::vector<MentionString> collect_mentions(const std::vector<crf::Mention>& raw) {
  std::map<std::string, MentionString> by_surface;
  for (const auto& m : raw) {
    if (m.surface.empty()) throw DisambigError("tagged mention with empty surface");
    MentionString& ms = by_surface[m.surface];
    if (ms.surface.empty()) ms.surface = m.surface;
    ms.doc_refs.push_back(DocRef{m.doc_id, m.sentence_index, m.start_token, m.end_token});
    ++ms.frequency;
  }
  std::vector<MentionString> out;
  out.reserve(by_surface.size());
  for (auto& [surface, ms] : by_surface) out.push_back(std::move(ms));
  return out;
}

const std::vector<std::string>& default_drop_syllables() {
  static const std::vector<std::string> kSyllables = {"lite", "plus", "pro"};
  return kSyllables;
}

std::string normalize_mention(std::string_view surface,
                              const std::vector<std::string>& drop_syllables) {
  std::string lower = lowercased(surface);
  std::vector<std::string> kept;
  for (const std::string& raw : split_ws(lower)) {
    if (version_token(raw)) continue;
    std::string t = strip_symbols(raw);
    if (!t.empty()) kept.push_back(std::move(t));
  }
  auto marketing = [&](const std::string& t) {
    auto listed = [&](const std::string& w) {
      return std::find(drop_syllables.begin(), drop_syllables.end(), w) != drop_syllables.end();
    };
    // Checking the stem too catches plurals ("Pros") and keeps the whole
    // transform a fixed point: surviving stems can never re-enter the list.
    return listed(t) || listed(stem(t));
  };
  while (!kept.empty() && marketing(kept.back())) kept.pop_back();
  for (auto& t : kept) t = stem(t);
  std::string out = join(kept, " ");
  if (out.empty()) return lower;  // nothing but symbols; keep the folded original
  return out;
}

std::string normalize_mention(std::string_view surface) {
  return normalize_mention(surface, default_drop_syllables());
}

std::string make_abbreviation(std::string_view surface, const ingest::TextConfig& cfg) {
  std::vector<std::string> words = split_ws(surface);
  if (words.empty()) return std::string();
  if (words.size() == 1) {
    std::string up;
    for (char ch : words[0]) up += to_upper(ch);
    return up;
  }
  std::vector<const std::string*> kept;
  for (const auto& w : words)
    if (!cfg.is_stopword(w)) kept.push_back(&w);
  if (kept.empty())  // a name made only of stopwords still gets initials
    for (const auto& w : words) kept.push_back(&w);
  std::string out;
  for (const std::string* w : kept) {
    std::string_view sv = *w;
    size_t i = 0;
    char32_t cp = utf8_next(sv, i);
    if (cp < 0x80)
      out += to_upper(static_cast<char>(cp));
    else
      utf8_append(out, cp);
  }
  return out;
}

std::string make_abbreviation(std::string_view surface) {
  return make_abbreviation(surface, default_text_config());
}

size_t MentionCluster::total_frequency() const {
  size_t n = 0;
  for (const auto& m : members) n += m.frequency;
  return n;
}

std::vector<MentionCluster> cluster_mentions(std::vector<MentionString> mentions,
                                             const ingest::TextConfig& cfg) {
  {
    std::set<std::string_view> seen;
    for (const auto& m : mentions) {
      if (m.surface.empty()) throw DisambigError("mention with empty surface");
      if (!seen.insert(m.surface).second)
        throw DisambigError("duplicate mention surface: " + m.surface);
    }
  }

  // stage 1: identical normal forms
  std::map<std::string, MentionCluster> by_norm;
  for (auto& m : mentions) {
    std::string nf = normalize_mention(m.surface);
    MentionCluster& c = by_norm[nf];
    c.normal_form = nf;
    c.members.push_back(std::move(m));
  }

  // Single-word surfaces index their cluster for the abbreviation fold.
  // Equal lowercased surfaces always share a normal form, so keys are unique.
  std::map<std::string, std::string> token_home;
  for (auto& [nf, c] : by_norm) {
    sort_members(c.members);
    for (const auto& m : c.members)
      if (m.surface.find(' ') == std::string::npos) token_home[lowercased(m.surface)] = nf;
  }

  // stage 2: a spelled-out name joins the cluster holding the single word its
  // abbreviation spells. Spelled-out clusters never hold single words
  // themselves, so merges cannot create or destroy fold targets.
  std::vector<std::string> multiword;
  for (const auto& [nf, c] : by_norm)
    if (nf.find(' ') != std::string::npos) multiword.push_back(nf);
  for (const std::string& nf : multiword) {
    MentionCluster& c = by_norm.at(nf);
    std::string abbr = lowercased(make_abbreviation(anchor_member(c.members).surface, cfg));
    auto home = token_home.find(abbr);
    if (home == token_home.end() || home->second == nf) continue;
    MentionCluster& dst = by_norm.at(home->second);
    dst.members.insert(dst.members.end(), std::make_move_iterator(c.members.begin()),
                       std::make_move_iterator(c.members.end()));
    sort_members(dst.members);
    by_norm.erase(nf);
  }

  std::vector<MentionCluster> out;
  out.reserve(by_norm.size());
  for (auto& [nf, c] : by_norm) {
    c.abbreviation = make_abbreviation(anchor_member(c.members).surface, cfg);
    c.representative_name = representative_name(c);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<MentionCluster> cluster_mentions(std::vector<MentionString> mentions) {
  return cluster_mentions(std::move(mentions), default_text_config());
}

std::vector<KbEntry> load_kb_export(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DisambigError("cannot open KB export: " + path);
  static const std::set<std::string> kLanguages = {"de", "en", "es", "fr"};

  std::map<std::string, KbEntry> entries;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 3 && cols.size() != 4)
      throw DisambigError("bad KB export line " + std::to_string(lineno) +
                          ": expected 3 or 4 columns");
    const std::string& id = cols[0];
    const std::string& kind = cols[1];
    const std::string& value = cols[2];
    if (id.empty() || value.empty())
      throw DisambigError("bad KB export line " + std::to_string(lineno) + ": empty id or value");
    if (cols.size() == 4 && kind != "alias")
      throw DisambigError("bad KB export line " + std::to_string(lineno) +
                          ": language column only applies to aliases");

    KbEntry& e = entries[id];
    e.id = id;
    if (kind == "label") {
      if (!e.label.empty()) throw DisambigError("duplicate label for KB entry " + id);
      e.label = value;
    } else if (kind == "alias") {
      std::string lang = cols.size() == 4 ? cols[3] : std::string("en");
      if (!kLanguages.count(lang))
        throw DisambigError("unsupported alias language '" + lang + "' on KB export line " +
                            std::to_string(lineno));
      e.aliases.push_back(KbAlias{value, lang});
    } else if (kind == "redirect") {
      e.redirects.push_back(value);
    } else if (kind == "disambiguate") {
      e.disambiguates.push_back(value);
    } else if (kind == "developer") {
      if (!e.developer.empty()) throw DisambigError("duplicate developer for KB entry " + id);
      e.developer = value;
    } else if (kind == "type") {
      e.type_tags.insert(value);
    } else {
      throw DisambigError("unknown KB field kind '" + kind + "' on line " +
                          std::to_string(lineno));
    }
  }

  std::vector<KbEntry> out;
  for (auto& [id, e] : entries) {
    if (e.label.empty()) throw DisambigError("KB entry " + id + " has no label");
    if (e.type_tags.count("video game")) continue;  // games are out of scope
    out.push_back(std::move(e));
  }
  return out;
}

void link_kb(std::vector<MentionCluster>& clusters, const std::vector<KbEntry>& kb) {
  std::map<std::string, const KbEntry*> by_id;
  for (const auto& e : kb) {
    if (e.id.empty() || e.label.empty()) throw DisambigError("KB entry without id or label");
    if (!by_id.emplace(e.id, &e).second) throw DisambigError("duplicate KB id: " + e.id);
  }
  {
    std::set<std::string_view> all;
    for (const auto& c : clusters) {
      if (c.members.empty()) throw DisambigError("cluster has no members");
      for (const auto& m : c.members)
        if (!all.insert(m.surface).second)
          throw DisambigError("surface appears in more than one cluster: " + m.surface);
    }
  }

  // Exact-match tables, one per pass: label/redirect, alias, developer+label.
  std::map<std::string, std::set<std::string>> pass_index[3];
  for (const auto& e : kb) {
    pass_index[0][e.label].insert(e.id);
    for (const auto& r : e.redirects) pass_index[0][r].insert(e.id);
    for (const auto& a : e.aliases) pass_index[1][a.text].insert(e.id);
    if (!e.developer.empty()) {
      std::set<std::string> devs = {e.developer};
      std::string bare = strip_corporate_suffix(e.developer);
      if (!bare.empty()) devs.insert(bare);
      for (const auto& d : devs) {
        pass_index[2][d + " " + e.label].insert(e.id);
        pass_index[2][e.label + " " + d].insert(e.id);
      }
    }
  }

  for (const auto& index : pass_index) {
    for (auto& c : clusters) {
      if (!c.kb_id.empty() || c.ambiguous) continue;
      std::set<std::string> ids;
      for (const auto& m : c.members) {
        auto it = index.find(m.surface);
        if (it != index.end()) ids.insert(it->second.begin(), it->second.end());
      }
      if (ids.size() == 1) {
        c.kb_id = *ids.begin();
        c.kb_label = by_id.at(c.kb_id)->label;
      } else if (ids.size() > 1) {
        // several candidates and nothing to rank them by; picking one would
        // be a guess, so the cluster stays unlinked
        c.ambiguous = true;
      }
    }
    merge_shared_ids(clusters);
  }

  for (auto& c : clusters) c.representative_name = representative_name(c);
  std::sort(clusters.begin(), clusters.end(),
            [](const MentionCluster& a, const MentionCluster& b) {
              return a.normal_form < b.normal_form;
            });
}

std::string representative_name(const MentionCluster& c) {
  if (c.members.empty()) throw DisambigError("cluster has no members");
  if (!c.kb_id.empty() && !c.kb_label.empty()) return c.kb_label;
  return anchor_member(c.members).surface;
}

namespace {

constexpr char kEnrichmentHeader[] =
    "kb_id\tsoftware_ontology\twikidata\twikipedia\turl\tmanufacturer\tis_free\t"
    "is_source_available\tlicense";

std::optional<bool> parse_bool(const std::string& cell, size_t lineno) {
  if (cell.empty()) return std::nullopt;
  if (cell == "true") return true;
  if (cell == "false") return false;
  throw DisambigError("bad boolean '" + cell + "' on enrichment line " + std::to_string(lineno) +
                      " (expected true, false, or empty)");
}

}  // namespace

std::map<std::string, SoftwareEnrichment> load_enrichment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DisambigError("cannot open enrichment file: " + path);

  std::string line;
  size_t lineno = 1;
  if (!std::getline(in, line)) throw DisambigError("enrichment file is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kEnrichmentHeader)
    throw DisambigError("enrichment header mismatch; expected: " + std::string(kEnrichmentHeader));

  std::map<std::string, SoftwareEnrichment> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 9)
      throw DisambigError("bad enrichment line " + std::to_string(lineno) +
                          ": expected 9 columns");
    if (cols[0].empty())
      throw DisambigError("bad enrichment line " + std::to_string(lineno) + ": empty kb_id");

    SoftwareEnrichment e;
    e.software_ontology_id = cols[1];
    e.wikidata_id = cols[2];
    e.wikipedia_id = cols[3];
    e.url = cols[4];
    e.manufacturer = cols[5];
    e.is_free = parse_bool(cols[6], lineno);
    e.is_source_available = parse_bool(cols[7], lineno);
    e.license = cols[8];
    if (!e.license.empty()) {
      if (e.is_source_available.has_value() && !*e.is_source_available)
        throw DisambigError("enrichment line " + std::to_string(lineno) +
                            " lists a license but marks the source unavailable");
      e.is_source_available = true;  // a license means the source can be seen
    }
    if (!out.emplace(cols[0], std::move(e)).second)
      throw DisambigError("duplicate enrichment row for " + cols[0]);
  }
  return out;
}

void save_clusters(const std::vector<MentionCluster>& clusters, const std::string& path) {
  ordered_json root = ordered_json::array();
  for (const auto& c : clusters) {
    ordered_json jc;
    jc["normal_form"] = c.normal_form;
    jc["abbreviation"] = c.abbreviation;
    jc["kb_id"] = c.kb_id;
    jc["kb_label"] = c.kb_label;
    jc["ambiguous"] = c.ambiguous;
    jc["representative"] = c.representative_name;
    ordered_json members = ordered_json::array();
    for (const auto& m : c.members) {
      ordered_json jm;
      jm["surface"] = m.surface;
      jm["frequency"] = m.frequency;
      ordered_json refs = ordered_json::array();
      for (const auto& r : m.doc_refs) {
        ordered_json jr;
        jr["doc"] = r.doc_id;
        jr["sentence"] = r.sentence_index;
        jr["start"] = r.start_token;
        jr["end"] = r.end_token;
        refs.push_back(std::move(jr));
      }
      jm["refs"] = std::move(refs);
      members.push_back(std::move(jm));
    }
    jc["members"] = std::move(members);
    root.push_back(std::move(jc));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DisambigError("cannot open cluster file for writing: " + path);
  out << root.dump(2) << '\n';
  if (!out) throw DisambigError("failed writing cluster file: " + path);
}

std::vector<MentionCluster> load_clusters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DisambigError("cannot open cluster file: " + path);
  ordered_json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw DisambigError("bad cluster file " + path + ": " + std::string(e.what()));
  }

  std::vector<MentionCluster> out;
  try {
    if (!root.is_array())
      throw DisambigError("bad cluster file " + path + ": expected a top-level array");
    for (const auto& jc : root) {
      MentionCluster c;
      c.normal_form = jc.at("normal_form").get<std::string>();
      c.abbreviation = jc.at("abbreviation").get<std::string>();
      c.kb_id = jc.at("kb_id").get<std::string>();
      c.kb_label = jc.at("kb_label").get<std::string>();
      c.ambiguous = jc.at("ambiguous").get<bool>();
      c.representative_name = jc.at("representative").get<std::string>();
      for (const auto& jm : jc.at("members")) {
        MentionString m;
        m.surface = jm.at("surface").get<std::string>();
        m.frequency = jm.at("frequency").get<size_t>();
        for (const auto& jr : jm.at("refs"))
          m.doc_refs.push_back(DocRef{jr.at("doc").get<std::string>(),
                                      jr.at("sentence").get<size_t>(),
                                      jr.at("start").get<size_t>(),
                                      jr.at("end").get<size_t>()});
        c.members.push_back(std::move(m));
      }
      if (c.members.empty())
        throw DisambigError("bad cluster file " + path + ": cluster with no members");
      out.push_back(std::move(c));
    }
  } catch (const ordered_json::exception& e) {
    throw DisambigError("bad cluster file " + path + ": " + std::string(e.what()));
  }
  return out;
}

std::string cluster_report(const std::vector<MentionCluster>& clusters) {
  std::vector<const MentionCluster*> order;
  order.reserve(clusters.size());
  for (const auto& c : clusters) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const MentionCluster* a, const MentionCluster* b) {
    size_t fa = a->total_frequency();
    size_t fb = b->total_frequency();
    if (fa != fb) return fa > fb;
    if (a->representative_name != b->representative_name)
      return a->representative_name < b->representative_name;
    return a->normal_form < b->normal_form;
  });

  std::string out = "representative\tkb_id\tambiguous\ttotal_frequency\tmembers\n";
  for (const MentionCluster* c : order) {
    out += c->representative_name;
    out += '\t';
    out += c->kb_id.empty() ? std::string("-") : c->kb_id;
    out += '\t';
    out += c->ambiguous ? "yes" : "no";
    out += '\t';
    out += std::to_string(c->total_frequency());
    out += '\t';
    for (size_t i = 0; i < c->members.size(); ++i) {
      if (i) out += "; ";
      out += c->members[i].surface;
      out += " (";
      out += std::to_string(c->members[i].frequency);
      out += ')';
    }
    out += '\n';
  }
  return out;
}

}  // namespace skg::disambig
