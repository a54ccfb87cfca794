#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skg/crf.hpp"
#include "skg/ingest.hpp"

namespace skg::disambig {

struct DisambigError : std::runtime_error {
  explicit DisambigError(const std::string& what) : std::runtime_error(what) {}
};

// One occurrence of a surface string in the tagged corpus.
struct DocRef {
  std::string doc_id;
  size_t sentence_index = 0;
  size_t start_token = 0;  // half-open token span
  size_t end_token = 0;

  bool operator==(const DocRef&) const = default;
};

// A distinct spelling of a software name, with everywhere it was seen.
struct MentionString {
  std::string surface;
  size_t frequency = 0;  // == doc_refs.size() when built by collect_mentions
  std::vector<DocRef> doc_refs;

  bool operator==(const MentionString&) const = default;
};

// Groups tagger output by exact surface form; result sorted by surface.
std::vector<MentionString> collect_mentions(const std::vector<crf::Mention>& raw);

// Marketing suffixes dropped from the end of a name before stemming.
const std::vector<std::string>& default_drop_syllables();  // {"lite", "plus", "pro"}

// Canonical form used to fold spelling variants: lowercase, strip digits,
// Greek letters and punctuation, drop trailing marketing syllables, stem the
// remaining words. Never empty: if everything strips away the case-folded
// original comes back instead.
std::string normalize_mention(std::string_view surface);
std::string normalize_mention(std::string_view surface,
                              const std::vector<std::string>& drop_syllables);

// First letters of the non-stopword words, uppercased ("Statistical Package
// for the Social Sciences" -> "SPSS"). Single-word input is returned whole,
// uppercased.
std::string make_abbreviation(std::string_view surface);
std::string make_abbreviation(std::string_view surface, const ingest::TextConfig& cfg);

// A set of spellings believed to denote one piece of software.
struct MentionCluster {
  std::vector<MentionString> members;  // sorted by surface, surfaces unique
  std::string normal_form;
  std::string abbreviation;
  std::string kb_id;     // empty while unlinked
  std::string kb_label;  // label of the linked entry, set together with kb_id
  bool ambiguous = false;  // matched more than one KB entry in a linking pass
  std::string representative_name;

  size_t total_frequency() const;

  bool operator==(const MentionCluster&) const = default;
};

// Two-stage grouping: identical normal forms first, then multi-word clusters
// fold into the cluster holding the single word their abbreviation spells
// (case-insensitive). Output is sorted by normal form and independent of
// input order. Input must be deduplicated by surface.
std::vector<MentionCluster> cluster_mentions(std::vector<MentionString> mentions);
std::vector<MentionCluster> cluster_mentions(std::vector<MentionString> mentions,
                                             const ingest::TextConfig& cfg);

struct KbAlias {
  std::string text;
  std::string language;  // one of en, de, fr, es

  bool operator==(const KbAlias&) const = default;
};

// One software entry from the knowledge-base export.
struct KbEntry {
  std::string id;
  std::string label;
  std::vector<KbAlias> aliases;
  std::vector<std::string> redirects;
  std::vector<std::string> disambiguates;
  std::string developer;  // empty = unknown
  std::set<std::string> type_tags;

  bool operator==(const KbEntry&) const = default;
};

// Tab-separated export: id, field kind (label/alias/redirect/disambiguate/
// developer/type), value, and a language column for aliases. Entries typed
// "video game" are dropped. Result sorted by id.
std::vector<KbEntry> load_kb_export(const std::string& path);

// Three matching passes, strongest evidence first: exact label/redirect,
// then aliases in any language, then developer+label combinations. Clusters
// resolving to the same entry merge; a cluster matching several distinct
// entries in one pass is flagged ambiguous and left unlinked for good.
// Never splits a cluster, so the cluster count cannot grow.
void link_kb(std::vector<MentionCluster>& clusters, const std::vector<KbEntry>& kb);

// KB label when linked, otherwise the most frequent member surface
// (ties: lexicographically smallest).
std::string representative_name(const MentionCluster& c);

// Hand-curated availability facts for a linked entry.
struct SoftwareEnrichment {
  std::string software_ontology_id;  // empty = unknown
  std::string wikidata_id;
  std::string wikipedia_id;
  std::string url;
  std::string manufacturer;
  std::optional<bool> is_free;
  std::optional<bool> is_source_available;
  std::string license;  // non-empty implies is_source_available == true

  bool operator==(const SoftwareEnrichment&) const = default;
};

// Tab-separated table keyed by kb_id; the header row must name the columns.
// A row listing a license forces is_source_available to true and rejects an
// explicit false.
std::map<std::string, SoftwareEnrichment> load_enrichment(const std::string& path);

// Cluster persistence between pipeline stages (JSON, byte-stable).
void save_clusters(const std::vector<MentionCluster>& clusters, const std::string& path);
std::vector<MentionCluster> load_clusters(const std::string& path);

// Human-readable summary, one row per cluster, most frequent first.
std::string cluster_report(const std::vector<MentionCluster>& clusters);

}  // namespace skg::disambig
