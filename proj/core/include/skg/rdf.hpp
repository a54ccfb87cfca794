#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace skg::rdf {

struct RdfError : std::runtime_error {
  explicit RdfError(const std::string& what) : std::runtime_error(what) {}
};

// Namespaces the graph and the query language know out of the box.
// Returned sorted by prefix.
const std::vector<std::pair<std::string, std::string>>& prefix_table();

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";

// "schema:name" -> "http://schema.org/name"; absolute IRIs pass through;
// unknown prefixes are an error.
std::string expand_curie(std::string_view s);
// Longest-prefix compaction against the table; IRIs outside every namespace
// come back unchanged.
std::string compact_iri(std::string_view iri);

struct Iri {
  std::string value;
  auto operator<=>(const Iri&) const = default;
};

// Checked construction: absolute IRI, no whitespace/control/bracket characters.
Iri make_iri(std::string_view value);

struct Literal {
  std::string value;
  std::string datatype;  // empty = plain string literal
  auto operator<=>(const Literal&) const = default;
};

using Object = std::variant<Iri, Literal>;

struct Triple {
  Iri subject;
  Iri predicate;
  Object object;
  auto operator<=>(const Triple&) const = default;
};

// A set of triples with subject/predicate/object lookup tables.
class TripleGraph {
 public:
  // false when the triple was already present
  bool insert(Triple t);
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  size_t size() const { return triples_.size(); }
  const std::set<Triple>& triples() const { return triples_; }

  std::vector<const Triple*> with_subject(const Iri& s) const;
  std::vector<const Triple*> with_predicate(const Iri& p) const;
  std::vector<const Triple*> with_object(const Object& o) const;

  // Exact matches for a pattern; unset positions are wildcards.
  std::vector<const Triple*> match(const std::optional<Iri>& s, const std::optional<Iri>& p,
                                   const std::optional<Object>& o) const;
  // Upper bound on match() size straight from the index buckets; used to
  // order joins cheaply.
  size_t estimate(const std::optional<Iri>& s, const std::optional<Iri>& p,
                  const std::optional<Object>& o) const;

 private:
  std::set<Triple> triples_;
  std::map<std::string, std::vector<const Triple*>> by_subject_;
  std::map<std::string, std::vector<const Triple*>> by_predicate_;
  std::map<std::string, std::vector<const Triple*>> by_object_;
};

// One triple per line, canonical escaping, lines sorted; empty graph -> "".
std::string serialize_ntriples(const TripleGraph& g);
// Inverse of serialize_ntriples; also accepts comments, blank lines, and the
// usual escape forms. Blank nodes and language tags are rejected.
TripleGraph parse_ntriples(std::string_view bytes);

// Compacted JSON-LD with the built-in context, one node object per resource,
// nodes sorted by IRI, keys sorted within a node.
std::string serialize_jsonld(const TripleGraph& g);

// predicate IRI -> triple count
std::map<std::string, size_t> property_census(const TripleGraph& g);
// type IRI -> number of subjects carrying it
std::map<std::string, size_t> type_census(const TripleGraph& g);

}  // namespace skg::rdf
