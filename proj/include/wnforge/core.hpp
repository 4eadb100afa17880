#pragma once

// Shared domain model: languages, synset identifiers, senses, relations.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wnforge {

enum class Pos { noun, verb, adjective, adverb };

std::string_view to_string(Pos pos);
// Accepts the long names and the WordNet one-letter tags (n, v, a, r).
Pos parse_pos(std::string_view text);

struct LanguageId {
  std::string code;
  bool pivot = false;

  auto operator<=>(const LanguageId&) const = default;
};

// Throws InvalidLanguage unless code is 1..8 ASCII lowercase letters.
void validate_language_code(std::string_view code);

/// Registry of the languages in one knowledge base. Exactly one of them is
/// the pivot once the set is complete; validate() checks that.
class LanguageSet {
 public:
  void add(const LanguageId& language);
  bool contains(std::string_view code) const;
  bool is_pivot(std::string_view code) const;
  // Throws UnknownLanguage when no pivot has been registered.
  const std::string& pivot() const;
  std::optional<std::string> pivot_if_any() const;
  std::vector<LanguageId> all() const;
  bool empty() const { return languages_.empty(); }
  void validate() const;

  bool operator==(const LanguageSet&) const = default;

 private:
  std::map<std::string, bool, std::less<>> languages_;
};

// Keys are opaque but must be usable inside tab-separated files and
// slash-separated entity ids.
void validate_synset_key(std::string_view key);

struct SynsetId {
  std::string language;
  Pos pos = Pos::noun;
  std::string key;

  auto operator<=>(const SynsetId&) const = default;
};

struct Synset {
  SynsetId id;
  std::string gloss;
  std::optional<std::string> semantic_field;
  std::size_t direct_hyponyms = 0;
  std::size_t total_hyponyms = 0;

  bool operator==(const Synset&) const = default;
};

struct WordForm {
  std::string language;
  std::string lemma;
  Pos pos = Pos::noun;

  auto operator<=>(const WordForm&) const = default;
};

// Trims, folds case (ASCII and Latin-1 letters in UTF-8, diacritics kept),
// collapses runs of spaces. Throws EmptyLemma / IllegalChar.
std::string normalize_lemma(std::string_view raw);

/// Fixed-point percentage with one decimal, stored as tenths so that
/// threshold comparisons and report output are exact.
class Percent {
 public:
  constexpr Percent() = default;
  static constexpr Percent from_tenths(std::int64_t tenths) { return Percent(tenths); }
  // 100 * numerator / denominator rounded half-up to one decimal.
  static Percent from_ratio(std::uint64_t numerator, std::uint64_t denominator);
  // Parses "95.9", "94", "100.0". Throws ParseError on anything else.
  static Percent parse(std::string_view text);

  constexpr std::int64_t tenths() const { return tenths_; }
  double value() const { return static_cast<double>(tenths_) / 10.0; }
  std::string str() const;

  auto operator<=>(const Percent&) const = default;

 private:
  constexpr explicit Percent(std::int64_t tenths) : tenths_(tenths) {}
  std::int64_t tenths_ = 0;
};

enum class Method {
  pivot,
  mono1, mono2, mono3, mono4,
  poly1, poly2, poly3, poly4,
  variant,
  levin,
  manual,
};

std::string_view to_string(Method method);
Method parse_method(std::string_view text);
// The nine automatic noun methods, in report order.
const std::vector<Method>& class_methods();
// Senses produced by these methods must carry a reliability.
bool method_carries_reliability(Method method);

enum class LinkStatus { candidate, accepted, rejected };

std::string_view to_string(LinkStatus status);
LinkStatus parse_link_status(std::string_view text);

struct Sense {
  WordForm word;
  SynsetId synset;
  Method method = Method::manual;
  std::optional<Percent> reliability;
  LinkStatus status = LinkStatus::candidate;

  bool operator==(const Sense&) const = default;
};

// Throws InvalidArgument when reliability presence disagrees with the method.
void validate_sense(const Sense& sense);

enum class RelationKind {
  hypernymy,
  hyponymy,
  antonymy,
  meronymy,
  holonymy,
  attribute,
  cause,
  entailment,
  troponymy,
};

std::string_view to_string(RelationKind kind);
// Throws UnknownRelation.
RelationKind parse_relation_kind(std::string_view text);
// nullopt means the relation is directed-only and has no stored inverse.
std::optional<RelationKind> invert_relation(RelationKind kind);

struct Relation {
  RelationKind kind = RelationKind::hypernymy;
  SynsetId source;
  SynsetId target;

  auto operator<=>(const Relation&) const = default;
};

// Self-loops and POS restrictions (hypernymy/hyponymy on nouns, troponymy
// on verbs). Throws InvalidRelation.
void validate_relation(const Relation& relation);

}  // namespace wnforge
