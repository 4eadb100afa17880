#include "wnforge/core.hpp"

#include <array>
#include <charconv>

#include "wnforge/error.hpp"

namespace wnforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLemma: return "EmptyLemma";
    case ErrorCode::IllegalChar: return "IllegalChar";
    case ErrorCode::InvalidLanguage: return "InvalidLanguage";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DanglingRelation: return "DanglingRelation";
    case ErrorCode::DuplicateSynset: return "DuplicateSynset";
    case ErrorCode::InvalidRelation: return "InvalidRelation";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::PairNotInGraph: return "PairNotInGraph";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::NotInSample: return "NotInSample";
    case ErrorCode::IncompleteSample: return "IncompleteSample";
    case ErrorCode::MissingConfidence: return "MissingConfidence";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::PivotImmutable: return "PivotImmutable";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::UnknownLanguage: return "UnknownLanguage";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::AmbiguousIndex: return "AmbiguousIndex";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::NoBaseConcepts: return "NoBaseConcepts";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::ResourceUnreadable: return "ResourceUnreadable";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BindError: return "BindError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adjective: return "adjective";
    case Pos::adverb: return "adverb";
  }
  return "noun";
}

Pos parse_pos(std::string_view text) {
  if (text == "noun" || text == "n") return Pos::noun;
  if (text == "verb" || text == "v") return Pos::verb;
  if (text == "adjective" || text == "adj" || text == "a") return Pos::adjective;
  if (text == "adverb" || text == "adv" || text == "r") return Pos::adverb;
  throw Error(ErrorCode::ParseError, "unknown part of speech '" + std::string(text) + "'");
}

void validate_language_code(std::string_view code) {
  if (code.empty() || code.size() > 8) {
    throw Error(ErrorCode::InvalidLanguage, "language code must be 1-8 characters: '" +
                                                std::string(code) + "'");
  }
  for (char c : code) {
    if (c < 'a' || c > 'z') {
      throw Error(ErrorCode::InvalidLanguage,
                  "language code must be ASCII lowercase: '" + std::string(code) + "'");
    }
  }
}

void LanguageSet::add(const LanguageId& language) {
  validate_language_code(language.code);
  if (language.pivot) {
    for (const auto& [code, pivot] : languages_) {
      if (pivot && code != language.code) {
        throw Error(ErrorCode::InvalidLanguage,
                    "pivot already registered as '" + code + "'");
      }
    }
  }
  auto it = languages_.find(language.code);
  if (it != languages_.end() && it->second != language.pivot) {
    throw Error(ErrorCode::InvalidLanguage,
                "language '" + language.code + "' already registered with another pivot flag");
  }
  languages_[language.code] = language.pivot;
}

bool LanguageSet::contains(std::string_view code) const {
  return languages_.find(code) != languages_.end();
}

bool LanguageSet::is_pivot(std::string_view code) const {
  auto it = languages_.find(code);
  return it != languages_.end() && it->second;
}

const std::string& LanguageSet::pivot() const {
  for (const auto& [code, pivot] : languages_) {
    if (pivot) return code;
  }
  throw Error(ErrorCode::UnknownLanguage, "no pivot language registered");
}

std::optional<std::string> LanguageSet::pivot_if_any() const {
  for (const auto& [code, pivot] : languages_) {
    if (pivot) return code;
  }
  return std::nullopt;
}

std::vector<LanguageId> LanguageSet::all() const {
  std::vector<LanguageId> out;
  for (const auto& [code, pivot] : languages_) out.push_back({code, pivot});
  return out;
}

void LanguageSet::validate() const {
  int pivots = 0;
  for (const auto& entry : languages_) pivots += entry.second ? 1 : 0;
  if (pivots != 1) {
    throw Error(ErrorCode::InvalidLanguage,
                "expected exactly one pivot language, found " + std::to_string(pivots));
  }
}

void validate_synset_key(std::string_view key) {
  if (key.empty()) throw Error(ErrorCode::ParseError, "empty synset key");
  for (char c : key) {
    if (c == '\t' || c == '\n' || c == '\r' || c == ' ' || c == '/') {
      throw Error(ErrorCode::IllegalChar, "illegal character in synset key '" + std::string(key) + "'");
    }
  }
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string normalize_lemma(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_space(raw[begin])) ++begin;
  while (end > begin && is_space(raw[end - 1])) --end;
  if (begin == end) throw Error(ErrorCode::EmptyLemma, "lemma is empty after trimming");

  std::string out;
  out.reserve(end - begin);
  bool pending_space = false;
  for (std::size_t i = begin; i < end; ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == '\t' || c == '\n' || c == '\r') {
      throw Error(ErrorCode::IllegalChar, "tab or newline inside lemma '" + std::string(raw) + "'");
    }
    if (c == ' ' || c == '\f' || c == '\v') {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c + ('a' - 'A')));
    } else if (c == 0xC3 && i + 1 < end) {
      // U+00C0..U+00DE map to U+00E0..U+00FE, except the multiplication sign.
      unsigned char next = static_cast<unsigned char>(raw[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97) next = static_cast<unsigned char>(next + 0x20);
      out.push_back(static_cast<char>(c));
      out.push_back(static_cast<char>(next));
      ++i;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

Percent Percent::from_ratio(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) throw Error(ErrorCode::InvalidArgument, "percentage of an empty set");
  // floor(1000 n / d + 1/2) == floor((2000 n + d) / (2 d))
  const std::uint64_t tenths = (2000 * numerator + denominator) / (2 * denominator);
  return Percent(static_cast<std::int64_t>(tenths));
}

Percent Percent::parse(std::string_view text) {
  auto fail = [&] { return Error(ErrorCode::ParseError, "bad percentage '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  std::string_view whole = text;
  std::string_view frac;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    whole = text.substr(0, dot);
    frac = text.substr(dot + 1);
    if (frac.size() != 1) throw fail();
  }
  std::int64_t units = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc() || ptr != whole.data() + whole.size() || whole.empty() || units < 0) throw fail();
  std::int64_t tenth = 0;
  if (!frac.empty()) {
    if (frac[0] < '0' || frac[0] > '9') throw fail();
    tenth = frac[0] - '0';
  }
  const std::int64_t total = units * 10 + tenth;
  if (total > 1000) throw fail();
  return Percent(total);
}

std::string Percent::str() const {
  return std::to_string(tenths_ / 10) + "." + std::to_string(tenths_ % 10);
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::pivot: return "pivot";
    case Method::mono1: return "mono1";
    case Method::mono2: return "mono2";
    case Method::mono3: return "mono3";
    case Method::mono4: return "mono4";
    case Method::poly1: return "poly1";
    case Method::poly2: return "poly2";
    case Method::poly3: return "poly3";
    case Method::poly4: return "poly4";
    case Method::variant: return "variant";
    case Method::levin: return "levin";
    case Method::manual: return "manual";
  }
  return "manual";
}

Method parse_method(std::string_view text) {
  static constexpr std::array<Method, 12> all = {
      Method::pivot, Method::mono1, Method::mono2, Method::mono3, Method::mono4, Method::poly1,
      Method::poly2, Method::poly3, Method::poly4, Method::variant, Method::levin, Method::manual};
  for (Method m : all) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorCode::ParseError, "unknown method '" + std::string(text) + "'");
}

const std::vector<Method>& class_methods() {
  static const std::vector<Method> methods = {
      Method::mono1, Method::mono2, Method::mono3, Method::mono4, Method::poly1,
      Method::poly2, Method::poly3, Method::poly4, Method::variant};
  return methods;
}

bool method_carries_reliability(Method method) {
  return method != Method::pivot && method != Method::manual;
}

std::string_view to_string(LinkStatus status) {
  switch (status) {
    case LinkStatus::candidate: return "candidate";
    case LinkStatus::accepted: return "accepted";
    case LinkStatus::rejected: return "rejected";
  }
  return "candidate";
}

LinkStatus parse_link_status(std::string_view text) {
  if (text == "candidate") return LinkStatus::candidate;
  if (text == "accepted") return LinkStatus::accepted;
  if (text == "rejected") return LinkStatus::rejected;
  throw Error(ErrorCode::ParseError, "unknown status '" + std::string(text) + "'");
}

void validate_sense(const Sense& sense) {
  if (method_carries_reliability(sense.method) != sense.reliability.has_value()) {
    throw Error(ErrorCode::InvalidArgument,
                "sense (" + sense.word.lemma + ", " + sense.synset.key + ") with method " +
                    std::string(to_string(sense.method)) +
                    (sense.reliability ? " must not carry" : " requires") + " a reliability");
  }
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::hypernymy: return "hypernymy";
    case RelationKind::hyponymy: return "hyponymy";
    case RelationKind::antonymy: return "antonymy";
    case RelationKind::meronymy: return "meronymy";
    case RelationKind::holonymy: return "holonymy";
    case RelationKind::attribute: return "attribute";
    case RelationKind::cause: return "cause";
    case RelationKind::entailment: return "entailment";
    case RelationKind::troponymy: return "troponymy";
  }
  return "hypernymy";
}

RelationKind parse_relation_kind(std::string_view text) {
  static constexpr std::array<RelationKind, 9> all = {
      RelationKind::hypernymy, RelationKind::hyponymy, RelationKind::antonymy,
      RelationKind::meronymy,  RelationKind::holonymy, RelationKind::attribute,
      RelationKind::cause,     RelationKind::entailment, RelationKind::troponymy};
  for (RelationKind k : all) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::UnknownRelation, "unknown relation '" + std::string(text) + "'");
}

std::optional<RelationKind> invert_relation(RelationKind kind) {
  switch (kind) {
    case RelationKind::hypernymy: return RelationKind::hyponymy;
    case RelationKind::hyponymy: return RelationKind::hypernymy;
    case RelationKind::meronymy: return RelationKind::holonymy;
    case RelationKind::holonymy: return RelationKind::meronymy;
    case RelationKind::antonymy: return RelationKind::antonymy;
    case RelationKind::attribute:
    case RelationKind::cause:
    case RelationKind::entailment:
    case RelationKind::troponymy:
      return std::nullopt;
  }
  return std::nullopt;
}

void validate_relation(const Relation& relation) {
  const std::string label = std::string(to_string(relation.kind)) + " " + relation.source.key +
                            " -> " + relation.target.key;
  if (relation.source == relation.target) {
    throw Error(ErrorCode::InvalidRelation, "self relation: " + label);
  }
  const bool noun_only =
      relation.kind == RelationKind::hypernymy || relation.kind == RelationKind::hyponymy;
  if (noun_only && (relation.source.pos != Pos::noun || relation.target.pos != Pos::noun)) {
    throw Error(ErrorCode::InvalidRelation, "hypernymy/hyponymy restricted to nouns: " + label);
  }
  if (relation.kind == RelationKind::troponymy &&
      (relation.source.pos != Pos::verb || relation.target.pos != Pos::verb)) {
    throw Error(ErrorCode::InvalidRelation, "troponymy restricted to verbs: " + label);
  }
}

}  // namespace wnforge
