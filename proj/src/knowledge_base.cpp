#include "wnforge/knowledge_base.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <ctime>

#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

namespace wnforge {

namespace {

using Row = std::vector<std::string>;

enum Kind : std::size_t {
  kLang, kSyn, kRel, kBase, kGloss, kSense, kLink, kLevin, kLevsense, kSample, kVerdict, kPromo, kVer,
  kKindCount
};

constexpr std::array<std::string_view, kKindCount> kKindNames = {
    "lang", "syn", "rel", "base", "gloss", "sense", "link", "levin", "levsense", "sample", "verdict",
    "promo", "ver"};

// Kinds an import edit may carry; the rest only appear in full KB files.
constexpr bool importable(std::size_t kind) { return kind <= kSample; }

struct Rows {
  std::array<std::set<Row>, kKindCount> by_kind;
};

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

void expect_fields(const Row& row, std::size_t kind, std::size_t count, bool at_least = false) {
  const bool ok = at_least ? row.size() >= count : row.size() == count;
  if (!ok) {
    throw Error(ErrorCode::ParseError, std::string(kKindNames[kind]) + " record needs " +
                                           (at_least ? "at least " : "") + std::to_string(count) +
                                           " fields, got " + std::to_string(row.size()));
  }
}

// Validates field shapes and rewrites every field into canonical spelling.
Row normalize_row(std::size_t kind, Row row) {
  switch (kind) {
    case kLang:
      expect_fields(row, kind, 2);
      validate_language_code(row[0]);
      if (row[1] != "pivot" && row[1] != "other") throw Error(ErrorCode::ParseError, "lang flag must be pivot|other");
      break;
    case kSyn:
      expect_fields(row, kind, 4);
      validate_synset_key(row[0]);
      row[1] = std::string(to_string(parse_pos(row[1])));
      if (row[2] == "-") row[2].clear();
      break;
    case kRel:
      expect_fields(row, kind, 3);
      row[0] = std::string(to_string(parse_relation_kind(row[0])));
      validate_synset_key(row[1]);
      validate_synset_key(row[2]);
      break;
    case kBase:
      expect_fields(row, kind, 1);
      validate_synset_key(row[0]);
      break;
    case kGloss:
      expect_fields(row, kind, 3);
      validate_language_code(row[0]);
      validate_synset_key(row[1]);
      break;
    case kSense:
      expect_fields(row, kind, 6);
      validate_language_code(row[0]);
      row[1] = normalize_lemma(row[1]);
      validate_synset_key(row[2]);
      row[3] = std::string(to_string(parse_method(row[3])));
      if (row[4] != "-") row[4] = Percent::parse(row[4]).str();
      row[5] = std::string(to_string(parse_link_status(row[5])));
      break;
    case kLink:
      expect_fields(row, kind, 7, true);
      row[1] = std::string(to_string(parse_method(row[1])));
      validate_language_code(row[2]);
      row[3] = normalize_lemma(row[3]);
      if (row[4] != "-") row[4] = normalize_lemma(row[4]);
      validate_synset_key(row[5]);
      row[6] = std::string(to_string(parse_link_status(row[6])));
      break;
    case kLevin: {
      expect_fields(row, kind, 3);
      // The translation field uses the LEVIN-VERBS grammar.
      auto parsed = parse_levin_verbs(row[0] + "\t" + row[1] + "\t" + row[2], "xx");
      auto line = serialize_levin_verbs(parsed);
      line.pop_back();
      auto fields = text::split(line);
      row = Row(fields.begin(), fields.end());
      break;
    }
    case kLevsense:
      expect_fields(row, kind, 3);
      row[0] = normalize_lemma(row[0]);
      row[1] = normalize_levin_class(row[1]);
      validate_synset_key(row[2]);
      break;
    case kSample:
      expect_fields(row, kind, 3, true);
      row[0] = std::string(to_string(parse_method(row[0])));
      parse_u64(row[1], "seed");
      parse_u64(row[2], "population");
      break;
    case kVerdict:
      expect_fields(row, kind, 3);
      row[0] = std::string(to_string(parse_method(row[0])));
      row[2] = std::string(to_string(parse_verdict(row[2])));
      break;
    case kPromo:
      expect_fields(row, kind, 3);
      row[0] = std::string(to_string(parse_method(row[0])));
      row[1] = Percent::parse(row[1]).str();
      row[2] = Percent::parse(row[2]).str();
      break;
    case kVer:
      expect_fields(row, kind, 2);
      parse_u64(row[1], "version");
      break;
  }
  return row;
}

Rows parse_rows(std::string_view content, bool import_only, const std::string& source) {
  Rows rows;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto parts = text::split(raw);
    auto it = std::find(kKindNames.begin(), kKindNames.end(), parts[0]);
    if (it == kKindNames.end()) text::parse_error(source, line, "unknown record '" + std::string(parts[0]) + "'");
    const auto kind = static_cast<std::size_t>(it - kKindNames.begin());
    if (import_only && !importable(kind)) {
      text::parse_error(source, line, "record '" + std::string(parts[0]) + "' cannot be imported");
    }
    Row row;
    for (std::size_t i = 1; i < parts.size(); ++i) row.push_back(text::unescape(parts[i]));
    try {
      rows.by_kind[kind].insert(normalize_row(kind, std::move(row)));
    } catch (const Error& e) {
      text::parse_error(source, line, e.what());
    }
  });
  return rows;
}

std::string serialize_rows(const Rows& rows) {
  std::string out;
  for (std::size_t kind = 0; kind < kKindCount; ++kind) {
    for (const auto& row : rows.by_kind[kind]) {
      out += kKindNames[kind];
      for (const auto& field : row) {
        out.push_back('\t');
        out += text::escape(field);
      }
      out.push_back('\n');
    }
  }
  return out;
}

const Synset& require_synset(const KnowledgeBase& kb, std::string_view key, ErrorCode code) {
  const Synset* s = kb.find_synset(key);
  if (!s) throw Error(code, "unknown synset '" + std::string(key) + "'");
  return *s;
}

void require_language(const KnowledgeBase& kb, std::string_view code) {
  if (!kb.languages.contains(code)) {
    throw Error(ErrorCode::UnknownLanguage, "language '" + std::string(code) + "' is not registered");
  }
}

std::optional<Percent> parse_optional_percent(const std::string& text) {
  if (text == "-") return std::nullopt;
  return Percent::parse(text);
}

void insert_relation(KnowledgeBase& kb, const Relation& r) {
  validate_relation(r);
  kb.relations.insert(r);
  if (auto inverse = invert_relation(r.kind)) kb.relations.insert({*inverse, r.target, r.source});
}

// One entry per (verb, class); translations accumulate.
void add_levin_verb(KnowledgeBase& kb, LevinVerbEntry entry) {
  std::set<LevinTranslation> merged(entry.translations.begin(), entry.translations.end());
  auto it = kb.levin_verbs.lower_bound({entry.english_verb, entry.levin_class, {}});
  while (it != kb.levin_verbs.end() && it->english_verb == entry.english_verb &&
         it->levin_class == entry.levin_class) {
    merged.insert(it->translations.begin(), it->translations.end());
    it = kb.levin_verbs.erase(it);
  }
  entry.translations.assign(merged.begin(), merged.end());
  kb.levin_verbs.insert(std::move(entry));
}

// Merges rows into kb in dependency order, checking referential integrity.
void merge_rows(KnowledgeBase& kb, const Rows& rows) {
  const auto& R = rows.by_kind;
  for (const auto& row : R[kLang]) kb.languages.add({row[0], row[1] == "pivot"});

  if (!R[kSyn].empty()) {
    const std::string& pivot = kb.languages.pivot();
    for (const auto& row : R[kSyn]) {
      Synset s;
      s.id = {pivot, parse_pos(row[1]), row[0]};
      if (!row[2].empty()) s.semantic_field = row[2];
      s.gloss = row[3];
      auto [it, inserted] = kb.synsets.try_emplace(s.id.key, s);
      if (!inserted && (it->second.id != s.id || it->second.gloss != s.gloss ||
                        it->second.semantic_field != s.semantic_field)) {
        throw Error(ErrorCode::DuplicateSynset, "synset '" + s.id.key + "' already exists with other content");
      }
    }
  }
  for (const auto& row : R[kRel]) {
    insert_relation(kb, {parse_relation_kind(row[0]),
                         require_synset(kb, row[1], ErrorCode::DanglingRelation).id,
                         require_synset(kb, row[2], ErrorCode::DanglingRelation).id});
  }
  if (!R[kSyn].empty() || !R[kRel].empty()) {
    std::vector<Synset> synsets;
    synsets.reserve(kb.synsets.size());
    for (const auto& [key, s] : kb.synsets) synsets.push_back(s);
    recompute_hyponym_counts(synsets, kb.relation_list());
    for (auto& s : synsets) kb.synsets[s.id.key] = std::move(s);
  }
  for (const auto& row : R[kBase]) {
    require_synset(kb, row[0], ErrorCode::DanglingRelation);
    kb.base_concepts.insert(row[0]);
  }
  for (const auto& row : R[kGloss]) {
    require_language(kb, row[0]);
    if (kb.languages.is_pivot(row[0])) throw Error(ErrorCode::PivotImmutable, "localized gloss for the pivot language");
    require_synset(kb, row[1], ErrorCode::UnknownEntity);
    kb.glosses[{row[0], row[1]}] = row[2];
  }
  for (const auto& row : R[kSense]) {
    require_language(kb, row[0]);
    const Synset& synset = require_synset(kb, row[2], ErrorCode::UnknownEntity);
    Sense sense{{row[0], row[1], synset.id.pos}, synset.id, parse_method(row[3]),
                parse_optional_percent(row[4]), parse_link_status(row[5])};
    validate_sense(sense);
    if ((sense.method == Method::pivot) != kb.languages.is_pivot(row[0])) {
      throw Error(ErrorCode::InvalidArgument, "method pivot is reserved for pivot-language senses");
    }
    kb.senses[{row[0], row[1], row[2]}] = std::move(sense);
  }
  for (const auto& row : R[kLink]) {
    require_language(kb, row[2]);
    if (kb.languages.is_pivot(row[2])) throw Error(ErrorCode::InvalidArgument, "links must target a non-pivot word");
    const Synset& synset = require_synset(kb, row[5], ErrorCode::UnknownEntity);
    CandidateLink link;
    link.method = parse_method(row[1]);
    link.word = {row[2], row[3], synset.id.pos};
    if (row[4] != "-") link.pivot_word = WordForm{kb.languages.pivot(), row[4], synset.id.pos};
    link.synset = synset.id;
    link.status = parse_link_status(row[6]);
    link.witnesses.assign(row.begin() + 7, row.end());
    if (link_id(link) != row[0]) throw Error(ErrorCode::ParseError, "link id " + row[0] + " does not match its content");
    kb.links.try_emplace(row[0], std::move(link));
  }
  for (const auto& row : R[kLevin]) {
    for (auto& entry : parse_levin_verbs(row[0] + "\t" + row[1] + "\t" + row[2], kb.languages.pivot())) {
      add_levin_verb(kb, std::move(entry));
    }
  }
  for (const auto& row : R[kLevsense]) {
    const std::string& pivot = kb.languages.pivot();
    SynsetId id{pivot, Pos::verb, row[2]};
    if (const Synset* s = kb.find_synset(row[2])) id = s->id;
    kb.levin_senses.insert({{pivot, row[0], Pos::verb}, row[1], id});
  }
  for (const auto& row : R[kSample]) {
    ValidationSample sample;
    sample.method = parse_method(row[0]);
    sample.seed = parse_u64(row[1], "seed");
    sample.population = parse_u64(row[2], "population");
    sample.links.assign(row.begin() + 3, row.end());
    for (const auto& id : sample.links) {
      auto it = kb.links.find(id);
      if (it == kb.links.end() || it->second.method != sample.method) {
        throw Error(ErrorCode::UnknownEntity, "sample references unknown " +
                                                  std::string(to_string(sample.method)) + " link " + id);
      }
    }
    if (sample.links.size() > sample.population) throw Error(ErrorCode::SampleTooLarge, "sample larger than its population");
    kb.samples[sample.method] = std::move(sample);
  }
  for (const auto& row : R[kVerdict]) {
    auto it = kb.samples.find(parse_method(row[0]));
    if (it == kb.samples.end()) throw Error(ErrorCode::UnknownEntity, "verdict for missing sample " + row[0]);
    it->second = record_verdict(std::move(it->second), row[1], parse_verdict(row[2]));
  }
  for (const auto& row : R[kPromo]) {
    kb.promotions[parse_method(row[0])] = {Percent::parse(row[1]), Percent::parse(row[2])};
  }
  for (const auto& row : R[kVer]) kb.versions[row[0]] = parse_u64(row[1], "version");
}

Rows rows_of(const KnowledgeBase& kb) {
  Rows rows;
  auto& R = rows.by_kind;
  for (const auto& l : kb.languages.all()) R[kLang].insert({l.code, l.pivot ? "pivot" : "other"});
  for (const auto& [key, s] : kb.synsets) {
    R[kSyn].insert({key, std::string(to_string(s.id.pos)), s.semantic_field.value_or(""), s.gloss});
  }
  for (const auto& r : kb.relations) R[kRel].insert({std::string(to_string(r.kind)), r.source.key, r.target.key});
  for (const auto& b : kb.base_concepts) R[kBase].insert({b});
  for (const auto& [k, g] : kb.glosses) R[kGloss].insert({k.first, k.second, g});
  for (const auto& [k, s] : kb.senses) {
    R[kSense].insert({k.language, k.lemma, k.synset_key, std::string(to_string(s.method)),
                      s.reliability ? s.reliability->str() : "-", std::string(to_string(s.status))});
  }
  for (const auto& [id, link] : kb.links) {
    Row row{id, std::string(to_string(link.method)), link.word.language, link.word.lemma,
            link.pivot_word ? link.pivot_word->lemma : "-", link.synset.key,
            std::string(to_string(link.status))};
    row.insert(row.end(), link.witnesses.begin(), link.witnesses.end());
    R[kLink].insert(std::move(row));
  }
  if (!kb.levin_verbs.empty()) {
    const std::string lines = serialize_levin_verbs({kb.levin_verbs.begin(), kb.levin_verbs.end()});
    text::for_each_line_in(lines, [&](std::size_t, std::string_view line) {
      auto fields = text::split(line);
      R[kLevin].insert(Row(fields.begin(), fields.end()));
    });
  }
  for (const auto& e : kb.levin_senses) R[kLevsense].insert({e.english_verb.lemma, e.levin_class, e.synset.key});
  for (const auto& [method, sample] : kb.samples) {
    Row row{std::string(to_string(method)), std::to_string(sample.seed), std::to_string(sample.population)};
    row.insert(row.end(), sample.links.begin(), sample.links.end());
    R[kSample].insert(std::move(row));
    for (const auto& [link, verdict] : sample.verdicts) {
      R[kVerdict].insert({std::string(to_string(method)), link, std::string(to_string(verdict))});
    }
  }
  for (const auto& [method, p] : kb.promotions) {
    R[kPromo].insert({std::string(to_string(method)), p.confidence.str(), p.threshold.str()});
  }
  for (const auto& [entity, version] : kb.versions) R[kVer].insert({entity, std::to_string(version)});
  return rows;
}

std::vector<std::string> split_subject(std::string_view subject, std::size_t parts) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < parts) {
    const auto slash = subject.find('/', start);
    if (slash == std::string_view::npos) break;
    out.emplace_back(subject.substr(start, slash - start));
    start = slash + 1;
  }
  out.emplace_back(subject.substr(start));
  if (out.size() != parts) throw Error(ErrorCode::UnknownEntity, "malformed entity id '" + std::string(subject) + "'");
  return out;
}

const std::string& require_value(const EditRequest& request) {
  if (!request.value) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(request.action)) + " needs a value");
  }
  return *request.value;
}

void require_prefix(const std::vector<std::string>& parts, std::string_view prefix, const EditRequest& request) {
  if (parts[0] != prefix) {
    throw Error(ErrorCode::UnknownEntity, std::string(to_string(request.action)) + " does not apply to '" +
                                              request.subject + "'");
  }
}

// Resolves sense/<lang>/<key>/<lemma> against the KB (lemma normalized).
SenseKey sense_key_of(const std::vector<std::string>& parts) {
  return {parts[1], normalize_lemma(parts[3]), parts[2]};
}

Sense sense_from_link(const CandidateLink& link, Percent reliability) {
  Sense sense{link.word, link.synset, link.method, std::nullopt, LinkStatus::accepted};
  if (method_carries_reliability(link.method)) sense.reliability = reliability;
  return sense;
}

void accept_into_senses(KnowledgeBase& kb, const CandidateLink& link, Percent reliability) {
  kb.senses.try_emplace({link.word.language, link.word.lemma, link.synset.key}, sense_from_link(link, reliability));
}

}  // namespace

const Synset* KnowledgeBase::find_synset(std::string_view key) const {
  auto it = synsets.find(key);
  return it == synsets.end() ? nullptr : &it->second;
}

std::uint64_t KnowledgeBase::version(std::string_view entity) const {
  auto it = versions.find(entity);
  return it == versions.end() ? 0 : it->second;
}

std::vector<CandidateLink> KnowledgeBase::links_of(Method method) const {
  std::vector<CandidateLink> out;
  for (const auto& [id, link] : links) {
    if (link.method == method) out.push_back(link);
  }
  return out;
}

std::vector<CandidateLink> KnowledgeBase::all_links() const {
  std::vector<CandidateLink> out;
  out.reserve(links.size());
  for (const auto& [id, link] : links) out.push_back(link);
  return out;
}

std::vector<Sense> KnowledgeBase::all_senses() const {
  std::vector<Sense> out;
  out.reserve(senses.size());
  for (const auto& [key, sense] : senses) out.push_back(sense);
  return out;
}

std::string serialize_kb(const KnowledgeBase& kb) { return serialize_rows(rows_of(kb)); }

KnowledgeBase parse_kb(std::string_view content, const std::string& source) {
  KnowledgeBase kb;
  merge_rows(kb, parse_rows(content, false, source));
  return kb;
}

std::string_view to_string(EditAction action) {
  switch (action) {
    case EditAction::add_sense: return "add_sense";
    case EditAction::edit_gloss: return "edit_gloss";
    case EditAction::edit_word: return "edit_word";
    case EditAction::edit_levin_class: return "edit_levin_class";
    case EditAction::record_verdict: return "record_verdict";
    case EditAction::promote_method: return "promote_method";
    case EditAction::accept_link: return "accept_link";
    case EditAction::reject_link: return "reject_link";
    case EditAction::import: return "import";
    case EditAction::export_: return "export";
  }
  return "import";
}

EditAction parse_edit_action(std::string_view text) {
  static constexpr std::array<EditAction, 10> all = {
      EditAction::add_sense,      EditAction::edit_gloss,   EditAction::edit_word,
      EditAction::edit_levin_class, EditAction::record_verdict, EditAction::promote_method,
      EditAction::accept_link,    EditAction::reject_link,  EditAction::import,
      EditAction::export_};
  for (EditAction a : all) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown edit action '" + std::string(text) + "'");
}

namespace entity {
std::string gloss(std::string_view language, std::string_view synset_key) {
  return "gloss/" + std::string(language) + "/" + std::string(synset_key);
}
std::string sense(std::string_view language, std::string_view synset_key, std::string_view lemma) {
  return "sense/" + std::string(language) + "/" + std::string(synset_key) + "/" + std::string(lemma);
}
std::string levin(std::string_view english_verb, std::string_view levin_class) {
  return "levin/" + std::string(levin_class) + "/" + std::string(english_verb);
}
std::string sample(Method method) { return "sample/" + std::string(to_string(method)); }
std::string method(Method method) { return "method/" + std::string(to_string(method)); }
std::string link(std::string_view link_id) { return "link/" + std::string(link_id); }
std::string import(std::string_view label) { return "import/" + std::string(label); }
std::string export_(std::string_view language) { return "export/" + std::string(language); }
}  // namespace entity

std::string format_timestamp(Timestamp ts) {
  const auto ms = ts.time_since_epoch().count();
  std::time_t seconds = static_cast<std::time_t>(ms / 1000);
  long millis = static_cast<long>(ms % 1000);
  if (millis < 0) {
    millis += 1000;
    --seconds;
  }
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02dT%02d:%02d:%02d.%03ldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buffer;
}

Timestamp parse_timestamp(std::string_view text) {
  std::tm tm{};
  int millis = 0;
  const std::string s(text);
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
    throw Error(ErrorCode::ParseError, "bad timestamp '" + s + "'");
  }
  std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    std::size_t digits = 0;
    while (digits < rest.size() && std::isdigit(static_cast<unsigned char>(rest[digits]))) ++digits;
    if (digits != 3) throw Error(ErrorCode::ParseError, "bad timestamp '" + s + "'");
    millis = static_cast<int>(parse_u64(rest.substr(0, 3), "milliseconds"));
    rest.remove_prefix(3);
  }
  if (rest != "Z") throw Error(ErrorCode::ParseError, "timestamp must be UTC: '" + s + "'");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const std::time_t seconds = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(seconds) * 1000 + millis));
}

EditRecord plan_edit(const KnowledgeBase& kb, const EditRequest& request) {
  if (request.actor.empty()) throw Error(ErrorCode::InvalidArgument, "edit without actor");
  EditRecord record;
  record.actor = request.actor;
  record.action = request.action;
  record.subject = request.subject;

  switch (request.action) {
    case EditAction::import: {
      split_subject(request.subject, 2);
      const Rows rows = parse_rows(require_value(request), true, request.subject);
      KnowledgeBase trial = kb;
      merge_rows(trial, rows);
      trial.languages.validate();
      record.after = serialize_rows(rows);
      break;
    }
    case EditAction::export_: {
      const auto parts = split_subject(request.subject, 2);
      require_prefix(parts, "export", request);
      require_language(kb, parts[1]);
      record.after = request.value;
      break;
    }
    case EditAction::edit_gloss: {
      const auto parts = split_subject(request.subject, 3);
      require_prefix(parts, "gloss", request);
      if (!kb.languages.contains(parts[1])) throw Error(ErrorCode::UnknownEntity, "unknown language in " + request.subject);
      require_synset(kb, parts[2], ErrorCode::UnknownEntity);
      if (kb.languages.is_pivot(parts[1])) {
        throw Error(ErrorCode::PivotImmutable, "pivot-language glosses cannot be edited");
      }
      if (auto it = kb.glosses.find({parts[1], parts[2]}); it != kb.glosses.end()) record.before = it->second;
      record.after = require_value(request);
      break;
    }
    case EditAction::edit_word: {
      const auto parts = split_subject(request.subject, 4);
      require_prefix(parts, "sense", request);
      if (!kb.languages.contains(parts[1])) throw Error(ErrorCode::UnknownEntity, "unknown language in " + request.subject);
      const SenseKey key = sense_key_of(parts);
      if (!kb.senses.count(key)) throw Error(ErrorCode::UnknownEntity, "no sense " + request.subject);
      record.subject = entity::sense(key.language, key.synset_key, key.lemma);
      if (kb.languages.is_pivot(parts[1])) throw Error(ErrorCode::PivotImmutable, "pivot-language words cannot be edited");
      const std::string lemma = normalize_lemma(require_value(request));
      if (lemma != key.lemma && kb.senses.count({key.language, lemma, key.synset_key})) {
        throw Error(ErrorCode::InvalidArgument, "sense '" + lemma + "' already exists in " + key.synset_key);
      }
      record.before = key.lemma;
      record.after = lemma;
      break;
    }
    case EditAction::edit_levin_class: {
      const auto parts = split_subject(request.subject, 3);
      require_prefix(parts, "levin", request);
      const std::string cls = normalize_levin_class(parts[1]);
      const std::string verb = normalize_lemma(parts[2]);
      const bool known =
          std::any_of(kb.levin_verbs.begin(), kb.levin_verbs.end(),
                      [&](const auto& e) { return e.english_verb.lemma == verb && e.levin_class == cls; }) ||
          std::any_of(kb.levin_senses.begin(), kb.levin_senses.end(),
                      [&](const auto& e) { return e.english_verb.lemma == verb && e.levin_class == cls; });
      if (!known) throw Error(ErrorCode::UnknownEntity, "no Levin entry " + request.subject);
      record.subject = entity::levin(verb, cls);
      record.before = cls;
      record.after = normalize_levin_class(require_value(request));
      break;
    }
    case EditAction::add_sense: {
      const auto parts = split_subject(request.subject, 4);
      require_prefix(parts, "sense", request);
      require_language(kb, parts[1]);
      const Synset& synset = require_synset(kb, parts[2], ErrorCode::UnknownEntity);
      if (kb.languages.is_pivot(parts[1])) throw Error(ErrorCode::PivotImmutable, "pivot-language senses cannot be added");
      const SenseKey key = sense_key_of(parts);
      if (kb.senses.count(key)) throw Error(ErrorCode::InvalidArgument, "sense already exists: " + request.subject);
      record.subject = entity::sense(key.language, key.synset_key, key.lemma);
      // value: method<TAB>reliability|-<TAB>status, default manual/-/accepted
      std::string value = request.value.value_or("manual\t-\taccepted");
      const auto fields = text::split(value);
      if (fields.size() != 3) throw Error(ErrorCode::ParseError, "add_sense value is method<TAB>reliability<TAB>status");
      Sense sense{{key.language, key.lemma, synset.id.pos}, synset.id, parse_method(fields[0]),
                  parse_optional_percent(std::string(fields[1])), parse_link_status(fields[2])};
      validate_sense(sense);
      if (sense.method == Method::pivot) throw Error(ErrorCode::InvalidArgument, "method pivot is reserved");
      record.after = std::string(to_string(sense.method)) + "\t" +
                     (sense.reliability ? sense.reliability->str() : "-") + "\t" +
                     std::string(to_string(sense.status));
      break;
    }
    case EditAction::record_verdict: {
      const auto parts = split_subject(request.subject, 2);
      require_prefix(parts, "sample", request);
      auto it = kb.samples.find(parse_method(parts[1]));
      if (it == kb.samples.end()) throw Error(ErrorCode::UnknownEntity, "no sample for " + parts[1]);
      const auto fields = text::split(require_value(request));
      if (fields.size() != 2) throw Error(ErrorCode::ParseError, "verdict value is link_id<TAB>correct|incorrect");
      const std::string link(fields[0]);
      const Verdict verdict = parse_verdict(fields[1]);
      record_verdict(it->second, link, verdict);  // NotInSample check
      if (auto v = it->second.verdicts.find(link); v != it->second.verdicts.end()) {
        record.before = link + "\t" + std::string(to_string(v->second));
      }
      record.after = link + "\t" + std::string(to_string(verdict));
      record.subject = entity::sample(it->first);
      break;
    }
    case EditAction::promote_method: {
      const auto parts = split_subject(request.subject, 2);
      require_prefix(parts, "method", request);
      const Method method = parse_method(parts[1]);
      const auto& methods = class_methods();
      if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
        throw Error(ErrorCode::InvalidArgument, "only class methods are promoted");
      }
      const auto fields = text::split(require_value(request));
      if (fields.size() != 2) throw Error(ErrorCode::ParseError, "promote value is confidence<TAB>threshold");
      const Percent confidence = Percent::parse(fields[0]);
      const Percent threshold = Percent::parse(fields[1]);
      if (confidence < threshold) throw Error(ErrorCode::InvalidArgument, "confidence below threshold");
      if (auto p = kb.promotions.find(method); p != kb.promotions.end()) {
        record.before = p->second.confidence.str() + "\t" + p->second.threshold.str();
      }
      record.after = confidence.str() + "\t" + threshold.str();
      break;
    }
    case EditAction::accept_link:
    case EditAction::reject_link: {
      const auto parts = split_subject(request.subject, 2);
      require_prefix(parts, "link", request);
      auto it = kb.links.find(parts[1]);
      if (it == kb.links.end()) throw Error(ErrorCode::UnknownEntity, "no link " + parts[1]);
      record.before = std::string(to_string(it->second.status));
      record.after = request.action == EditAction::accept_link ? "accepted" : "rejected";
      break;
    }
  }
  record.version = kb.version(record.subject) + 1;
  return record;
}

void apply_record(KnowledgeBase& kb, const EditRecord& record) {
  const std::string& after = record.after ? *record.after : std::string();
  switch (record.action) {
    case EditAction::import:
      merge_rows(kb, parse_rows(after, true, record.subject));
      break;
    case EditAction::export_:
      break;
    case EditAction::edit_gloss: {
      const auto parts = split_subject(record.subject, 3);
      kb.glosses[{parts[1], parts[2]}] = after;
      break;
    }
    case EditAction::edit_word: {
      const auto parts = split_subject(record.subject, 4);
      auto node = kb.senses.extract(sense_key_of(parts));
      if (node.empty()) throw Error(ErrorCode::StoreCorrupt, "replay: missing sense " + record.subject);
      node.key().lemma = after;
      node.mapped().word.lemma = after;
      kb.senses.insert(std::move(node));
      break;
    }
    case EditAction::edit_levin_class: {
      const auto parts = split_subject(record.subject, 3);
      const std::string verb = normalize_lemma(parts[2]);
      std::vector<LevinVerbEntry> renamed;
      for (auto it = kb.levin_verbs.begin(); it != kb.levin_verbs.end();) {
        if (it->english_verb.lemma == verb && it->levin_class == parts[1]) {
          renamed.push_back(*it);
          renamed.back().levin_class = after;
          it = kb.levin_verbs.erase(it);
        } else {
          ++it;
        }
      }
      for (auto& entry : renamed) add_levin_verb(kb, std::move(entry));
      std::vector<LevinSenseEntry> moved;
      for (auto it = kb.levin_senses.begin(); it != kb.levin_senses.end();) {
        if (it->english_verb.lemma == verb && it->levin_class == parts[1]) {
          moved.push_back(*it);
          moved.back().levin_class = after;
          it = kb.levin_senses.erase(it);
        } else {
          ++it;
        }
      }
      kb.levin_senses.insert(moved.begin(), moved.end());
      break;
    }
    case EditAction::add_sense: {
      const auto parts = split_subject(record.subject, 4);
      const Synset& synset = require_synset(kb, parts[2], ErrorCode::StoreCorrupt);
      const auto fields = text::split(after);
      const SenseKey key = sense_key_of(parts);
      kb.senses[key] = Sense{{key.language, key.lemma, synset.id.pos}, synset.id, parse_method(fields[0]),
                             parse_optional_percent(std::string(fields[1])), parse_link_status(fields[2])};
      break;
    }
    case EditAction::record_verdict: {
      const auto parts = split_subject(record.subject, 2);
      auto& sample = kb.samples.at(parse_method(parts[1]));
      const auto fields = text::split(after);
      sample = record_verdict(std::move(sample), std::string(fields[0]), parse_verdict(fields[1]));
      break;
    }
    case EditAction::promote_method: {
      const auto parts = split_subject(record.subject, 2);
      const Method method = parse_method(parts[1]);
      const auto fields = text::split(after);
      const PromotionRecord promo{Percent::parse(fields[0]), Percent::parse(fields[1])};
      kb.promotions[method] = promo;
      for (auto& [id, link] : kb.links) {
        if (link.method != method || link.status != LinkStatus::candidate) continue;
        link.status = LinkStatus::accepted;
        accept_into_senses(kb, link, promo.confidence);
      }
      break;
    }
    case EditAction::accept_link: {
      const auto parts = split_subject(record.subject, 2);
      auto& link = kb.links.at(parts[1]);
      link.status = LinkStatus::accepted;
      accept_into_senses(kb, link, Percent::from_tenths(1000));
      break;
    }
    case EditAction::reject_link: {
      const auto parts = split_subject(record.subject, 2);
      auto& link = kb.links.at(parts[1]);
      link.status = LinkStatus::rejected;
      auto it = kb.senses.find({link.word.language, link.word.lemma, link.synset.key});
      if (it != kb.senses.end() && it->second.method == link.method) kb.senses.erase(it);
      break;
    }
  }
  kb.versions[record.subject] = record.version;
}

std::string kb_fragment_languages(const LanguageSet& languages) {
  std::string out;
  for (const auto& l : languages.all()) out += "lang\t" + l.code + "\t" + (l.pivot ? "pivot" : "other") + "\n";
  return out;
}

std::string kb_fragment_synsets(const SynsetFile& file) {
  Rows rows;
  for (const auto& s : file.synsets) {
    rows.by_kind[kSyn].insert({s.id.key, std::string(to_string(s.id.pos)), s.semantic_field.value_or(""), s.gloss});
  }
  for (const auto& r : file.relations) {
    rows.by_kind[kRel].insert({std::string(to_string(r.kind)), r.source.key, r.target.key});
  }
  for (const auto& b : file.base_concepts) rows.by_kind[kBase].insert({b.key});
  return serialize_rows(rows);
}

std::string kb_fragment_pivot_senses(const std::vector<PivotSenseEntry>& senses) {
  Rows rows;
  for (const auto& s : senses) {
    rows.by_kind[kSense].insert({s.word.language, s.word.lemma, s.synset.key, "pivot", "-", "accepted"});
  }
  return serialize_rows(rows);
}

std::string kb_fragment_senses(const std::vector<Sense>& senses) {
  Rows rows;
  for (const auto& s : senses) {
    rows.by_kind[kSense].insert({s.word.language, s.word.lemma, s.synset.key, std::string(to_string(s.method)),
                                 s.reliability ? s.reliability->str() : "-", std::string(to_string(s.status))});
  }
  return serialize_rows(rows);
}

std::string kb_fragment_links(const std::vector<CandidateLink>& links) {
  Rows rows;
  for (const auto& link : links) {
    Row row{link_id(link), std::string(to_string(link.method)), link.word.language, link.word.lemma,
            link.pivot_word ? link.pivot_word->lemma : "-", link.synset.key, std::string(to_string(link.status))};
    row.insert(row.end(), link.witnesses.begin(), link.witnesses.end());
    rows.by_kind[kLink].insert(std::move(row));
  }
  return serialize_rows(rows);
}

std::string kb_fragment_levin(const std::vector<LevinVerbEntry>& verbs,
                              const std::vector<LevinSenseEntry>& senses) {
  std::string out;
  const std::string verb_lines = serialize_levin_verbs(verbs);
  text::for_each_line_in(verb_lines, [&](std::size_t, std::string_view line) {
    out += "levin\t" + std::string(line) + "\n";
  });
  const std::string sense_lines = serialize_levin_senses(senses);
  text::for_each_line_in(sense_lines, [&](std::size_t, std::string_view line) {
    out += "levsense\t" + std::string(line) + "\n";
  });
  return out;
}

std::string kb_fragment_sample(const ValidationSample& sample) {
  std::string out = "sample\t" + std::string(to_string(sample.method)) + "\t" + std::to_string(sample.seed) +
                    "\t" + std::to_string(sample.population);
  for (const auto& id : sample.links) out += "\t" + id;
  return out + "\n";
}

}  // namespace wnforge
