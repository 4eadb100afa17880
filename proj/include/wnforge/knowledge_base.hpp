#pragma once

// In-memory state of a multilingual knowledge base and the pure state
// transitions applied by the edit log.
//
// Canonical text form (one record per line, tab-separated, sorted by record
// kind then content):
//
//   lang      code  pivot|other
//   syn       key  pos  semantic_field  gloss
//   rel       kind  source_key  target_key
//   base      key
//   gloss     lang  key  text                       (localized gloss, escaped)
//   sense     lang  lemma  synset_key  method  reliability|-  status
//   link      id  method  lang  lemma  pivot_lemma|-  synset_key  status  [witness...]
//   levin     english_verb  class  lang:lemma[,lang:lemma...]
//   levsense  english_verb  class  synset_key
//   sample    method  seed  population  [link_id...]
//   verdict   method  link_id  correct|incorrect
//   promo     method  confidence  threshold
//   ver       entity  version
//
// Synsets belong to the pivot language; non-pivot senses attach to pivot
// synsets.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wnforge/class_methods.hpp"
#include "wnforge/confidence.hpp"
#include "wnforge/core.hpp"
#include "wnforge/ingest.hpp"

namespace wnforge {

struct SenseKey {
  std::string language;
  std::string lemma;
  std::string synset_key;

  auto operator<=>(const SenseKey&) const = default;
};

struct PromotionRecord {
  Percent confidence;
  Percent threshold;

  bool operator==(const PromotionRecord&) const = default;
};

struct KnowledgeBase {
  LanguageSet languages;
  std::map<std::string, Synset, std::less<>> synsets;
  std::set<Relation> relations;
  std::set<std::string, std::less<>> base_concepts;
  std::map<std::pair<std::string, std::string>, std::string> glosses;
  std::map<SenseKey, Sense> senses;
  std::map<std::string, CandidateLink, std::less<>> links;
  std::set<LevinVerbEntry> levin_verbs;
  std::set<LevinSenseEntry> levin_senses;
  std::map<Method, ValidationSample> samples;
  std::map<Method, PromotionRecord> promotions;
  std::map<std::string, std::uint64_t, std::less<>> versions;

  const Synset* find_synset(std::string_view key) const;
  std::uint64_t version(std::string_view entity) const;
  std::vector<CandidateLink> links_of(Method method) const;
  std::vector<CandidateLink> all_links() const;
  std::vector<Sense> all_senses() const;
  std::vector<Relation> relation_list() const { return {relations.begin(), relations.end()}; }

  bool operator==(const KnowledgeBase&) const = default;
};

std::string serialize_kb(const KnowledgeBase& kb);
// Throws ParseError; performs the same referential checks as an import.
KnowledgeBase parse_kb(std::string_view content, const std::string& source = "<kb>");

enum class EditAction {
  add_sense,
  edit_gloss,
  edit_word,
  edit_levin_class,
  record_verdict,
  promote_method,
  accept_link,
  reject_link,
  import,
  export_,
};

std::string_view to_string(EditAction action);
EditAction parse_edit_action(std::string_view text);

// Entity ids used as edit subjects and version keys.
namespace entity {
std::string gloss(std::string_view language, std::string_view synset_key);
std::string sense(std::string_view language, std::string_view synset_key, std::string_view lemma);
std::string levin(std::string_view english_verb, std::string_view levin_class);
std::string sample(Method method);
std::string method(Method method);
std::string link(std::string_view link_id);
std::string import(std::string_view label);
std::string export_(std::string_view language);
}  // namespace entity

struct EditRequest {
  std::string actor;
  EditAction action = EditAction::import;
  std::string subject;
  std::optional<std::string> value;
};

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

std::string format_timestamp(Timestamp ts);
Timestamp parse_timestamp(std::string_view text);

struct EditRecord {
  std::uint64_t seq = 0;
  Timestamp timestamp{};
  std::string actor;
  EditAction action = EditAction::import;
  std::string subject;
  // Subject version after this edit.
  std::uint64_t version = 0;
  std::optional<std::string> before;
  std::optional<std::string> after;

  bool operator==(const EditRecord&) const = default;
};

// Validates `request` against `kb` and returns the record that, applied with
// apply_record, performs it (seq and timestamp left for the caller). Throws
// UnknownEntity, PivotImmutable, NotInSample, ParseError, ... on invalid
// requests. Version checks are the caller's business.
EditRecord plan_edit(const KnowledgeBase& kb, const EditRequest& request);

// Deterministic state transition used both for live commits and replay.
// Bumps the subject's version to record.version.
void apply_record(KnowledgeBase& kb, const EditRecord& record);

// Fragments for import edits.
std::string kb_fragment_languages(const LanguageSet& languages);
std::string kb_fragment_synsets(const SynsetFile& file);
std::string kb_fragment_pivot_senses(const std::vector<PivotSenseEntry>& senses);
std::string kb_fragment_links(const std::vector<CandidateLink>& links);
std::string kb_fragment_levin(const std::vector<LevinVerbEntry>& verbs,
                              const std::vector<LevinSenseEntry>& senses);
std::string kb_fragment_sample(const ValidationSample& sample);
std::string kb_fragment_senses(const std::vector<Sense>& senses);

}  // namespace wnforge
