#pragma once

// Loaders for the line-oriented input formats and their canonical writers.
//
//   SYNSET       syn<TAB>key<TAB>pos<TAB>semantic_field<TAB>gloss
//                rel<TAB>kind<TAB>source_key<TAB>target_key
//                base<TAB>key
//   BILINGUAL    source_lemma<TAB>pivot_lemma
//   PIVOT-SENSE  lemma<TAB>synset_key
//   LEVIN-VERBS  english_verb<TAB>levin_class<TAB>lang:lemma[,lang:lemma...]
//   LEVIN-SENSES english_verb<TAB>levin_class<TAB>synset_key
//
// All files are UTF-8; blank lines and lines starting with '#' are ignored.
// The canonical form of a file is what serialize_* writes: normalized,
// deduplicated and sorted (relations include their stored inverses).

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnforge/core.hpp"

namespace wnforge {

using SynsetIndex = std::map<std::string, SynsetId, std::less<>>;

struct SynsetFile {
  std::vector<Synset> synsets;
  std::vector<Relation> relations;
  std::vector<SynsetId> base_concepts;
};

SynsetIndex make_synset_index(const std::vector<Synset>& synsets);

SynsetFile parse_synsets(std::string_view content, const std::string& language,
                         const std::string& source = "<synsets>");
SynsetFile load_synsets(const std::filesystem::path& path, const std::string& language);
std::string serialize_synsets(const SynsetFile& file);

// Adds the stored inverse of every relation that has one; result is sorted
// and deduplicated.
std::vector<Relation> close_relations(const std::vector<Relation>& relations);

struct HyponymCounts {
  std::size_t direct = 0;
  std::size_t total = 0;

  bool operator==(const HyponymCounts&) const = default;
};

// Edges parent -> child of the noun/verb hierarchy: hyponymy(a,b) and
// hypernymy(b,a) make b a child of a; troponymy(x,y) makes x a child of y.
std::map<SynsetId, std::vector<SynsetId>> hierarchy_children(const std::vector<Relation>& relations);

// Returns the first cycle found (first node repeated at the end), if any.
std::optional<std::vector<SynsetId>> find_hierarchy_cycle(const std::vector<Relation>& relations);

// Throws CycleDetected naming the cycle. Counts for every synset passed in;
// adjectives and adverbs always get zero.
std::map<SynsetId, HyponymCounts> compute_hyponym_counts(const std::vector<Synset>& synsets,
                                                         const std::vector<Relation>& relations);
void recompute_hyponym_counts(std::vector<Synset>& synsets, const std::vector<Relation>& relations);

struct BilingualEntry {
  WordForm source_word;
  WordForm pivot_word;

  auto operator<=>(const BilingualEntry&) const = default;
};

struct BilingualFile {
  std::vector<BilingualEntry> entries;
  std::size_t duplicates = 0;
};

BilingualFile parse_bilingual(std::string_view content, const std::string& source_lang,
                              const std::string& pivot_lang, Pos pos = Pos::noun,
                              const std::string& source = "<bilingual>");
BilingualFile load_bilingual(const std::filesystem::path& path, const std::string& source_lang,
                             const std::string& pivot_lang, Pos pos = Pos::noun);
std::string serialize_bilingual(const std::vector<BilingualEntry>& entries);

struct PivotSenseEntry {
  WordForm word;
  SynsetId synset;

  auto operator<=>(const PivotSenseEntry&) const = default;
};

struct PivotSenseFile {
  std::vector<PivotSenseEntry> entries;
  std::vector<std::string> warnings;
};

// With an index, synset POS comes from it and unknown keys produce a
// warning (the entry keeps default_pos). Without one every key gets
// default_pos.
PivotSenseFile parse_pivot_senses(std::string_view content, const std::string& pivot_lang,
                                  const SynsetIndex* index, Pos default_pos = Pos::noun,
                                  const std::string& source = "<senses>");
PivotSenseFile load_pivot_senses(const std::filesystem::path& path, const std::string& pivot_lang,
                                 const SynsetIndex* index, Pos default_pos = Pos::noun);
std::string serialize_pivot_senses(const std::vector<PivotSenseEntry>& entries);

struct LevinTranslation {
  std::string language;
  std::string lemma;

  auto operator<=>(const LevinTranslation&) const = default;
};

struct LevinVerbEntry {
  WordForm english_verb;
  std::string levin_class;
  std::vector<LevinTranslation> translations;

  auto operator<=>(const LevinVerbEntry&) const = default;
};

struct LevinSenseEntry {
  WordForm english_verb;
  std::string levin_class;
  SynsetId synset;

  auto operator<=>(const LevinSenseEntry&) const = default;
};

struct LevinLists {
  std::vector<LevinVerbEntry> verbs;
  std::vector<LevinSenseEntry> senses;
  // UnknownSynset notices; the offending entries are kept.
  std::vector<std::string> warnings;
};

std::string normalize_levin_class(std::string_view raw);

std::vector<LevinVerbEntry> parse_levin_verbs(std::string_view content, const std::string& pivot_lang,
                                              const std::string& source = "<levin-verbs>");
std::vector<LevinSenseEntry> parse_levin_senses(std::string_view content, const std::string& pivot_lang,
                                                const SynsetIndex* index,
                                                std::vector<std::string>& warnings,
                                                const std::string& source = "<levin-senses>");
LevinLists load_levin_lists(const std::filesystem::path& verbs_path,
                            const std::filesystem::path& senses_path, const std::string& pivot_lang,
                            const SynsetIndex* index);
std::string serialize_levin_verbs(const std::vector<LevinVerbEntry>& entries);
std::string serialize_levin_senses(const std::vector<LevinSenseEntry>& entries);

}  // namespace wnforge
