#pragma once

// Automatic noun-link generation over the bilingual translation graph.
//
// Every (source word, pivot word) pair falls in exactly one criterion set:
//
//   C1  both ends have degree 1
//   C2  the source word has several translations, each used only by it
//   C3  the pivot word has several translations, each used only by it
//   C4  everything else
//
// Joining the four sets with the monosemic and polysemic pivot senses on the
// pivot word yields the eight mono1..mono4 / poly1..poly4 link groups. The
// variant criterion links a source word to a synset when two or more of the
// synset's pivot members translate to it.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnforge/core.hpp"
#include "wnforge/ingest.hpp"

namespace wnforge {

struct CandidateLink {
  Method method = Method::manual;
  WordForm word;
  std::optional<WordForm> pivot_word;
  SynsetId synset;
  // Pivot lemmas for variant links, the Levin class for verb links.
  std::vector<std::string> witnesses;
  LinkStatus status = LinkStatus::candidate;

  auto operator<=>(const CandidateLink&) const = default;
};

// Stable identifier derived from (method, word, pivot word, synset); status
// and witnesses do not take part.
std::string link_id(const CandidateLink& link);

class TranslationGraph {
 public:
  explicit TranslationGraph(const std::vector<BilingualEntry>& entries);

  const std::vector<BilingualEntry>& pairs() const { return pairs_; }
  bool contains(const BilingualEntry& pair) const;
  bool empty() const { return pairs_.empty(); }

  // Empty for words absent from the graph.
  const std::vector<WordForm>& translations_of_source(const WordForm& source) const;
  const std::vector<WordForm>& translations_of_pivot(const WordForm& pivot) const;
  std::size_t source_degree(const WordForm& source) const { return translations_of_source(source).size(); }
  std::size_t pivot_degree(const WordForm& pivot) const { return translations_of_pivot(pivot).size(); }

  // Source words whose lemma is translated by the given pivot lemma.
  const std::vector<WordForm>& sources_for_pivot_lemma(std::string_view pivot_lemma) const;

 private:
  std::vector<BilingualEntry> pairs_;
  std::map<WordForm, std::vector<WordForm>> forward_;
  std::map<WordForm, std::vector<WordForm>> reverse_;
  std::map<std::string, std::vector<WordForm>, std::less<>> by_pivot_lemma_;
};

enum class Criterion { c1 = 0, c2 = 1, c3 = 2, c4 = 3 };

std::string_view to_string(Criterion criterion);
Method mono_method(Criterion criterion);
Method poly_method(Criterion criterion);

// Throws PairNotInGraph.
Criterion classify_pair(const BilingualEntry& pair, const TranslationGraph& graph);

struct CriterionPartition {
  std::array<std::vector<BilingualEntry>, 4> sets;

  const std::vector<BilingualEntry>& operator[](Criterion c) const {
    return sets[static_cast<std::size_t>(c)];
  }
};

CriterionPartition partition_pairs(const TranslationGraph& graph);

struct PivotSenseSplit {
  std::vector<PivotSenseEntry> monosemic;
  std::vector<PivotSenseEntry> polysemic;
};

PivotSenseSplit split_pivot_senses(const std::vector<PivotSenseEntry>& pivot_senses);

// Keys mono1..mono4 and poly1..poly4 are always present.
std::map<Method, std::vector<CandidateLink>> join_triples(const CriterionPartition& partition,
                                                          const std::vector<PivotSenseEntry>& monosemic,
                                                          const std::vector<PivotSenseEntry>& polysemic);

std::vector<CandidateLink> variant_links(const TranslationGraph& graph,
                                         const std::vector<PivotSenseEntry>& pivot_senses);

// All nine method groups, concatenated in method order then link order.
std::vector<CandidateLink> generate_links(const TranslationGraph& graph,
                                          const std::vector<PivotSenseEntry>& pivot_senses);

// method<TAB>word<TAB>pivot_word_or_-<TAB>synset_key<TAB>witnesses
// Witnesses are comma-joined, '-' when there are none.
std::string write_links_tsv(const std::vector<CandidateLink>& links);
// The word language comes from `source_lang`; synset POS from the index when
// given (unknown keys are a ParseError), otherwise `default_pos`.
std::vector<CandidateLink> read_links_tsv(std::string_view content, const std::string& source_lang,
                                          const std::string& pivot_lang, const SynsetIndex* index,
                                          Pos default_pos = Pos::noun,
                                          const std::string& source = "<links>");

}  // namespace wnforge
