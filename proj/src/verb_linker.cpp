#include "wnforge/verb_linker.hpp"

#include <map>
#include <set>

#include "wnforge/error.hpp"

namespace wnforge {

std::vector<VerbCandidate> generate_verb_links(const std::vector<LevinVerbEntry>& levin_verbs,
                                               const std::vector<LevinSenseEntry>& levin_senses,
                                               const std::string& target_lang) {
  validate_language_code(target_lang);
  using JoinKey = std::pair<std::string, std::string>;
  std::map<JoinKey, std::set<SynsetId>> synsets_by_key;
  for (const auto& s : levin_senses) {
    if (s.english_verb.language == target_lang) {
      throw Error(ErrorCode::InvalidLanguage, "target language '" + target_lang + "' is the pivot");
    }
    synsets_by_key[{s.english_verb.lemma, s.levin_class}].insert(s.synset);
  }

  std::map<std::pair<std::string, SynsetId>, VerbCandidate> unique;
  for (const auto& entry : levin_verbs) {
    auto it = synsets_by_key.find({entry.english_verb.lemma, entry.levin_class});
    if (it == synsets_by_key.end()) continue;
    for (const auto& translation : entry.translations) {
      if (translation.language != target_lang) continue;
      for (const auto& synset : it->second) {
        VerbCandidate candidate{{target_lang, translation.lemma, Pos::verb},
                                synset,
                                entry.english_verb,
                                entry.levin_class,
                                LinkStatus::candidate};
        auto [slot, inserted] = unique.try_emplace({translation.lemma, synset}, candidate);
        if (!inserted && candidate < slot->second) slot->second = candidate;
      }
    }
  }
  std::vector<VerbCandidate> out;
  out.reserve(unique.size());
  for (auto& [key, candidate] : unique) out.push_back(std::move(candidate));
  return out;
}

CandidateLink to_candidate_link(const VerbCandidate& candidate) {
  CandidateLink link;
  link.method = Method::levin;
  link.word = candidate.target_verb;
  link.pivot_word = candidate.english_verb;
  link.synset = candidate.synset;
  link.witnesses = {candidate.levin_class};
  link.status = candidate.status;
  return link;
}

VerbTotals verb_totals(const std::vector<Sense>& senses, const std::string& target_lang) {
  std::set<SynsetId> concepts;
  std::set<std::string> forms;
  VerbTotals totals;
  for (const auto& s : senses) {
    if (s.word.language != target_lang || s.synset.pos != Pos::verb ||
        s.status != LinkStatus::accepted) {
      continue;
    }
    concepts.insert(s.synset);
    forms.insert(s.word.lemma);
    ++totals.links;
  }
  totals.concepts = concepts.size();
  totals.forms = forms.size();
  return totals;
}

}  // namespace wnforge
