#pragma once

#include <string>
#include <vector>

#include "wnforge/class_methods.hpp"
#include "wnforge/core.hpp"
#include "wnforge/ingest.hpp"

namespace wnforge {

struct VerbCandidate {
  WordForm target_verb;
  SynsetId synset;
  // Join witness: the lexicographically first (english verb, Levin class)
  // that produced this (target verb, synset) pair.
  WordForm english_verb;
  std::string levin_class;
  LinkStatus status = LinkStatus::candidate;

  auto operator<=>(const VerbCandidate&) const = default;
};

/// Joins the translated Levin verb list with the (verb, class, synset)
/// correspondences on (english verb, class). One candidate per distinct
/// (target verb, synset); sorted. Throws InvalidLanguage if target_lang is
/// the pivot language of the inputs.
std::vector<VerbCandidate> generate_verb_links(const std::vector<LevinVerbEntry>& levin_verbs,
                                               const std::vector<LevinSenseEntry>& levin_senses,
                                               const std::string& target_lang);

// method=levin, pivot word = english verb, witnesses = {levin class}.
CandidateLink to_candidate_link(const VerbCandidate& candidate);

struct VerbTotals {
  std::size_t concepts = 0;
  std::size_t forms = 0;
  std::size_t links = 0;

  bool operator==(const VerbTotals&) const = default;
};

// Over accepted verb senses of target_lang: distinct synsets, distinct
// lemmas, and sense count.
VerbTotals verb_totals(const std::vector<Sense>& senses, const std::string& target_lang);

}  // namespace wnforge
