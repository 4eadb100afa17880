#include "wnforge/workflow.hpp"

#include "wnforge/error.hpp"

namespace wnforge::workflow {

EditRecord import_fragment(Store& store, const std::string& actor, const std::string& label,
                           const std::string& fragment) {
  return store.apply_edit({actor, EditAction::import, entity::import(label), fragment}, std::nullopt);
}

EditRecord register_languages(Store& store, const std::string& actor, const std::string& pivot,
                              const std::vector<std::string>& others) {
  LanguageSet languages;
  languages.add({pivot, true});
  for (const auto& code : others) languages.add({code, false});
  return import_fragment(store, actor, "languages", kb_fragment_languages(languages));
}

std::string pivot_language(const KnowledgeBase& kb) { return kb.languages.pivot(); }

SynsetIndex synset_index(const KnowledgeBase& kb) {
  SynsetIndex index;
  for (const auto& [key, s] : kb.synsets) index.emplace(key, s.id);
  return index;
}

std::vector<PivotSenseEntry> pivot_senses(const KnowledgeBase& kb) {
  std::vector<PivotSenseEntry> out;
  for (const auto& [key, sense] : kb.senses) {
    if (sense.method == Method::pivot && sense.status == LinkStatus::accepted) out.push_back({sense.word, sense.synset});
  }
  return out;
}

std::vector<CandidateLink> generate_links(Store& store, const std::string& actor,
                                          const std::vector<BilingualEntry>& bilingual) {
  const Snapshot snap = store.snapshot();
  const TranslationGraph graph(bilingual);
  auto links = wnforge::generate_links(graph, pivot_senses(*snap));
  if (!links.empty()) import_fragment(store, actor, "links", kb_fragment_links(links));
  return links;
}

std::vector<VerbCandidate> generate_verb_links(Store& store, const std::string& actor,
                                               const std::string& language) {
  const Snapshot snap = store.snapshot();
  if (!snap->languages.contains(language)) {
    throw Error(ErrorCode::UnknownLanguage, "language '" + language + "' is not registered");
  }
  auto candidates = wnforge::generate_verb_links({snap->levin_verbs.begin(), snap->levin_verbs.end()},
                                                 {snap->levin_senses.begin(), snap->levin_senses.end()}, language);
  std::vector<CandidateLink> links;
  for (const auto& c : candidates) {
    if (!snap->find_synset(c.synset.key)) continue;
    links.push_back(to_candidate_link(c));
  }
  if (!links.empty()) import_fragment(store, actor, "verb-links", kb_fragment_links(links));
  return candidates;
}

ValidationSample create_sample(Store& store, const std::string& actor, Method method,
                               std::optional<std::size_t> size, std::uint64_t seed) {
  const auto links = store.snapshot()->links_of(method);
  if (links.empty()) {
    throw Error(ErrorCode::SampleTooLarge, "no " + std::string(to_string(method)) + " links to sample");
  }
  ValidationSample sample = draw_sample(links, size.value_or(default_sample_size(links.size())), seed);
  store.apply_edit({actor, EditAction::import, entity::sample(method), kb_fragment_sample(sample)}, std::nullopt);
  return sample;
}

EditRecord record_link_verdict(Store& store, const std::string& actor, const std::string& link,
                               Verdict verdict) {
  const Snapshot snap = store.snapshot();
  auto it = snap->links.find(link);
  if (it == snap->links.end()) throw Error(ErrorCode::UnknownEntity, "no link " + link);
  return store.apply_edit({actor, EditAction::record_verdict, entity::sample(it->second.method),
                           link + "\t" + std::string(to_string(verdict))},
                          std::nullopt);
}

std::string render_sample(const ValidationSample& sample) {
  const SampleTally t = tally(sample);
  std::string out = std::string(to_string(sample.method)) + "\t" + std::to_string(sample.seed) + "\t" +
                    std::to_string(sample.population) + "\t" + std::to_string(sample.links.size()) + "\t" +
                    std::to_string(t.judged) + "\t" + std::to_string(t.correct) + "\n";
  for (const auto& id : sample.links) {
    auto v = sample.verdicts.find(id);
    out += id + "\t" + (v == sample.verdicts.end() ? std::string("-") : std::string(to_string(v->second))) + "\n";
  }
  return out;
}

std::vector<MethodStats> class_method_stats(const KnowledgeBase& kb) {
  return compute_method_stats(kb.all_links(), kb.samples);
}

PromotionResult promote_methods(Store& store, const std::string& actor, Percent threshold) {
  const Snapshot snap = store.snapshot();
  std::vector<MethodStats> rows;
  for (auto row : class_method_stats(*snap)) {
    if (row.links == 0) continue;
    row.confidence.reset();
    if (auto it = snap->samples.find(row.method); it != snap->samples.end()) {
      row.confidence = extrapolate_confidence(it->second);
    }
    rows.push_back(row);
  }
  PromotionResult result = promote(rows, threshold);
  for (Method method : result.promoted) {
    const auto& row = *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.method == method; });
    store.apply_edit({actor, EditAction::promote_method, entity::method(method),
                      row.confidence->str() + "\t" + threshold.str()},
                     std::nullopt);
  }
  return result;
}

std::string export_language(Store& store, const std::string& actor, const std::string& language) {
  const Snapshot snap = store.snapshot();
  std::string out = export_monolingual(*snap, language);
  std::size_t blocks = 0;
  for (std::size_t pos = 0; (pos = out.find("@synset ", pos)) != std::string::npos; ++pos) ++blocks;
  store.apply_edit({actor, EditAction::export_, entity::export_(language), "blocks=" + std::to_string(blocks)},
                   std::nullopt);
  return out;
}

}  // namespace wnforge::workflow
