#pragma once

// Store-level operations shared by the command-line tool and the HTTP
// service. Each one reads a snapshot, calls the pure module operation and
// commits the result through Store::apply_edit.

#include <optional>
#include <string>
#include <vector>

#include "wnforge/class_methods.hpp"
#include "wnforge/confidence.hpp"
#include "wnforge/ingest.hpp"
#include "wnforge/store.hpp"
#include "wnforge/verb_linker.hpp"

namespace wnforge::workflow {

EditRecord import_fragment(Store& store, const std::string& actor, const std::string& label,
                           const std::string& fragment);

// Registers the pivot and the other languages.
EditRecord register_languages(Store& store, const std::string& actor, const std::string& pivot,
                              const std::vector<std::string>& others);

std::string pivot_language(const KnowledgeBase& kb);
SynsetIndex synset_index(const KnowledgeBase& kb);
std::vector<PivotSenseEntry> pivot_senses(const KnowledgeBase& kb);

// Generates the nine class-method link sets from the bilingual pairs and the
// pivot senses in the store, and imports them.
std::vector<CandidateLink> generate_links(Store& store, const std::string& actor,
                                          const std::vector<BilingualEntry>& bilingual);

// Joins the stored Levin lists for `language` and imports the candidates.
std::vector<VerbCandidate> generate_verb_links(Store& store, const std::string& actor,
                                               const std::string& language);

// size nullopt uses default_sample_size. Replaces any previous sample for
// the method (and its verdicts).
ValidationSample create_sample(Store& store, const std::string& actor, Method method,
                               std::optional<std::size_t> size, std::uint64_t seed);

// Finds the link's method and records the verdict in that method's sample.
EditRecord record_link_verdict(Store& store, const std::string& actor, const std::string& link,
                               Verdict verdict);

// Header line `method<TAB>seed<TAB>population<TAB>size<TAB>judged<TAB>correct`,
// then `link_id<TAB>verdict|-` per drawn link in draw order.
std::string render_sample(const ValidationSample& sample);

std::vector<MethodStats> class_method_stats(const KnowledgeBase& kb);

// Methods with links need a completed sample; the extrapolated confidence
// decides promotion and becomes the reliability of promoted links.
PromotionResult promote_methods(Store& store, const std::string& actor,
                                Percent threshold = kDefaultPromotionThreshold);

std::string export_language(Store& store, const std::string& actor, const std::string& language);

}  // namespace wnforge::workflow
