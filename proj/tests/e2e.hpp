#pragma once

// Runs the shipped Catalan/English fixture through ingest, link generation,
// sampling, verdicts, promotion and consultation, capturing each stage's
// output as text.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "wnforge/query.hpp"
#include "wnforge/text.hpp"
#include "wnforge/workflow.hpp"

namespace e2e {

using namespace wnforge;

inline constexpr std::uint64_t kSeed = 20240901;
inline const char* const kStages[] = {"ingest", "links", "samples", "report", "promote", "consult"};
inline const char* const kConsultStarts[] = {"gat", "gos", "muntanya"};

inline std::filesystem::path fixture_dir() { return std::filesystem::path(WNFORGE_SOURCE_DIR) / "tests/fixtures/e2e"; }
inline std::filesystem::path golden_dir() { return std::filesystem::path(WNFORGE_SOURCE_DIR) / "tests/golden/e2e"; }

using VerdictKey = std::tuple<std::string, std::string, std::string, std::string>;

inline std::map<VerdictKey, Verdict> load_verdicts(const std::filesystem::path& path) {
  std::map<VerdictKey, Verdict> out;
  text::for_each_line(path, [&](std::size_t, std::string_view line) {
    if (text::is_skippable(line)) return;
    const auto f = text::split(line);
    out[{std::string(f.at(0)), std::string(f.at(1)), std::string(f.at(2)), std::string(f.at(3))}] =
        parse_verdict(f.at(4));
  });
  return out;
}

struct Result {
  std::map<std::string, std::string> stages;
  // Synsets reached from each consult start, and whether a base concept was among them.
  std::map<std::string, bool> reaches_base;
};

inline Result run(const std::filesystem::path& store_dir) {
  const auto dir = fixture_dir();
  Store store(store_dir, {false, {}});
  const std::string actor = "e2e";
  Result result;

  workflow::register_languages(store, actor, "en", {"ca"});
  const SynsetFile synsets = load_synsets(dir / "synsets.tsv", "en");
  workflow::import_fragment(store, actor, "synsets", kb_fragment_synsets(synsets));
  {
    const Snapshot kb = store.snapshot();
    const SynsetIndex index = workflow::synset_index(*kb);
    const auto senses = load_pivot_senses(dir / "senses.tsv", "en", &index);
    if (!senses.warnings.empty()) throw std::runtime_error("fixture sense warnings: " + senses.warnings.front());
    workflow::import_fragment(store, actor, "senses", kb_fragment_pivot_senses(senses.entries));
  }
  {
    const Snapshot kb = store.snapshot();
    std::string out;
    for (const auto& [key, s] : kb->synsets) {
      out += key + "\t" + std::to_string(s.direct_hyponyms) + "\t" + std::to_string(s.total_hyponyms) + "\n";
    }
    out += "disconnected\t" + std::to_string(check_base_connectivity(*kb, Pos::noun).size()) + "\n";
    result.stages["ingest"] = out;
  }

  const auto dict = load_bilingual(dir / "bilingual.tsv", "ca", "en");
  result.stages["links"] = write_links_tsv(workflow::generate_links(store, actor, dict.entries));

  std::string samples;
  for (Method m : class_methods()) {
    if (store.snapshot()->links_of(m).empty()) continue;
    samples += workflow::render_sample(workflow::create_sample(store, actor, m, std::nullopt, kSeed));
  }
  result.stages["samples"] = samples;

  const auto verdicts = load_verdicts(dir / "verdicts.tsv");
  for (Method m : class_methods()) {
    const Snapshot kb = store.snapshot();
    auto it = kb->samples.find(m);
    if (it == kb->samples.end()) continue;
    for (const auto& id : it->second.links) {
      const CandidateLink& l = kb->links.at(id);
      const VerdictKey key{std::string(to_string(m)), l.word.lemma, l.pivot_word ? l.pivot_word->lemma : "-",
                           l.synset.key};
      auto v = verdicts.find(key);
      if (v == verdicts.end()) throw std::runtime_error("no verdict for " + id);
      workflow::record_link_verdict(store, actor, id, v->second);
    }
  }
  result.stages["report"] = table_report(workflow::class_method_stats(*store.snapshot()), ReportFormat::tsv);

  const auto promoted = workflow::promote_methods(store, actor, Percent::from_tenths(850));
  {
    std::string out;
    for (Method m : promoted.promoted) out += "promoted\t" + std::string(to_string(m)) + "\n";
    for (Method m : promoted.rejected) out += "rejected\t" + std::string(to_string(m)) + "\n";
    for (const auto& [key, sense] : store.snapshot()->senses) {
      if (key.language != "ca" || sense.status != LinkStatus::accepted) continue;
      out += key.lemma + "\t" + key.synset_key + "\t" + (sense.reliability ? sense.reliability->str() : "-") + "\t" +
             std::string(to_string(sense.method)) + "\n";
    }
    result.stages["promote"] = out;
  }

  {
    const Snapshot kb = store.snapshot();
    std::string out;
    for (const char* start : kConsultStarts) {
      out += "# ca " + std::string(start) + "\n";
      bool base = false;
      for (const auto& origin : resolve_start(*kb, "ca", start)) {
        const auto nodes = traverse(*kb, origin, RelationKind::hypernymy, 5);
        for (const auto& n : nodes) base = base || kb->base_concepts.contains(n.synset.key);
        out += render_tree(*kb, nodes);
      }
      result.reaches_base[start] = base;
    }
    result.stages["consult"] = out;
  }
  return result;
}

inline std::string golden(const std::string& stage) { return text::read_file(golden_dir() / (stage + ".txt")); }

}  // namespace e2e
