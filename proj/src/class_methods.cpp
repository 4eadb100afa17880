#include "wnforge/class_methods.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

namespace wnforge {

namespace {

const std::vector<WordForm>& empty_words() {
  static const std::vector<WordForm> none;
  return none;
}

void fnv1a(std::uint64_t& hash, std::string_view data) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  hash ^= 0x1f;
  hash *= 0x100000001b3ULL;
}

void sort_links(std::vector<CandidateLink>& links) {
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
}

}  // namespace

std::string link_id(const CandidateLink& link) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  fnv1a(hash, to_string(link.method));
  fnv1a(hash, link.word.language);
  fnv1a(hash, link.word.lemma);
  fnv1a(hash, link.pivot_word ? link.pivot_word->lemma : std::string_view("\x01"));
  fnv1a(hash, link.synset.language);
  fnv1a(hash, to_string(link.synset.pos));
  fnv1a(hash, link.synset.key);
  char buffer[18];
  std::snprintf(buffer, sizeof buffer, "l%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

TranslationGraph::TranslationGraph(const std::vector<BilingualEntry>& entries) : pairs_(entries) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  for (const auto& p : pairs_) {
    forward_[p.source_word].push_back(p.pivot_word);
    reverse_[p.pivot_word].push_back(p.source_word);
    by_pivot_lemma_[p.pivot_word.lemma].push_back(p.source_word);
  }
  for (auto& [lemma, sources] : by_pivot_lemma_) {
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }
}

bool TranslationGraph::contains(const BilingualEntry& pair) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), pair);
}

const std::vector<WordForm>& TranslationGraph::translations_of_source(const WordForm& source) const {
  auto it = forward_.find(source);
  return it == forward_.end() ? empty_words() : it->second;
}

const std::vector<WordForm>& TranslationGraph::translations_of_pivot(const WordForm& pivot) const {
  auto it = reverse_.find(pivot);
  return it == reverse_.end() ? empty_words() : it->second;
}

const std::vector<WordForm>& TranslationGraph::sources_for_pivot_lemma(std::string_view pivot_lemma) const {
  auto it = by_pivot_lemma_.find(pivot_lemma);
  return it == by_pivot_lemma_.end() ? empty_words() : it->second;
}

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::c1: return "C1";
    case Criterion::c2: return "C2";
    case Criterion::c3: return "C3";
    case Criterion::c4: return "C4";
  }
  return "C4";
}

Method mono_method(Criterion criterion) {
  static constexpr Method methods[] = {Method::mono1, Method::mono2, Method::mono3, Method::mono4};
  return methods[static_cast<std::size_t>(criterion)];
}

Method poly_method(Criterion criterion) {
  static constexpr Method methods[] = {Method::poly1, Method::poly2, Method::poly3, Method::poly4};
  return methods[static_cast<std::size_t>(criterion)];
}

Criterion classify_pair(const BilingualEntry& pair, const TranslationGraph& graph) {
  if (!graph.contains(pair)) {
    throw Error(ErrorCode::PairNotInGraph,
                "(" + pair.source_word.lemma + ", " + pair.pivot_word.lemma + ")");
  }
  const auto& pivots = graph.translations_of_source(pair.source_word);
  const auto& sources = graph.translations_of_pivot(pair.pivot_word);
  if (pivots.size() == 1 && sources.size() == 1) return Criterion::c1;
  if (pivots.size() > 1 &&
      std::all_of(pivots.begin(), pivots.end(),
                  [&](const WordForm& ew) { return graph.pivot_degree(ew) == 1; })) {
    return Criterion::c2;
  }
  // Pivot-side star: the mirror image of C2.
  if (sources.size() > 1 &&
      std::all_of(sources.begin(), sources.end(),
                  [&](const WordForm& cw) { return graph.source_degree(cw) == 1; })) {
    return Criterion::c3;
  }
  return Criterion::c4;
}

CriterionPartition partition_pairs(const TranslationGraph& graph) {
  CriterionPartition partition;
  for (const auto& pair : graph.pairs()) {
    partition.sets[static_cast<std::size_t>(classify_pair(pair, graph))].push_back(pair);
  }
  return partition;
}

PivotSenseSplit split_pivot_senses(const std::vector<PivotSenseEntry>& pivot_senses) {
  std::set<PivotSenseEntry> unique(pivot_senses.begin(), pivot_senses.end());
  std::map<std::string, std::set<SynsetId>> synsets_per_word;
  for (const auto& s : unique) synsets_per_word[s.word.lemma].insert(s.synset);
  PivotSenseSplit split;
  for (const auto& s : unique) {
    (synsets_per_word[s.word.lemma].size() == 1 ? split.monosemic : split.polysemic).push_back(s);
  }
  return split;
}

std::map<Method, std::vector<CandidateLink>> join_triples(const CriterionPartition& partition,
                                                          const std::vector<PivotSenseEntry>& monosemic,
                                                          const std::vector<PivotSenseEntry>& polysemic) {
  auto by_lemma = [](const std::vector<PivotSenseEntry>& senses) {
    std::map<std::string, std::vector<const PivotSenseEntry*>> index;
    for (const auto& s : senses) index[s.word.lemma].push_back(&s);
    return index;
  };
  const auto mono_index = by_lemma(monosemic);
  const auto poly_index = by_lemma(polysemic);

  std::map<Method, std::vector<CandidateLink>> groups;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto criterion = static_cast<Criterion>(k);
    for (const auto& [method, index] : {std::pair{mono_method(criterion), &mono_index},
                                        std::pair{poly_method(criterion), &poly_index}}) {
      auto& group = groups[method];
      for (const auto& pair : partition.sets[k]) {
        auto it = index->find(pair.pivot_word.lemma);
        if (it == index->end()) continue;
        for (const PivotSenseEntry* sense : it->second) {
          CandidateLink link;
          link.method = method;
          link.word = pair.source_word;
          link.word.pos = sense->synset.pos;
          link.pivot_word = sense->word;
          link.synset = sense->synset;
          group.push_back(std::move(link));
        }
      }
      sort_links(group);
    }
  }
  return groups;
}

std::vector<CandidateLink> variant_links(const TranslationGraph& graph,
                                         const std::vector<PivotSenseEntry>& pivot_senses) {
  std::map<SynsetId, std::set<std::string>> members;
  for (const auto& s : pivot_senses) members[s.synset].insert(s.word.lemma);

  std::vector<CandidateLink> links;
  for (const auto& [synset, lemmas] : members) {
    if (lemmas.size() < 2) continue;
    std::map<WordForm, std::vector<std::string>> witnesses;
    for (const auto& ew : lemmas) {
      for (const auto& cw : graph.sources_for_pivot_lemma(ew)) witnesses[cw].push_back(ew);
    }
    for (auto& [word, pivots] : witnesses) {
      if (pivots.size() < 2) continue;
      CandidateLink link;
      link.method = Method::variant;
      link.word = word;
      link.word.pos = synset.pos;
      link.synset = synset;
      link.witnesses = std::move(pivots);
      links.push_back(std::move(link));
    }
  }
  sort_links(links);
  return links;
}

std::vector<CandidateLink> generate_links(const TranslationGraph& graph,
                                          const std::vector<PivotSenseEntry>& pivot_senses) {
  const auto split = split_pivot_senses(pivot_senses);
  auto groups = join_triples(partition_pairs(graph), split.monosemic, split.polysemic);
  groups[Method::variant] = variant_links(graph, pivot_senses);
  std::vector<CandidateLink> all;
  for (auto& [method, links] : groups) {
    all.insert(all.end(), std::make_move_iterator(links.begin()), std::make_move_iterator(links.end()));
  }
  return all;
}

std::string write_links_tsv(const std::vector<CandidateLink>& links) {
  std::string out;
  for (const auto& link : links) {
    out += std::string(to_string(link.method)) + "\t" + link.word.lemma + "\t" +
           (link.pivot_word ? link.pivot_word->lemma : "-") + "\t" + link.synset.key + "\t" +
           (link.witnesses.empty() ? "-" : text::join(link.witnesses, ',')) + "\n";
  }
  return out;
}

std::vector<CandidateLink> read_links_tsv(std::string_view content, const std::string& source_lang,
                                          const std::string& pivot_lang, const SynsetIndex* index,
                                          Pos default_pos, const std::string& source) {
  std::vector<CandidateLink> links;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields.size() != 5) text::parse_error(source, line, "expected 5 tab-separated columns");
    CandidateLink link;
    try {
      link.method = parse_method(fields[0]);
      validate_synset_key(fields[3]);
      link.synset = {pivot_lang, default_pos, std::string(fields[3])};
      if (index) {
        auto it = index->find(fields[3]);
        if (it == index->end()) throw Error(ErrorCode::ParseError, "unknown synset '" + link.synset.key + "'");
        link.synset = it->second;
      }
      link.word = {source_lang, normalize_lemma(fields[1]), link.synset.pos};
      if (fields[2] != "-") link.pivot_word = WordForm{pivot_lang, normalize_lemma(fields[2]), link.synset.pos};
      if (fields[4] != "-") {
        for (auto w : text::split(fields[4], ',')) link.witnesses.emplace_back(w);
      }
    } catch (const Error& e) {
      text::parse_error(source, line, e.what());
    }
    links.push_back(std::move(link));
  });
  return links;
}

}  // namespace wnforge
