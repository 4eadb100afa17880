#include "wnforge/ingest.hpp"

#include <algorithm>
#include <set>

#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

namespace wnforge {

namespace {

template <typename T>
void sort_unique(std::vector<T>& items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
}

std::string checked_lemma(std::string_view raw, const std::string& source, std::size_t line) {
  try {
    return normalize_lemma(raw);
  } catch (const Error& e) {
    text::parse_error(source, line, e.what());
  }
}

}  // namespace

SynsetIndex make_synset_index(const std::vector<Synset>& synsets) {
  SynsetIndex index;
  for (const auto& s : synsets) index.emplace(s.id.key, s.id);
  return index;
}

std::vector<Relation> close_relations(const std::vector<Relation>& relations) {
  std::vector<Relation> closed = relations;
  for (const auto& r : relations) {
    if (auto inverse = invert_relation(r.kind)) closed.push_back({*inverse, r.target, r.source});
  }
  sort_unique(closed);
  return closed;
}

SynsetFile parse_synsets(std::string_view content, const std::string& language,
                         const std::string& source) {
  validate_language_code(language);
  struct PendingRef {
    std::size_t line;
    std::vector<std::string> fields;
  };
  SynsetFile file;
  SynsetIndex index;
  std::vector<PendingRef> pending;

  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields[0] == "syn") {
      if (fields.size() != 5) text::parse_error(source, line, "syn record needs 5 fields");
      Synset synset;
      try {
        validate_synset_key(fields[1]);
        synset.id = {language, parse_pos(fields[2]), std::string(fields[1])};
      } catch (const Error& e) {
        text::parse_error(source, line, e.what());
      }
      if (!fields[3].empty() && fields[3] != "-") synset.semantic_field = std::string(fields[3]);
      synset.gloss = std::string(fields[4]);
      if (!index.emplace(synset.id.key, synset.id).second) {
        throw Error(ErrorCode::DuplicateSynset, source + ":" + std::to_string(line) +
                                                    ": synset '" + synset.id.key + "' defined twice");
      }
      file.synsets.push_back(std::move(synset));
    } else if (fields[0] == "rel" || fields[0] == "base") {
      const std::size_t want = fields[0] == "rel" ? 4 : 2;
      if (fields.size() != want) {
        text::parse_error(source, line, std::string(fields[0]) + " record needs " +
                                            std::to_string(want) + " fields");
      }
      pending.push_back({line, std::vector<std::string>(fields.begin(), fields.end())});
    } else {
      text::parse_error(source, line, "unknown record type '" + std::string(fields[0]) + "'");
    }
  });

  auto resolve = [&](const std::string& key, std::size_t line) -> const SynsetId& {
    auto it = index.find(key);
    if (it == index.end()) {
      throw Error(ErrorCode::DanglingRelation,
                  source + ":" + std::to_string(line) + ": undefined synset '" + key + "'");
    }
    return it->second;
  };

  std::vector<Relation> relations;
  for (const auto& ref : pending) {
    if (ref.fields[0] == "base") {
      file.base_concepts.push_back(resolve(ref.fields[1], ref.line));
      continue;
    }
    Relation relation;
    try {
      relation.kind = parse_relation_kind(ref.fields[1]);
    } catch (const Error& e) {
      text::parse_error(source, ref.line, e.what());
    }
    relation.source = resolve(ref.fields[2], ref.line);
    relation.target = resolve(ref.fields[3], ref.line);
    try {
      validate_relation(relation);
    } catch (const Error& e) {
      text::parse_error(source, ref.line, e.what());
    }
    relations.push_back(std::move(relation));
  }

  std::sort(file.synsets.begin(), file.synsets.end(),
            [](const Synset& a, const Synset& b) { return a.id < b.id; });
  file.relations = close_relations(relations);
  sort_unique(file.base_concepts);
  recompute_hyponym_counts(file.synsets, file.relations);
  return file;
}

SynsetFile load_synsets(const std::filesystem::path& path, const std::string& language) {
  return parse_synsets(text::read_file(path), language, path.string());
}

std::string serialize_synsets(const SynsetFile& file) {
  std::vector<const Synset*> synsets;
  for (const auto& s : file.synsets) synsets.push_back(&s);
  std::sort(synsets.begin(), synsets.end(),
            [](const Synset* a, const Synset* b) { return a->id.key < b->id.key; });
  std::string out;
  for (const Synset* s : synsets) {
    out += "syn\t" + s->id.key + "\t" + std::string(to_string(s->id.pos)) + "\t" +
           s->semantic_field.value_or("") + "\t" + s->gloss + "\n";
  }
  for (const auto& r : close_relations(file.relations)) {
    out += "rel\t" + std::string(to_string(r.kind)) + "\t" + r.source.key + "\t" + r.target.key + "\n";
  }
  std::vector<SynsetId> bases = file.base_concepts;
  sort_unique(bases);
  for (const auto& b : bases) out += "base\t" + b.key + "\n";
  return out;
}

std::map<SynsetId, std::vector<SynsetId>> hierarchy_children(const std::vector<Relation>& relations) {
  std::map<SynsetId, std::vector<SynsetId>> children;
  for (const auto& r : relations) {
    switch (r.kind) {
      case RelationKind::hyponymy: children[r.source].push_back(r.target); break;
      case RelationKind::hypernymy: children[r.target].push_back(r.source); break;
      case RelationKind::troponymy: children[r.target].push_back(r.source); break;
      default: break;
    }
  }
  for (auto& [parent, kids] : children) sort_unique(kids);
  return children;
}

std::optional<std::vector<SynsetId>> find_hierarchy_cycle(const std::vector<Relation>& relations) {
  const auto children = hierarchy_children(relations);
  enum class Mark { unseen, active, done };
  std::map<SynsetId, Mark> marks;
  static const std::vector<SynsetId> no_children;
  auto kids_of = [&](const SynsetId& id) -> const std::vector<SynsetId>& {
    auto it = children.find(id);
    return it == children.end() ? no_children : it->second;
  };

  for (const auto& [root, unused] : children) {
    if (marks[root] != Mark::unseen) continue;
    // Iterative DFS; path holds the active chain and each frame's next child.
    std::vector<std::pair<SynsetId, std::size_t>> path{{root, 0}};
    marks[root] = Mark::active;
    while (!path.empty()) {
      auto& [node, next] = path.back();
      const auto& kids = kids_of(node);
      if (next == kids.size()) {
        marks[node] = Mark::done;
        path.pop_back();
        continue;
      }
      const SynsetId child = kids[next++];
      Mark& mark = marks[child];
      if (mark == Mark::active) {
        std::vector<SynsetId> cycle;
        auto it = std::find_if(path.begin(), path.end(),
                               [&](const auto& frame) { return frame.first == child; });
        for (; it != path.end(); ++it) cycle.push_back(it->first);
        cycle.push_back(child);
        return cycle;
      }
      if (mark == Mark::unseen) {
        mark = Mark::active;
        path.push_back({child, 0});
      }
    }
  }
  return std::nullopt;
}

std::map<SynsetId, HyponymCounts> compute_hyponym_counts(const std::vector<Synset>& synsets,
                                                         const std::vector<Relation>& relations) {
  if (auto cycle = find_hierarchy_cycle(relations)) {
    std::string chain;
    for (std::size_t i = 0; i < cycle->size(); ++i) {
      if (i) chain += " -> ";
      chain += (*cycle)[i].key;
    }
    throw Error(ErrorCode::CycleDetected, chain);
  }
  const auto children = hierarchy_children(relations);
  std::map<SynsetId, HyponymCounts> counts;
  std::set<SynsetId> seen;
  std::vector<SynsetId> stack;
  for (const auto& synset : synsets) {
    HyponymCounts& c = counts[synset.id];
    if (synset.id.pos != Pos::noun && synset.id.pos != Pos::verb) continue;
    auto it = children.find(synset.id);
    if (it == children.end()) continue;
    c.direct = it->second.size();
    seen.clear();
    stack.assign(it->second.begin(), it->second.end());
    while (!stack.empty()) {
      SynsetId node = std::move(stack.back());
      stack.pop_back();
      if (!seen.insert(node).second) continue;
      if (auto kids = children.find(node); kids != children.end()) {
        for (const auto& k : kids->second) {
          if (!seen.count(k)) stack.push_back(k);
        }
      }
    }
    c.total = seen.size();
  }
  return counts;
}

void recompute_hyponym_counts(std::vector<Synset>& synsets, const std::vector<Relation>& relations) {
  const auto counts = compute_hyponym_counts(synsets, relations);
  for (auto& s : synsets) {
    const auto& c = counts.at(s.id);
    s.direct_hyponyms = c.direct;
    s.total_hyponyms = c.total;
  }
}

BilingualFile parse_bilingual(std::string_view content, const std::string& source_lang,
                              const std::string& pivot_lang, Pos pos, const std::string& source) {
  validate_language_code(source_lang);
  validate_language_code(pivot_lang);
  if (source_lang == pivot_lang) {
    throw Error(ErrorCode::InvalidLanguage, "bilingual source and pivot languages must differ");
  }
  BilingualFile file;
  std::set<BilingualEntry> seen;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields.size() != 2) text::parse_error(source, line, "expected 2 tab-separated columns");
    BilingualEntry entry{{source_lang, checked_lemma(fields[0], source, line), pos},
                         {pivot_lang, checked_lemma(fields[1], source, line), pos}};
    if (!seen.insert(std::move(entry)).second) ++file.duplicates;
  });
  file.entries.assign(seen.begin(), seen.end());
  return file;
}

BilingualFile load_bilingual(const std::filesystem::path& path, const std::string& source_lang,
                             const std::string& pivot_lang, Pos pos) {
  return parse_bilingual(text::read_file(path), source_lang, pivot_lang, pos, path.string());
}

std::string serialize_bilingual(const std::vector<BilingualEntry>& entries) {
  std::set<BilingualEntry> sorted(entries.begin(), entries.end());
  std::string out;
  for (const auto& e : sorted) out += e.source_word.lemma + "\t" + e.pivot_word.lemma + "\n";
  return out;
}

PivotSenseFile parse_pivot_senses(std::string_view content, const std::string& pivot_lang,
                                  const SynsetIndex* index, Pos default_pos,
                                  const std::string& source) {
  validate_language_code(pivot_lang);
  PivotSenseFile file;
  std::set<PivotSenseEntry> seen;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields.size() != 2) text::parse_error(source, line, "expected 2 tab-separated columns");
    const std::string key(fields[1]);
    try {
      validate_synset_key(key);
    } catch (const Error& e) {
      text::parse_error(source, line, e.what());
    }
    SynsetId synset{pivot_lang, default_pos, key};
    if (index) {
      if (auto it = index->find(key); it != index->end()) {
        synset = it->second;
      } else {
        file.warnings.push_back("UnknownSynset: " + source + ":" + std::to_string(line) + ": '" +
                                key + "'");
      }
    }
    const std::string lemma = checked_lemma(fields[0], source, line);
    seen.insert({{pivot_lang, lemma, synset.pos}, std::move(synset)});
  });
  file.entries.assign(seen.begin(), seen.end());
  return file;
}

PivotSenseFile load_pivot_senses(const std::filesystem::path& path, const std::string& pivot_lang,
                                 const SynsetIndex* index, Pos default_pos) {
  return parse_pivot_senses(text::read_file(path), pivot_lang, index, default_pos, path.string());
}

std::string serialize_pivot_senses(const std::vector<PivotSenseEntry>& entries) {
  std::set<std::pair<std::string, std::string>> sorted;
  for (const auto& e : entries) sorted.emplace(e.word.lemma, e.synset.key);
  std::string out;
  for (const auto& [lemma, key] : sorted) out += lemma + "\t" + key + "\n";
  return out;
}

std::string normalize_levin_class(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && raw[begin] == ' ') ++begin;
  while (end > begin && raw[end - 1] == ' ') --end;
  if (begin == end) throw Error(ErrorCode::ParseError, "empty Levin class");
  std::string_view label = raw.substr(begin, end - begin);
  for (char c : label) {
    if (c == '\t' || c == '\n' || c == '\r' || c == '/') {
      throw Error(ErrorCode::IllegalChar, "illegal character in Levin class '" + std::string(label) + "'");
    }
  }
  return std::string(label);
}

std::vector<LevinVerbEntry> parse_levin_verbs(std::string_view content, const std::string& pivot_lang,
                                              const std::string& source) {
  validate_language_code(pivot_lang);
  std::map<std::pair<std::string, std::string>, std::set<LevinTranslation>> merged;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields.size() != 3) text::parse_error(source, line, "expected 3 tab-separated columns");
    std::string verb = checked_lemma(fields[0], source, line);
    std::string cls;
    try {
      cls = normalize_levin_class(fields[1]);
    } catch (const Error& e) {
      text::parse_error(source, line, e.what());
    }
    auto& translations = merged[{std::move(verb), std::move(cls)}];
    if (fields[2].find_first_not_of(' ') == std::string_view::npos) return;
    for (std::string_view item : text::split(fields[2], ',')) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) {
        text::parse_error(source, line, "translation '" + std::string(item) + "' lacks lang: prefix");
      }
      std::string lang(item.substr(0, colon));
      while (!lang.empty() && lang.front() == ' ') lang.erase(lang.begin());
      try {
        validate_language_code(lang);
      } catch (const Error& e) {
        text::parse_error(source, line, e.what());
      }
      translations.insert({lang, checked_lemma(item.substr(colon + 1), source, line)});
    }
  });
  std::vector<LevinVerbEntry> out;
  for (auto& [key, translations] : merged) {
    out.push_back({{pivot_lang, key.first, Pos::verb}, key.second,
                   std::vector<LevinTranslation>(translations.begin(), translations.end())});
  }
  return out;
}

std::vector<LevinSenseEntry> parse_levin_senses(std::string_view content, const std::string& pivot_lang,
                                                const SynsetIndex* index,
                                                std::vector<std::string>& warnings,
                                                const std::string& source) {
  validate_language_code(pivot_lang);
  std::set<LevinSenseEntry> seen;
  text::for_each_line_in(content, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    const auto fields = text::split(raw);
    if (fields.size() != 3) text::parse_error(source, line, "expected 3 tab-separated columns");
    LevinSenseEntry entry;
    entry.english_verb = {pivot_lang, checked_lemma(fields[0], source, line), Pos::verb};
    try {
      entry.levin_class = normalize_levin_class(fields[1]);
      validate_synset_key(fields[2]);
    } catch (const Error& e) {
      text::parse_error(source, line, e.what());
    }
    entry.synset = {pivot_lang, Pos::verb, std::string(fields[2])};
    if (index) {
      auto it = index->find(fields[2]);
      if (it == index->end()) {
        warnings.push_back("UnknownSynset: " + source + ":" + std::to_string(line) + ": '" +
                           std::string(fields[2]) + "'");
      } else if (it->second.pos != Pos::verb) {
        text::parse_error(source, line, "synset '" + it->second.key + "' is not a verb");
      } else {
        entry.synset = it->second;
      }
    }
    seen.insert(std::move(entry));
  });
  return {seen.begin(), seen.end()};
}

LevinLists load_levin_lists(const std::filesystem::path& verbs_path,
                            const std::filesystem::path& senses_path, const std::string& pivot_lang,
                            const SynsetIndex* index) {
  LevinLists lists;
  lists.verbs = parse_levin_verbs(text::read_file(verbs_path), pivot_lang, verbs_path.string());
  lists.senses = parse_levin_senses(text::read_file(senses_path), pivot_lang, index, lists.warnings,
                                    senses_path.string());
  return lists;
}

std::string serialize_levin_verbs(const std::vector<LevinVerbEntry>& entries) {
  std::vector<LevinVerbEntry> sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& e : sorted) {
    out += e.english_verb.lemma + "\t" + e.levin_class + "\t";
    for (std::size_t i = 0; i < e.translations.size(); ++i) {
      if (i) out += ",";
      out += e.translations[i].language + ":" + e.translations[i].lemma;
    }
    out += "\n";
  }
  return out;
}

std::string serialize_levin_senses(const std::vector<LevinSenseEntry>& entries) {
  std::vector<LevinSenseEntry> sorted = entries;
  sort_unique(sorted);
  std::string out;
  for (const auto& e : sorted) {
    out += e.english_verb.lemma + "\t" + e.levin_class + "\t" + e.synset.key + "\n";
  }
  return out;
}

}  // namespace wnforge
