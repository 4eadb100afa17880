#include "wnforge/query.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>

#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

namespace wnforge {

namespace {

std::vector<SynsetId> synsets_of_lemma(const KnowledgeBase& kb, const std::string& language,
                                       const std::string& lemma) {
  std::vector<SynsetId> out;
  for (auto it = kb.senses.lower_bound(SenseKey{language, lemma, ""});
       it != kb.senses.end() && it->first.language == language && it->first.lemma == lemma; ++it) {
    if (it->second.status == LinkStatus::accepted) out.push_back(it->second.synset);
  }
  std::sort(out.begin(), out.end(), [](const SynsetId& a, const SynsetId& b) { return a.key < b.key; });
  return out;
}

}  // namespace

std::vector<SynsetId> resolve_start(const KnowledgeBase& kb, const std::string& language, std::string_view token) {
  if (!kb.languages.contains(language)) {
    throw Error(ErrorCode::UnknownLanguage, "language '" + language + "' is not registered");
  }
  if (const Synset* s = kb.find_synset(token)) return {s->id};

  std::string_view word = token;
  std::optional<std::size_t> index;
  if (auto hash = token.rfind('#'); hash != std::string_view::npos && hash + 1 < token.size()) {
    std::string_view digits = token.substr(hash + 1);
    std::size_t k = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && end == digits.data() + digits.size()) {
      word = token.substr(0, hash);
      index = k;
    }
  }
  std::string lemma;
  try {
    lemma = normalize_lemma(word);
  } catch (const Error&) {
    throw Error(ErrorCode::NotFound, "no synset or word '" + std::string(token) + "'");
  }
  auto found = synsets_of_lemma(kb, language, lemma);
  if (found.empty()) {
    throw Error(ErrorCode::NotFound, "no accepted sense of '" + lemma + "' in " + language);
  }
  if (!index) return found;
  if (*index == 0 || *index > found.size()) {
    throw Error(ErrorCode::AmbiguousIndex, "'" + lemma + "' has " + std::to_string(found.size()) +
                                               " senses, index " + std::to_string(*index) + " out of range");
  }
  return {found[*index - 1]};
}

std::vector<Literal> literals_of(const KnowledgeBase& kb, std::string_view synset_key) {
  std::vector<Literal> out;
  for (const auto& [key, sense] : kb.senses) {
    if (key.synset_key != synset_key || sense.status != LinkStatus::accepted) continue;
    out.push_back({key.language, key.lemma, sense.reliability, sense.method});
  }
  return out;
}

std::vector<PathNode> traverse(const KnowledgeBase& kb, const SynsetId& start, RelationKind kind,
                               std::size_t max_depth) {
  const Synset* origin = kb.find_synset(start.key);
  if (!origin) throw Error(ErrorCode::UnknownEntity, "no synset " + start.key);

  std::map<std::string, std::vector<Literal>, std::less<>> literals;
  for (const auto& [key, sense] : kb.senses) {
    if (sense.status == LinkStatus::accepted) {
      literals[key.synset_key].push_back({key.language, key.lemma, sense.reliability, sense.method});
    }
  }
  auto node_for = [&](const SynsetId& id, std::size_t depth, std::optional<std::size_t> parent) {
    PathNode node{id, {}, depth, parent};
    if (auto it = literals.find(id.key); it != literals.end()) node.literals = it->second;
    return node;
  };

  std::vector<PathNode> out{node_for(origin->id, 0, std::nullopt)};
  std::set<std::string, std::less<>> seen{origin->id.key};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].depth >= max_depth) continue;
    const SynsetId current = out[i].synset;
    for (auto it = kb.relations.lower_bound(Relation{kind, current, SynsetId{}});
         it != kb.relations.end() && it->kind == kind && it->source == current; ++it) {
      if (!seen.insert(it->target.key).second) continue;
      out.push_back(node_for(it->target, out[i].depth + 1, i));
    }
  }
  return out;
}

std::vector<PathNode> traverse(const KnowledgeBase& kb, const SynsetId& start, std::string_view kind,
                               std::size_t max_depth) {
  return traverse(kb, start, parse_relation_kind(kind), max_depth);
}

std::string render_tree(const KnowledgeBase& kb, const std::vector<PathNode>& nodes) {
  std::string out;
  for (const auto& node : nodes) {
    out.append(2 * node.depth, ' ');
    out += node.synset.key + " [" + std::string(to_string(node.synset.pos)) + "]";
    if (kb.base_concepts.contains(node.synset.key)) out += " base";
    out += ':';
    for (std::size_t i = 0; i < node.literals.size(); ++i) {
      const Literal& l = node.literals[i];
      out += i ? ", " : " ";
      out += l.language + ":" + l.lemma;
      if (l.reliability) out += "(" + l.reliability->str() + ")";
    }
    out += '\n';
  }
  return out;
}

std::vector<SynsetId> check_base_connectivity(const KnowledgeBase& kb, Pos pos) {
  std::deque<std::string> queue;
  std::set<std::string, std::less<>> reached;
  for (const auto& key : kb.base_concepts) {
    const Synset* s = kb.find_synset(key);
    if (s && s->id.pos == pos && reached.insert(key).second) queue.push_back(key);
  }
  if (queue.empty()) {
    throw Error(ErrorCode::NoBaseConcepts, "no base concepts declared for " + std::string(to_string(pos)));
  }
  const RelationKind up = pos == Pos::verb ? RelationKind::troponymy : RelationKind::hypernymy;
  // Reverse edges: upper -> lower.
  std::map<std::string, std::vector<std::string>, std::less<>> below;
  for (const auto& r : kb.relations) {
    if (r.kind == up) below[r.target.key].push_back(r.source.key);
  }
  while (!queue.empty()) {
    std::string key = std::move(queue.front());
    queue.pop_front();
    auto it = below.find(key);
    if (it == below.end()) continue;
    for (const auto& lower : it->second) {
      if (reached.insert(lower).second) queue.push_back(lower);
    }
  }
  std::vector<SynsetId> out;
  for (const auto& [key, s] : kb.synsets) {
    if (s.id.pos == pos && !reached.contains(key)) out.push_back(s.id);
  }
  return out;
}

ResourceRegistry ResourceRegistry::load(const std::filesystem::path& config) {
  return parse(text::read_file(config), config.parent_path(), config.string());
}

ResourceRegistry ResourceRegistry::parse(std::string_view config, const std::filesystem::path& base_dir,
                                         const std::string& source) {
  ResourceRegistry registry;
  text::for_each_line_in(config, [&](std::size_t line_no, std::string_view line) {
    if (text::is_skippable(line)) return;
    auto fields = text::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      text::parse_error(source, line_no, "expected id<TAB>path");
    }
    std::filesystem::path path{std::string(fields[1])};
    if (path.is_relative()) path = base_dir / path;
    registry.add(std::string(fields[0]), path);
  });
  return registry;
}

void ResourceRegistry::add(const std::string& id, std::filesystem::path path) { paths_[id] = std::move(path); }

std::vector<std::string> ResourceRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, path] : paths_) out.push_back(id);
  return out;
}

std::vector<std::string> ResourceRegistry::lookup(std::string_view id, std::string_view headword) const {
  auto it = paths_.find(std::string(id));
  if (it == paths_.end()) throw Error(ErrorCode::UnknownResource, "no resource '" + std::string(id) + "'");
  std::ifstream in(it->second, std::ios::binary);
  if (!in) throw Error(ErrorCode::ResourceUnreadable, "cannot read " + it->second.string());
  std::string wanted;
  try {
    wanted = normalize_lemma(headword);
  } catch (const Error&) {
    return {};
  }
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.substr(0, line.find('\t')) == wanted) out.push_back(line);
  }
  if (in.bad()) throw Error(ErrorCode::ResourceUnreadable, "error reading " + it->second.string());
  return out;
}

}  // namespace wnforge
