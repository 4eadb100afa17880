#pragma once

// Consulting the knowledge base: start resolution, relation traversal,
// base-concept connectivity and plain-text lexical resources.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnforge/knowledge_base.hpp"

namespace wnforge {

// Token forms: a synset key, `lemma#k` (k-th synset of the lemma's accepted
// senses, 1-based, by sorted key), or a bare lemma (all of them, sorted).
// Throws NotFound, AmbiguousIndex, UnknownLanguage.
std::vector<SynsetId> resolve_start(const KnowledgeBase& kb, const std::string& language, std::string_view token);

struct Literal {
  std::string language;
  std::string lemma;
  std::optional<Percent> reliability;
  Method method = Method::manual;

  bool operator==(const Literal&) const = default;
};

struct PathNode {
  SynsetId synset;
  std::vector<Literal> literals;
  std::size_t depth = 0;
  // Index into the traversal result; nullopt for the origin.
  std::optional<std::size_t> parent;

  bool operator==(const PathNode&) const = default;
};

// Accepted senses of every registered language, by language then lemma.
std::vector<Literal> literals_of(const KnowledgeBase& kb, std::string_view synset_key);

// BFS along `kind` edges (source -> target). Nodes in visit order, origin
// first. Throws UnknownEntity if start is not a synset.
std::vector<PathNode> traverse(const KnowledgeBase& kb, const SynsetId& start, RelationKind kind,
                               std::size_t max_depth);
// Throws UnknownRelation.
std::vector<PathNode> traverse(const KnowledgeBase& kb, const SynsetId& start, std::string_view kind,
                               std::size_t max_depth);

// One line per node, indented two spaces per depth step:
//   S1 [noun] base: ca:gat(95.9), en:cat
std::string render_tree(const KnowledgeBase& kb, const std::vector<PathNode>& nodes);

// Synsets of `pos` that cannot reach a base concept upward (hypernymy for
// nouns, troponymy for verbs). Sorted. Throws NoBaseConcepts.
std::vector<SynsetId> check_base_connectivity(const KnowledgeBase& kb, Pos pos);

// Registry of headword-TSV text files. Config lines: `id<TAB>path`;
// relative paths resolve against the config file's directory.
class ResourceRegistry {
 public:
  ResourceRegistry() = default;
  static ResourceRegistry load(const std::filesystem::path& config);
  static ResourceRegistry parse(std::string_view config, const std::filesystem::path& base_dir,
                                const std::string& source = "<resources>");

  void add(const std::string& id, std::filesystem::path path);
  std::vector<std::string> ids() const;
  bool contains(std::string_view id) const { return paths_.find(std::string(id)) != paths_.end(); }

  // Lines whose first field equals the normalized headword, verbatim and in
  // file order. Throws UnknownResource, ResourceUnreadable.
  std::vector<std::string> lookup(std::string_view id, std::string_view headword) const;

 private:
  std::map<std::string, std::filesystem::path> paths_;
};

}  // namespace wnforge
