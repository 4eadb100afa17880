#pragma once

// File-backed knowledge-base store.
//
// A store directory holds
//   history.log  append-only edit log, one record per line with a CRC32
//   kb.tsv       canonical dump of the current state (rewritten by checkpoint())
//
// history.log is authoritative: opening a store replays it over an empty
// knowledge base. A torn trailing record (crash mid-append) is truncated on
// recovery; damage anywhere else is StoreCorrupt.
//
// Writes go through one commit path guarded by a mutex and use optimistic
// per-entity versions. Readers take immutable snapshots that later writes do
// not affect.

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wnforge/knowledge_base.hpp"

namespace wnforge {

using Snapshot = std::shared_ptr<const KnowledgeBase>;

struct HistoryFilter {
  std::optional<std::string> actor;
  std::optional<EditAction> action;
  std::optional<std::string> subject;
  // Inclusive bounds.
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
};

struct StoreOptions {
  // fdatasync after every committed record.
  bool sync = true;
  std::function<Timestamp()> clock;
};

// history.log line codec. encode_record output ends with '\n'.
std::string encode_record(const EditRecord& record);
// Throws StoreCorrupt on checksum mismatch or malformed lines.
EditRecord decode_record(std::string_view line);

KnowledgeBase replay(const std::vector<EditRecord>& records);
bool matches(const EditRecord& record, const HistoryFilter& filter);

class Store {
 public:
  explicit Store(std::filesystem::path directory, StoreOptions options = {});
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  Snapshot snapshot() const;

  // Plans, version-checks, logs and applies one edit. expected_version
  // nullopt skips the optimistic check. Throws VersionConflict when it does
  // not match the subject's current version.
  EditRecord apply_edit(const EditRequest& request, std::optional<std::uint64_t> expected_version);

  std::vector<EditRecord> history(const HistoryFilter& filter = {}) const;
  std::uint64_t last_seq() const;
  // Bytes of torn trailing data dropped when the store was opened.
  std::size_t recovered_bytes() const { return recovered_bytes_; }

  // Writes kb.tsv atomically (temp file + rename).
  void checkpoint() const;

  const std::filesystem::path& directory() const { return directory_; }
  std::filesystem::path history_path() const { return directory_ / "history.log"; }

 private:
  void recover();
  void append(const std::string& line);

  std::filesystem::path directory_;
  StoreOptions options_;
  int fd_ = -1;
  std::size_t recovered_bytes_ = 0;
  bool failed_ = false;

  std::mutex commit_mutex_;
  mutable std::mutex state_mutex_;
  std::shared_ptr<KnowledgeBase> state_;
  std::vector<EditRecord> history_;
};

// Monolingual export, one block per pivot synset with an accepted sense in
// `language`:
//
//   @synset key pos
//   lit<TAB>lemma<TAB>reliability|-<TAB>method
//   gloss<TAB>text
//   rel<TAB>kind<TAB>target_key
//
// Blocks are separated by a blank line; relations are limited to exported
// synsets. Throws UnknownLanguage.
std::string export_monolingual(const KnowledgeBase& kb, const std::string& language);

// Turns an export back into an import fragment (languages, synsets,
// relations, accepted senses).
std::string monolingual_import_fragment(std::string_view exported, const std::string& language,
                                        const std::string& pivot_language,
                                        const std::string& source = "<export>");

}  // namespace wnforge
