#include "wnforge/store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <set>

#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

namespace wnforge {

namespace {

constexpr std::string_view kHistoryHeader = "# wnforge history v1\n";

std::string crc_hex(std::string_view data) {
  const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  char buffer[9];
  std::snprintf(buffer, sizeof buffer, "%08lx", static_cast<unsigned long>(crc));
  return buffer;
}

std::string encode_optional(const std::optional<std::string>& value) {
  return value ? "=" + text::escape(*value) : "-";
}

std::optional<std::string> decode_optional(std::string_view field) {
  if (field == "-") return std::nullopt;
  if (field.empty() || field.front() != '=') throw Error(ErrorCode::StoreCorrupt, "bad payload field");
  return text::unescape(field.substr(1));
}

std::uint64_t decode_u64(std::string_view field) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorCode::StoreCorrupt, "bad number '" + std::string(field) + "'");
  }
  return value;
}

Timestamp system_now() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

[[noreturn]] void throw_errno(const std::string& what) {
  throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

}  // namespace

std::string encode_record(const EditRecord& record) {
  std::string line = std::to_string(record.seq) + "\t" + format_timestamp(record.timestamp) + "\t" +
                     text::escape(record.actor) + "\t" + std::string(to_string(record.action)) + "\t" +
                     text::escape(record.subject) + "\t" + std::to_string(record.version) + "\t" +
                     encode_optional(record.before) + "\t" + encode_optional(record.after);
  const std::string crc = crc_hex(line);
  return line + "\t" + crc + "\n";
}

EditRecord decode_record(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  const auto tab = line.rfind('\t');
  if (tab == std::string_view::npos) throw Error(ErrorCode::StoreCorrupt, "record without checksum");
  const std::string_view body = line.substr(0, tab);
  if (crc_hex(body) != line.substr(tab + 1)) throw Error(ErrorCode::StoreCorrupt, "checksum mismatch");
  const auto f = text::split(body);
  if (f.size() != 8) throw Error(ErrorCode::StoreCorrupt, "record has " + std::to_string(f.size()) + " fields");
  try {
    EditRecord record;
    record.seq = decode_u64(f[0]);
    record.timestamp = parse_timestamp(f[1]);
    record.actor = text::unescape(f[2]);
    record.action = parse_edit_action(f[3]);
    record.subject = text::unescape(f[4]);
    record.version = decode_u64(f[5]);
    record.before = decode_optional(f[6]);
    record.after = decode_optional(f[7]);
    return record;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::StoreCorrupt) throw;
    throw Error(ErrorCode::StoreCorrupt, e.what());
  }
}

KnowledgeBase replay(const std::vector<EditRecord>& records) {
  KnowledgeBase kb;
  for (const auto& r : records) apply_record(kb, r);
  return kb;
}

bool matches(const EditRecord& record, const HistoryFilter& filter) {
  if (filter.actor && record.actor != *filter.actor) return false;
  if (filter.action && record.action != *filter.action) return false;
  if (filter.subject && record.subject != *filter.subject) return false;
  if (filter.from && record.timestamp < *filter.from) return false;
  if (filter.to && record.timestamp > *filter.to) return false;
  return true;
}

Store::Store(std::filesystem::path directory, StoreOptions options)
    : directory_(std::move(directory)), options_(std::move(options)), state_(std::make_shared<KnowledgeBase>()) {
  if (!options_.clock) options_.clock = system_now;
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create store directory " + directory_.string() + ": " + ec.message());
  fd_ = ::open(history_path().c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw_errno("open " + history_path().string());
  try {
    recover();
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

Store::~Store() {
  try {
    if (!failed_) checkpoint();
  } catch (...) {
  }
  if (fd_ >= 0) ::close(fd_);
}

void Store::recover() {
  const std::string content = text::read_file(history_path());
  if (content.empty()) {
    append(std::string(kHistoryHeader));
    return;
  }
  std::vector<EditRecord> records;
  std::size_t offset = 0;
  std::size_t valid_end = 0;
  while (offset < content.size()) {
    const std::size_t newline = content.find('\n', offset);
    const bool complete = newline != std::string::npos;
    const std::string_view line(content.data() + offset, (complete ? newline : content.size()) - offset);
    const std::size_t next = complete ? newline + 1 : content.size();
    const bool last = next == content.size();
    if (complete && text::is_skippable(line)) {
      offset = valid_end = next;
      continue;
    }
    EditRecord record;
    try {
      if (!complete) throw Error(ErrorCode::StoreCorrupt, "unterminated record");
      record = decode_record(line);
    } catch (const Error& e) {
      // Only the trailing record may be torn.
      if (!last) {
        throw Error(ErrorCode::StoreCorrupt, history_path().string() + " at byte " + std::to_string(offset) +
                                                 ": " + e.what());
      }
      break;
    }
    if (record.seq != records.size() + 1) {
      throw Error(ErrorCode::StoreCorrupt, history_path().string() + ": sequence gap at seq " +
                                               std::to_string(record.seq));
    }
    records.push_back(std::move(record));
    offset = valid_end = next;
  }
  if (valid_end < content.size()) {
    recovered_bytes_ = content.size() - valid_end;
    if (::ftruncate(fd_, static_cast<off_t>(valid_end)) != 0) throw_errno("truncate " + history_path().string());
    if (options_.sync) ::fsync(fd_);
  }
  try {
    *state_ = replay(records);
  } catch (const Error& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("replay failed: ") + e.what());
  }
  history_ = std::move(records);
}

void Store::append(const std::string& line) {
  const off_t before = ::lseek(fd_, 0, SEEK_END);
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int saved = errno;
      if (before >= 0 && ::ftruncate(fd_, before) != 0) failed_ = true;
      errno = saved;
      throw_errno("append " + history_path().string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (options_.sync && ::fdatasync(fd_) != 0) throw_errno("fdatasync " + history_path().string());
}

Snapshot Store::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

EditRecord Store::apply_edit(const EditRequest& request, std::optional<std::uint64_t> expected_version) {
  std::lock_guard commit(commit_mutex_);
  if (failed_) throw Error(ErrorCode::StoreCorrupt, "store is in a failed state");
  const KnowledgeBase& current = *state_;
  EditRecord record = plan_edit(current, request);
  const std::uint64_t current_version = current.version(record.subject);
  if (expected_version && *expected_version != current_version) {
    throw Error(ErrorCode::VersionConflict, record.subject + ": expected version " +
                                                std::to_string(*expected_version) + ", current " +
                                                std::to_string(current_version));
  }
  record.seq = history_.size() + 1;
  record.timestamp = options_.clock();
  append(encode_record(record));

  try {
    std::unique_lock lock(state_mutex_);
    if (state_.use_count() == 1) {
      apply_record(*state_, record);
    } else {
      lock.unlock();
      auto next = std::make_shared<KnowledgeBase>(*state_);
      apply_record(*next, record);
      lock.lock();
      state_ = std::move(next);
    }
    history_.push_back(record);
  } catch (const Error& e) {
    failed_ = true;
    throw Error(ErrorCode::StoreCorrupt, std::string("committed record could not be applied: ") + e.what());
  }
  return record;
}

std::vector<EditRecord> Store::history(const HistoryFilter& filter) const {
  std::lock_guard lock(state_mutex_);
  std::vector<EditRecord> out;
  for (const auto& r : history_) {
    if (matches(r, filter)) out.push_back(r);
  }
  return out;
}

std::uint64_t Store::last_seq() const {
  std::lock_guard lock(state_mutex_);
  return history_.size();
}

void Store::checkpoint() const {
  const Snapshot snap = snapshot();
  const auto tmp = directory_ / "kb.tsv.tmp";
  text::write_file(tmp, "# wnforge kb v1\n" + serialize_kb(*snap));
  std::filesystem::rename(tmp, directory_ / "kb.tsv");
}

std::string export_monolingual(const KnowledgeBase& kb, const std::string& language) {
  if (!kb.languages.contains(language)) {
    throw Error(ErrorCode::UnknownLanguage, "language '" + language + "' is not registered");
  }
  std::map<std::string, std::vector<const Sense*>> by_synset;
  for (const auto& [key, sense] : kb.senses) {
    if (key.language == language && sense.status == LinkStatus::accepted) by_synset[key.synset_key].push_back(&sense);
  }
  std::string out;
  for (const auto& [key, senses] : by_synset) {
    const Synset* synset = kb.find_synset(key);
    if (!synset) continue;
    if (!out.empty()) out += "\n";
    out += "@synset " + key + " " + std::string(to_string(synset->id.pos)) + "\n";
    for (const Sense* s : senses) {
      out += "lit\t" + s->word.lemma + "\t" + (s->reliability ? s->reliability->str() : "-") + "\t" +
             std::string(to_string(s->method)) + "\n";
    }
    auto gloss = kb.glosses.find({language, key});
    out += "gloss\t" + text::escape(gloss != kb.glosses.end() ? gloss->second : synset->gloss) + "\n";
    for (const auto& r : kb.relations) {
      if (r.source.key == key && by_synset.count(r.target.key)) {
        out += "rel\t" + std::string(to_string(r.kind)) + "\t" + r.target.key + "\n";
      }
    }
  }
  return out;
}

std::string monolingual_import_fragment(std::string_view exported, const std::string& language,
                                        const std::string& pivot_language, const std::string& source) {
  validate_language_code(language);
  validate_language_code(pivot_language);
  struct Block {
    std::string pos;
    std::string gloss;
  };
  std::map<std::string, Block> blocks;
  std::string rel_lines;
  std::string sense_lines;
  std::string current;
  text::for_each_line_in(exported, [&](std::size_t line, std::string_view raw) {
    if (text::is_skippable(raw)) return;
    if (raw.starts_with("@synset ")) {
      const auto parts = text::split(raw.substr(8), ' ');
      if (parts.size() != 2) text::parse_error(source, line, "expected '@synset key pos'");
      current = std::string(parts[0]);
      blocks[current].pos = std::string(parts[1]);
      return;
    }
    if (current.empty()) text::parse_error(source, line, "record outside a synset block");
    const auto f = text::split(raw);
    if (f[0] == "lit" && f.size() == 4) {
      sense_lines += "sense\t" + language + "\t" + std::string(f[1]) + "\t" + current + "\t" + std::string(f[3]) +
                     "\t" + std::string(f[2]) + "\taccepted\n";
    } else if (f[0] == "gloss" && f.size() == 2) {
      blocks[current].gloss = std::string(f[1]);
    } else if (f[0] == "rel" && f.size() == 3) {
      rel_lines += "rel\t" + std::string(f[1]) + "\t" + current + "\t" + std::string(f[2]) + "\n";
    } else {
      text::parse_error(source, line, "unexpected record '" + std::string(f[0]) + "'");
    }
  });
  std::string out = "lang\t" + pivot_language + "\tpivot\n";
  if (language != pivot_language) out += "lang\t" + language + "\tother\n";
  for (const auto& [key, block] : blocks) out += "syn\t" + key + "\t" + block.pos + "\t\t" + block.gloss + "\n";
  return out + rel_lines + sense_lines;
}

}  // namespace wnforge
