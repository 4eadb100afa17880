#pragma once

// Line-oriented TSV helpers shared by the loaders and the store.

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace wnforge::text {

std::vector<std::string_view> split(std::string_view line, char sep = '\t');
std::string join(const std::vector<std::string>& parts, char sep = '\t');

// True for blank lines and '#' comments.
bool is_skippable(std::string_view line);

// Calls fn(line_number, line) for every line (CR stripped). Line numbers
// start at 1. Throws IoError when the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);
void for_each_line_in(std::string_view content,
                      const std::function<void(std::size_t, std::string_view)>& fn);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Backslash escaping for tab, newline, CR and backslash.
std::string escape(std::string_view raw);
std::string unescape(std::string_view escaped);

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& reason);

}  // namespace wnforge::text
