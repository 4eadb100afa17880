#pragma once

// HTTP/JSON facade over the store. Every endpoint adapts one workflow or
// query operation; mutations need an X-Actor header.
//
//   GET  /api/languages
//   GET  /api/synsets/{key}
//   GET  /api/consult?lang=&start=&relation=&depth=
//   GET  /api/resources
//   GET  /api/resources/{id}/{headword}
//   GET  /api/report/class-methods[?format=json|tsv|markdown]
//   GET  /api/history?actor=&action=&subject=&from=&to=&offset=&limit=
//   GET  /api/validate/samples/{method}
//   POST /api/links/generate        {bilingual | pairs, language?, pos?}
//   POST /api/verbs/generate        {language}
//   POST /api/validate/samples      {method, size?, seed}
//   POST /api/validate/verdicts     {link, verdict}
//   POST /api/promote               {threshold?}
//   PUT  /api/edits/{entity}        {action, value?, expected_version?}
//
// Static files (the console) are served from `/` when a directory is given.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "wnforge/error.hpp"
#include "wnforge/query.hpp"
#include "wnforge/store.hpp"

namespace wnforge {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  // History page size when the request gives no limit.
  std::size_t default_limit = 200;
};

// HTTP status for a library error.
int http_status(ErrorCode code);

class Service {
 public:
  Service(Store& store, ResourceRegistry resources, ServiceConfig config = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds config.port (0 picks a free port) and returns the bound port.
  // Throws BindError when the address is unavailable.
  int bind();
  // Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wnforge
