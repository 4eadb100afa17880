#include "wnforge/service.hpp"

#include <charconv>
#include <cmath>
#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "wnforge/error.hpp"
#include "wnforge/text.hpp"
#include "wnforge/workflow.hpp"

namespace wnforge {

using json = nlohmann::ordered_json;

namespace {

// Malformed request bodies and parameters.
struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json optional_percent(const std::optional<Percent>& p) { return p ? json(p->str()) : json(nullptr); }

json to_json(const Synset& s) {
  return {{"key", s.id.key},
          {"language", s.id.language},
          {"pos", to_string(s.id.pos)},
          {"gloss", s.gloss},
          {"semantic_field", s.semantic_field ? json(*s.semantic_field) : json(nullptr)},
          {"direct_hyponyms", s.direct_hyponyms},
          {"total_hyponyms", s.total_hyponyms}};
}

json to_json(const Literal& l) {
  return {{"language", l.language},
          {"lemma", l.lemma},
          {"reliability", optional_percent(l.reliability)},
          {"method", to_string(l.method)}};
}

json to_json(const CandidateLink& l) {
  return {{"id", link_id(l)},
          {"method", to_string(l.method)},
          {"word", {{"language", l.word.language}, {"lemma", l.word.lemma}, {"pos", to_string(l.word.pos)}}},
          {"pivot_word", l.pivot_word ? json(l.pivot_word->lemma) : json(nullptr)},
          {"synset", l.synset.key},
          {"witnesses", l.witnesses},
          {"status", to_string(l.status)}};
}

json to_json(const EditRecord& r) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  return {{"seq", r.seq},
          {"timestamp", format_timestamp(r.timestamp)},
          {"actor", r.actor},
          {"action", to_string(r.action)},
          {"subject", r.subject},
          {"version", r.version},
          {"before", opt(r.before)},
          {"after", opt(r.after)}};
}

json to_json(const MethodStats& row) {
  return {{"method", to_string(row.method)},
          {"links", row.links},
          {"synsets", row.synsets},
          {"words", row.words},
          {"confidence", optional_percent(row.confidence)}};
}

json to_json(const ValidationSample& sample, const KnowledgeBase& kb) {
  json links = json::array();
  for (const auto& id : sample.links) {
    auto link = kb.links.find(id);
    auto verdict = sample.verdicts.find(id);
    links.push_back({{"link", link != kb.links.end() ? to_json(link->second) : json({{"id", id}})},
                     {"verdict", verdict != sample.verdicts.end() ? json(to_string(verdict->second)) : json(nullptr)}});
  }
  const SampleTally t = tally(sample);
  std::optional<Percent> confidence;
  if (t.judged == sample.links.size()) confidence = extrapolate_confidence(sample);
  return {{"method", to_string(sample.method)},
          {"seed", sample.seed},
          {"population", sample.population},
          {"size", sample.links.size()},
          {"judged", t.judged},
          {"correct", t.correct},
          {"confidence", optional_percent(confidence)},
          {"links", links}};
}

json error_body(std::string_view code, std::string_view message) {
  return {{"error", code}, {"message", message}};
}

void send(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw BadRequest("request body must be a JSON object");
  return body;
}

std::string required_string(const json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || !it->is_string()) throw BadRequest(std::string("'") + field + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw BadRequest(std::string("'") + field + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::uint64_t> optional_unsigned(const json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw BadRequest(std::string("'") + field + "' must be a non-negative integer");
  return it->get<std::uint64_t>();
}

std::optional<Percent> optional_threshold(const json& body) {
  auto it = body.find("threshold");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return Percent::parse(it->get<std::string>());
  if (it->is_number()) {
    const double v = it->get<double>();
    if (!(v >= 0 && v <= 100)) throw BadRequest("'threshold' must be within 0..100");
    return Percent::from_tenths(std::llround(v * 10));
  }
  throw BadRequest("'threshold' must be a number or a string");
}

std::size_t query_size(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t n = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc() || end != v.data() + v.size()) throw BadRequest(std::string("'") + name + "' must be an integer");
  return n;
}

std::optional<std::string> query_string(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::string non_pivot_language(const KnowledgeBase& kb, const json& body) {
  if (auto lang = optional_string(body, "language")) return *lang;
  std::optional<std::string> found;
  for (const auto& l : kb.languages.all()) {
    if (l.pivot) continue;
    if (found) throw BadRequest("several target languages registered; give 'language'");
    found = l.code;
  }
  if (!found) throw Error(ErrorCode::UnknownLanguage, "no target language registered");
  return *found;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownEntity:
    case ErrorCode::UnknownLanguage:
    case ErrorCode::UnknownResource:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::VersionConflict:
      return 409;
    case ErrorCode::StoreCorrupt:
    case ErrorCode::IoError:
    case ErrorCode::BindError:
    case ErrorCode::ResourceUnreadable:
      return 500;
    default:
      return 422;
  }
}

struct Service::Impl {
  Store& store;
  ResourceRegistry resources;
  ServiceConfig config;
  httplib::Server server;
  std::mutex lifecycle;
  bool listening = false;
  bool stopping = false;

  Impl(Store& s, ResourceRegistry r, ServiceConfig c) : store(s), resources(std::move(r)), config(std::move(c)) {}

  static std::string actor(const httplib::Request& req) { return req.get_header_value("X-Actor"); }

  // Runs fn and turns exceptions into JSON error responses.
  template <typename Fn>
  static httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send(res, error_body(to_string(e.code()), e.what()), http_status(e.code()));
      } catch (const BadRequest& e) {
        send(res, error_body("BadRequest", e.what()), 400);
      } catch (const std::exception& e) {
        send(res, error_body("Internal", e.what()), 500);
      }
    };
  }

  void routes() {
    // No SO_REUSEPORT: a second service on the same port must fail to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    server.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      const bool mutating = req.method == "POST" || req.method == "PUT" || req.method == "PATCH" || req.method == "DELETE";
      if (mutating && req.path.starts_with("/api/") && actor(req).empty()) {
        send(res, error_body("MissingActor", "mutating requests need an X-Actor header"), 400);
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get("/api/languages", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& l : store.snapshot()->languages.all()) out.push_back({{"code", l.code}, {"pivot", l.pivot}});
      send(res, {{"languages", out}});
    }));

    server.Get(R"(/api/synsets/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Snapshot kb = store.snapshot();
      const std::string key = req.matches[1];
      const Synset* s = kb->find_synset(key);
      if (!s) throw Error(ErrorCode::UnknownEntity, "no synset " + key);
      json glosses = json::array();
      for (const auto& l : kb->languages.all()) {
        if (l.pivot) continue;
        auto g = kb->glosses.find({l.code, key});
        glosses.push_back({{"language", l.code},
                           {"text", g != kb->glosses.end() ? json(g->second) : json(nullptr)},
                           {"version", kb->version(entity::gloss(l.code, key))}});
      }
      json literals = json::array();
      for (const auto& lit : literals_of(*kb, key)) {
        json j = to_json(lit);
        j["pivot"] = kb->languages.is_pivot(lit.language);
        j["version"] = kb->version(entity::sense(lit.language, key, lit.lemma));
        literals.push_back(j);
      }
      json relations = json::array();
      for (const auto& r : kb->relations) {
        if (r.source == s->id) relations.push_back({{"kind", to_string(r.kind)}, {"target", r.target.key}});
      }
      send(res, {{"synset", to_json(*s)},
                 {"base_concept", kb->base_concepts.contains(key)},
                 {"glosses", glosses},
                 {"literals", literals},
                 {"relations", relations}});
    }));

    server.Get("/api/consult", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Snapshot kb = store.snapshot();
      const auto lang = query_string(req, "lang");
      const auto start = query_string(req, "start");
      if (!lang || !start) throw BadRequest("'lang' and 'start' are required");
      const std::string relation = query_string(req, "relation").value_or("hypernymy");
      const RelationKind kind = parse_relation_kind(relation);
      const std::size_t depth = query_size(req, "depth", 3);
      json results = json::array();
      for (const auto& origin : resolve_start(*kb, *lang, *start)) {
        json nodes = json::array();
        for (const auto& node : traverse(*kb, origin, kind, depth)) {
          json literals = json::array();
          for (const auto& l : node.literals) literals.push_back(to_json(l));
          nodes.push_back({{"synset", to_json(*kb->find_synset(node.synset.key))},
                           {"depth", node.depth},
                           {"parent", node.parent ? json(*node.parent) : json(nullptr)},
                           {"base_concept", kb->base_concepts.contains(node.synset.key)},
                           {"literals", literals}});
        }
        results.push_back({{"origin", origin.key}, {"nodes", nodes}});
      }
      send(res, {{"lang", *lang}, {"start", *start}, {"relation", relation}, {"depth", depth}, {"results", results}});
    }));

    server.Get("/api/resources", guarded([this](const httplib::Request&, httplib::Response& res) {
      send(res, {{"resources", resources.ids()}});
    }));

    server.Get(R"(/api/resources/([^/]+)/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const std::string headword = req.matches[2];
      send(res, {{"resource", id}, {"headword", headword}, {"entries", resources.lookup(id, headword)}});
    }));

    server.Get("/api/report/class-methods", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto rows = workflow::class_method_stats(*store.snapshot());
      const std::string format = query_string(req, "format").value_or("json");
      if (format == "json") {
        json out = json::array();
        for (const auto& row : rows) out.push_back(to_json(row));
        send(res, {{"rows", out}});
        return;
      }
      res.set_content(table_report(rows, parse_report_format(format)), "text/plain; charset=utf-8");
    }));

    server.Get("/api/history", guarded([this](const httplib::Request& req, httplib::Response& res) {
      HistoryFilter filter;
      filter.actor = query_string(req, "actor");
      if (auto a = query_string(req, "action")) filter.action = parse_edit_action(*a);
      filter.subject = query_string(req, "subject");
      if (auto f = query_string(req, "from")) filter.from = parse_timestamp(*f);
      if (auto t = query_string(req, "to")) filter.to = parse_timestamp(*t);
      const std::size_t offset = query_size(req, "offset", 0);
      const std::size_t limit = query_size(req, "limit", config.default_limit);
      const auto records = store.history(filter);
      json out = json::array();
      for (std::size_t i = offset; i < records.size() && i - offset < limit; ++i) out.push_back(to_json(records[i]));
      send(res, {{"total", records.size()}, {"offset", offset}, {"limit", limit}, {"records", out}});
    }));

    server.Get(R"(/api/validate/samples/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Snapshot kb = store.snapshot();
      const Method method = parse_method(std::string(req.matches[1]));
      auto it = kb->samples.find(method);
      if (it == kb->samples.end()) throw Error(ErrorCode::NotFound, "no sample for " + std::string(to_string(method)));
      send(res, to_json(it->second, *kb));
    }));

    server.Post("/api/links/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const Snapshot kb = store.snapshot();
      const std::string language = non_pivot_language(*kb, body);
      if (!kb->languages.contains(language)) throw Error(ErrorCode::UnknownLanguage, "language '" + language + "' is not registered");
      const Pos pos = parse_pos(optional_string(body, "pos").value_or("noun"));
      std::vector<BilingualEntry> entries;
      if (auto tsv = optional_string(body, "bilingual")) {
        entries = parse_bilingual(*tsv, language, kb->languages.pivot(), pos, "<request>").entries;
      } else if (auto it = body.find("pairs"); it != body.end() && it->is_array()) {
        std::string tsv;
        for (const auto& p : *it) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
            throw BadRequest("'pairs' must hold [source, pivot] string pairs");
          }
          tsv += p[0].get<std::string>() + "\t" + p[1].get<std::string>() + "\n";
        }
        entries = parse_bilingual(tsv, language, kb->languages.pivot(), pos, "<request>").entries;
      } else {
        throw BadRequest("give 'bilingual' (TSV text) or 'pairs'");
      }
      const auto links = workflow::generate_links(store, actor(req), entries);
      json out = json::array();
      json counts = json::object();
      for (Method m : class_methods()) counts[std::string(to_string(m))] = 0;
      for (const auto& l : links) {
        out.push_back(to_json(l));
        counts[std::string(to_string(l.method))] = counts[std::string(to_string(l.method))].get<std::size_t>() + 1;
      }
      send(res, {{"language", language}, {"counts", counts}, {"links", out}});
    }));

    server.Post("/api/verbs/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const std::string language = non_pivot_language(*store.snapshot(), body);
      json out = json::array();
      for (const auto& c : workflow::generate_verb_links(store, actor(req), language)) {
        out.push_back({{"id", link_id(to_candidate_link(c))},
                       {"target_verb", c.target_verb.lemma},
                       {"synset", c.synset.key},
                       {"english_verb", c.english_verb.lemma},
                       {"levin_class", c.levin_class}});
      }
      send(res, {{"language", language}, {"candidates", out}});
    }));

    server.Post("/api/validate/samples", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const Method method = parse_method(required_string(body, "method"));
      const auto size = optional_unsigned(body, "size");
      const auto seed = optional_unsigned(body, "seed");
      if (!seed) throw BadRequest("'seed' is required");
      const ValidationSample sample = workflow::create_sample(store, actor(req), method, size, *seed);
      send(res, to_json(sample, *store.snapshot()));
    }));

    server.Post("/api/validate/verdicts", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const std::string link = required_string(body, "link");
      const Verdict verdict = parse_verdict(required_string(body, "verdict"));
      const EditRecord record = workflow::record_link_verdict(store, actor(req), link, verdict);
      const Snapshot kb = store.snapshot();
      const Method method = kb->links.at(link).method;
      send(res, {{"record", to_json(record)}, {"sample", to_json(kb->samples.at(method), *kb)}});
    }));

    server.Post("/api/promote", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const Percent threshold = optional_threshold(body).value_or(kDefaultPromotionThreshold);
      const PromotionResult result = workflow::promote_methods(store, actor(req), threshold);
      json promoted = json::array(), rejected = json::array();
      for (Method m : result.promoted) promoted.push_back(to_string(m));
      for (Method m : result.rejected) rejected.push_back(to_string(m));
      send(res, {{"threshold", threshold.str()}, {"promoted", promoted}, {"rejected", rejected}});
    }));

    server.Put(R"(/api/edits/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      EditRequest edit;
      edit.actor = actor(req);
      edit.subject = req.matches[1];
      edit.action = parse_edit_action(required_string(body, "action"));
      edit.value = optional_string(body, "value");
      const EditRecord record = store.apply_edit(edit, optional_unsigned(body, "expected_version"));
      send(res, {{"record", to_json(record)}});
    }));

    if (config.static_dir) {
      if (!server.set_mount_point("/", config.static_dir->string())) {
        throw Error(ErrorCode::IoError, "static directory " + config.static_dir->string() + " is not readable");
      }
    }
  }
};

Service::Service(Store& store, ResourceRegistry resources, ServiceConfig config)
    : impl_(std::make_unique<Impl>(store, std::move(resources), std::move(config))) {
  impl_->routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  const int port = impl_->config.port == 0 ? impl_->server.bind_to_any_port(impl_->config.host)
                                           : (impl_->server.bind_to_port(impl_->config.host, impl_->config.port)
                                                  ? impl_->config.port
                                                  : -1);
  if (port < 0) {
    throw Error(ErrorCode::BindError,
                "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return port;
}

void Service::run() {
  {
    std::lock_guard lock(impl_->lifecycle);
    if (impl_->stopping) return;
    impl_->listening = true;
  }
  impl_->server.listen_after_bind();
  impl_->store.checkpoint();
}

void Service::stop() {
  bool listening = false;
  {
    std::lock_guard lock(impl_->lifecycle);
    impl_->stopping = true;
    listening = impl_->listening;
  }
  if (!listening) return;
  impl_->server.wait_until_ready();
  impl_->server.stop();
}

}  // namespace wnforge
