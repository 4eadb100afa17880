// wnforge: command-line front end for building and consulting a
// multilingual lexical knowledge base.

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "wnforge/error.hpp"
#include "wnforge/query.hpp"
#include "wnforge/service.hpp"
#include "wnforge/text.hpp"
#include "wnforge/workflow.hpp"

using namespace wnforge;

namespace {

struct Globals {
  std::string store_dir = "wnforge-store";
  std::string actor;
  bool no_sync = false;
};

std::unique_ptr<Store> open_store(const Globals& g) {
  std::string dir = g.store_dir;
  if (const char* env = std::getenv("WNFORGE_STORE"); env && *env) dir = env;
  return std::make_unique<Store>(dir, StoreOptions{!g.no_sync, {}});
}

std::string actor_of(const Globals& g) {
  if (!g.actor.empty()) return g.actor;
  if (const char* user = std::getenv("USER"); user && *user) return user;
  return "cli";
}

void emit(const std::string& content, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    text::write_file(out, content);
  }
}

std::string describe(const CandidateLink& l) {
  std::string s = std::string(to_string(l.method)) + "\t" + l.word.lemma + "\t" +
                  (l.pivot_word ? l.pivot_word->lemma : "-") + "\t" + l.synset.key;
  if (!l.witnesses.empty()) s += "\t" + text::join(l.witnesses, ',');
  return s;
}

std::string target_language(const KnowledgeBase& kb, const std::string& given) {
  if (!given.empty()) return given;
  for (const auto& l : kb.languages.all()) {
    if (!l.pivot) return l.code;
  }
  throw Error(ErrorCode::UnknownLanguage, "no target language registered; pass --lang");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, validate and consult a multilingual wordnet"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store_dir, "Store directory (WNFORGE_STORE overrides)");
  app.add_option("--actor", g.actor, "Actor recorded in the edit history (default $USER)");
  app.add_flag("--no-sync", g.no_sync, "Skip fdatasync on commit");

  std::function<void()> action;

  // init
  auto* init = app.add_subcommand("init", "Register the pivot and target languages");
  std::string pivot = "en";
  std::vector<std::string> langs;
  init->add_option("--pivot", pivot, "Pivot language code");
  init->add_option("--lang", langs, "Target language code (repeatable)")->required();
  init->callback([&] {
    action = [&] {
      auto store = open_store(g);
      workflow::register_languages(*store, actor_of(g), pivot, langs);
    };
  });

  // import
  auto* import = app.add_subcommand("import", "Load input files into the store");
  import->require_subcommand(1);
  std::string file, verbs_file, senses_file, lang;
  auto* imp_synsets = import->add_subcommand("synsets", "Pivot synsets and relations");
  imp_synsets->add_option("file", file)->required()->check(CLI::ExistingFile);
  imp_synsets->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const std::string pivot_lang = store->snapshot()->languages.pivot();
      const auto parsed = load_synsets(file, pivot_lang);
      workflow::import_fragment(*store, actor_of(g), "synsets", kb_fragment_synsets(parsed));
      std::cout << parsed.synsets.size() << " synsets, " << parsed.relations.size() << " relations\n";
    };
  });
  auto* imp_senses = import->add_subcommand("senses", "Pivot word-synset pairs");
  imp_senses->add_option("file", file)->required()->check(CLI::ExistingFile);
  imp_senses->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const Snapshot kb = store->snapshot();
      const SynsetIndex index = workflow::synset_index(*kb);
      const auto parsed = load_pivot_senses(file, kb->languages.pivot(), &index);
      for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
      workflow::import_fragment(*store, actor_of(g), "senses", kb_fragment_pivot_senses(parsed.entries));
      std::cout << parsed.entries.size() << " pivot senses\n";
    };
  });
  auto* imp_levin = import->add_subcommand("levin", "Levin verb lists");
  imp_levin->add_option("--verbs", verbs_file)->required()->check(CLI::ExistingFile);
  imp_levin->add_option("--senses", senses_file)->required()->check(CLI::ExistingFile);
  imp_levin->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const Snapshot kb = store->snapshot();
      const SynsetIndex index = workflow::synset_index(*kb);
      const auto lists = load_levin_lists(verbs_file, senses_file, kb->languages.pivot(), &index);
      for (const auto& w : lists.warnings) std::cerr << "warning: " << w << "\n";
      workflow::import_fragment(*store, actor_of(g), "levin", kb_fragment_levin(lists.verbs, lists.senses));
      std::cout << lists.verbs.size() << " verbs, " << lists.senses.size() << " verb senses\n";
    };
  });
  auto* imp_links = import->add_subcommand("links", "Candidate links TSV");
  imp_links->add_option("file", file)->required()->check(CLI::ExistingFile);
  imp_links->add_option("--lang", lang, "Language of the linked words");
  imp_links->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const Snapshot kb = store->snapshot();
      const SynsetIndex index = workflow::synset_index(*kb);
      const auto links = read_links_tsv(text::read_file(file), target_language(*kb, lang), kb->languages.pivot(),
                                        &index, Pos::noun, file);
      workflow::import_fragment(*store, actor_of(g), "links", kb_fragment_links(links));
      std::cout << links.size() << " links\n";
    };
  });
  auto* imp_export = import->add_subcommand("export", "A monolingual export");
  imp_export->add_option("file", file)->required()->check(CLI::ExistingFile);
  imp_export->add_option("--lang", lang, "Language of the export")->required();
  imp_export->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const std::string pivot_lang = store->snapshot()->languages.pivot_if_any().value_or("en");
      workflow::import_fragment(*store, actor_of(g), "export-" + lang,
                                monolingual_import_fragment(text::read_file(file), lang, pivot_lang, file));
    };
  });

  // links generate
  auto* links = app.add_subcommand("links", "Class-method link generation");
  links->require_subcommand(1);
  auto* links_gen = links->add_subcommand("generate", "Generate the nine class-method link sets");
  std::string bilingual, out, pos_name = "noun", pivot_opt;
  bool do_import = false;
  links_gen->add_option("--bilingual", bilingual, "Bilingual dictionary TSV")->required()->check(CLI::ExistingFile);
  links_gen->add_option("--senses", senses_file,
                        "Pivot word-synset TSV; without it the store's pivot senses are used and the links imported")
      ->check(CLI::ExistingFile);
  links_gen->add_option("--lang", lang, "Source language of the dictionary");
  links_gen->add_option("--pivot", pivot_opt, "Pivot language when running without a store");
  links_gen->add_option("--pos", pos_name, "Part of speech of the dictionary entries");
  links_gen->add_option("--out", out, "Output TSV (default stdout)");
  links_gen->add_flag("--import", do_import, "Also import the generated links (with --senses)");
  links_gen->callback([&] {
    action = [&] {
      const Pos pos = parse_pos(pos_name);
      std::vector<CandidateLink> generated;
      if (!senses_file.empty() && !do_import) {
        const std::string pivot_lang = pivot_opt.empty() ? "en" : pivot_opt;
        const std::string source_lang = lang.empty() ? "ca" : lang;
        const auto dict = load_bilingual(bilingual, source_lang, pivot_lang, pos);
        const auto senses = load_pivot_senses(senses_file, pivot_lang, nullptr, pos);
        generated = generate_links(TranslationGraph(dict.entries), senses.entries);
      } else {
        auto store = open_store(g);
        const Snapshot kb = store->snapshot();
        const std::string source_lang = target_language(*kb, lang);
        const auto dict = load_bilingual(bilingual, source_lang, kb->languages.pivot(), pos);
        if (senses_file.empty()) {
          generated = workflow::generate_links(*store, actor_of(g), dict.entries);
        } else {
          const SynsetIndex index = workflow::synset_index(*kb);
          const auto senses = load_pivot_senses(senses_file, kb->languages.pivot(), &index, pos);
          generated = generate_links(TranslationGraph(dict.entries), senses.entries);
          workflow::import_fragment(*store, actor_of(g), "links", kb_fragment_links(generated));
        }
      }
      emit(write_links_tsv(generated), out);
    };
  });

  // verbs generate
  auto* verbs = app.add_subcommand("verbs", "Levin-class verb linking");
  verbs->require_subcommand(1);
  auto* verbs_gen = verbs->add_subcommand("generate", "Join translated Levin verbs with verb synsets");
  verbs_gen->add_option("--verbs", verbs_file, "Levin verbs TSV (without it the stored lists are used)")
      ->check(CLI::ExistingFile);
  verbs_gen->add_option("--senses", senses_file, "Levin senses TSV")->check(CLI::ExistingFile);
  verbs_gen->add_option("--lang", lang, "Target language")->required();
  verbs_gen->add_option("--pivot", pivot_opt, "Pivot language when running without a store");
  verbs_gen->add_option("--out", out, "Output TSV (default stdout)");
  verbs_gen->add_flag("--import", do_import, "Also import the candidates");
  verbs_gen->callback([&] {
    action = [&] {
      std::vector<VerbCandidate> candidates;
      if (!verbs_file.empty()) {
        if (senses_file.empty()) throw CLI::ValidationError("--verbs needs --senses");
        const std::string pivot_lang = pivot_opt.empty() ? "en" : pivot_opt;
        const auto lists = load_levin_lists(verbs_file, senses_file, pivot_lang, nullptr);
        candidates = generate_verb_links(lists.verbs, lists.senses, lang);
        if (do_import) {
          auto store = open_store(g);
          std::vector<CandidateLink> converted;
          for (const auto& c : candidates) converted.push_back(to_candidate_link(c));
          workflow::import_fragment(*store, actor_of(g), "verb-links", kb_fragment_links(converted));
        }
      } else {
        auto store = open_store(g);
        candidates = workflow::generate_verb_links(*store, actor_of(g), lang);
      }
      std::vector<CandidateLink> converted;
      for (const auto& c : candidates) converted.push_back(to_candidate_link(c));
      emit(write_links_tsv(converted), out);
    };
  });

  // validate
  auto* validate = app.add_subcommand("validate", "Sample-based link validation");
  validate->require_subcommand(1);
  std::string method_name, link;
  std::optional<std::size_t> size;
  std::uint64_t seed = 0;
  auto* v_sample = validate->add_subcommand("sample", "Draw a validation sample for one method");
  v_sample->add_option("--method", method_name)->required();
  v_sample->add_option("--size", size, "Sample size (default max(30, 3%) capped at the set size)");
  v_sample->add_option("--seed", seed)->required();
  v_sample->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const auto sample = workflow::create_sample(*store, actor_of(g), parse_method(method_name), size, seed);
      const Snapshot kb = store->snapshot();
      for (const auto& id : sample.links) std::cout << id << "\t" << describe(kb->links.at(id)) << "\n";
    };
  });
  auto* v_verdict = validate->add_subcommand("verdict", "Judge one sampled link");
  v_verdict->add_option("--link", link)->required();
  auto* correct = v_verdict->add_flag("--correct");
  auto* incorrect = v_verdict->add_flag("--incorrect");
  correct->excludes(incorrect);
  v_verdict->callback([&] {
    if (!*correct && !*incorrect) throw CLI::RequiredError("--correct or --incorrect");
    action = [&] {
      auto store = open_store(g);
      workflow::record_link_verdict(*store, actor_of(g), link, *correct ? Verdict::correct : Verdict::incorrect);
      const Snapshot kb = store->snapshot();
      const auto& sample = kb->samples.at(kb->links.at(link).method);
      const SampleTally t = tally(sample);
      std::cout << t.judged << "/" << sample.links.size() << " judged, " << t.correct << " correct\n";
    };
  });
  auto* v_show = validate->add_subcommand("show", "Print a method's sample and verdicts");
  v_show->add_option("--method", method_name)->required();
  v_show->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const Snapshot kb = store->snapshot();
      const Method m = parse_method(method_name);
      auto it = kb->samples.find(m);
      if (it == kb->samples.end()) throw Error(ErrorCode::NotFound, "no sample for " + method_name);
      std::cout << workflow::render_sample(it->second);
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Statistics");
  report->require_subcommand(1);
  std::string format = "tsv";
  auto* r_methods = report->add_subcommand("class-methods", "Links, synsets, words and confidence per method");
  r_methods->add_option("--format", format)->check(CLI::IsMember({"tsv", "markdown"}));
  r_methods->callback([&] {
    action = [&] {
      auto store = open_store(g);
      std::cout << table_report(workflow::class_method_stats(*store->snapshot()), parse_report_format(format));
    };
  });

  // promote
  auto* promote_cmd = app.add_subcommand("promote", "Accept the links of methods at or above the threshold");
  std::string threshold = kDefaultPromotionThreshold.str();
  promote_cmd->add_option("--threshold", threshold);
  promote_cmd->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const auto result = workflow::promote_methods(*store, actor_of(g), Percent::parse(threshold));
      for (Method m : result.promoted) std::cout << "promoted\t" << to_string(m) << "\n";
      for (Method m : result.rejected) std::cout << "rejected\t" << to_string(m) << "\n";
    };
  });

  // consult
  auto* consult = app.add_subcommand("consult", "Walk a relation from a word or synset");
  std::string start, relation = "hypernymy";
  std::size_t depth = 3;
  consult->add_option("--lang", lang)->required();
  consult->add_option("--start", start, "Synset key, lemma or lemma#k")->required();
  consult->add_option("--relation", relation);
  consult->add_option("--depth", depth);
  consult->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const Snapshot kb = store->snapshot();
      const RelationKind kind = parse_relation_kind(relation);
      for (const auto& origin : resolve_start(*kb, lang, start)) {
        std::cout << render_tree(*kb, traverse(*kb, origin, kind, depth));
      }
    };
  });

  // check base
  auto* check = app.add_subcommand("check", "Consistency checks");
  check->require_subcommand(1);
  auto* check_base = check->add_subcommand("base", "Synsets that cannot reach a base concept");
  check_base->add_option("--pos", pos_name);
  int check_status = 0;
  check_base->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const auto orphans = check_base_connectivity(*store->snapshot(), parse_pos(pos_name));
      for (const auto& id : orphans) std::cout << id.key << "\n";
      if (!orphans.empty()) check_status = 3;
    };
  });

  // export
  auto* export_cmd = app.add_subcommand("export", "Monolingual export of accepted senses");
  export_cmd->add_option("--lang", lang)->required();
  export_cmd->add_option("--out", out);
  export_cmd->callback([&] {
    action = [&] {
      auto store = open_store(g);
      emit(workflow::export_language(*store, actor_of(g), lang), out);
    };
  });

  // history
  auto* history = app.add_subcommand("history", "Print edit records");
  std::string f_actor, f_action, f_subject, f_from, f_to;
  history->add_option("--actor", f_actor);
  history->add_option("--action", f_action);
  history->add_option("--subject", f_subject);
  history->add_option("--from", f_from, "Inclusive lower bound, 2024-01-31T12:00:00.000Z");
  history->add_option("--to", f_to, "Inclusive upper bound");
  history->callback([&] {
    action = [&] {
      HistoryFilter filter;
      if (!f_actor.empty()) filter.actor = f_actor;
      if (!f_action.empty()) filter.action = parse_edit_action(f_action);
      if (!f_subject.empty()) filter.subject = f_subject;
      if (!f_from.empty()) filter.from = parse_timestamp(f_from);
      if (!f_to.empty()) filter.to = parse_timestamp(f_to);
      auto store = open_store(g);
      for (const auto& r : store->history(filter)) {
        std::cout << r.seq << "\t" << format_timestamp(r.timestamp) << "\t" << r.actor << "\t" << to_string(r.action)
                  << "\t" << r.subject << "\tv" << r.version << "\n";
      }
    };
  });

  // edit
  auto* edit = app.add_subcommand("edit", "Apply one edit to an entity");
  std::string entity_id, edit_action;
  std::optional<std::string> value;
  std::optional<std::uint64_t> expected;
  edit->add_option("entity", entity_id, "Entity id, e.g. gloss/ca/S1")->required();
  edit->add_option("--action", edit_action)->required();
  edit->add_option("--value", value);
  edit->add_option("--expected-version", expected);
  edit->callback([&] {
    action = [&] {
      auto store = open_store(g);
      const auto r = store->apply_edit({actor_of(g), parse_edit_action(edit_action), entity_id, value}, expected);
      std::cout << r.subject << " v" << r.version << "\n";
    };
  });

  // resource
  auto* resource = app.add_subcommand("resource", "Look up a headword in a registered text resource");
  std::string resources_file, resource_id, headword;
  resource->add_option("--resources", resources_file)->required()->check(CLI::ExistingFile);
  resource->add_option("id", resource_id)->required();
  resource->add_option("headword", headword)->required();
  resource->callback([&] {
    action = [&] {
      for (const auto& line : ResourceRegistry::load(resources_file).lookup(resource_id, headword)) {
        std::cout << line << "\n";
      }
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  ServiceConfig config;
  std::string static_dir;
  serve->add_option("--host", config.host);
  serve->add_option("--port", config.port);
  serve->add_option("--resources", resources_file)->check(CLI::ExistingFile);
  serve->add_option("--static", static_dir, "Console assets served at /")->check(CLI::ExistingDirectory);
  serve->callback([&] {
    action = [&] {
      auto store = open_store(g);
      if (!static_dir.empty()) config.static_dir = static_dir;
      Service service(*store, resources_file.empty() ? ResourceRegistry{} : ResourceRegistry::load(resources_file),
                      config);
      const int port = service.bind();
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      sigaddset(&signals, SIGUSR1);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);
      std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
      });
      std::cout << "listening on http://" << config.host << ":" << port << std::endl;
      service.run();
      pthread_kill(watcher.native_handle(), SIGUSR1);
      watcher.join();
    };
  });

  auto* checkpoint = app.add_subcommand("checkpoint", "Write kb.tsv from the current state");
  checkpoint->callback([&] { action = [&] { open_store(g)->checkpoint(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (action) action();
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return check_status;
}
