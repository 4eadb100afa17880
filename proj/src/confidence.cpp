#include "wnforge/confidence.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "wnforge/error.hpp"

namespace wnforge {

namespace {

// Unbiased draw from [0, bound) by rejection. std::uniform_int_distribution
// is implementation-defined, which would make samples differ across
// standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::size_t report_rank(Method method) {
  const auto& order = class_methods();
  auto it = std::find(order.begin(), order.end(), method);
  return it == order.end() ? order.size() + static_cast<std::size_t>(method)
                           : static_cast<std::size_t>(it - order.begin());
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::correct ? "correct" : "incorrect";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "correct") return Verdict::correct;
  if (text == "incorrect") return Verdict::incorrect;
  throw Error(ErrorCode::ParseError, "unknown verdict '" + std::string(text) + "'");
}

bool ValidationSample::contains(std::string_view link) const {
  return std::find(links.begin(), links.end(), link) != links.end();
}

std::size_t default_sample_size(std::size_t set_size) {
  const std::size_t three_percent = (set_size * 3 + 99) / 100;
  return std::min(set_size, std::max<std::size_t>(30, three_percent));
}

ValidationSample draw_sample(Method method, std::vector<std::string> link_ids, std::size_t size,
                             std::uint64_t seed) {
  std::sort(link_ids.begin(), link_ids.end());
  link_ids.erase(std::unique(link_ids.begin(), link_ids.end()), link_ids.end());
  if (size == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  if (size > link_ids.size()) {
    throw Error(ErrorCode::SampleTooLarge, "requested " + std::to_string(size) + " of " +
                                               std::to_string(link_ids.size()) + " " +
                                               std::string(to_string(method)) + " links");
  }
  ValidationSample sample;
  sample.method = method;
  sample.seed = seed;
  sample.population = link_ids.size();
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `size` slots become the sample.
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + uniform_below(rng, link_ids.size() - i);
    std::swap(link_ids[i], link_ids[j]);
  }
  link_ids.resize(size);
  sample.links = std::move(link_ids);
  return sample;
}

ValidationSample draw_sample(const std::vector<CandidateLink>& links_of_method, std::size_t size,
                             std::uint64_t seed) {
  if (links_of_method.empty()) throw Error(ErrorCode::SampleTooLarge, "empty link set");
  const Method method = links_of_method.front().method;
  std::vector<std::string> ids;
  ids.reserve(links_of_method.size());
  for (const auto& link : links_of_method) {
    if (link.method != method) {
      throw Error(ErrorCode::InvalidArgument, "sample input mixes methods");
    }
    ids.push_back(link_id(link));
  }
  return draw_sample(method, std::move(ids), size, seed);
}

ValidationSample record_verdict(ValidationSample sample, const std::string& link, Verdict verdict) {
  if (!sample.contains(link)) {
    throw Error(ErrorCode::NotInSample,
                "link " + link + " is not in the " + std::string(to_string(sample.method)) + " sample");
  }
  sample.verdicts[link] = verdict;
  return sample;
}

SampleTally tally(const ValidationSample& sample) {
  SampleTally t;
  for (const auto& [link, verdict] : sample.verdicts) {
    ++t.judged;
    if (verdict == Verdict::correct) ++t.correct;
  }
  return t;
}

std::vector<std::string> missing_verdicts(const ValidationSample& sample) {
  std::vector<std::string> missing;
  for (const auto& link : sample.links) {
    if (!sample.verdicts.count(link)) missing.push_back(link);
  }
  return missing;
}

Percent extrapolate_confidence(const ValidationSample& sample) {
  const auto missing = missing_verdicts(sample);
  if (!missing.empty() || sample.links.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    throw Error(ErrorCode::IncompleteSample, std::string(to_string(sample.method)) + ": " +
                                                 std::to_string(missing.size()) +
                                                 " link(s) without verdict: " + list);
  }
  const auto t = tally(sample);
  return Percent::from_ratio(t.correct, sample.links.size());
}

std::vector<MethodStats> compute_method_stats(const std::vector<CandidateLink>& links,
                                              const std::map<Method, ValidationSample>& samples) {
  std::vector<MethodStats> rows;
  for (Method method : class_methods()) {
    MethodStats row;
    row.method = method;
    std::set<SynsetId> synsets;
    std::set<WordForm> words;
    for (const auto& link : links) {
      if (link.method != method) continue;
      ++row.links;
      synsets.insert(link.synset);
      words.insert({link.word.language, link.word.lemma, Pos::noun});
    }
    row.synsets = synsets.size();
    row.words = words.size();
    if (auto it = samples.find(method); it != samples.end()) {
      const auto t = tally(it->second);
      if (t.judged > 0) row.confidence = Percent::from_ratio(t.correct, t.judged);
    }
    rows.push_back(row);
  }
  return rows;
}

PromotionResult promote(const std::vector<MethodStats>& stats, Percent threshold) {
  PromotionResult result;
  for (const auto& row : stats) {
    if (!row.confidence) {
      throw Error(ErrorCode::MissingConfidence,
                  "method " + std::string(to_string(row.method)) + " has no confidence");
    }
    (*row.confidence >= threshold ? result.promoted : result.rejected).push_back(row.method);
  }
  return result;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "tsv") return ReportFormat::tsv;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(text) + "'");
}

std::string table_report(const std::vector<MethodStats>& rows, ReportFormat format) {
  std::vector<const MethodStats*> ordered;
  for (const auto& row : rows) ordered.push_back(&row);
  std::stable_sort(ordered.begin(), ordered.end(), [](const MethodStats* a, const MethodStats* b) {
    return report_rank(a->method) < report_rank(b->method);
  });

  auto cells = [](const MethodStats& row) {
    return std::vector<std::string>{std::string(to_string(row.method)), std::to_string(row.links),
                                    std::to_string(row.synsets), std::to_string(row.words),
                                    row.confidence ? row.confidence->str() : "-"};
  };
  const std::vector<std::string> header = {"Criteria", "#links", "#synsets", "#words", "%"};

  std::string out;
  if (format == ReportFormat::tsv) {
    auto line = [&](const std::vector<std::string>& c) {
      out += c[0] + "\t" + c[1] + "\t" + c[2] + "\t" + c[3] + "\t" + c[4] + "\n";
    };
    line(header);
    for (const auto* row : ordered) line(cells(*row));
    return out;
  }
  auto line = [&](const std::vector<std::string>& c) {
    out += "| " + c[0] + " | " + c[1] + " | " + c[2] + " | " + c[3] + " | " + c[4] + " |\n";
  };
  line(header);
  out += "|---|---:|---:|---:|---:|\n";
  for (const auto* row : ordered) line(cells(*row));
  return out;
}

}  // namespace wnforge
