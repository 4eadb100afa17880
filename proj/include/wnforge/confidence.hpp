#pragma once

// Sample-based reliability estimation for generated link sets: draw a
// uniform sample per method, record hand verdicts, extrapolate the sample
// accuracy to the whole set and promote the sets that clear a threshold.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wnforge/class_methods.hpp"
#include "wnforge/core.hpp"

namespace wnforge {

enum class Verdict { correct, incorrect };

std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view text);

struct ValidationSample {
  Method method = Method::manual;
  std::uint64_t seed = 0;
  std::size_t population = 0;
  // Link ids in draw order.
  std::vector<std::string> links;
  std::map<std::string, Verdict> verdicts;

  bool contains(std::string_view link) const;
  bool operator==(const ValidationSample&) const = default;
};

inline constexpr Percent kDefaultPromotionThreshold = Percent::from_tenths(850);

// min(n, max(30, ceil(3% of n)))
std::size_t default_sample_size(std::size_t set_size);

// Uniform sample without replacement from the sorted, deduplicated id set.
// The same (seed, set) always yields the same sample regardless of input
// order. Throws SampleTooLarge / InvalidArgument for size 0.
ValidationSample draw_sample(Method method, std::vector<std::string> link_ids, std::size_t size,
                             std::uint64_t seed);
ValidationSample draw_sample(const std::vector<CandidateLink>& links_of_method, std::size_t size,
                             std::uint64_t seed);

// Throws NotInSample. Re-recording overwrites the previous verdict.
ValidationSample record_verdict(ValidationSample sample, const std::string& link, Verdict verdict);

struct SampleTally {
  std::size_t correct = 0;
  std::size_t judged = 0;
};

SampleTally tally(const ValidationSample& sample);
std::vector<std::string> missing_verdicts(const ValidationSample& sample);

// 100 * correct / sampled, half-up to one decimal. Throws IncompleteSample.
Percent extrapolate_confidence(const ValidationSample& sample);

struct MethodStats {
  Method method = Method::manual;
  std::size_t links = 0;
  std::size_t synsets = 0;
  std::size_t words = 0;
  std::optional<Percent> confidence;

  bool operator==(const MethodStats&) const = default;
};

// One row per class method (report order) with distinct synset/word counts
// over `links`; confidence from the recorded verdicts of each method's
// sample, absent until at least one verdict exists.
std::vector<MethodStats> compute_method_stats(const std::vector<CandidateLink>& links,
                                              const std::map<Method, ValidationSample>& samples);

struct PromotionResult {
  std::vector<Method> promoted;
  std::vector<Method> rejected;
};

// confidence >= threshold promotes. Throws MissingConfidence.
PromotionResult promote(const std::vector<MethodStats>& stats,
                        Percent threshold = kDefaultPromotionThreshold);

enum class ReportFormat { tsv, markdown };

ReportFormat parse_report_format(std::string_view text);

// Columns Criteria, #links, #synsets, #words, %; rows in report order.
std::string table_report(const std::vector<MethodStats>& rows, ReportFormat format = ReportFormat::tsv);

}  // namespace wnforge
