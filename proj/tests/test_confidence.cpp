#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "wnforge/confidence.hpp"
#include "wnforge/error.hpp"
#include "wnforge/text.hpp"

using namespace wnforge;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("l" + std::to_string(1000 + i));
  return out;
}

std::vector<MethodStats> table1_rows() {
  auto row = [](Method m, std::size_t l, std::size_t s, std::size_t w, const char* pct) {
    return MethodStats{m, l, s, w, Percent::parse(pct)};
  };
  return {row(Method::mono1, 1226, 1212, 1221, "95.9"), row(Method::mono2, 419, 337, 258, "97.6"),
          row(Method::mono3, 448, 208, 396, "93.3"),    row(Method::mono4, 3012, 1532, 2178, "94"),
          row(Method::poly1, 2298, 2244, 864, "90.4"),  row(Method::poly2, 568, 519, 158, "77.9"),
          row(Method::poly3, 1125, 477, 357, "71.7"),   row(Method::poly4, 37714, 9151, 4266, "54.5"),
          row(Method::variant, 2259, 1517, 1516, "96")};
}

ValidationSample judged(std::size_t n, std::size_t correct) {
  auto sample = draw_sample(Method::mono1, ids(n), n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    sample = record_verdict(sample, sample.links[i], i < correct ? Verdict::correct : Verdict::incorrect);
  }
  return sample;
}

}  // namespace

TEST_CASE("sampling basics") {
  const auto all = draw_sample(Method::mono1, ids(5), 5, 42);
  CHECK(std::set<std::string>(all.links.begin(), all.links.end()).size() == 5);
  CHECK(all.population == 5);
  CHECK(draw_sample(Method::mono1, ids(50), 10, 9) == draw_sample(Method::mono1, ids(50), 10, 9));
  CHECK(draw_sample(Method::mono1, ids(50), 10, 9).links != draw_sample(Method::mono1, ids(50), 10, 10).links);
  CHECK(code_of([] { draw_sample(Method::mono1, ids(5), 6, 1); }) == ErrorCode::SampleTooLarge);
  CHECK(code_of([] { draw_sample(Method::mono1, ids(5), 0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sampling ignores input order and duplicates") {
  std::mt19937_64 rng(5);
  auto base = ids(40);
  const auto ref = draw_sample(Method::poly1, base, 12, 77);
  for (int t = 0; t < 20; ++t) {
    auto shuffled = base;
    shuffled.insert(shuffled.end(), base.begin(), base.begin() + 5);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(draw_sample(Method::poly1, shuffled, 12, 77) == ref);
  }
}

TEST_CASE("size-1 draws are uniform over 4 links") {
  std::map<std::string, int> freq;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) freq[draw_sample(Method::mono1, ids(4), 1, seed).links[0]]++;
  REQUIRE(freq.size() == 4);
  for (const auto& [id, n] : freq) {
    CHECK(n >= 2350);
    CHECK(n <= 2650);
  }
}

TEST_CASE("default sample size") {
  CHECK(default_sample_size(5) == 5);
  CHECK(default_sample_size(30) == 30);
  CHECK(default_sample_size(100) == 30);
  CHECK(default_sample_size(1000) == 30);
  CHECK(default_sample_size(1001) == 31);
  CHECK(default_sample_size(37714) == 1132);
}

TEST_CASE("verdicts") {
  auto sample = draw_sample(Method::mono1, ids(10), 10, 3);
  sample = record_verdict(sample, sample.links[0], Verdict::correct);
  CHECK(tally(sample).correct == 1);
  CHECK(tally(sample).judged == 1);
  CHECK(code_of([&] { record_verdict(sample, "lnotthere", Verdict::correct); }) == ErrorCode::NotInSample);
  sample = record_verdict(sample, sample.links[1], Verdict::incorrect);
  sample = record_verdict(sample, sample.links[1], Verdict::correct);
  CHECK(tally(sample).correct == 2);
  CHECK(tally(sample).judged == 2);
  CHECK(missing_verdicts(sample).size() == 8);
  CHECK(code_of([&] { extrapolate_confidence(sample); }) == ErrorCode::IncompleteSample);
}

TEST_CASE("extrapolation arithmetic") {
  CHECK(extrapolate_confidence(judged(10, 9)).str() == "90.0");
  CHECK(extrapolate_confidence(judged(5, 0)).str() == "0.0");
  // 47 of 49 -> 95.918.. -> 95.9 (mono1's Table 1 score)
  CHECK(extrapolate_confidence(judged(49, 47)).str() == "95.9");
}

TEST_CASE("exhaustive samples recover the planted rate exactly") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = oracle::pick(rng, 1, 200);
    const std::size_t correct = oracle::pick(rng, 0, n);
    auto sample = draw_sample(Method::mono2, ids(n), n, rng());
    std::set<std::string> good;
    for (std::size_t i = 0; i < correct; ++i) good.insert(ids(n)[i]);
    const auto drawn = sample.links;
    for (const auto& id : drawn) {
      sample = record_verdict(sample, id, good.contains(id) ? Verdict::correct : Verdict::incorrect);
    }
    REQUIRE(extrapolate_confidence(sample) == Percent::from_ratio(correct, n));
  }
}

TEST_CASE("partial samples concentrate around the planted rate") {
  std::mt19937_64 rng(13);
  int within = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const std::size_t population = 2000;
    const double p = oracle::pick_real(rng, 0.05, 0.95);
    const auto all = ids(population);
    std::set<std::string> good;
    for (const auto& id : all) {
      if (std::bernoulli_distribution(p)(rng)) good.insert(id);
    }
    const double truth = static_cast<double>(good.size()) / population;
    const std::size_t n = default_sample_size(population) * 2;
    auto sample = draw_sample(Method::mono3, all, n, rng());
    const auto drawn = sample.links;
    for (const auto& id : drawn) {
      sample = record_verdict(sample, id, good.contains(id) ? Verdict::correct : Verdict::incorrect);
    }
    const double estimate = extrapolate_confidence(sample).value() / 100.0;
    if (std::abs(estimate - truth) <= 3 * std::sqrt(truth * (1 - truth) / n)) ++within;
  }
  CHECK(within >= trials * 99 / 100);
}

TEST_CASE("Table 1 report and promotion") {
  const auto rows = table1_rows();
  CHECK(table_report(rows) == text::read_file(WNFORGE_SOURCE_DIR "/tests/golden/table1.tsv"));
  CHECK(table_report(rows, ReportFormat::markdown) == text::read_file(WNFORGE_SOURCE_DIR "/tests/golden/table1.md"));
  const auto result = promote(rows);
  CHECK(result.promoted == std::vector<Method>{Method::mono1, Method::mono2, Method::mono3, Method::mono4,
                                               Method::poly1, Method::variant});
  CHECK(result.rejected == std::vector<Method>{Method::poly2, Method::poly3, Method::poly4});
  // shuffled input gives the same report
  auto reversed = rows;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(table_report(reversed) == table_report(rows));
}

TEST_CASE("promotion boundaries and monotonicity") {
  std::vector<MethodStats> zero;
  for (auto m : class_methods()) zero.push_back({m, 1, 1, 1, Percent::from_tenths(0)});
  CHECK(promote(zero).promoted.empty());
  std::vector<MethodStats> edge{{Method::mono1, 1, 1, 1, Percent::parse("85.0")},
                                {Method::mono2, 1, 1, 1, Percent::parse("84.9")}};
  CHECK(promote(edge).promoted == std::vector<Method>{Method::mono1});
  std::vector<MethodStats> missing{{Method::mono1, 1, 1, 1, std::nullopt}};
  CHECK(code_of([&] { promote(missing); }) == ErrorCode::MissingConfidence);

  const auto rows = table1_rows();
  std::size_t previous = rows.size() + 1;
  for (std::int64_t t = 0; t <= 1000; t += 5) {
    const auto n = promote(rows, Percent::from_tenths(t)).promoted.size();
    CHECK(n <= previous);
    previous = n;
  }
}

TEST_CASE("report rows from stored links") {
  using oracle::piv;
  using oracle::src;
  using oracle::syn;
  std::vector<CandidateLink> links{{Method::mono1, src("gat"), piv("cat"), syn("S1"), {}, LinkStatus::candidate}};
  auto stats = compute_method_stats(links, {});
  REQUIRE(stats.size() == 9);
  CHECK(stats[0] == MethodStats{Method::mono1, 1, 1, 1, std::nullopt});
  CHECK(table_report(stats).find("mono1\t1\t1\t1\t-\n") != std::string::npos);

  links = {{Method::poly1, src("banc"), piv("bank"), syn("S1"), {}, LinkStatus::candidate},
           {Method::poly1, src("banc"), piv("bank"), syn("S2"), {}, LinkStatus::candidate}};
  stats = compute_method_stats(links, {});
  CHECK(stats[4] == MethodStats{Method::poly1, 2, 2, 1, std::nullopt});
}

TEST_CASE("report counts equal brute-force distinct counts") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const auto pairs = oracle::random_pairs(rng, 15, 15, 0.15);
    const auto inst = oracle::random_senses(rng, 15, 15, 0.15);
    const auto links = generate_links(TranslationGraph(pairs), inst.senses);
    for (const auto& row : compute_method_stats(links, {})) {
      std::set<std::string> s, w;
      std::size_t n = 0;
      for (const auto& l : links) {
        if (l.method != row.method) continue;
        ++n;
        s.insert(l.synset.key);
        w.insert(l.word.lemma);
      }
      REQUIRE(row.links == n);
      REQUIRE(row.synsets == s.size());
      REQUIRE(row.words == w.size());
    }
  }
}

TEST_CASE("confidence in stats follows recorded verdicts") {
  using oracle::piv;
  using oracle::src;
  using oracle::syn;
  std::vector<CandidateLink> links;
  for (int i = 0; i < 10; ++i) {
    links.push_back({Method::mono1, src("w" + std::to_string(i)), piv("p" + std::to_string(i)),
                     syn("S" + std::to_string(i)), {}, LinkStatus::candidate});
  }
  auto sample = draw_sample(links, 10, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    sample = record_verdict(sample, sample.links[i], i < 9 ? Verdict::correct : Verdict::incorrect);
  }
  const auto stats = compute_method_stats(links, {{Method::mono1, sample}});
  CHECK(stats[0].confidence == Percent::parse("90.0"));
}
