#include <doctest.h>

#include <random>

#include "cdscan/error.hpp"
#include "cdscan/stats.hpp"
#include "cdscan/synthetic.hpp"

using namespace cdscan;

namespace {

// A cohort where user i has posts[i] posts, of which the first hits[i]
// matched schema `id`.
CohortMatches cohort(const std::string& name, const std::vector<std::pair<std::size_t, std::size_t>>& users,
                     SchemaId id = 0) {
  CohortBuilder b(name);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto uid = name + std::to_string(i);
    b.add_user(uid);
    const auto [posts, hits] = users[i];
    for (std::size_t k = 0; k < posts; ++k) {
      if (k < hits) {
        b.add(uid, std::span<const SchemaId>(&id, 1));
      } else {
        b.add(uid, std::span<const SchemaId>{});
      }
    }
  }
  return std::move(b).build();
}

const SchemaId kZero = 0;
const SchemaMask kAll = make_mask(std::span<const SchemaId>(&kZero, 1));

}  // namespace

TEST_CASE("masks") {
  const std::vector<SchemaId> ids{3, 1, 200};
  const auto m = make_mask(ids);
  CHECK(m.count() == 3);
  CHECK(mask_ids(m) == std::vector<SchemaId>{1, 3, 200});
  const std::vector<SchemaId> bad{256};
  CHECK_THROWS_AS(make_mask(bad), std::out_of_range);
  CHECK(schema_ids(embedded_lexicon()).size() == 241);
}

TEST_CASE("cohort builder groups by user and sorts") {
  CohortBuilder b("x");
  const std::vector<SchemaId> one{5};
  b.add("b", one);
  b.add("a", std::span<const SchemaId>{});
  b.add("b", std::span<const SchemaId>{});
  b.add_user("c");
  MatchRecord rec;
  rec.matched_schema_ids = {1, 2};
  rec.f_c = true;
  b.add("a", rec);
  const auto c = std::move(b).build();
  REQUIRE(c.users.size() == 3);
  CHECK(c.users[0].user_id == "a");
  CHECK(c.users[0].n_posts == 2);
  CHECK(c.users[0].matched.size() == 1);
  CHECK(c.users[1].n_posts == 2);
  CHECK(c.users[2].n_posts == 0);
  CHECK(c.total_posts() == 4);
}

TEST_CASE("within-subject prevalence") {
  const auto c = cohort("u", {{4, 1}, {200, 0}, {3, 3}});
  const auto all = within_subject_prevalences(c, 1, kAll);
  REQUIRE(all.size() == 3);
  CHECK(all[0].prevalence == doctest::Approx(0.25));
  CHECK(all[1].prevalence == 0.0);
  CHECK(all[1].n_posts == 200);
  CHECK(all[2].prevalence == 1.0);

  const auto cut = within_subject_prevalences(c, 150, kAll);
  REQUIRE(cut.size() == 1);
  CHECK(cut[0].user_id == "u1");
  CHECK(within_subject_prevalences(c, 4).size() == 2);
  CHECK_THROWS_AS(within_subject_prevalences(c, 0, kAll), std::invalid_argument);
  // A subset that excludes the matched schema sees no matches.
  CHECK(within_subject_prevalences(c, 1, SchemaMask{})[2].prevalence == 0.0);
}

TEST_CASE("cohort prevalence, ratio and difference") {
  const auto d = cohort("d", {{10, 3}, {10, 1}});
  const auto r = cohort("r", {{20, 2}});
  CHECK(cohort_prevalence(d, kAll) == doctest::Approx(0.2));
  CHECK(cohort_prevalence(r, kAll) == doctest::Approx(0.1));
  CHECK(cohort_prevalence(d, SchemaMask{}) == 0.0);
  CHECK(*prevalence_ratio(d, r, kAll) == doctest::Approx(2.0));
  CHECK(prevalence_difference(d, r, kAll) == doctest::Approx(10.0));
  CHECK(*prevalence_ratio(d, d, kAll) == doctest::Approx(1.0));
  CHECK(prevalence_difference(d, d, kAll) == 0.0);
  CHECK_FALSE(prevalence_ratio(d, r, SchemaMask{}).has_value());
  CHECK_THROWS_AS(cohort_prevalence(cohort("e", {{0, 0}}), kAll), DataError);

  CHECK(*prevalence_ratio(0.21838, 0.18407) == doctest::Approx(1.1864).epsilon(1e-4));
  CHECK(prevalence_difference(0.21838, 0.18407) == doctest::Approx(3.431));
}

TEST_CASE("ratio and difference invariants") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.001, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(*prevalence_ratio(a, b) * *prevalence_ratio(b, a) == doctest::Approx(1.0));
    CHECK(prevalence_difference(a, b) == doctest::Approx(-prevalence_difference(b, a)));
    CHECK((*prevalence_ratio(a, b) > 1.0) == (prevalence_difference(a, b) > 0.0));
  }
}

TEST_CASE("planted rates are recovered by counting") {
  std::mt19937_64 rng(17);
  const auto d = synthetic::bernoulli_cohort("d", 400, 250, 0.3, 0, rng);
  const auto r = synthetic::bernoulli_cohort("r", 400, 250, 0.1, 0, rng);
  CHECK(*prevalence_ratio(d, r, kAll) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(prevalence_difference(d, r, kAll) == doctest::Approx(20.0).epsilon(0.03));
}

TEST_CASE("threshold sweep") {
  std::mt19937_64 rng(23);
  const auto a = synthetic::bernoulli_cohort("a", 80, 300, 0.2, 0, rng);
  const std::vector<std::size_t> ts{50, 150, 300};
  const auto same = threshold_sweep(a, a, ts, kAll);
  REQUIRE(same.size() == 3);
  for (const auto& p : same) CHECK(p.ks.statistic == 0.0);

  const auto b = synthetic::bernoulli_cohort("b", 80, 300, 0.26, 0, rng);
  for (const auto& p : threshold_sweep(a, b, ts, kAll)) CHECK(p.ks.p_value < 0.01);

  const std::vector<std::size_t> too_big{301};
  CHECK_THROWS_AS(threshold_sweep(a, b, too_big, kAll), DataError);
  const std::vector<std::size_t> unsorted{150, 50};
  CHECK_THROWS_AS(threshold_sweep(a, b, unsorted, kAll), std::invalid_argument);
  const std::vector<std::size_t> zero{0};
  CHECK_THROWS_AS(threshold_sweep(a, b, zero, kAll), std::invalid_argument);
}

TEST_CASE("histograms") {
  const std::vector<double> v{0.0, 0.1, 0.1, 0.95, 1.0};
  const auto h = make_histogram(v, 0.0, 1.0, 0.1);
  REQUIRE(h.bins() == 10);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[1] == 2);
  CHECK(h.counts[9] == 2);
  CHECK(h.total == 5);
  double area = 0.0;
  for (double d : h.density()) area += d * h.bin_width;
  CHECK(area == doctest::Approx(1.0));
  const std::vector<double> out_of_range{1.5};
  CHECK_THROWS_AS(make_histogram(out_of_range, 0.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("sentiment comparison") {
  const std::vector<double> zeros(50, 0.0);
  const auto same = sentiment_distribution_compare(zeros, zeros);
  CHECK(same.ks.statistic == 0.0);
  CHECK(same.a.counts == same.b.counts);
  CHECK(std::count_if(same.a.counts.begin(), same.a.counts.end(), [](std::size_t c) { return c > 0; }) == 1);
  CHECK(same.summary_a.zero_fraction == 1.0);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 0.2);
  std::vector<double> a, b;
  for (int i = 0; i < 400; ++i) {
    a.push_back(std::clamp(n(rng), -1.0, 1.0));
    b.push_back(std::clamp(n(rng) + 0.15, -1.0, 1.0));
  }
  const auto shifted = sentiment_distribution_compare(a, b);
  CHECK(shifted.ks.p_value < 1e-6);
  CHECK(shifted.summary_b.mean > shifted.summary_a.mean);
  const std::vector<double> bad{1.2};
  CHECK_THROWS_AS(sentiment_distribution_compare(bad, zeros), std::invalid_argument);

  const std::vector<double> scores{-0.5, 0.0, 0.0, 0.3};
  const auto s = summarize_scores(scores);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(-0.05));
  CHECK(s.zero_fraction == doctest::Approx(0.5));
}
