#include "cdscan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cdscan/io.hpp"

namespace cdscan {
namespace {

constexpr std::string_view kUndefined = "/";

std::string head(const std::string& config_line, std::string_view columns) {
  std::string s;
  if (!config_line.empty()) s += "# " + config_line + "\n";
  s += columns;
  s += '\n';
  return s;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string star(const EstimateSummary& s, double reference) {
  return significance(s, reference) == Significance::none ? "" : "*";
}

// point, median, ci_low, ci_high, sig for one condition.
void estimate_columns(std::ostringstream& os, const EstimateSummary* s, double reference, int decimals) {
  if (s == nullptr || !s->defined()) {
    os << '\t' << kUndefined << '\t' << kUndefined << '\t' << kUndefined << '\t' << kUndefined << '\t';
    return;
  }
  os << '\t' << (s->point ? format_fixed(*s->point, decimals) : std::string(kUndefined)) << '\t'
     << format_fixed(s->median, decimals) << '\t' << format_fixed(s->ci_low, decimals) << '\t'
     << format_fixed(s->ci_high, decimals) << '\t' << star(*s, reference);
}

// Rows are grouped by which side of parity the median falls on.
std::string direction(const EstimateSummary& s, double reference) {
  if (!s.defined()) return std::string(kUndefined);
  return s.median >= reference ? "P_D>>P_R" : "P_D<<P_R";
}

std::vector<const SubsetEstimates*> ordered_rows(const Study& study, bool by_ratio) {
  std::vector<const SubsetEstimates*> rows;
  for (const auto& r : study.rows) rows.push_back(&r);
  if (rows.size() <= 1) return rows;
  auto key = [&](const SubsetEstimates* r) {
    const auto& s = by_ratio ? r->all.ratio : r->all.difference;
    return s.defined() ? s.median : -1e300;
  };
  std::stable_sort(rows.begin() + 1, rows.end(),
                   [&](const SubsetEstimates* a, const SubsetEstimates* b) { return key(a) > key(b); });
  return rows;
}

std::string table(const Study& study, const std::string& config_line, bool ratio) {
  const std::string p = ratio ? "PR" : "PD";
  std::ostringstream os;
  os << head(config_line, "subset\tdirection\t" + p + "_A_point\t" + p + "_A_median\t" + p + "_A_ci_low\t" + p +
                              "_A_ci_high\t" + p + "_A_sig\t" + p + "_1_point\t" + p + "_1_median\t" + p +
                              "_1_ci_low\t" + p + "_1_ci_high\t" + p + "_1_sig\t" + p + "_C_point\t" + p +
                              "_C_median\t" + p + "_C_ci_low\t" + p + "_C_ci_high\t" + p + "_C_sig");
  const double ref = ratio ? 1.0 : 0.0;
  for (const auto* r : ordered_rows(study, ratio)) {
    auto pick = [&](const BootstrapResult& b) { return ratio ? &b.ratio : &b.difference; };
    os << r->label << '\t' << direction(*pick(r->all), ref);
    estimate_columns(os, pick(r->all), ref, 3);
    estimate_columns(os, r->no_fpp ? pick(*r->no_fpp) : nullptr, ref, 3);
    estimate_columns(os, pick(r->schemata_axis), ref, 3);
    os << '\n';
  }
  return os.str();
}

std::string histogram_rows(const Histogram& a, const Histogram* b) {
  std::ostringstream os;
  const auto da = a.density();
  const auto db = b ? b->density() : std::vector<double>{};
  for (std::size_t i = 0; i < a.bins(); ++i) {
    os << format_fixed(a.bin_low(i), 4) << '\t' << format_fixed(a.bin_low(i) + a.bin_width, 4) << '\t'
       << format_fixed(da[i], 6);
    if (b) os << '\t' << format_fixed(db[i], 6);
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string format_estimate(const EstimateSummary& s, double value) {
  if (!s.defined() || std::isnan(value)) return std::string(kUndefined);
  return format_fixed(value, 3);
}

SubsetEstimates estimate_subset(const CohortMatches& depressed, const CohortMatches& random,
                                std::string label, std::optional<Category> category,
                                std::span<const Schema> subset, const BootstrapConfig& config) {
  SubsetEstimates row;
  row.label = std::move(label);
  row.category = category;
  row.schemata = subset.size();
  const auto ids = schema_ids(subset);
  const auto mask = make_mask(ids);
  row.p_depressed = cohort_prevalence(depressed, mask);
  row.p_random = cohort_prevalence(random, mask);

  const auto fpp_free = filter_schemata_by_pronouns(subset, first_person_pronouns());
  row.fpp_free_schemata = fpp_free.size();
  BootstrapConfig users = config;
  users.axis = ResampleAxis::users;
  if (fpp_free.empty()) {
    row.all = bootstrap_prevalence(depressed, random, ids, users);
  } else {
    const std::vector<SchemaMask> masks{mask, make_mask(fpp_free)};
    auto both = bootstrap_prevalence_users(depressed, random, masks, users);
    row.all = std::move(both[0]);
    row.no_fpp = std::move(both[1]);
  }
  BootstrapConfig schemata = config;
  schemata.axis = ResampleAxis::schemata;
  row.schemata_axis = bootstrap_prevalence(depressed, random, ids, schemata);
  return row;
}

Study run_study(const CohortMatches& depressed, const CohortMatches& random,
                std::span<const Schema> lexicon, const StudyConfig& config) {
  Study study;
  study.rows.push_back(estimate_subset(depressed, random, "All CDS", std::nullopt, lexicon, config.bootstrap));
  for (const auto c : all_categories()) {
    const auto subset = schemata_in_category(lexicon, c);
    if (subset.empty()) continue;
    study.rows.push_back(
        estimate_subset(depressed, random, std::string(category_name(c)), c, subset, config.bootstrap));
  }
  if (config.per_schema) {
    study.per_schema = per_schema_prevalence_ratios(depressed, random, lexicon, config.bootstrap);
  }

  const auto mask = make_mask(lexicon);
  study.within_depressed = within_subject_prevalences(depressed, config.min_posts, mask);
  study.within_random = within_subject_prevalences(random, config.min_posts, mask);
  auto zero_share = [](const std::vector<UserPrevalence>& v) {
    if (v.empty()) return 0.0;
    const auto zeros = std::count_if(v.begin(), v.end(), [](const UserPrevalence& u) { return u.n_matched == 0; });
    return static_cast<double>(zeros) / static_cast<double>(v.size());
  };
  study.zero_users_depressed = zero_share(study.within_depressed);
  study.zero_users_random = zero_share(study.within_random);
  if (!study.within_depressed.empty() && !study.within_random.empty()) {
    std::vector<double> a, b;
    for (const auto& u : study.within_depressed) a.push_back(u.prevalence);
    for (const auto& u : study.within_random) b.push_back(u.prevalence);
    study.within_ks = ks_two_sample(a, b);
  }
  if (!config.thresholds.empty()) study.sweep = threshold_sweep(depressed, random, config.thresholds, mask);
  return study;
}

std::string render_lexicon(std::span<const Schema> lexicon) {
  std::ostringstream os;
  os << "id\tcategory\ttext\tn\tfirst_person\tpersonal_pronoun\n";
  for (const auto& s : lexicon) {
    os << s.id << '\t' << category_name(s.category) << '\t' << s.text << '\t' << s.length() << '\t'
       << (s.has_first_person ? 1 : 0) << '\t' << (s.has_personal_pronoun ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string render_lexicon_stats(std::span<const Schema> lexicon, const Study* study,
                                 const std::string& config_line) {
  const auto st = lexicon_stats(lexicon);
  std::ostringstream os;
  os << head(config_line, study ? "category\tN_CD\tN_exists\tN_sig\tN_sig_pct\tmean_n\tP_r_pct"
                                : "category\tN_CD\tmean_n\tP_r_pct");

  // Observed and significant schema counts per category, from the ranking.
  std::array<std::size_t, kCategoryCount> observed{}, significant{};
  std::size_t observed_total = 0, significant_total = 0;
  if (study) {
    for (const auto& sr : study->per_schema) {
      const auto it = std::find_if(lexicon.begin(), lexicon.end(), [&](const Schema& s) { return s.id == sr.id; });
      if (it == lexicon.end()) continue;
      const auto c = category_index(it->category);
      if (sr.status != SchemaObservation::not_observed) {
        ++observed[c];
        ++observed_total;
      }
      if (sr.ratio && significance(*sr.ratio, 1.0) != Significance::none) {
        ++significant[c];
        ++significant_total;
      }
    }
  }
  auto pct = [](std::size_t k, std::size_t n) { return n ? format_fixed(100.0 * k / n, 1) : std::string("/"); };
  for (const auto& cs : st.per_category) {
    if (cs.count == 0) continue;
    os << category_name(cs.category) << '\t' << cs.count;
    if (study) {
      const auto c = category_index(cs.category);
      os << '\t' << observed[c] << '\t' << significant[c] << '\t' << pct(significant[c], cs.count);
    }
    os << '\t' << format_fixed(*cs.mean_length, 3) << '\t'
       << (cs.with_pronoun == 0 ? std::string(kUndefined) : format_fixed(*cs.pronoun_pct, 1)) << '\n';
  }
  os << "Total\t" << st.total;
  if (study) os << '\t' << observed_total << '\t' << significant_total << '\t' << pct(significant_total, st.total);
  os << '\t' << format_fixed(st.total_mean_length, 3) << '\t' << format_fixed(st.total_pronoun_pct, 1) << '\n';
  return os.str();
}

std::string render_ratio_table(const Study& study, const std::string& config_line) {
  return table(study, config_line, true);
}

std::string render_difference_table(const Study& study, const std::string& config_line) {
  return table(study, config_line, false);
}

std::string render_raw_prevalence(const Study& study, const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line, "subset\tP_D_pct\tP_R_pct");
  std::vector<const SubsetEstimates*> rows;
  for (const auto& r : study.rows) rows.push_back(&r);
  if (rows.size() > 1) {
    std::stable_sort(rows.begin() + 1, rows.end(),
                     [](const auto* a, const auto* b) { return a->p_depressed > b->p_depressed; });
  }
  for (const auto* r : rows) {
    os << r->label << '\t' << format_fixed(100.0 * r->p_depressed, 3) << '\t'
       << format_fixed(100.0 * r->p_random, 3) << '\n';
  }
  return os.str();
}

std::string render_per_schema(const Study& study, std::span<const Schema> lexicon, const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line,
             "rank\tid\tcategory\ttext\tstatus\tP_D_pct\tP_R_pct\tPR_point\tPR_median\tPR_ci_low\tPR_ci_high\tsig\t"
             "effective_replicates");
  std::size_t rank = 0;
  for (const auto& sr : study.per_schema) {
    const auto it = std::find_if(lexicon.begin(), lexicon.end(), [&](const Schema& s) { return s.id == sr.id; });
    os << ++rank << '\t' << sr.id << '\t' << (it != lexicon.end() ? category_name(it->category) : "?") << '\t'
       << (it != lexicon.end() ? it->text : "?") << '\t' << observation_name(sr.status) << '\t'
       << format_fixed(100.0 * sr.p_depressed, 4) << '\t' << format_fixed(100.0 * sr.p_random, 4);
    if (sr.ratio && sr.ratio->defined()) {
      const auto& s = *sr.ratio;
      os << '\t' << (s.point ? format_fixed(*s.point, 3) : "/") << '\t' << format_fixed(s.median, 3) << '\t'
         << format_fixed(s.ci_low, 3) << '\t' << format_fixed(s.ci_high, 3) << '\t'
         << significance_marker(significance(s, 1.0)) << '\t' << s.effective_replicates;
    } else {
      os << "\t/\t/\t/\t/\t\t0";
    }
    os << '\n';
  }
  return os.str();
}

std::string render_top_schemata(const Study& study, std::span<const Schema> lexicon, std::size_t top,
                                const std::string& config_line) {
  std::vector<const SchemaRatio*> ranked;
  for (const auto& sr : study.per_schema) {
    if (sr.status == SchemaObservation::observed && sr.ratio && sr.ratio->defined()) ranked.push_back(&sr);
  }
  auto text = [&](const SchemaRatio* sr) {
    const auto it = std::find_if(lexicon.begin(), lexicon.end(), [&](const Schema& s) { return s.id == sr->id; });
    return it == lexicon.end() ? std::string("?") : it->text;
  };
  std::ostringstream os;
  os << head(config_line, "rank\tdepressed\tdepressed_PR\trandom\trandom_PR");
  for (std::size_t i = 0; i < top && i < ranked.size(); ++i) {
    const auto* hi = ranked[i];
    const auto* lo = ranked[ranked.size() - 1 - i];
    os << i + 1 << '\t' << text(hi) << '\t' << format_fixed(hi->ratio->median, 3) << '\t' << text(lo) << '\t'
       << format_fixed(lo->ratio->median, 3) << '\n';
  }
  return os.str();
}

std::string render_within_subject(const Study& study, const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line, "cohort\tuser_id\tn_posts\tn_matched\tprevalence");
  for (const auto& [name, rows] : {std::pair{"depressed", &study.within_depressed},
                                   std::pair{"random", &study.within_random}}) {
    for (const auto& u : *rows) {
      os << name << '\t' << u.user_id << '\t' << u.n_posts << '\t' << u.n_matched << '\t'
         << format_fixed(u.prevalence, 6) << '\n';
    }
  }
  return os.str();
}

std::string render_within_density(const Study& study, std::size_t bins, const std::string& config_line) {
  std::vector<double> a, b;
  for (const auto& u : study.within_depressed) a.push_back(u.prevalence);
  for (const auto& u : study.within_random) b.push_back(u.prevalence);
  const double width = 1.0 / static_cast<double>(std::max<std::size_t>(1, bins));
  const auto ha = make_histogram(a, 0.0, 1.0, width);
  const auto hb = make_histogram(b, 0.0, 1.0, width);
  return head(config_line, "bin_low\tbin_high\tdensity_depressed\tdensity_random") + histogram_rows(ha, &hb);
}

std::string render_ks(const KsResult& ks, const std::string& label, const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line, "comparison\tn_a\tn_b\tD\tp_value");
  os << label << '\t' << ks.n_a << '\t' << ks.n_b << '\t' << format_fixed(ks.statistic, 6) << '\t'
     << sci(ks.p_value) << '\n';
  return os.str();
}

std::string render_sweep(std::span<const SweepPoint> sweep, const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line, "min_posts\tn_depressed\tn_random\tD\tp_value");
  for (const auto& p : sweep) {
    os << p.threshold << '\t' << p.ks.n_a << '\t' << p.ks.n_b << '\t' << format_fixed(p.ks.statistic, 6) << '\t'
       << sci(p.ks.p_value) << '\n';
  }
  return os.str();
}

std::string render_replicate_density(std::span<const double> replicates, std::size_t bins,
                                     const std::string& config_line) {
  std::string out = head(config_line, "bin_low\tbin_high\tdensity");
  if (replicates.empty()) return out;
  const auto [mn, mx] = std::minmax_element(replicates.begin(), replicates.end());
  double lo = *mn, hi = *mx;
  if (hi <= lo) hi = lo + 1e-9;
  const double width = (hi - lo) / static_cast<double>(std::max<std::size_t>(1, bins));
  return out + histogram_rows(make_histogram(replicates, lo, lo + width * static_cast<double>(bins), width), nullptr);
}

std::string render_bootstrap(const std::vector<std::pair<std::string, BootstrapResult>>& rows,
                             const std::string& config_line) {
  std::ostringstream os;
  os << head(config_line,
             "subset\tstatistic\tpoint\tmedian\tci_low\tci_high\treplicates\teffective_replicates\treliable\tseed\tsig");
  for (const auto& [label, r] : rows) {
    for (const auto& [name, s, ref] : {std::tuple{"PR", &r.ratio, 1.0}, std::tuple{"PD", &r.difference, 0.0}}) {
      os << label << '\t' << name << '\t' << (s->point ? format_fixed(*s->point, 4) : "/") << '\t'
         << format_estimate(*s, s->median) << '\t' << format_estimate(*s, s->ci_low) << '\t'
         << format_estimate(*s, s->ci_high) << '\t' << s->replicates << '\t' << s->effective_replicates << '\t'
         << (s->reliable() ? "yes" : "no") << '\t' << s->seed << '\t' << significance_marker(significance(*s, ref))
         << '\n';
    }
  }
  return os.str();
}

std::string render_matches(std::span<const MatchRecord> records) {
  std::string out = "post_id\tf_c\tschema_ids\n";
  for (const auto& r : records) {
    out += r.post_id;
    out += '\t';
    out += r.f_c ? '1' : '0';
    out += '\t';
    for (std::size_t i = 0; i < r.matched_schema_ids.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(r.matched_schema_ids[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cdscan
