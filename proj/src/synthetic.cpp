#include "cdscan/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "cdscan/matcher.hpp"

namespace cdscan::synthetic {
namespace {

// Contracted surface forms the normalizer must expand back.
constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kContractions{{
    {"will not", "won't"},
    {"do not", "don't"},
    {"does not", "doesn't"},
    {"I am", "I'm"},
    {"he is", "he's"},
    {"she is", "she's"},
    {"it is", "it's"},
    {"that is", "that's"},
    {"they are", "they're"},
    {"you are", "you're"},
    {"can not", "can't"},
}};

constexpr std::array<std::string_view, 6> kDecorations{
    "#mood", "@friend_01", "https://t.co/xYz12", "#tbt", "\xF0\x9F\x98\x82", "www.example.com/page"};

constexpr std::array<std::string_view, 4> kPunctuation{".", "!", "?", "..."};

std::string contract(std::string text, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution coin(p);
  for (const auto& [full, short_form] : kContractions) {
    const auto pos = text.find(full);
    if (pos == std::string::npos) continue;
    const bool at_word_start = pos == 0 || text[pos - 1] == ' ';
    const auto end = pos + full.size();
    const bool at_word_end = end == text.size() || text[end] == ' ';
    if (at_word_start && at_word_end && coin(rng)) text.replace(pos, full.size(), short_form);
  }
  return text;
}

}  // namespace

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w{
        "coffee", "morning", "train", "weather", "music", "friday", "game", "dinner", "movie",
        "garden", "project", "city", "office", "weekend", "beach", "phone", "book", "coach",
        "team", "river", "pizza", "concert", "holiday", "traffic", "season", "market", "photo",
        "road", "dog", "cat", "sunset", "school", "lunch", "shirt", "sky", "window", "paper",
        "street", "park", "bus", "store", "song", "video", "news", "party", "class", "mountain",
        "lake", "tea", "bread", "today", "tomorrow", "yesterday", "tonight", "finally", "really",
        "quite", "maybe", "just", "so", "very", "then", "later", "here", "there", "with", "from",
        "for", "in", "on", "at", "new", "old", "big", "small", "red", "blue", "green", "happy",
        "busy", "late", "early", "went", "saw", "made", "got", "watched", "played", "cooked",
        "walked", "read", "wrote", "love", "like", "need", "want", "see", "go", "get", "make",
        "this", "these", "our", "and", "or", "to", "of"};
    // Keep only words that are not schema tokens.
    std::set<std::string> schema_tokens;
    for (const auto& s : embedded_lexicon()) schema_tokens.insert(s.tokens.begin(), s.tokens.end());
    std::erase_if(w, [&](const std::string& x) { return schema_tokens.contains(x); });
    return w;
  }();
  return words;
}

std::vector<Schema> clean_schemata(std::span<const Schema> lexicon) {
  const PatternIndex index(lexicon);
  std::vector<Schema> out;
  for (const auto& s : lexicon) {
    const auto rec = index.match(s.tokens);
    const bool clean = std::all_of(rec.matched_schema_ids.begin(), rec.matched_schema_ids.end(),
                                   [&](SchemaId id) { return index.category_of(id) == s.category; });
    if (clean) out.push_back(s);
  }
  return out;
}

std::vector<CorpusRecord> generate_cohort(const CohortPlan& plan, std::span<const Schema> lexicon,
                                          std::uint64_t seed, const TextOptions& text) {
  std::mt19937_64 rng(seed);
  const auto& filler = filler_words();
  const auto clean = clean_schemata(lexicon);
  std::array<std::vector<const Schema*>, kCategoryCount> by_category;
  for (const auto& s : clean) by_category[category_index(s.category)].push_back(&s);

  std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
  std::poisson_distribution<std::size_t> filler_count(static_cast<double>(text.mean_filler));
  std::bernoulli_distribution decorate(text.decoration_probability);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto day0 = std::chrono::sys_days{std::chrono::year{2016} / 1 / 1};
  std::vector<CorpusRecord> out;
  for (std::size_t u = 0; u < plan.users; ++u) {
    char uid[64];
    std::snprintf(uid, sizeof uid, "%s%05zu", plan.user_prefix.c_str(), u);
    std::size_t n_posts = plan.posts_per_user;
    if (plan.min_posts_per_user > 0 && plan.min_posts_per_user < plan.posts_per_user) {
      n_posts = std::uniform_int_distribution<std::size_t>(plan.min_posts_per_user, plan.posts_per_user)(rng);
    }
    const auto account_created =
        Timestamp{day0.time_since_epoch()} -
        std::chrono::days{std::uniform_int_distribution<int>(0, 8 * 365)(rng)};
    for (std::size_t k = 0; k < n_posts; ++k) {
      CorpusRecord rec;
      auto& p = rec.post;
      p.post_id = std::string(uid) + "-" + std::to_string(k);
      p.user_id = uid;
      p.created_at = Timestamp{day0.time_since_epoch()} + std::chrono::hours{static_cast<long>(k) * 7} +
                     std::chrono::seconds{static_cast<long>(u)};
      rec.account_created_at = account_created;
      rec.has_location = (u % 3) != 0;

      // Phrases in this post: planted schemata for retained posts only.
      std::vector<std::string> phrases;
      const double noise = unit(rng);
      bool retained = true;
      if (noise < plan.retweet_fraction) {
        p.is_retweet = true;
        retained = false;
      } else if (noise < plan.retweet_fraction + plan.non_english_fraction) {
        p.lang = "es";
        retained = false;
      } else if (noise < plan.retweet_fraction + plan.non_english_fraction + plan.keyword_fraction) {
        phrases.push_back("feeling so depressed");
        retained = false;
      }
      if (retained) {
        for (std::size_t c = 0; c < kCategoryCount; ++c) {
          if (by_category[c].empty() || unit(rng) >= plan.category_rates[c]) continue;
          const auto* s = by_category[c][std::uniform_int_distribution<std::size_t>(0, by_category[c].size() - 1)(rng)];
          phrases.push_back(contract(s->text, rng, text.contraction_probability));
        }
      }

      // Filler with phrases dropped into distinct gaps.
      std::vector<std::string> words;
      const std::size_t n_fill = std::max<std::size_t>(filler_count(rng), phrases.size() + 1);
      for (std::size_t i = 0; i < n_fill; ++i) words.push_back(filler[pick_filler(rng)]);
      std::vector<std::size_t> gaps(n_fill - 1);
      for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = i + 1;
      std::shuffle(gaps.begin(), gaps.end(), rng);
      gaps.resize(std::min(gaps.size(), phrases.size()));
      std::sort(gaps.begin(), gaps.end());
      std::string body;
      std::size_t next_phrase = 0;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (next_phrase < gaps.size() && gaps[next_phrase] == i) {
          body += phrases[next_phrase++];
          body += ' ';
        }
        body += words[i];
        body += (i + 1 < words.size()) ? " " : "";
      }
      if (decorate(rng)) {
        body += ' ';
        body += kDecorations[std::uniform_int_distribution<std::size_t>(0, kDecorations.size() - 1)(rng)];
      }
      body += kPunctuation[std::uniform_int_distribution<std::size_t>(0, kPunctuation.size() - 1)(rng)];
      if (decorate(rng) && !body.empty()) body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
      p.raw_text = std::move(body);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::string random_post(std::mt19937_64& rng, std::span<const Schema> lexicon, std::size_t tokens) {
  const auto& filler = filler_words();
  std::uniform_int_distribution<std::size_t> pick_filler(0, filler.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_schema(0, lexicon.size() - 1);
  std::bernoulli_distribution use_schema(0.08);
  std::string out;
  std::size_t n = 0;
  while (n < tokens) {
    if (!out.empty()) out += ' ';
    if (!lexicon.empty() && use_schema(rng)) {
      const auto& s = lexicon[pick_schema(rng)];
      out += s.text;
      n += s.tokens.size();
    } else {
      out += filler[pick_filler(rng)];
      ++n;
    }
  }
  out += '.';
  return out;
}

CohortMatches bernoulli_cohort(std::string name, std::size_t users, std::size_t posts_per_user,
                               double rate, SchemaId schema, std::mt19937_64& rng) {
  CohortMatches c;
  c.name = std::move(name);
  c.users.reserve(users);
  std::binomial_distribution<std::size_t> hits(posts_per_user, rate);
  const SchemaMask mask = make_mask(std::span(&schema, 1));
  for (std::size_t u = 0; u < users; ++u) {
    char uid[32];
    std::snprintf(uid, sizeof uid, "u%06zu", u);
    UserTimeline t;
    t.user_id = uid;
    t.n_posts = posts_per_user;
    t.matched.assign(hits(rng), mask);
    c.users.push_back(std::move(t));
  }
  return c;
}

double union_rate(std::span<const double> rates) {
  double none = 1.0;
  for (const double r : rates) none *= (1.0 - r);
  return 1.0 - none;
}

const PlantedRates& reference_rates() {
  // Observed random-sample prevalence per category (fraction of posts) and
  // the depressed/random prevalence ratio seen for the same category.
  static const PlantedRates rates{
      {0.00019, 0.13933, 0.00060, 0.00023, 0.00050, 0.00903, 0.01851, 0.00016, 0.01026, 0.00476, 0.00427, 0.02896},
      {0.729, 1.195, 1.349, 2.323, 0.954, 1.328, 1.075, 1.468, 1.136, 1.580, 2.402, 1.103},
  };
  return rates;
}

std::pair<CohortPlan, CohortPlan> study_plans(std::size_t users, std::size_t posts_per_user) {
  const auto& ref = reference_rates();
  CohortPlan d, r;
  d.name = "depressed";
  d.user_prefix = "d";
  r.name = "random";
  r.user_prefix = "r";
  for (auto* p : {&d, &r}) {
    p->users = users;
    p->posts_per_user = posts_per_user;
    p->min_posts_per_user = posts_per_user / 2;
    p->retweet_fraction = 0.05;
    p->non_english_fraction = 0.02;
    p->keyword_fraction = 0.01;
  }
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    r.category_rates[c] = ref.random[c];
    d.category_rates[c] = std::min(1.0, ref.random[c] * ref.multiplier[c]);
  }
  return {d, r};
}

}  // namespace cdscan::synthetic
