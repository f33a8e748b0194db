#include "cdscan/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "cdscan/error.hpp"
#include "cdscan/textnorm.hpp"

namespace cdscan {
namespace {

struct CategoryInfo {
  Category category;
  std::string_view name;
  std::string_view slug;
  std::string_view definition;
  std::string_view row;  // comma-separated schemata as printed
};

// clang-format off
constexpr std::array<CategoryInfo, kCategoryCount> kCategories{{
  {Category::catastrophizing, "Catastrophizing", "catastrophizing",
   "Exaggerating the importance of negative events",
   "will fail, will go wrong, will end, will be impossible, will not happen, will be terrible, "
   "will be horrible, will be a catastrophe, will be a disaster, will never end, will not end"},
  {Category::dichotomous_reasoning, "Dichotomous Reasoning", "dichotomous_reasoning",
   "Thinking that an inherently continuous situation can only fall into two categories",
   "only, every, everyone, everybody, everything, everywhere, always, perfect, the best, all, "
   "not a single, no one, nobody, nothing, nowhere, never, worthless, the worst, neither, nor, "
   "either or, black or white, ever"},
  {Category::disqualifying_the_positive, "Disqualifying the Positive", "disqualifying_the_positive",
   "Unreasonably discounting positive experiences",
   "great but, good but, OK but, not that great, not that good, it was not, not all that, "
   "fine but, acceptable but, great yet, good yet, OK yet, fine yet, acceptable yet"},
  {Category::emotional_reasoning, "Emotional Reasoning", "emotional_reasoning",
   "Thinking that something is true based on how one feels, ignoring the evidence to the contrary",
   "but I feel, since I feel, because I feel, but it feels, since it feels, because it feels, "
   "still feels"},
  {Category::fortune_telling, "Fortune-telling", "fortune_telling",
   "Making predictions, usually negative ones, about the future.",
   "I will not, we will not , you will not, they will not, it will not, that will not, "
   "he will not, she will not"},
  {Category::labeling_and_mislabeling, "Labeling and Mislabeling", "labeling_and_mislabeling",
   "Labeling yourself or others while discounting evidence that could lead to less disastrous "
   "conclusions",
   "I am a, he is a, she is a, they are a, it is a, that is a, sucks at, suck at, I never, "
   "he never, she never, you never, we never, they never, I am an, he is an, she is an, "
   "they are an, it is an, that is an, a burden, a complete, a completely, a huge, a loser, "
   "a major, a total, a totally, a weak, an absolute, an utter, a bad, a broken, a damaged, "
   "a helpless, a hopeless, an incompetent, a toxic, an ugly, an undesirable, an unlovable, "
   "a worthless, a horrible, a terrible"},
  {Category::magnification_and_minimization, "Magnification and Minimization",
   "magnification_and_minimization",
   "Magnifying negative aspects or minimizing positive aspects",
   "worst, best, not important, not count, not matter, no matter, the only thing, the one thing"},
  {Category::mental_filtering, "Mental Filtering", "mental_filtering",
   "Paying too much attention to negative details instead of the whole picture",
   "I see only, all I see, all I can see, can only think, nothing good, nothing right, "
   "completely bad, completely wrong, only the bad, only the worst, if I just, if I only, "
   "if it just, if it only"},
  {Category::mindreading, "Mindreading", "mindreading",
   "Believing you know what others are thinking",
   "everyone believes, everyone knows, everyone thinks, everyone will believe, everyone will know, "
   "everyone will think, nobody believes, nobody knows, nobody thinks, nobody will believe, "
   "nobody will know, nobody will think, he believes, he knows, he thinks, he does not believe, "
   "he does not know, he does not think, he will believe, he will know, he will think, "
   "he will not believe, he will not know, he will not think, she believes, she knows, "
   "she thinks, she does not believe, she does not know, she does not think, she will believe, "
   "she will know, she will think, she will not believe, she will not know, she will not think, "
   "they believe, they know, they think, they do not believe, they do not know, "
   "they do not think, they will believe, they will know, they will think, "
   "they will not believe, they will not know, they will not think, we believe, we know, "
   "we think, we do not believe, we do not know, we do not think, we will believe, we will know, "
   "we will think, we will not believe, we will not know, we will not think, you believe, "
   "you know, you think, you do not believe, you do not know, you do not think, "
   "you will believe, you will know, you will think, you will not believe, you will not know, "
   "you will not think"},
  {Category::overgeneralizing, "Overgeneralizing", "overgeneralizing",
   "Making sweeping negative conclusions based on a few examples",
   "all of the time, all of them, all the time, always happens, always like, "
   "happens every time, completely, no one ever, nobody ever, every single one of them, "
   "every single one of you, I always, you always, he always, she always, they always, "
   "I am always, you are always, he is always, she is always, they are always"},
  {Category::personalizing, "Personalizing", "personalizing",
   "Believing others are behaving negatively because of oneself, without considering more "
   "plausible or external explanations for behavior",
   "all me, all my, because I, because my, because of my, because of me, I am responsible, "
   "blame me, I caused, I feel responsible, all my doing, all my fault, my bad, "
   "my responsibility"},
  {Category::should_statements, "Should Statements", "should_statements",
   "Having a fixed idea on how you and/or others should behave",
   "should, ought, must, have to, has to"},
}};
// clang-format on

const CategoryInfo& info(Category c) { return kCategories[category_index(c)]; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

bool contains_any(const std::vector<std::string>& tokens, const PronounSet& pronouns) {
  return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
    return pronouns.contains(ascii_lower(t));
  });
}

PronounSet lowered(const PronounSet& in) {
  PronounSet out;
  for (const auto& p : in) out.insert(ascii_lower(p));
  return out;
}

}  // namespace

const std::array<Category, kCategoryCount>& all_categories() {
  static const std::array<Category, kCategoryCount> cats = [] {
    std::array<Category, kCategoryCount> a{};
    for (std::size_t i = 0; i < kCategoryCount; ++i) a[i] = kCategories[i].category;
    return a;
  }();
  return cats;
}

std::string_view category_name(Category c) { return info(c).name; }
std::string_view category_slug(Category c) { return info(c).slug; }
std::string_view category_definition(Category c) { return info(c).definition; }

std::optional<Category> parse_category(std::string_view name) {
  const std::string wanted = ascii_lower(trim(name));
  for (const auto& ci : kCategories) {
    if (wanted == ascii_lower(ci.name) || wanted == ci.slug) return ci.category;
  }
  return std::nullopt;
}

const PronounSet& first_person_pronouns() {
  static const PronounSet set{"i", "me", "my", "mine", "myself"};
  return set;
}

const PronounSet& personal_pronouns() {
  static const PronounSet set{"i",  "me",  "my",  "mine", "myself", "you",  "your",
                              "he", "him", "his", "she",  "her",    "it",   "we",
                              "us", "our", "they", "them", "their"};
  return set;
}

Schema make_schema(SchemaId id, std::string_view text, Category category) {
  Schema s;
  s.id = id;
  s.text = std::string(trim(text));
  s.tokens = normalize_text(s.text);
  s.category = category;
  s.has_first_person = contains_any(s.tokens, first_person_pronouns());
  s.has_personal_pronoun = contains_any(s.tokens, personal_pronouns());
  return s;
}

std::vector<Schema> load_lexicon() {
  std::vector<Schema> out;
  out.reserve(241);
  SchemaId next = 0;
  for (const auto& ci : kCategories) {
    std::string_view row = ci.row;
    while (!row.empty()) {
      const auto comma = row.find(',');
      const auto item = trim(row.substr(0, comma));
      row = comma == std::string_view::npos ? std::string_view{} : row.substr(comma + 1);
      if (item.empty()) throw LexiconError("empty schema in category " + std::string(ci.name));
      out.push_back(make_schema(next++, item, ci.category));
    }
  }

  std::unordered_set<SchemaId> ids;
  for (const auto& s : out) {
    if (!ids.insert(s.id).second) throw LexiconError("duplicate schema id " + std::to_string(s.id));
    if (s.tokens.empty() || s.tokens.size() > 5)
      throw LexiconError("schema '" + s.text + "' has " + std::to_string(s.tokens.size()) +
                         " tokens; expected 1..5");
    if (s.has_first_person && !s.has_personal_pronoun)
      throw LexiconError("pronoun flags inconsistent for '" + s.text + "'");
  }
  return out;
}

const std::vector<Schema>& embedded_lexicon() {
  static const std::vector<Schema> lex = load_lexicon();
  return lex;
}

LexiconStats lexicon_stats(std::span<const Schema> schemata, const PronounSet& pronouns) {
  if (schemata.empty()) throw std::invalid_argument("lexicon_stats: empty schema set");
  const PronounSet folded = lowered(pronouns);

  LexiconStats st;
  std::array<std::size_t, kCategoryCount> token_sum{};
  for (std::size_t i = 0; i < kCategoryCount; ++i) st.per_category[i].category = kCategories[i].category;

  std::size_t all_tokens = 0;
  for (const auto& s : schemata) {
    auto& cs = st.per_category[category_index(s.category)];
    ++cs.count;
    token_sum[category_index(s.category)] += s.length();
    all_tokens += s.length();
    if (contains_any(s.tokens, folded)) {
      ++cs.with_pronoun;
      ++st.total_with_pronoun;
    }
  }
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    auto& cs = st.per_category[i];
    if (cs.count == 0) continue;
    cs.mean_length = static_cast<double>(token_sum[i]) / static_cast<double>(cs.count);
    cs.pronoun_pct = 100.0 * static_cast<double>(cs.with_pronoun) / static_cast<double>(cs.count);
  }
  st.total = schemata.size();
  st.total_mean_length = static_cast<double>(all_tokens) / static_cast<double>(st.total);
  st.total_pronoun_pct =
      100.0 * static_cast<double>(st.total_with_pronoun) / static_cast<double>(st.total);
  return st;
}

std::vector<Schema> filter_schemata_by_pronouns(std::span<const Schema> schemata,
                                                const PronounSet& pronouns) {
  const PronounSet folded = lowered(pronouns);
  std::vector<Schema> out;
  for (const auto& s : schemata) {
    if (!contains_any(s.tokens, folded)) out.push_back(s);
  }
  return out;
}

std::vector<Schema> schemata_in_category(std::span<const Schema> schemata, Category c) {
  std::vector<Schema> out;
  for (const auto& s : schemata) {
    if (s.category == c) out.push_back(s);
  }
  return out;
}

}  // namespace cdscan
