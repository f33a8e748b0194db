#pragma once

// The embedded cognitive distortion schema (CDS) lexicon: 241 word n-grams
// grouped into 12 distortion categories.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdscan {

enum class Category : std::uint8_t {
  catastrophizing,
  dichotomous_reasoning,
  disqualifying_the_positive,
  emotional_reasoning,
  fortune_telling,
  labeling_and_mislabeling,
  magnification_and_minimization,
  mental_filtering,
  mindreading,
  overgeneralizing,
  personalizing,
  should_statements,
};

inline constexpr std::size_t kCategoryCount = 12;

/// All categories in lexicon order.
const std::array<Category, kCategoryCount>& all_categories();

/// Display name, e.g. "Labeling and Mislabeling".
std::string_view category_name(Category c);

/// Short machine name, e.g. "labeling_and_mislabeling".
std::string_view category_slug(Category c);

std::string_view category_definition(Category c);

/// Accepts a display name or slug, case-insensitively.
std::optional<Category> parse_category(std::string_view name);

inline std::size_t category_index(Category c) {
  return static_cast<std::size_t>(c);
}

using SchemaId = std::uint32_t;

struct Schema {
  SchemaId id = 0;
  std::string text;                 // as printed in the source table
  std::vector<std::string> tokens;  // normalized, same pipeline as posts
  Category category = Category::catastrophizing;
  bool has_first_person = false;
  bool has_personal_pronoun = false;

  std::size_t length() const { return tokens.size(); }
};

using PronounSet = std::set<std::string, std::less<>>;

/// I, me, my, mine, myself.
const PronounSet& first_person_pronouns();

/// First-person pronouns plus second and third person forms.
const PronounSet& personal_pronouns();

/// The embedded lexicon, ids assigned by category order then row position.
/// Throws LexiconError if the embedded table fails its consistency checks.
std::vector<Schema> load_lexicon();

/// Cached copy of load_lexicon().
const std::vector<Schema>& embedded_lexicon();

/// Builds a schema from raw text, tokenizing it like a post.
Schema make_schema(SchemaId id, std::string_view text, Category category);

struct CategoryStats {
  Category category = Category::catastrophizing;
  std::size_t count = 0;
  std::optional<double> mean_length;   // empty when count == 0
  std::size_t with_pronoun = 0;
  std::optional<double> pronoun_pct;   // empty when count == 0
};

struct LexiconStats {
  std::array<CategoryStats, kCategoryCount> per_category{};
  std::size_t total = 0;
  double total_mean_length = 0.0;
  std::size_t total_with_pronoun = 0;
  double total_pronoun_pct = 0.0;
};

/// Counts, mean token length and personal-pronoun percentage per category.
/// `pronouns` defaults to personal_pronouns(). Throws std::invalid_argument
/// on an empty schema set.
LexiconStats lexicon_stats(std::span<const Schema> schemata,
                           const PronounSet& pronouns = personal_pronouns());

/// Schemata containing none of the given pronoun tokens (case-insensitive).
std::vector<Schema> filter_schemata_by_pronouns(std::span<const Schema> schemata,
                                                const PronounSet& pronouns);

std::vector<Schema> schemata_in_category(std::span<const Schema> schemata,
                                         Category c);

}  // namespace cdscan
