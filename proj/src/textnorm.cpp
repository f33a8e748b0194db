#include "cdscan/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace cdscan {
namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return lower(x) == lower(y); });
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

// U+2018 and U+2019 become ASCII apostrophes.
std::string ascii_apostrophes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && text[i] == '\xE2' && text[i + 1] == '\x80' &&
        (text[i + 2] == '\x98' || text[i + 2] == '\x99')) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

struct SuffixRule {
  std::string_view suffix;  // letters after the apostrophe
  std::string_view expansion;
};

constexpr std::array<SuffixRule, 6> kSuffixRules{{
    {"m", "am"},
    {"re", "are"},
    {"ve", "have"},
    {"ll", "will"},
    {"d", "would"},
    {"s", "is"},
}};

struct NegationSpecial {
  std::string_view word;  // whole contraction, apostrophe included
  std::string_view expansion;
};

constexpr std::array<NegationSpecial, 3> kNegationSpecials{{
    {"won't", "will not"},
    {"can't", "can not"},
    {"shan't", "shall not"},
}};

const icu::Normalizer2& nfkc_casefold() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFKC_Casefold unavailable");
  return *n;
}

std::string fold_unicode(std::string_view text) {
  static const icu::Normalizer2& norm = nfkc_casefold();
  UErrorCode status = U_ZERO_ERROR;
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString dst;
  norm.normalize(src, dst, status);
  if (U_FAILURE(status)) return std::string(text);
  std::string out;
  dst.toUTF8String(out);
  return out;
}

bool is_word_codepoint(UChar32 c) {
  if (c < 0x80) return ascii_alnum(static_cast<char>(c));
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK || type == U_ENCLOSING_MARK;
}

bool is_space_codepoint(UChar32 c) {
  if (c < 0x80) return std::isspace(c) != 0;
  return u_isUWhiteSpace(c);
}

// Decodes the code point at `i` and advances `i`; invalid bytes yield U+FFFD.
UChar32 next_codepoint(std::string_view s, std::size_t& i) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t idx = static_cast<int32_t>(i);
  UChar32 c;
  U8_NEXT(p, idx, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(idx);
  return c < 0 ? 0xFFFD : c;
}

// Tokenizes already case-folded text.
void scan_tokens(std::string_view s, std::vector<std::string>& out) {
  std::size_t i = 0;
  bool prev_word = false;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  };

  while (i < s.size()) {
    if (!prev_word) {
      const auto rest = s.substr(i);
      if (istarts_with(rest, "http://") || istarts_with(rest, "https://") || istarts_with(rest, "www.")) {
        flush();
        std::size_t j = i;
        while (j < s.size()) {
          std::size_t k = j;
          if (is_space_codepoint(next_codepoint(s, k))) break;
          j = k;
        }
        i = j;
        continue;
      }
      if (s[i] == '@') {
        flush();
        ++i;
        while (i < s.size()) {
          std::size_t k = i;
          const UChar32 c = next_codepoint(s, k);
          if (!(c == '_' || is_word_codepoint(c))) break;
          i = k;
        }
        continue;
      }
    }

    const std::size_t start = i;
    const UChar32 c = next_codepoint(s, i);
    if (is_word_codepoint(c)) {
      if (c < 0x80) {
        current.push_back(lower(static_cast<char>(c)));
      } else {
        current.append(s.substr(start, i - start));
      }
      prev_word = true;
    } else {
      flush();
      prev_word = false;
    }
  }
  flush();
}

}  // namespace

std::string_view exclusion_name(Exclusion e) {
  switch (e) {
    case Exclusion::none: return "none";
    case Exclusion::retweet: return "retweet";
    case Exclusion::non_english: return "non-english";
    case Exclusion::keyword_diagnos_depress: return "keyword-diagnos-depress";
  }
  return "none";
}

std::string expand_contractions(std::string_view input) {
  const std::string text = ascii_apostrophes(input);
  if (text.find('\'') == std::string::npos) return text;

  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '\'') {
      out.push_back(text[i++]);
      continue;
    }
    // Letters that follow the apostrophe, up to a word boundary.
    std::size_t end = i + 1;
    while (end < text.size() && ascii_alpha(text[end])) ++end;
    const std::string_view suffix(text.data() + i + 1, end - i - 1);
    const bool after_letter = !out.empty() && ascii_alpha(out.back());

    if (after_letter && iequals(suffix, "t") && (out.back() == 'n' || out.back() == 'N')) {
      std::size_t word_start = out.size();
      while (word_start > 0 && ascii_alpha(out[word_start - 1])) --word_start;
      const std::string word = out.substr(word_start) + "'t";
      bool special = false;
      for (const auto& sp : kNegationSpecials) {
        if (iequals(word, sp.word)) {
          const bool capital = out[word_start] >= 'A' && out[word_start] <= 'Z';
          out.resize(word_start);
          out.append(sp.expansion);
          if (capital) out[word_start] = static_cast<char>(out[word_start] - 'a' + 'A');
          special = true;
          break;
        }
      }
      if (!special) {
        out.pop_back();  // the 'n' of n't
        out.append(" not");
      }
      i = end;
      continue;
    }

    bool expanded = false;
    if (after_letter) {
      for (const auto& rule : kSuffixRules) {
        if (iequals(suffix, rule.suffix)) {
          out.push_back(' ');
          out.append(rule.expansion);
          expanded = true;
          break;
        }
      }
    }
    if (expanded) {
      i = end;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

void tokenize_into(std::string_view text, std::vector<std::string>& out) {
  out.clear();
  if (is_ascii(text)) {
    scan_tokens(text, out);
  } else {
    scan_tokens(fold_unicode(text), out);
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  tokenize_into(text, out);
  return out;
}

std::vector<std::string> normalize_text(std::string_view text) {
  return tokenize(expand_contractions(text));
}

bool contains_diagnosis_keyword(std::string_view raw_text) {
  std::string folded(raw_text);
  for (auto& ch : folded) ch = lower(ch);
  return folded.find("diagnos") != std::string::npos || folded.find("depress") != std::string::npos;
}

Exclusion exclusion_reason(const Post& post) {
  if (post.is_retweet) return Exclusion::retweet;
  if (!iequals(post.lang, "en")) return Exclusion::non_english;
  if (contains_diagnosis_keyword(post.raw_text)) return Exclusion::keyword_diagnos_depress;
  return Exclusion::none;
}

std::vector<Post> apply_exclusions(std::vector<Post> posts) {
  for (auto& p : posts) p.excluded = exclusion_reason(p);
  return posts;
}

void normalize_post(Post& post) {
  post.excluded = exclusion_reason(post);
  if (post.excluded == Exclusion::none) {
    post.tokens = normalize_text(post.raw_text);
  } else {
    post.tokens.reset();
  }
}

bool is_diagnosis_sequence(std::span<const std::string> tokens) {
  int stage = 0;
  for (const auto& t : tokens) {
    if (stage == 0 && t == "i") {
      stage = 1;
    } else if (stage == 1 && t.starts_with("diagnos")) {
      stage = 2;
    } else if (stage == 2 && t.starts_with("depres")) {
      return true;
    }
  }
  return false;
}

bool detect_diagnosis_statement(std::string_view text) {
  return is_diagnosis_sequence(normalize_text(text));
}

}  // namespace cdscan
