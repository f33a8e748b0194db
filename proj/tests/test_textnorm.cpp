#include <doctest.h>

#include <random>

#include "cdscan/textnorm.hpp"

using namespace cdscan;
using V = std::vector<std::string>;

TEST_CASE("contraction expansion") {
  CHECK(expand_contractions("I won't fail") == "I will not fail");
  CHECK(expand_contractions("she's a loser") == "she is a loser");
  CHECK(expand_contractions("nothing here") == "nothing here");
  CHECK(expand_contractions("I can't") == "I can not");
  CHECK(expand_contractions("we shan't") == "we shall not");
  CHECK(expand_contractions("they don't know") == "they do not know");
  CHECK(expand_contractions("I'm sure you're right") == "I am sure you are right");
  CHECK(expand_contractions("I've, we'll, he'd") == "I have, we will, he would");
  CHECK(expand_contractions("it’s fine") == "it is fine");
  CHECK(expand_contractions("Won't") == "Will not");
  CHECK(expand_contractions("") == "");
}

TEST_CASE("tokenization") {
  CHECK(tokenize("No one will EVER like me.") == V{"no", "one", "will", "ever", "like", "me"});
  CHECK(tokenize("check https://x.co @bob #fail") == V{"check", "fail"});
  CHECK(tokenize("") == V{});
  CHECK(tokenize("www.example.com then") == V{"then"});
  CHECK(tokenize("email me@home ok") == V{"email", "me", "home", "ok"});
  CHECK(tokenize("well...that's   it!!") == V{"well", "that", "s", "it"});
  CHECK(tokenize("Café ＡＢ") == V{"café", "ab"});
  CHECK(tokenize("ÉTÉ") == V{"été"});
  CHECK(tokenize("fun \U0001F602 times") == V{"fun", "times"});
}

TEST_CASE("normalize_text expands before tokenizing") {
  CHECK(normalize_text("I won't fail!") == V{"i", "will", "not", "fail"});
  CHECK(normalize_text("You're ALWAYS late") == V{"you", "are", "always", "late"});
}

TEST_CASE("normalization is idempotent on joined tokens") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces{"I'm", "DON'T", "can't", "https://t.co/x", "@user", "#tag", "wow!!",
                                        "Café", "’s", "ok,", "no-one", "\U0001F600", "it’ll"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (int k = 0; k < 8; ++k) text += pieces[rng() % pieces.size()] + (rng() % 2 ? " " : "");
    const auto once = normalize_text(text);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(normalize_text(joined) == once);
  }
}

TEST_CASE("exclusion reasons") {
  Post p;
  p.raw_text = "I was diagnosed last year";
  CHECK(exclusion_reason(p) == Exclusion::keyword_diagnos_depress);
  p.raw_text = "a perfectly ordinary day";
  CHECK(exclusion_reason(p) == Exclusion::none);
  p.raw_text = "so DEPRESSING";
  CHECK(exclusion_reason(p) == Exclusion::keyword_diagnos_depress);
  p.raw_text = "hello";
  p.lang = "fr";
  CHECK(exclusion_reason(p) == Exclusion::non_english);
  p.lang = "EN";
  CHECK(exclusion_reason(p) == Exclusion::none);
  p.is_retweet = true;
  p.lang = "fr";
  CHECK(exclusion_reason(p) == Exclusion::retweet);
  CHECK(exclusion_name(Exclusion::keyword_diagnos_depress) == "keyword-diagnos-depress");
  CHECK(exclusion_name(Exclusion::non_english) == "non-english");
}

TEST_CASE("apply_exclusions marks and keeps every post") {
  std::vector<Post> posts(3);
  posts[0].raw_text = "fine";
  posts[1].raw_text = "depression";
  posts[2].raw_text = "fine";
  posts[2].is_retweet = true;
  const auto out = apply_exclusions(posts);
  REQUIRE(out.size() == 3);
  CHECK(out[0].excluded == Exclusion::none);
  CHECK(out[1].excluded == Exclusion::keyword_diagnos_depress);
  CHECK(out[2].excluded == Exclusion::retweet);
}

TEST_CASE("normalize_post fills tokens") {
  Post p;
  p.raw_text = "They'll never get it";
  normalize_post(p);
  REQUIRE(p.tokens.has_value());
  CHECK(*p.tokens == V{"they", "will", "never", "get", "it"});
}

TEST_CASE("diagnosis statements") {
  CHECK(detect_diagnosis_statement("I was in fact just diagnosed with clinical depression"));
  CHECK_FALSE(detect_diagnosis_statement("diagnosed with depression: awareness thread"));
  CHECK_FALSE(detect_diagnosis_statement("i think depression is misdiagnosed"));
  CHECK(detect_diagnosis_statement("I'm diagnosed with depression"));
  CHECK(detect_diagnosis_statement("Today I got my DIAGNOSIS: major depressive disorder"));
  CHECK_FALSE(detect_diagnosis_statement("I was diagnosed with anxiety"));
  CHECK_FALSE(detect_diagnosis_statement(""));
  CHECK(contains_diagnosis_keyword("Misdiagnosed"));
  CHECK_FALSE(contains_diagnosis_keyword("sad"));
}

TEST_CASE("diagnosis detection is monotone under insertion") {
  std::mt19937_64 rng(11);
  const V vocab{"i", "was", "diagnosed", "depression", "with", "today", "not", "depressed", "x"};
  for (int trial = 0; trial < 2000; ++trial) {
    V toks;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) toks.push_back(vocab[rng() % vocab.size()]);
    if (!is_diagnosis_sequence(toks)) continue;
    auto longer = toks;
    longer.insert(longer.begin() + static_cast<long>(rng() % (longer.size() + 1)), vocab[rng() % vocab.size()]);
    CHECK(is_diagnosis_sequence(longer));
  }
}
