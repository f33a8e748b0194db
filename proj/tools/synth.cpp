// Writes a pair of synthetic cohort corpora with planted category rates.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "cdscan/io.hpp"
#include "cdscan/synthetic.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace cdscan;

  fs::path out = ".";
  std::size_t users = 100;
  std::size_t posts = 200;
  std::uint64_t seed = 1;
  CLI::App app{"Generate synthetic depressed/random corpora", "cdscan-synth"};
  app.add_option("-o,--out", out, "Output directory")->capture_default_str();
  app.add_option("--users", users, "Users per cohort")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--posts", posts, "Largest timeline length")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto& lex = embedded_lexicon();
    const auto [d, r] = synthetic::study_plans(users, posts);
    for (const auto& [plan, s] : {std::pair{&d, seed * 2 + 1}, std::pair{&r, seed * 2 + 2}}) {
      std::string body;
      for (const auto& rec : synthetic::generate_cohort(*plan, lex, s)) {
        body += format_corpus_line(rec);
        body += '\n';
      }
      const auto path = out / (plan->name + ".jsonl");
      write_file_atomic(path, body);
      std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
