#include "cdscan/matcher.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <thread>

#include "cdscan/error.hpp"

namespace cdscan {

PatternIndex::PatternIndex() : PatternIndex(std::span<const Schema>{}) {}

PatternIndex::PatternIndex(std::span<const Schema> schemata) {
  symbols_.emplace_back();  // symbol 0: any token outside the vocabulary
  std::set<std::pair<std::vector<std::string>, Category>> seen;
  for (const auto& s : schemata) {
    if (s.tokens.empty()) throw LexiconError("schema " + std::to_string(s.id) + " has no tokens");
    if (!categories_.emplace(s.id, s.category).second)
      throw LexiconError("duplicate schema id " + std::to_string(s.id));
    if (!seen.emplace(s.tokens, s.category).second)
      throw LexiconError("duplicate schema '" + s.text + "' in " +
                         std::string(category_name(s.category)));
    for (const auto& t : s.tokens) {
      if (vocab_.find(t) == vocab_.end()) {
        vocab_.emplace(t, static_cast<std::uint32_t>(symbols_.size()));
        symbols_.push_back(t);
      }
    }
  }
  alphabet_ = symbols_.size();
  pattern_count_ = schemata.size();

  // Trie.
  std::vector<std::map<std::uint32_t, std::uint32_t>> children(1);
  parent_.assign(1, 0);
  parent_symbol_.assign(1, 0);
  terminal_.assign(1, {});
  for (const auto& s : schemata) {
    std::uint32_t node = 0;
    for (const auto& t : s.tokens) {
      const auto sym = vocab_.find(t)->second;
      auto it = children[node].find(sym);
      if (it == children[node].end()) {
        const auto next = static_cast<std::uint32_t>(children.size());
        children[node].emplace(sym, next);
        children.emplace_back();
        parent_.push_back(node);
        parent_symbol_.push_back(sym);
        terminal_.emplace_back();
        node = next;
      } else {
        node = it->second;
      }
    }
    terminal_[node].push_back(s.id);
  }

  // Failure links in BFS order, folded into a dense transition table.
  const std::size_t states = children.size();
  delta_.assign(states * alphabet_, 0);
  std::vector<std::uint32_t> fail(states, 0);
  std::vector<std::uint32_t> order;
  order.reserve(states);
  std::deque<std::uint32_t> queue;
  for (const auto& [sym, child] : children[0]) {
    delta_[sym] = child;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    order.push_back(node);
    for (std::size_t sym = 1; sym < alphabet_; ++sym) {
      const auto it = children[node].find(static_cast<std::uint32_t>(sym));
      if (it != children[node].end()) {
        fail[it->second] = delta_[fail[node] * alphabet_ + sym];
        delta_[node * alphabet_ + sym] = it->second;
        queue.push_back(it->second);
      } else {
        delta_[node * alphabet_ + sym] = delta_[fail[node] * alphabet_ + sym];
      }
    }
  }

  // Each state reports its own patterns plus those of its failure chain.
  std::vector<std::vector<SchemaId>> merged(states);
  for (const auto node : order) {
    merged[node] = terminal_[node];
    const auto& inherited = merged[fail[node]];
    merged[node].insert(merged[node].end(), inherited.begin(), inherited.end());
  }
  out_begin_.assign(states + 1, 0);
  for (std::size_t s = 0; s < states; ++s) {
    out_begin_[s + 1] = out_begin_[s] + static_cast<std::uint32_t>(merged[s].size());
    outputs_.insert(outputs_.end(), merged[s].begin(), merged[s].end());
  }
}

std::uint32_t PatternIndex::symbol(std::string_view token) const {
  const auto it = vocab_.find(token);
  return it == vocab_.end() ? 0 : it->second;
}

void PatternIndex::scan(std::span<const std::string> tokens, std::vector<SchemaId>& out) const {
  out.clear();
  std::uint32_t state = 0;
  for (const auto& t : tokens) {
    const auto sym = symbol(t);
    state = sym == 0 ? 0 : delta_[state * alphabet_ + sym];
    out.insert(out.end(), outputs_.begin() + out_begin_[state], outputs_.begin() + out_begin_[state + 1]);
  }
  if (out.size() > 1) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
}

MatchRecord PatternIndex::match(std::span<const std::string> tokens, std::string_view post_id) const {
  MatchRecord rec;
  rec.post_id = std::string(post_id);
  scan(tokens, rec.matched_schema_ids);
  rec.f_c = !rec.matched_schema_ids.empty();
  for (const auto id : rec.matched_schema_ids) {
    rec.per_category[category_index(categories_.at(id))] = true;
  }
  return rec;
}

std::optional<Category> PatternIndex::category_of(SchemaId id) const {
  const auto it = categories_.find(id);
  if (it == categories_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::vector<std::string>, SchemaId>> PatternIndex::patterns() const {
  std::vector<std::pair<std::vector<std::string>, SchemaId>> out;
  for (std::size_t node = 0; node < terminal_.size(); ++node) {
    if (terminal_[node].empty()) continue;
    std::vector<std::string> tokens;
    for (auto n = static_cast<std::uint32_t>(node); n != 0; n = parent_[n]) {
      tokens.push_back(symbols_[parent_symbol_[n]]);
    }
    std::reverse(tokens.begin(), tokens.end());
    for (const auto id : terminal_[node]) out.emplace_back(tokens, id);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

PatternIndex build_index(std::span<const Schema> schemata) { return PatternIndex(schemata); }

MatchRecord match_post(const PatternIndex& index, std::span<const std::string> tokens,
                       std::string_view post_id) {
  return index.match(tokens, post_id);
}

std::vector<MatchRecord> match_corpus(const PatternIndex& index, std::span<const Post> posts,
                                      unsigned workers) {
  std::vector<std::size_t> eligible;
  eligible.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (posts[i].excluded == Exclusion::none) eligible.push_back(i);
  }
  std::vector<MatchRecord> out(eligible.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<std::string> scratch;
    for (std::size_t k = begin; k < end; ++k) {
      const Post& p = posts[eligible[k]];
      if (p.tokens) {
        out[k] = index.match(*p.tokens, p.post_id);
      } else {
        scratch = normalize_text(p.raw_text);
        out[k] = index.match(scratch, p.post_id);
      }
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1 || eligible.size() < 2 * workers) {
    work(0, eligible.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (eligible.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < eligible.size(); begin += chunk) {
    pool.emplace_back(work, begin, std::min(eligible.size(), begin + chunk));
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace cdscan
