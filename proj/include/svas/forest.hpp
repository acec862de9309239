#pragma once

// Leaf-data forests: ordered forests over a finite alphabet whose leaves also
// carry a data value.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svas/text.hpp"

namespace svas {

struct ForestNode {
  std::string letter;
  std::optional<std::uint64_t> data;
  std::vector<ForestNode> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const ForestNode&, const ForestNode&) = default;
};

struct LeafDataForest {
  std::vector<ForestNode> roots;

  friend bool operator==(const LeafDataForest&, const LeafDataForest&) = default;

  std::size_t size() const {
    std::size_t n = 0;
    auto count = [&](auto&& self, const ForestNode& v) -> void {
      ++n;
      for (const auto& c : v.children) self(self, c);
    };
    for (const auto& r : roots) count(count, r);
    return n;
  }

  /// Data exactly on the leaves.
  bool well_formed() const {
    auto ok = [](auto&& self, const ForestNode& v) -> bool {
      if (v.is_leaf() != v.data.has_value()) return false;
      for (const auto& c : v.children)
        if (!self(self, c)) return false;
      return true;
    };
    for (const auto& r : roots)
      if (!ok(ok, r)) return false;
    return true;
  }
};

class ForestFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two spaces of indentation per depth; "letter" for internal nodes and
/// "letter @data" for leaves.
inline std::string serialize_forest(const LeafDataForest& f) {
  std::ostringstream os;
  auto emit = [&](auto&& self, const ForestNode& v, std::size_t depth) -> void {
    os << std::string(2 * depth, ' ') << v.letter;
    if (v.data) os << " @" << *v.data;
    os << '\n';
    for (const auto& c : v.children) self(self, c, depth + 1);
  };
  for (const auto& r : f.roots) emit(emit, r, 0);
  return os.str();
}

inline LeafDataForest parse_forest(std::string_view source) {
  struct Entry {
    std::size_t depth;
    ForestNode node;
    std::size_t line;
  };
  std::vector<Entry> entries;
  auto lines = text::split_lines(source);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    auto fail = [&](const std::string& why) {
      return ForestFormatError("forest line " + std::to_string(li + 1) + ": " + why);
    };
    const std::string& raw = lines[li];
    auto body = text::trim(raw);
    if (body.empty() || body.front() == '#') continue;
    std::size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    if (indent % 2) throw fail("odd indentation");
    const std::size_t depth = indent / 2;
    const std::size_t max_depth = entries.empty() ? 0 : entries.back().depth + 1;
    if (depth > max_depth) throw fail("indentation skips a level");
    auto toks = text::split_ws(body);
    ForestNode node;
    node.letter = toks[0];
    if (node.letter.front() == '@') throw fail("missing letter");
    if (toks.size() == 2) {
      if (toks[1].size() < 2 || toks[1][0] != '@') throw fail("expected '@data'");
      auto v = text::parse_u64(std::string_view(toks[1]).substr(1));
      if (!v) throw fail("bad data value");
      node.data = *v;
    } else if (toks.size() != 1) {
      throw fail("expected 'letter' or 'letter @data'");
    }
    entries.push_back({depth, std::move(node), li + 1});
  }

  std::size_t at = 0;
  auto build = [&](auto&& self, std::size_t depth) -> ForestNode {
    Entry& e = entries[at++];
    ForestNode v = std::move(e.node);
    while (at < entries.size() && entries[at].depth == depth + 1) v.children.push_back(self(self, depth + 1));
    if (v.is_leaf() != v.data.has_value())
      throw ForestFormatError("forest line " + std::to_string(e.line) +
                              (v.data ? ": a node with data cannot have children" : ": leaf without data"));
    return v;
  };
  LeafDataForest f;
  while (at < entries.size()) f.roots.push_back(build(build, 0));
  return f;
}

/// Flattened pre-order view used by the evaluator and the brute-force checks.
/// Node 0..size-1 in document order; next_sibling links consecutive roots too.
struct ForestView {
  std::vector<std::string> letter;
  std::vector<std::int64_t> parent;
  std::vector<std::int64_t> next_sibling;
  std::vector<bool> leaf;
  std::vector<std::uint64_t> data;
  /// Rank among leaves in document order; -1 for internal nodes.
  std::vector<std::int64_t> leaf_rank;

  explicit ForestView(const LeafDataForest& f) {
    auto visit = [&](auto&& self, const ForestNode& v, std::int64_t par) -> std::int64_t {
      const auto id = static_cast<std::int64_t>(letter.size());
      letter.push_back(v.letter);
      parent.push_back(par);
      next_sibling.push_back(-1);
      leaf.push_back(v.is_leaf());
      data.push_back(v.data.value_or(0));
      leaf_rank.push_back(-1);
      if (v.is_leaf()) leaf_rank[static_cast<std::size_t>(id)] = leaves_++;
      std::int64_t prev = -1;
      for (const auto& c : v.children) {
        auto cid = self(self, c, id);
        if (prev >= 0) next_sibling[static_cast<std::size_t>(prev)] = cid;
        prev = cid;
      }
      return id;
    };
    std::int64_t prev = -1;
    for (const auto& r : f.roots) {
      auto rid = visit(visit, r, -1);
      if (prev >= 0) next_sibling[static_cast<std::size_t>(prev)] = rid;
      prev = rid;
    }
  }

  std::size_t size() const { return letter.size(); }

  bool child(std::size_t a, std::size_t b) const { return parent[b] == static_cast<std::int64_t>(a); }
  bool next(std::size_t a, std::size_t b) const { return next_sibling[a] == static_cast<std::int64_t>(b); }
  bool prec(std::size_t a, std::size_t b) const { return leaf[a] && leaf[b] && leaf_rank[a] < leaf_rank[b]; }
  bool data_eq(std::size_t a, std::size_t b) const { return leaf[a] && leaf[b] && data[a] == data[b]; }

 private:
  std::int64_t leaves_ = 0;
};

}  // namespace svas
