#pragma once

// Seeded single-edit mutations of leaf-data forests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svas/forest.hpp"

namespace svas {

enum class EditKind : std::uint8_t { Relabel, SwapSiblings, ReassignData, DeleteLeaf, Reparent };

inline std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::Relabel: return "relabel";
    case EditKind::SwapSiblings: return "swap-siblings";
    case EditKind::ReassignData: return "reassign-data";
    case EditKind::DeleteLeaf: return "delete-leaf";
    case EditKind::Reparent: return "reparent";
  }
  return "?";
}

struct Mutation {
  LeafDataForest forest;
  EditKind kind = EditKind::Relabel;
};

namespace detail {

/// Nodes addressed by their child-index path from the root list.
using NodePath = std::vector<std::size_t>;

inline void collect_paths(const std::vector<ForestNode>& nodes, NodePath& prefix, std::vector<NodePath>& out) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    prefix.push_back(i);
    out.push_back(prefix);
    collect_paths(nodes[i].children, prefix, out);
    prefix.pop_back();
  }
}

inline std::vector<ForestNode>& siblings_of(LeafDataForest& f, const NodePath& path) {
  std::vector<ForestNode>* list = &f.roots;
  for (std::size_t d = 0; d + 1 < path.size(); ++d) list = &(*list)[path[d]].children;
  return *list;
}

inline ForestNode& node_at(LeafDataForest& f, const NodePath& path) { return siblings_of(f, path)[path.back()]; }

class Mutator {
 public:
  Mutator(const LeafDataForest& f, std::uint64_t seed) : src_(f), rng_(seed) {
    NodePath prefix;
    collect_paths(src_.roots, prefix, paths_);
    for (const auto& p : paths_) {
      const ForestNode& v = node_at(src_, p);
      letters_.insert(v.letter);
      if (v.data) {
        leaves_.push_back(p);
        values_.insert(*v.data);
      }
    }
    fresh_ = values_.empty() ? 0 : *values_.rbegin() + 1;
  }

  Mutation run() {
    if (paths_.empty()) throw std::invalid_argument("cannot mutate an empty forest");
    std::vector<EditKind> kinds;
    if (letters_.size() > 1) kinds.push_back(EditKind::Relabel);
    if (has_swappable()) kinds.push_back(EditKind::SwapSiblings);
    kinds.push_back(EditKind::ReassignData);
    if (paths_.size() > 1) kinds.push_back(EditKind::DeleteLeaf);
    if (paths_.size() > 1) kinds.push_back(EditKind::Reparent);
    // Every edit below either changes the forest or is retried; ReassignData
    // always changes it, so it is the last resort.
    for (int attempt = 0; attempt < 64; ++attempt) {
      const EditKind k = kinds[pick(kinds.size())];
      LeafDataForest out = src_;
      apply(k, out);
      if (!(out == src_)) return {std::move(out), k};
    }
    LeafDataForest out = src_;
    apply(EditKind::ReassignData, out);
    return {std::move(out), EditKind::ReassignData};
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  bool has_swappable() {
    for (const auto& p : paths_) {
      auto& sibs = siblings_of(src_, p);
      if (p.back() + 1 < sibs.size() && !(sibs[p.back()] == sibs[p.back() + 1])) return true;
    }
    return false;
  }

  void apply(EditKind k, LeafDataForest& f) {
    switch (k) {
      case EditKind::Relabel: {
        ForestNode& v = node_at(f, paths_[pick(paths_.size())]);
        std::vector<std::string> others;
        for (const auto& l : letters_)
          if (l != v.letter) others.push_back(l);
        if (!others.empty()) v.letter = others[pick(others.size())];
        return;
      }
      case EditKind::SwapSiblings: {
        const NodePath& p = paths_[pick(paths_.size())];
        auto& sibs = siblings_of(f, p);
        if (p.back() + 1 < sibs.size()) std::swap(sibs[p.back()], sibs[p.back() + 1]);
        return;
      }
      case EditKind::ReassignData: {
        ForestNode& v = node_at(f, leaves_[pick(leaves_.size())]);
        std::vector<std::uint64_t> choices;
        for (auto d : values_)
          if (d != *v.data) choices.push_back(d);
        choices.push_back(fresh_);
        v.data = choices[pick(choices.size())];
        return;
      }
      case EditKind::DeleteLeaf: {
        NodePath p = leaves_[pick(leaves_.size())];
        auto& sibs = siblings_of(f, p);
        sibs.erase(sibs.begin() + static_cast<std::ptrdiff_t>(p.back()));
        if (p.size() > 1) {
          p.pop_back();
          std::uint64_t fresh = fresh_;
          restore_leaf_data(node_at(f, p), fresh);
        }
        return;
      }
      case EditKind::Reparent: {
        NodePath from = paths_[pick(paths_.size())];
        auto& sibs = siblings_of(f, from);
        ForestNode moved = std::move(sibs[from.back()]);
        sibs.erase(sibs.begin() + static_cast<std::ptrdiff_t>(from.back()));
        std::uint64_t fresh = fresh_;
        if (from.size() > 1) {
          from.pop_back();
          restore_leaf_data(node_at(f, from), fresh);
        }
        // New parent: the root list or any remaining node.
        std::vector<NodePath> targets;
        NodePath prefix;
        collect_paths(f.roots, prefix, targets);
        const std::size_t t = pick(targets.size() + 1);
        std::vector<ForestNode>* dest = &f.roots;
        if (t < targets.size()) {
          ForestNode& parent = node_at(f, targets[t]);
          parent.data.reset();
          dest = &parent.children;
        }
        dest->insert(dest->begin() + static_cast<std::ptrdiff_t>(pick(dest->size() + 1)), std::move(moved));
        return;
      }
    }
  }

  static void restore_leaf_data(ForestNode& v, std::uint64_t& fresh) {
    if (v.children.empty() && !v.data) v.data = fresh++;
  }

  LeafDataForest src_;
  std::mt19937_64 rng_;
  std::vector<NodePath> paths_;
  std::vector<NodePath> leaves_;
  std::set<std::string> letters_;
  std::set<std::uint64_t> values_;
  std::uint64_t fresh_ = 0;
};

}  // namespace detail

/// One random edit, deterministic in `seed`; never returns the input unchanged.
inline Mutation mutate_forest_detailed(const LeafDataForest& forest, std::uint64_t seed) {
  return detail::Mutator(forest, seed).run();
}

inline LeafDataForest mutate_forest(const LeafDataForest& forest, std::uint64_t seed) {
  return mutate_forest_detailed(forest, seed).forest;
}

}  // namespace svas
