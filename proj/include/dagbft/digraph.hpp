#pragma once

// Plain directed graph with the vertex-insert operation, reachability,
// the extension order G1 <= G2 and union. Vertex type must be ordered.

#include <deque>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <utility>

#include "dagbft/errors.hpp"

namespace dagbft {

enum class Closure {
  kStrict,     // v ->+ v'
  kReflexive,  // v ->* v'
};

template <typename V>
class Digraph {
 public:
  using Edge = std::pair<V, V>;

  bool contains(const V& v) const { return vertices_.contains(v); }
  bool has_edge(const V& from, const V& to) const { return edges_.contains({from, to}); }

  const std::set<V>& vertices() const { return vertices_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }

  // insert(G, v, {(s, v) | s in sources}). Every source must already be a
  // vertex; v itself may or may not be present.
  void insert(const V& v, std::span<const V> sources) {
    for (const auto& s : sources) {
      if (!contains(s)) throw UnknownBlockError("edge source is not a vertex");
    }
    vertices_.insert(v);
    succ_[v];
    pred_[v];
    for (const auto& s : sources) {
      edges_.insert({s, v});
      succ_[s].insert(v);
      pred_[v].insert(s);
    }
  }

  void insert(const V& v, std::initializer_list<V> sources) {
    insert(v, std::span<const V>(sources.begin(), sources.size()));
  }

  const std::set<V>& successors(const V& v) const { return lookup(succ_, v); }
  const std::set<V>& predecessors(const V& v) const { return lookup(pred_, v); }

  bool reaches(const V& from, const V& to, Closure mode) const {
    if (!contains(from) || !contains(to)) throw UnknownBlockError("reaches: unknown vertex");
    if (mode == Closure::kReflexive && from == to) return true;
    std::set<V> seen;
    std::deque<V> todo(succ_.at(from).begin(), succ_.at(from).end());
    while (!todo.empty()) {
      V v = todo.front();
      todo.pop_front();
      if (v == to) return true;
      if (!seen.insert(v).second) continue;
      for (const auto& w : succ_.at(v)) todo.push_back(w);
    }
    return false;
  }

  // Kahn's algorithm.
  bool is_acyclic() const {
    std::map<V, std::size_t> indegree;
    for (const auto& v : vertices_) indegree[v] = pred_.at(v).size();
    std::deque<V> ready;
    for (const auto& [v, d] : indegree) {
      if (d == 0) ready.push_back(v);
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
      V v = ready.front();
      ready.pop_front();
      ++removed;
      for (const auto& w : succ_.at(v)) {
        if (--indegree[w] == 0) ready.push_back(w);
      }
    }
    return removed == vertices_.size();
  }

  bool operator==(const Digraph& o) const {
    return vertices_ == o.vertices_ && edges_ == o.edges_;
  }

  // G1 <= G2: V1 subset of V2 and E1 = E2 restricted to V1 x V1.
  friend bool extends(const Digraph& g1, const Digraph& g2) {
    for (const auto& v : g1.vertices_) {
      if (!g2.contains(v)) return false;
    }
    for (const auto& e : g1.edges_) {
      if (!g2.edges_.contains(e)) return false;
    }
    for (const auto& v : g1.vertices_) {
      for (const auto& w : g2.successors(v)) {
        if (g1.contains(w) && !g1.edges_.contains({v, w})) return false;
      }
    }
    return true;
  }

  friend Digraph graph_union(const Digraph& g1, const Digraph& g2) {
    Digraph out = g1;
    for (const auto& v : g2.vertices_) {
      out.vertices_.insert(v);
      out.succ_[v];
      out.pred_[v];
    }
    for (const auto& e : g2.edges_) {
      out.edges_.insert(e);
      out.succ_[e.first].insert(e.second);
      out.pred_[e.second].insert(e.first);
    }
    return out;
  }

 private:
  static const std::set<V>& lookup(const std::map<V, std::set<V>>& m, const V& v) {
    auto it = m.find(v);
    if (it == m.end()) throw UnknownBlockError("unknown vertex");
    return it->second;
  }

  std::set<V> vertices_;
  std::set<Edge> edges_;
  std::map<V, std::set<V>> succ_;
  std::map<V, std::set<V>> pred_;
};

}  // namespace dagbft
