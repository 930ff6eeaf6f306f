#include "hsm/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace hsm {

namespace {

std::string itos(int v) { return std::to_string(v); }

}  // namespace

Hierarchy::Hierarchy(int p, std::vector<std::vector<int>> nodes,
                     std::vector<std::pair<int, int>> edges)
    : p_(p), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = static_cast<int>(nodes_.size());
  for (auto& node : nodes_) std::sort(node.begin(), node.end());

  if (p_ < 0) {
    report_ = {ValidationReport::Kind::IndexOutOfRange, "p must be >= 0"};
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].empty()) {
      report_ = {ValidationReport::Kind::EmptyNode,
                 "node " + itos(i) + " has no indices"};
      return;
    }
    for (int idx : nodes_[i]) {
      if (idx < 0 || idx >= p_) {
        report_ = {ValidationReport::Kind::IndexOutOfRange,
                   "node " + itos(i) + " index " + itos(idx) +
                       " outside [0," + itos(p_) + ")"};
        return;
      }
    }
    for (size_t k = 1; k < nodes_[i].size(); ++k) {
      if (nodes_[i][k] == nodes_[i][k - 1]) {
        report_ = {ValidationReport::Kind::Overlap,
                   "node " + itos(i) + " repeats index " + itos(nodes_[i][k])};
        return;
      }
    }
  }
  {
    std::vector<int> owner(static_cast<size_t>(p_), -1);
    for (int i = 0; i < n; ++i) {
      for (int idx : nodes_[i]) {
        if (owner[idx] >= 0) {
          report_ = {ValidationReport::Kind::Overlap,
                     "index " + itos(idx) + " in nodes " + itos(owner[idx]) +
                         " and " + itos(i)};
          return;
        }
        owner[idx] = i;
      }
    }
  }
  for (const auto& [a, b] : edges_) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      report_ = {ValidationReport::Kind::BadEdge,
                 "edge (" + itos(a) + "," + itos(b) + ") references a missing node"};
      return;
    }
    if (a == b) {
      report_ = {ValidationReport::Kind::Cycle,
                 "self edge at node " + itos(a)};
      return;
    }
  }

  children_.assign(n, {});
  parents_.assign(n, {});
  for (const auto& [a, b] : edges_) {
    children_[a].push_back(b);
    parents_[b].push_back(a);
  }
  for (auto& v : children_) std::sort(v.begin(), v.end());
  for (auto& v : parents_) std::sort(v.begin(), v.end());

  // Kahn's algorithm; leftover nodes lie on a cycle.
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(parents_[i].size());
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  topo_.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (int c : children_[v])
      if (--indeg[c] == 0) ready.push(c);
  }
  if (static_cast<int>(topo_.size()) != n) {
    int witness = 0;
    for (int i = 0; i < n; ++i)
      if (indeg[i] > 0) {
        witness = i;
        break;
      }
    report_ = {ValidationReport::Kind::Cycle,
               "cycle through node " + itos(witness)};
    children_.clear();
    parents_.clear();
    topo_.clear();
  }
}

Hierarchy Hierarchy::path(const std::vector<int>& node_sizes) {
  std::vector<std::vector<int>> nodes;
  std::vector<std::pair<int, int>> edges;
  int at = 0;
  for (size_t d = 0; d < node_sizes.size(); ++d) {
    std::vector<int> idx(static_cast<size_t>(std::max(node_sizes[d], 0)));
    std::iota(idx.begin(), idx.end(), at);
    at += node_sizes[d];
    nodes.push_back(std::move(idx));
    if (d > 0) edges.emplace_back(static_cast<int>(d) - 1, static_cast<int>(d));
  }
  return Hierarchy(at, std::move(nodes), std::move(edges));
}

void Hierarchy::require_valid() const {
  if (!report_.ok())
    throw std::invalid_argument("invalid hierarchy: " + report_.message);
}

const std::vector<std::vector<int>>& Hierarchy::children() const {
  require_valid();
  return children_;
}

const std::vector<std::vector<int>>& Hierarchy::parents() const {
  require_valid();
  return parents_;
}

const std::vector<int>& Hierarchy::topological_order() const {
  require_valid();
  return topo_;
}

std::vector<int> Hierarchy::descendants(int i) const {
  require_valid();
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{i}, out;
  seen[i] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int c : children_[v])
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Hierarchy::ancestors(int j) const {
  require_valid();
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{j}, out;
  seen[j] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (int a : parents_[v])
      if (!seen[a]) {
        seen[a] = 1;
        stack.push_back(a);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Hierarchy::is_forest() const {
  require_valid();
  for (const auto& pa : parents_)
    if (pa.size() > 1) return false;
  return true;
}

bool Hierarchy::is_path() const {
  require_valid();
  const int n = node_count();
  if (n == 0) return false;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (parents_[i].size() > 1 || children_[i].size() > 1) return false;
    if (parents_[i].empty()) ++roots;
  }
  return roots == 1;
}

std::vector<int> Hierarchy::path_order() const {
  if (!is_path()) throw std::invalid_argument("hierarchy is not a path");
  int v = -1;
  for (int i = 0; i < node_count(); ++i)
    if (parents_[i].empty()) v = i;
  std::vector<int> order;
  while (v >= 0) {
    order.push_back(v);
    v = children_[v].empty() ? -1 : children_[v][0];
  }
  return order;
}

namespace {

GroupStructure build_groups(const Hierarchy& h,
                            const std::vector<double>& weights,
                            bool use_descendants) {
  h.validate();
  const int n = h.node_count();
  if (!weights.empty() && static_cast<int>(weights.size()) != n)
    throw std::invalid_argument("need one weight per node");
  GroupStructure gs;
  gs.p = h.p();
  gs.groups.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> members =
        use_descendants ? h.descendants(i) : h.ancestors(i);
    auto& g = gs.groups[i];
    for (int m : members)
      g.indices.insert(g.indices.end(), h.node(m).begin(), h.node(m).end());
    std::sort(g.indices.begin(), g.indices.end());
    if (weights.empty()) {
      g.weight = std::sqrt(static_cast<double>(g.indices.size()));
    } else {
      if (!(weights[i] > 0.0))
        throw std::invalid_argument("group weights must be positive");
      g.weight = weights[i];
    }
  }
  return gs;
}

}  // namespace

GroupStructure group_structure_gl(const Hierarchy& h,
                                  const std::vector<double>& weights) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  return build_groups(h, weights, true);
}

GroupStructure group_structure_log(const Hierarchy& h,
                                   const std::vector<double>& weights) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  return build_groups(h, weights, false);
}

GroupStructure nested_groups(const std::vector<int>& node_sizes,
                             const std::vector<double>& weights) {
  const int d = static_cast<int>(node_sizes.size());
  if (!weights.empty() && static_cast<int>(weights.size()) != d)
    throw std::invalid_argument("need one weight per group");
  GroupStructure gs;
  int total = 0;
  for (int ell = 0; ell < d; ++ell) {
    if (node_sizes[ell] <= 0)
      throw std::invalid_argument("node sizes must be positive");
    total += node_sizes[ell];
    Group g;
    g.indices.resize(static_cast<size_t>(total));
    std::iota(g.indices.begin(), g.indices.end(), 0);
    g.weight = weights.empty() ? std::sqrt(static_cast<double>(total))
                               : weights[ell];
    if (!(g.weight > 0.0))
      throw std::invalid_argument("group weights must be positive");
    gs.groups.push_back(std::move(g));
  }
  gs.p = total;
  return gs;
}

PathDecomposition path_decompose(const Hierarchy& h) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  const int n = h.node_count();
  const auto& topo = h.topological_order();
  const auto& children = h.children();

  PathDecomposition pd;
  std::vector<char> covered(n, 0);
  // Longest-uncovered-suffix table, refreshed whenever coverage changes.
  std::vector<int> best(n, 0);
  auto refresh = [&] {
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      int v = *it;
      int sub = 0;
      for (int c : children[v]) sub = std::max(sub, best[c]);
      best[v] = (covered[v] ? 0 : 1) + sub;
    }
  };

  for (int root = 0; root < n; ++root) {
    if (!h.parents()[root].empty()) continue;
    for (;;) {
      refresh();
      if (best[root] == 0) break;  // all descendants covered
      std::vector<int> walk{root};
      int v = root;
      for (;;) {
        int next = -1, gain = 0;
        for (int c : children[v])
          if (best[c] > gain) {
            gain = best[c];
            next = c;
          }
        if (next < 0) break;
        walk.push_back(next);
        v = next;
      }
      // Keep the uncovered nodes, one output path per contiguous run.
      std::vector<int> run;
      for (int w : walk) {
        if (!covered[w]) {
          run.push_back(w);
          covered[w] = 1;
        } else if (!run.empty()) {
          pd.paths.push_back(std::move(run));
          run.clear();
        }
      }
      if (!run.empty()) pd.paths.push_back(std::move(run));
    }
  }
  return pd;
}

GroupStructure induced_path_groups(const Hierarchy& h,
                                   const std::vector<int>& path_nodes,
                                   const std::vector<double>& node_weights) {
  if (!h.validate().ok())
    throw std::invalid_argument("invalid hierarchy: " + h.validate().message);
  if (!node_weights.empty() &&
      static_cast<int>(node_weights.size()) != h.node_count())
    throw std::invalid_argument("need one weight per node");
  GroupStructure gs;
  gs.p = h.p();
  size_t prev = 0;
  for (int j : path_nodes) {
    Group g;
    for (int a : h.ancestors(j))
      g.indices.insert(g.indices.end(), h.node(a).begin(), h.node(a).end());
    std::sort(g.indices.begin(), g.indices.end());
    if (g.indices.size() <= prev)
      throw std::invalid_argument("path groups must be strictly nested");
    prev = g.indices.size();
    g.weight = node_weights.empty()
                   ? std::sqrt(static_cast<double>(g.indices.size()))
                   : node_weights[j];
    if (!(g.weight > 0.0))
      throw std::invalid_argument("group weights must be positive");
    gs.groups.push_back(std::move(g));
  }
  return gs;
}

}  // namespace hsm
