#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hsm {

// Outcome of Hierarchy::validate().  kind identifies the first violated
// invariant; message carries the offending ids/indices.
struct ValidationReport {
  enum class Kind {
    Ok,
    EmptyNode,
    IndexOutOfRange,
    Overlap,
    BadEdge,
    Cycle,
  };
  Kind kind = Kind::Ok;
  std::string message;
  bool ok() const { return kind == Kind::Ok; }
};

// DAG over disjoint index sets.  Node i owns a non-empty set of coordinate
// indices in {0,...,p-1}; sets of distinct nodes are disjoint but need not
// cover {0,...,p-1}.  Edges are (parent, child) pairs of node ids.
// Immutable after construction; validation runs once in the constructor and
// the traversal caches (adjacency, topological order) are reused afterwards.
class Hierarchy {
 public:
  Hierarchy(int p, std::vector<std::vector<int>> nodes,
            std::vector<std::pair<int, int>> edges);

  // Chain s_0 -> s_1 -> ... with contiguous coordinate blocks of the given
  // sizes; p = sum of sizes.
  static Hierarchy path(const std::vector<int>& node_sizes);

  int p() const { return p_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<int>& node(int i) const { return nodes_[i]; }
  const std::vector<std::vector<int>>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  const ValidationReport& validate() const { return report_; }

  // The remaining accessors require validate().ok() and throw
  // std::invalid_argument otherwise.
  const std::vector<std::vector<int>>& children() const;
  const std::vector<std::vector<int>>& parents() const;
  const std::vector<int>& topological_order() const;

  // Node ids reachable from i (through i's out-edges), including i; sorted.
  std::vector<int> descendants(int i) const;
  // Node ids from which j is reachable, including j; sorted.
  std::vector<int> ancestors(int j) const;

  bool is_forest() const;  // every node has at most one parent
  bool is_path() const;    // single chain covering all nodes
  // Node ids from root to leaf; only valid when is_path().
  std::vector<int> path_order() const;

 private:
  void require_valid() const;

  int p_ = 0;
  std::vector<std::vector<int>> nodes_;
  std::vector<std::pair<int, int>> edges_;
  ValidationReport report_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> parents_;
  std::vector<int> topo_;
};

struct Group {
  std::vector<int> indices;  // sorted coordinate indices
  double weight = 0.0;
};

struct GroupStructure {
  int p = 0;
  std::vector<Group> groups;  // one group per node, in node order
};

// Group i = union of node sets over descendants(i).  weights empty selects
// w_g = sqrt(|g|); otherwise weights[i] is used and must be positive.
GroupStructure group_structure_gl(const Hierarchy& h,
                                  const std::vector<double>& weights = {});

// Group i = union of node sets over ancestors(i).
GroupStructure group_structure_log(const Hierarchy& h,
                                   const std::vector<double>& weights = {});

// Nested groups {s_0}, {s_0,s_1}, ... for a chain with contiguous blocks of
// the given sizes.  Equals group_structure_log(Hierarchy::path(node_sizes)).
GroupStructure nested_groups(const std::vector<int>& node_sizes,
                             const std::vector<double>& weights = {});

struct PathDecomposition {
  // Disjoint node-id sequences covering every node; consecutive nodes in a
  // sequence are joined by an edge of the hierarchy.
  std::vector<std::vector<int>> paths;
};

// Greedy cover of the node set by directed paths: from each root (in node
// order), repeatedly take the path maximizing the number of uncovered nodes
// until the root's descendants are covered.  Maximizing paths are found by a
// memoized longest-uncovered-suffix sweep; ties resolve to the
// lexicographically smallest node-index sequence.  When the chosen path
// interleaves covered and uncovered nodes, each maximal uncovered run is
// emitted as its own path so that the output paths are edge-connected.
PathDecomposition path_decompose(const Hierarchy& h);

// Groups ancestors(j) for each node j on the path, in path order.  These are
// nested, so the weights (sqrt-size by default) are strictly increasing.
GroupStructure induced_path_groups(const Hierarchy& h,
                                   const std::vector<int>& path_nodes,
                                   const std::vector<double>& node_weights = {});

}  // namespace hsm
