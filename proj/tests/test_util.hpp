#pragma once

// Shared fixtures for the test binaries: reference hierarchies, random
// instance generators, and a parser for the CSV strings the experiment
// runners emit.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsm/hierarchy.hpp"

namespace testutil {

// Three roots over three leaves; every leaf has two parents, so the DAG is
// not a forest and the group overlaps are real.
inline hsm::Hierarchy two_layer_dag() {
  std::vector<std::vector<int>> nodes = {{0}, {1}, {2}, {3}, {4}, {5}};
  std::vector<std::pair<int, int>> edges = {{0, 3}, {1, 3}, {0, 4},
                                            {2, 4}, {1, 5}, {2, 5}};
  return hsm::Hierarchy(6, std::move(nodes), std::move(edges));
}

inline std::vector<int> random_sizes(std::mt19937_64& rng, int min_depth,
                                     int max_depth, int max_size) {
  std::uniform_int_distribution<int> depth_pick(min_depth, max_depth);
  std::uniform_int_distribution<int> size_pick(1, max_size);
  std::vector<int> sizes(static_cast<size_t>(depth_pick(rng)));
  for (auto& s : sizes) s = size_pick(rng);
  return sizes;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, int n,
                                       double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

// Standard nested-group weights sqrt(|s_0| + ... + |s_d|).
inline Eigen::VectorXd nested_weights(const std::vector<int>& sizes) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(sizes.size()));
  double cum = 0.0;
  for (size_t d = 0; d < sizes.size(); ++d) {
    cum += sizes[d];
    w[static_cast<Eigen::Index>(d)] = std::sqrt(cum);
  }
  return w;
}

// Standard suffix-group weights sqrt(|s_d| + ... + |s_{D-1}|).
inline Eigen::VectorXd suffix_weights(const std::vector<int>& sizes) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(sizes.size()));
  double cum = 0.0;
  for (size_t d = sizes.size(); d-- > 0;) {
    cum += sizes[d];
    w[static_cast<Eigen::Index>(d)] = std::sqrt(cum);
  }
  return w;
}

// Connected DAG: every non-root picks one parent among the earlier nodes
// plus an optional second one, so multi-parent overlaps occur.
inline hsm::Hierarchy random_dag(std::mt19937_64& rng, int max_nodes,
                                 int max_size) {
  std::uniform_int_distribution<int> node_count(2, max_nodes);
  std::uniform_int_distribution<int> node_size(1, max_size);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = node_count(rng);
  std::vector<std::vector<int>> nodes(static_cast<size_t>(n));
  int at = 0;
  for (auto& s : nodes) {
    int len = node_size(rng);
    for (int i = 0; i < len; ++i) s.push_back(at++);
  }
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    int first = pick(rng);
    edges.emplace_back(first, v);
    if (v >= 2 && coin(rng) < 0.4) {
      int second = pick(rng);
      if (second != first) edges.emplace_back(second, v);
    }
  }
  return hsm::Hierarchy(at, std::move(nodes), std::move(edges));
}

// Forest: every node has at most one parent; some nodes stay roots.
inline hsm::Hierarchy random_forest(std::mt19937_64& rng, int max_nodes,
                                    int max_size) {
  std::uniform_int_distribution<int> node_count(1, max_nodes);
  std::uniform_int_distribution<int> node_size(1, max_size);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = node_count(rng);
  std::vector<std::vector<int>> nodes(static_cast<size_t>(n));
  int at = 0;
  for (auto& s : nodes) {
    int len = node_size(rng);
    for (int i = 0; i < len; ++i) s.push_back(at++);
  }
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    if (coin(rng) < 0.15) continue;
    std::uniform_int_distribution<int> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  return hsm::Hierarchy(at, std::move(nodes), std::move(edges));
}

// Header and data rows of an experiment CSV; '#' preamble lines are kept
// aside as raw strings.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw std::runtime_error("no such column: " + name);
  }
  const std::string& cell(size_t r, const std::string& name) const {
    return rows.at(r).at(static_cast<size_t>(col(name)));
  }
  double num(size_t r, const std::string& name) const {
    return std::stod(cell(r, name));
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.metadata.push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) cells.push_back(item);
    if (t.columns.empty())
      t.columns = std::move(cells);
    else
      t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace testutil
