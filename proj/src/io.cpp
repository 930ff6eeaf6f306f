#include "hsm/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace hsm {

namespace {

std::string where(const std::string& name, int line) {
  std::string s = name.empty() ? "input" : name;
  return s + ":" + std::to_string(line);
}

// Strips comments and surrounding whitespace; empty result means skip.
std::string clean_line(const std::string& raw) {
  std::string s = raw;
  if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

double parse_double(const std::string& tok, const std::string& ctx) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty() || errno == ERANGE)
    throw ParseError(ctx + ": bad number '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok, const std::string& ctx) {
  long long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(ctx + ": bad integer '" + tok + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& name) {
  std::vector<double> vals;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = clean_line(raw);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string tok;
    while (ls >> tok) vals.push_back(parse_double(tok, where(name, lineno)));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

Eigen::VectorXd read_vector_file(const std::string& path) {
  auto in = open_in(path);
  return read_vector(in, path);
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << format_double(v[i]) << '\n';
}

void write_vector_file(const std::string& path, const Eigen::VectorXd& v) {
  auto out = open_out(path);
  write_vector(out, v);
}

Eigen::MatrixXd read_matrix(std::istream& in, bool require_symmetric,
                            const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = clean_line(raw);
    if (s.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(s);
    std::string tok;
    while (std::getline(ls, tok, ','))
      row.push_back(parse_double(clean_line(tok), where(name, lineno)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(where(name, lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError((name.empty() ? "input" : name) + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  if (require_symmetric) {
    if (m.rows() != m.cols())
      throw ParseError((name.empty() ? "input" : name) + ": matrix not square");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < i; ++j)
        if (m(i, j) != m(j, i))
          throw ParseError((name.empty() ? "input" : name) +
                           ": matrix not symmetric at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");
  }
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path,
                                 bool require_symmetric) {
  auto in = open_in(path);
  return read_matrix(in, require_symmetric, path);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

HierarchyFile read_hierarchy(std::istream& in, const std::string& name) {
  int p = -1;
  std::vector<long long> ids;
  std::map<long long, int> id_to_node;
  std::vector<std::vector<int>> nodes;
  std::vector<std::pair<long long, long long>> raw_edges;
  std::vector<int> edge_lines;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = clean_line(raw);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string kw;
    ls >> kw;
    const std::string ctx = where(name, lineno);
    if (kw == "p") {
      std::string tok;
      if (!(ls >> tok)) throw ParseError(ctx + ": p needs a value");
      if (p >= 0) throw ParseError(ctx + ": duplicate p line");
      long long v = parse_int(tok, ctx);
      if (v < 0 || v > (1ll << 30)) throw ParseError(ctx + ": bad p " + tok);
      p = static_cast<int>(v);
    } else if (kw == "node") {
      std::string tok;
      if (!(ls >> tok)) throw ParseError(ctx + ": node needs an id");
      long long id = parse_int(tok, ctx);
      if (id_to_node.count(id))
        throw ParseError(ctx + ": duplicate node id " + tok);
      std::vector<int> idx;
      while (ls >> tok) {
        long long v = parse_int(tok, ctx);
        // File indices are 1-based.
        idx.push_back(static_cast<int>(v) - 1);
      }
      if (idx.empty()) throw ParseError(ctx + ": node " + std::to_string(id) +
                                        " has no indices");
      id_to_node[id] = static_cast<int>(nodes.size());
      ids.push_back(id);
      nodes.push_back(std::move(idx));
    } else if (kw == "edge") {
      std::string ta, tb;
      if (!(ls >> ta >> tb)) throw ParseError(ctx + ": edge needs two ids");
      std::string extra;
      if (ls >> extra) throw ParseError(ctx + ": trailing token '" + extra + "'");
      raw_edges.emplace_back(parse_int(ta, ctx), parse_int(tb, ctx));
      edge_lines.push_back(lineno);
    } else {
      throw ParseError(ctx + ": unknown keyword '" + kw + "'");
    }
  }
  if (p < 0) throw ParseError((name.empty() ? "input" : name) + ": missing p line");
  std::vector<std::pair<int, int>> edges;
  for (size_t e = 0; e < raw_edges.size(); ++e) {
    auto [a, b] = raw_edges[e];
    auto ia = id_to_node.find(a);
    auto ib = id_to_node.find(b);
    if (ia == id_to_node.end() || ib == id_to_node.end())
      throw ParseError(where(name, edge_lines[e]) + ": edge references unknown node id");
    edges.emplace_back(ia->second, ib->second);
  }
  return HierarchyFile{Hierarchy(p, std::move(nodes), std::move(edges)),
                       std::move(ids)};
}

HierarchyFile read_hierarchy_file(const std::string& path) {
  auto in = open_in(path);
  return read_hierarchy(in, path);
}

void write_hierarchy(std::ostream& out, const Hierarchy& h,
                     const std::vector<long long>& node_ids) {
  auto id_of = [&](int i) -> long long {
    return node_ids.empty() ? i + 1 : node_ids[i];
  };
  out << "p " << h.p() << '\n';
  for (int i = 0; i < h.node_count(); ++i) {
    out << "node " << id_of(i);
    for (int idx : h.node(i)) out << ' ' << idx + 1;
    out << '\n';
  }
  for (const auto& [a, b] : h.edges())
    out << "edge " << id_of(a) << ' ' << id_of(b) << '\n';
}

void CsvWriter::metadata(const std::string& key, const std::string& value) {
  out_ << "# " << key << " = " << value << '\n';
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out_ << ',';
    out_ << cols[i];
  }
  out_ << '\n';
  header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace hsm
