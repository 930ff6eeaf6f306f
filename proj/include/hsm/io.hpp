#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsm/hierarchy.hpp"

namespace hsm {

// Malformed input file; carries a "file:line: what" style message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

// Vector files: one number per line, blank lines and '#' comments ignored.
Eigen::VectorXd read_vector(std::istream& in, const std::string& name = "");
Eigen::VectorXd read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const Eigen::VectorXd& v);
void write_vector_file(const std::string& path, const Eigen::VectorXd& v);

// Matrix files: CSV, one row per line, no header.  require_symmetric rejects
// matrices that are not square and symmetric (exact entry equality).
Eigen::MatrixXd read_matrix(std::istream& in, bool require_symmetric,
                            const std::string& name = "");
Eigen::MatrixXd read_matrix_file(const std::string& path,
                                 bool require_symmetric);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

// Hierarchy files:
//   p <int>
//   node <id> <idx> [<idx> ...]
//   edge <parent-id> <child-id>
// '#' starts a comment; coordinate indices are 1-based in the file and node
// ids are arbitrary distinct integers.  Node order follows file order.
struct HierarchyFile {
  Hierarchy hierarchy;
  std::vector<long long> node_ids;  // original ids, in node order
};
HierarchyFile read_hierarchy(std::istream& in, const std::string& name = "");
HierarchyFile read_hierarchy_file(const std::string& path);
void write_hierarchy(std::ostream& out, const Hierarchy& h,
                     const std::vector<long long>& node_ids = {});

// CSV with a '#'-prefixed metadata preamble, then a header row, then data.
// All numbers go through format_double so identical runs emit identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void metadata(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

 private:
  std::ostream& out_;
  bool header_written_ = false;
};

}  // namespace hsm
