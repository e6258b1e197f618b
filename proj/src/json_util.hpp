#pragma once

// Strict JSON reading with line-accurate SchemaErrors. nlohmann does the parsing;
// a small scanner records the source line of every value by JSON pointer.

#include <Eigen/Dense>
#include <json.hpp>

#include <complex>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>

namespace paracurves::jsonio {

using json = nlohmann::json;

struct Document {
  json value;
  std::map<std::string, int> lines;  ///< JSON pointer -> 1-based line of the value
  std::map<std::string, int> key_lines;  ///< JSON pointer -> line of the key naming it

  int line_of(const std::string& pointer) const;
};

/// Parse; malformed text throws SchemaError carrying the line of the syntax error.
std::shared_ptr<const Document> parse(const std::string& text);

std::string read_file(const std::string& path);

class Node {
public:
  Node(std::shared_ptr<const Document> doc, const json* j, std::string pointer)
      : doc_(std::move(doc)), j_(j), ptr_(std::move(pointer)) {}

  static Node root(const std::shared_ptr<const Document>& doc) { return Node(doc, &doc->value, ""); }

  const json& raw() const { return *j_; }
  const std::string& pointer() const { return ptr_; }
  int line() const { return doc_->line_of(ptr_); }

  [[noreturn]] void fail(const std::string& what) const;

  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_null() const { return j_->is_null(); }
  bool has(const std::string& key) const;
  std::size_t size() const;

  Node at(const std::string& key) const;
  Node at(std::size_t index) const;

  /// Reject keys outside `allowed`, reporting the offending key's line.
  void expect_keys(std::initializer_list<const char*> allowed) const;
  void expect_object() const;
  void expect_array() const;

  double number() const;
  long long integer() const;
  unsigned long long unsigned_integer() const;
  bool boolean() const;
  std::string string() const;
  std::complex<double> complex() const;  ///< number or [re, im]

  Eigen::VectorXd vector(int expected = -1) const;
  Eigen::MatrixXd matrix(int rows = -1, int cols = -1) const;
  Eigen::VectorXcd complex_vector(int expected = -1) const;
  Eigen::MatrixXcd complex_matrix(int rows = -1, int cols = -1) const;

  double number_or(const std::string& key, double fallback) const;
  long long integer_or(const std::string& key, long long fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

private:
  std::shared_ptr<const Document> doc_;
  const json* j_;
  std::string ptr_;
};

std::string escape_pointer_token(const std::string& key);

}  // namespace paracurves::jsonio
