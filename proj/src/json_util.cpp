#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "paracurves/errors.hpp"

namespace paracurves::jsonio {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

namespace {

// Walks already-validated JSON text and records the line of each value.
class LineScanner {
public:
  LineScanner(const std::string& text, Document& doc) : s_(text), doc_(doc) {}

  void run() {
    skip_ws();
    value("");
  }

private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        out += s_[pos_ + 1];
        pos_ += 2;
        continue;
      }
      out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& ptr) {
    doc_.lines[ptr] = line_;
    if (pos_ >= s_.size()) return;
    char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '}') {
        ++pos_;
        return;
      }
      while (pos_ < s_.size()) {
        skip_ws();
        int key_line = line_;
        std::string key = string_token();
        std::string child = ptr + "/" + escape_pointer_token(key);
        doc_.key_lines[child] = key_line;
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        value(child);
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        ++pos_;  // closing brace
        return;
      }
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return;
      }
      std::size_t index = 0;
      while (pos_ < s_.size()) {
        skip_ws();
        value(ptr + "/" + std::to_string(index++));
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        ++pos_;
        return;
      }
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[pos_]) == std::string_view::npos) ++pos_;
    }
  }

  const std::string& s_;
  Document& doc_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

int line_at_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string type_name(const json& j) { return j.type_name(); }

}  // namespace

int Document::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines.find(p);
    if (it != lines.end()) return it->second;
    if (p.empty()) return 0;
    p = p.substr(0, p.rfind('/'));
  }
}

std::shared_ptr<const Document> parse(const std::string& text) {
  auto doc = std::make_shared<Document>();
  try {
    doc->value = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based position of the offending character
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw SchemaError("malformed JSON: " + (pos == std::string::npos ? msg : msg.substr(pos)),
                      line_at_byte(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  LineScanner(text, *doc).run();
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Node::fail(const std::string& what) const {
  std::string where = ptr_.empty() ? "/" : ptr_;
  throw SchemaError(where + ": " + what, line());
}

bool Node::has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

std::size_t Node::size() const { return j_->size(); }

Node Node::at(const std::string& key) const {
  expect_object();
  auto it = j_->find(key);
  if (it == j_->end()) fail("missing required key '" + key + "'");
  return Node(doc_, &*it, ptr_ + "/" + escape_pointer_token(key));
}

Node Node::at(std::size_t index) const {
  expect_array();
  if (index >= j_->size()) fail("index " + std::to_string(index) + " out of range");
  return Node(doc_, &(*j_)[index], ptr_ + "/" + std::to_string(index));
}

void Node::expect_keys(std::initializer_list<const char*> allowed) const {
  expect_object();
  for (auto it = j_->begin(); it != j_->end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
    if (!ok) {
      std::string child = ptr_ + "/" + escape_pointer_token(it.key());
      auto kl = doc_->key_lines.find(child);
      throw SchemaError((ptr_.empty() ? std::string("/") : ptr_) + ": unknown key '" + it.key() + "'",
                        kl != doc_->key_lines.end() ? kl->second : line());
    }
  }
}

void Node::expect_object() const {
  if (!j_->is_object()) fail("expected an object, found " + type_name(*j_));
}

void Node::expect_array() const {
  if (!j_->is_array()) fail("expected an array, found " + type_name(*j_));
}

double Node::number() const {
  if (!j_->is_number()) fail("expected a number, found " + type_name(*j_));
  double v = j_->get<double>();
  if (!std::isfinite(v)) fail("number is not finite");
  return v;
}

long long Node::integer() const {
  if (j_->is_number_integer()) return j_->get<long long>();
  if (j_->is_number_float()) {
    double v = j_->get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  fail("expected an integer, found " + type_name(*j_));
}

unsigned long long Node::unsigned_integer() const {
  if (j_->is_number_unsigned()) return j_->get<unsigned long long>();
  long long v = integer();
  if (v < 0) fail("expected a non-negative integer");
  return static_cast<unsigned long long>(v);
}

bool Node::boolean() const {
  if (!j_->is_boolean()) fail("expected a boolean, found " + type_name(*j_));
  return j_->get<bool>();
}

std::string Node::string() const {
  if (!j_->is_string()) fail("expected a string, found " + type_name(*j_));
  return j_->get<std::string>();
}

std::complex<double> Node::complex() const {
  if (j_->is_number()) return {number(), 0.0};
  if (j_->is_array() && j_->size() == 2) return {at(0).number(), at(1).number()};
  fail("expected a number or a [re, im] pair");
}

Eigen::VectorXd Node::vector(int expected) const {
  expect_array();
  if (expected >= 0 && static_cast<int>(size()) != expected)
    fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(size()));
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = at(i).number();
  return v;
}

Eigen::MatrixXd Node::matrix(int rows, int cols) const {
  expect_array();
  if (rows >= 0 && static_cast<int>(size()) != rows)
    fail("expected " + std::to_string(rows) + " rows, found " + std::to_string(size()));
  const std::size_t r = size();
  if (r == 0) return Eigen::MatrixXd(0, std::max(cols, 0));
  const int c = cols >= 0 ? cols : static_cast<int>(at(0).size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r), c);
  for (std::size_t i = 0; i < r; ++i) m.row(static_cast<Eigen::Index>(i)) = at(i).vector(c).transpose();
  return m;
}

Eigen::VectorXcd Node::complex_vector(int expected) const {
  expect_array();
  if (expected >= 0 && static_cast<int>(size()) != expected)
    fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(size()));
  Eigen::VectorXcd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = at(i).complex();
  return v;
}

Eigen::MatrixXcd Node::complex_matrix(int rows, int cols) const {
  expect_array();
  if (rows >= 0 && static_cast<int>(size()) != rows)
    fail("expected " + std::to_string(rows) + " rows, found " + std::to_string(size()));
  const std::size_t r = size();
  if (r == 0) return Eigen::MatrixXcd(0, std::max(cols, 0));
  const int c = cols >= 0 ? cols : static_cast<int>(at(0).size());
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(r), c);
  for (std::size_t i = 0; i < r; ++i) m.row(static_cast<Eigen::Index>(i)) = at(i).complex_vector(c).transpose();
  return m;
}

double Node::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}

long long Node::integer_or(const std::string& key, long long fallback) const {
  return has(key) ? at(key).integer() : fallback;
}

std::string Node::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).string() : fallback;
}

bool Node::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}

}  // namespace paracurves::jsonio
