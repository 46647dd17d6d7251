#pragma once

#include <cstdint>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mmdvar::cli {

/// Output document: an ordered tree of objects, arrays and scalars.
/// Object keys keep insertion order, so rendering is stable.
class Node {
 public:
  using Object = std::vector<std::pair<std::string, Node>>;
  using Array = std::vector<Node>;

  Node() = default;
  Node(std::nullptr_t) {}
  Node(bool b) : value_(b) {}
  Node(double d) : value_(d) {}
  Node(std::int64_t i) : value_(i) {}
  Node(std::uint64_t u) : value_(u) {}
  Node(int i) : value_(static_cast<std::int64_t>(i)) {}
  Node(std::string s) : value_(std::move(s)) {}
  Node(const char* s) : value_(std::string(s)) {}

  static Node object() { Node n; n.value_ = Object{}; return n; }
  static Node array() { Node n; n.value_ = Array{}; return n; }

  /// Appends a member to an object node.
  Node& set(std::string key, Node value);
  /// Appends an element to an array node.
  Node& push(Node value);

  const auto& value() const noexcept { return value_; }

 private:
  std::variant<std::nullptr_t, bool, double, std::int64_t, std::uint64_t, std::string,
               Object, Array>
      value_;
};

/// 17 significant digits, so every finite double survives a round trip.
std::string format_number(double v);

/// Indented JSON. Non-finite numbers become null.
void write_json(std::ostream& out, const Node& doc);

/// One "key<TAB>value" line per scalar; nested keys are joined with '.'
/// and array elements use their index.
void write_tsv(std::ostream& out, const Node& doc);

}  // namespace mmdvar::cli
