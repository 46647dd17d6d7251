#include "mmdvar_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mmdvar::cli {

Node& Node::set(std::string key, Node value) {
  auto* obj = std::get_if<Object>(&value_);
  if (obj == nullptr) throw std::logic_error("Node::set on a non-object");
  obj->emplace_back(std::move(key), std::move(value));
  return *this;
}

Node& Node::push(Node value) {
  auto* arr = std::get_if<Array>(&value_);
  if (arr == nullptr) throw std::logic_error("Node::push on a non-array");
  arr->push_back(std::move(value));
  return *this;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_string(std::ostream& out, const std::string& s) {
  out << '"';
  for (const char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      case '\r': out << "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

std::string scalar_text(const Node& n) {
  struct Visitor {
    std::string operator()(std::nullptr_t) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const {
      return std::isfinite(d) ? format_number(d) : "null";
    }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t u) const { return std::to_string(u); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Node::Object&) const { return {}; }
    std::string operator()(const Node::Array&) const { return {}; }
  };
  return std::visit(Visitor{}, n.value());
}

void write_json_node(std::ostream& out, const Node& n, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  if (const auto* obj = std::get_if<Node::Object>(&n.value())) {
    if (obj->empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    for (std::size_t i = 0; i < obj->size(); ++i) {
      out << pad;
      write_string(out, (*obj)[i].first);
      out << ": ";
      write_json_node(out, (*obj)[i].second, depth + 1);
      out << (i + 1 < obj->size() ? ",\n" : "\n");
    }
    out << close_pad << '}';
  } else if (const auto* arr = std::get_if<Node::Array>(&n.value())) {
    if (arr->empty()) {
      out << "[]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out << pad;
      write_json_node(out, (*arr)[i], depth + 1);
      out << (i + 1 < arr->size() ? ",\n" : "\n");
    }
    out << close_pad << ']';
  } else if (const auto* s = std::get_if<std::string>(&n.value())) {
    write_string(out, *s);
  } else {
    out << scalar_text(n);
  }
}

void write_tsv_node(std::ostream& out, const Node& n, const std::string& prefix) {
  const auto join = [&prefix](const std::string& k) {
    return prefix.empty() ? k : prefix + "." + k;
  };
  if (const auto* obj = std::get_if<Node::Object>(&n.value())) {
    for (const auto& [k, v] : *obj) write_tsv_node(out, v, join(k));
  } else if (const auto* arr = std::get_if<Node::Array>(&n.value())) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      write_tsv_node(out, (*arr)[i], join(std::to_string(i)));
    }
  } else {
    out << prefix << '\t' << scalar_text(n) << '\n';
  }
}

}  // namespace

void write_json(std::ostream& out, const Node& doc) {
  write_json_node(out, doc, 0);
  out << '\n';
}

void write_tsv(std::ostream& out, const Node& doc) { write_tsv_node(out, doc, ""); }

}  // namespace mmdvar::cli
