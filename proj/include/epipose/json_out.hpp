#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

// Deterministic JSON serialization: keys in sorted order (nlohmann::json's
// std::map backing), 2-space indent, LF only, floats via format_g17 so
// written values parse back bit-identically. Non-finite floats become null
// (JSON has no NaN), which readers treat as "no value".

namespace epipose {

std::string format_g17(double value);  // defined with the other formatters

namespace detail {

inline void json_escape_to(std::ostream& os, const std::string& s) {
  os << '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': os << "\\\""; break;
      case '\\': os << "\\\\"; break;
      case '\b': os << "\\b"; break;
      case '\f': os << "\\f"; break;
      case '\n': os << "\\n"; break;
      case '\r': os << "\\r"; break;
      case '\t': os << "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          os << buf;
        } else {
          os << char(c);
        }
    }
  }
  os << '"';
}

inline void json_dump_to(std::ostream& os, const nlohmann::json& j,
                         int level) {
  const std::string pad(std::size_t(level) * 2, ' ');
  const std::string pad_in(std::size_t(level + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      os << "null";
      break;
    case nlohmann::json::value_t::boolean:
      os << (j.get<bool>() ? "true" : "false");
      break;
    case nlohmann::json::value_t::string:
      json_escape_to(os, j.get<std::string>());
      break;
    case nlohmann::json::value_t::number_integer:
      os << j.get<std::int64_t>();
      break;
    case nlohmann::json::value_t::number_unsigned:
      os << j.get<std::uint64_t>();
      break;
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v))
        os << format_g17(v);
      else
        os << "null";
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      std::size_t i = 0;
      for (const auto& item : j.items()) {
        os << pad_in;
        json_escape_to(os, item.key());
        os << ": ";
        json_dump_to(os, item.value(), level + 1);
        if (++i != j.size()) os << ",";
        os << "\n";
      }
      os << pad << "}";
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        break;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        os << pad_in;
        json_dump_to(os, j[i], level + 1);
        if (i + 1 != j.size()) os << ",";
        os << "\n";
      }
      os << pad << "]";
      break;
    }
    default:
      os << "null";  // binary/discarded never appear in our documents
  }
}

}  // namespace detail

inline std::string json_to_string(const nlohmann::json& j) {
  std::ostringstream os;
  detail::json_dump_to(os, j, 0);
  return os.str();
}

}  // namespace epipose
