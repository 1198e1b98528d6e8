#include "condpoint/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "condpoint/error.hpp"

namespace condpoint::io {
namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void escape(std::string& out, const std::string& s) {
  // Reuse the library's string escaping.
  out += Json(s).dump();
}

void write(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        escape(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? (indent > 0 ? ", " : ",") : ",";
        first = false;
        if (!flat) {
          out += nl;
          out += pad;
        }
        write(out, e, indent, depth + 1);
      }
      if (!flat) {
        out += nl;
        out += close;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        out += format17(v);
      } else {
        out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
      }
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json document(const std::string& schema) {
  Json j = Json::object();
  j["schema"] = schema;
  j["schema_version"] = kSchemaVersion;
  return j;
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  out += "\n";
  return out;
}

double read_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error(ErrorKind::Config, "expected a number, got " + j.dump());
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format17(v);
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw Error(ErrorKind::Task, "CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ",";
    body_ += cells[i];
  }
  body_ += "\n";
}

std::string Csv::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ",";
    out += header_[i];
  }
  out += "\n";
  return out + body_;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Task, "cannot write " + path.string());
  f << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Config, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace condpoint::io
