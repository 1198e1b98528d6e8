#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace condpoint::io {

/// Insertion-ordered so that written artifacts are byte-stable.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// A JSON number, or the strings "inf", "-inf", "nan" for non-finite values.
Json number(double v);
Json numbers(const std::vector<double>& v);
/// Header every artifact starts with.
Json document(const std::string& schema);

/// Serializes with floating-point numbers written to 17 significant digits.
std::string dump(const Json& j, int indent = 2);
/// Reads a number written by `number` (also accepts the non-finite strings).
double read_number(const nlohmann::json& j);

std::string csv_number(double v);

/// Header row plus comma-separated rows.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::string body_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace condpoint::io
