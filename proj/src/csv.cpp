#include "dwarp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace dwarp {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CellWriter {
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(Real v) const { return format_real(v); }
  std::string operator()(const std::string& v) const { return quote(v); }
};

}  // namespace

std::string format_real(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += quote(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += std::visit(CellWriter{}, row[i]);
    }
    out += '\n';
  }
  return out;
}

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text, bool complete) {
  auto partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + partial.string());
    out << text;
    if (!out) throw Error("write failed: " + partial.string());
  }
  if (!complete) return partial;
  std::filesystem::rename(partial, path);
  return path;
}

}  // namespace dwarp
