#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace factorlab::csv {

/// Line-oriented reader for the comma-separated schemas used throughout the
/// project. Lines starting with '#' are metadata and skipped; the first
/// remaining line is the header.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  /// Throws unless the header starts with `expected` (extra trailing columns allowed
  /// only when `allow_extra`).
  void require_header(const std::vector<std::string_view>& expected, bool allow_extra = false) const;

  /// Next data row; false at end of file. Fields view into an internal buffer that
  /// stays valid until the following call.
  bool next(std::vector<std::string_view>& fields);
  std::size_t line_number() const { return line_no_; }
  const std::filesystem::path& path() const { return path_; }

  [[noreturn]] void fail(std::string_view what) const;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::vector<std::string> header_;
  std::deque<std::string> scratch_;
  std::size_t line_no_ = 0;
};

/// RFC 4180 style: fields may be double-quoted, with "" for a literal quote. Unescaped
/// copies live in `scratch` when needed.
void split(std::string_view line, std::vector<std::string_view>& out, std::deque<std::string>* scratch = nullptr);
/// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);
double parse_double(std::string_view s, const Reader& ctx);
/// Empty field parses as missing.
double parse_optional_double(std::string_view s, const Reader& ctx);

/// Writer that emits `# key=value` metadata lines before the header.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& meta,
         std::string_view header);
  std::ofstream& stream() { return out_; }
  void line(std::string_view s) {
    out_ << s << '\n';
  }

 private:
  std::ofstream out_;
};

/// Shortest round-trip decimal; "" for missing.
std::string fmt_double(double x);

}  // namespace factorlab::csv
