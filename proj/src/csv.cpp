#include "factorlab/csv.hpp"

#include "factorlab/common.hpp"

#include <charconv>
#include <cstdlib>

#include <fmt/format.h>

namespace factorlab::csv {

void split(std::string_view line, std::vector<std::string_view>& out, std::deque<std::string>* scratch) {
  out.clear();
  if (scratch) scratch->clear();
  std::size_t pos = 0;
  while (true) {
    if (pos < line.size() && line[pos] == '"') {
      // Quoted field; a doubled quote stands for one quote character.
      std::size_t end = pos + 1;
      bool escaped = false;
      while (true) {
        end = line.find('"', end);
        if (end == std::string_view::npos) throw Error("unterminated quoted field");
        if (end + 1 < line.size() && line[end + 1] == '"') {
          escaped = true;
          end += 2;
          continue;
        }
        break;
      }
      std::string_view body = line.substr(pos + 1, end - pos - 1);
      if (escaped) {
        if (!scratch) throw Error("quoted field with escapes needs scratch storage");
        std::string& u = scratch->emplace_back();
        for (std::size_t k = 0; k < body.size(); ++k) {
          u.push_back(body[k]);
          if (body[k] == '"') ++k;
        }
        body = u;
      }
      out.push_back(body);
      pos = end + 1;
      if (pos >= line.size()) return;
      if (line[pos] != ',') throw Error("unexpected character after closing quote");
      ++pos;
      continue;
    }
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!in_) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::string_view> fields;
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty() || line_[0] == '#') continue;
    try {
      split(line_, fields, &scratch_);
    } catch (const Error& e) {
      fail(e.what());
    }
    for (auto f : fields) header_.emplace_back(f);
    return;
  }
  throw Error(fmt::format("{}: missing header row", path.string()));
}

void Reader::require_header(const std::vector<std::string_view>& expected, bool allow_extra) const {
  bool ok = header_.size() >= expected.size() && (allow_extra || header_.size() == expected.size());
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = header_[i] == expected[i];
  if (!ok) {
    std::string want;
    for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
    throw Error(fmt::format("{}: unexpected header, expected '{}'", path_.string(), want));
  }
}

bool Reader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (line_.empty() || line_[0] == '#') continue;
    try {
      split(line_, fields, &scratch_);
    } catch (const Error& e) {
      fail(e.what());
    }
    return true;
  }
  return false;
}

void Reader::fail(std::string_view what) const {
  throw Error(fmt::format("{}:{}: {}", path_.string(), line_no_, what));
}

double parse_double(std::string_view s, const Reader& ctx) {
  if (s.empty()) ctx.fail("empty numeric field");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    ctx.fail(fmt::format("malformed number '{}'", s));
  }
  return v;
}

double parse_optional_double(std::string_view s, const Reader& ctx) {
  return s.empty() ? kMissing : parse_double(s, ctx);
}

Writer::Writer(const std::filesystem::path& path,
               const std::vector<std::pair<std::string, std::string>>& meta, std::string_view header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& [k, v] : meta) out_ << "# " << k << '=' << v << '\n';
  out_ << header << '\n';
}

std::string fmt_double(double x) {
  if (is_missing(x)) return {};
  return fmt::format("{}", x);
}

}  // namespace factorlab::csv
