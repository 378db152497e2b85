#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "selfbh/system_model.hpp"

namespace selfbh {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<KeyValueLine> parse_key_value_lines(std::string_view text) {
  std::vector<KeyValueLine> out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'name = value'");
    }
    const std::string_view name = trim(line.substr(0, eq));
    if (name.empty()) throw ConfigError(where + ": empty name");
    if (!seen.emplace(name).second) {
      throw ConfigError(where + ": duplicate key '" + std::string(name) + "'");
    }
    out.push_back({line_no, std::string(name), std::string(trim(line.substr(eq + 1)))});
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double parse_number(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(what + ": '" + std::string(text) + "' is not a number");
  }
  if (!std::isfinite(value)) throw ConfigError(what + ": non-finite value");
  return value;
}

DbConfig parse_config_text(std::string_view text) {
  DbConfig out;
  for (const KeyValueLine& kv : parse_key_value_lines(text)) {
    out.emplace(kv.name,
                parse_number(kv.value, "line " + std::to_string(kv.line) + " '" + kv.name + "'"));
  }
  return out;
}

DbConfig load_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

}  // namespace selfbh
