#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "volterra/error.hpp"
#include "volterra/problem.hpp"

namespace volterra {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Key {
  std::string name;
  std::vector<std::size_t> index;  // 1-based as written
};

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw ConfigError(fmt::format("line {}: {}", line, message));
}

std::size_t parse_count(std::string_view text, std::size_t line, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(line, fmt::format("{} must be a non-negative integer, got '{}'", what, text));
  }
  return value;
}

Key parse_key(std::string_view text, std::size_t line) {
  Key key;
  const auto bracket = text.find('[');
  key.name = std::string(trim(text.substr(0, bracket)));
  if (key.name.empty()) fail(line, "missing key");
  while (bracket != std::string_view::npos && !text.empty()) {
    text = text.substr(text.find('['));
    const auto close = text.find(']');
    if (close == std::string_view::npos) fail(line, "unterminated '[' in key");
    const std::size_t idx = parse_count(trim(text.substr(1, close - 1)), line, "index");
    if (idx == 0) fail(line, "indices start at 1");
    key.index.push_back(idx);
    text = trim(text.substr(close + 1));
    if (!text.empty() && text.front() != '[') fail(line, "unexpected text after index");
    if (text.empty()) break;
  }
  return key;
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

struct Entry {
  std::string value;
  std::size_t line;
};

}  // namespace

SystemSpec parse_config(std::string_view text) {
  std::map<std::string, Entry> scalars;                                    // name -> value
  std::map<std::string, std::map<std::vector<std::size_t>, Entry>> tables;  // name -> index -> value

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const Key key = parse_key(trim(line.substr(0, eq)), line_no);
    std::string value = unquote(trim(line.substr(eq + 1)));
    if (value.empty()) fail(line_no, "empty value for '" + key.name + "'");
    if (key.index.empty()) {
      if (!scalars.emplace(key.name, Entry{value, line_no}).second) fail(line_no, "duplicate key '" + key.name + "'");
    } else {
      if (!tables[key.name].emplace(key.index, Entry{value, line_no}).second) {
        fail(line_no, "duplicate key '" + key.name + "'");
      }
    }
  }

  static const std::map<std::string, std::size_t> kKnown = {
      {"name", 0}, {"description", 0}, {"n", 0},  {"T", 0},     {"unknown_of_band", 0},
      {"alpha", 1}, {"K", 2},          {"G", 2}, {"f", 1}, {"exact", 1}, {"guess", 1}};
  for (const auto& [name, entry] : scalars) {
    const auto it = kKnown.find(name);
    if (it == kKnown.end() || it->second != 0) fail(entry.line, "unknown key '" + name + "'");
  }
  for (const auto& [name, rows] : tables) {
    const auto it = kKnown.find(name);
    for (const auto& [idx, entry] : rows) {
      if (it == kKnown.end() || it->second != idx.size()) {
        fail(entry.line, fmt::format("unknown key '{}' with {} indices", name, idx.size()));
      }
    }
  }

  SystemSpec spec;
  const auto scalar = [&](const char* name) -> const Entry* {
    const auto it = scalars.find(name);
    return it == scalars.end() ? nullptr : &it->second;
  };
  if (const Entry* e = scalar("name")) spec.name = e->value;
  if (const Entry* e = scalar("description")) spec.description = e->value;

  const Entry* n = scalar("n");
  if (!n) throw ConfigError("missing required key 'n'");
  spec.equations = parse_count(n->value, n->line, "n");
  if (spec.equations == 0) fail(n->line, "n must be at least 1");

  const Entry* horizon = scalar("T");
  if (!horizon) throw ConfigError("missing required key 'T'");
  try {
    std::size_t used = 0;
    spec.horizon = std::stod(horizon->value, &used);
    if (used != horizon->value.size()) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    fail(horizon->line, "T must be a number, got '" + horizon->value + "'");
  }

  const auto& alphas = tables["alpha"];
  const std::size_t bands = alphas.size() + 1;
  for (std::size_t j = 1; j < bands; ++j) {
    const auto it = alphas.find({j});
    if (it == alphas.end()) throw ConfigError(fmt::format("alpha[{}] missing (curves must be numbered 1..{})", j, bands - 1));
    spec.curves.push_back(it->second.value);
  }

  const std::size_t eqs = spec.equations;
  const auto check_range = [&](const char* name, std::size_t rows, std::size_t cols) {
    for (const auto& [idx, entry] : tables[name]) {
      if (idx[0] > rows || (idx.size() > 1 && idx[1] > cols)) {
        fail(entry.line, fmt::format("{} index out of range ({} equations, {} bands)", name, rows, cols));
      }
    }
  };
  check_range("K", eqs, bands);
  check_range("G", eqs, bands);
  check_range("f", eqs, 0);
  check_range("exact", eqs, 0);
  check_range("guess", eqs, 0);

  spec.kernels.assign(eqs, std::vector<std::string>(bands));
  spec.nonlinearities.assign(eqs, std::vector<std::string>(bands));
  for (std::size_t i = 1; i <= eqs; ++i) {
    for (std::size_t j = 1; j <= bands; ++j) {
      const auto k = tables["K"].find({i, j});
      if (k == tables["K"].end()) throw ConfigError(fmt::format("K[{}][{}] missing", i, j));
      spec.kernels[i - 1][j - 1] = k->second.value;
      const auto g = tables["G"].find({i, j});
      if (g != tables["G"].end()) spec.nonlinearities[i - 1][j - 1] = g->second.value;
    }
  }

  const auto per_equation = [&](const char* name, bool required) {
    std::vector<std::string> out;
    const auto& rows = tables[name];
    if (rows.empty() && !required) return out;
    for (std::size_t i = 1; i <= eqs; ++i) {
      const auto it = rows.find({i});
      if (it == rows.end()) throw ConfigError(fmt::format("{}[{}] missing", name, i));
      out.push_back(it->second.value);
    }
    return out;
  };
  spec.rhs = per_equation("f", true);
  spec.exact = per_equation("exact", false);
  spec.guess = per_equation("guess", false);

  if (const Entry* map = scalar("unknown_of_band")) {
    std::string_view rest = map->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::size_t c = parse_count(trim(rest.substr(0, comma)), map->line, "unknown_of_band entry");
      if (c == 0 || c > eqs) fail(map->line, fmt::format("unknown_of_band entry {} outside 1..{}", c, eqs));
      spec.unknown_of_band.push_back(c - 1);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }

  VolterraSystem::from_spec(spec);  // shape and formula errors surface here
  return spec;
}

SystemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: file not found", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    SystemSpec spec = parse_config(text.str());
    if (spec.name.empty()) spec.name = path.stem().string();
    return spec;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace volterra
