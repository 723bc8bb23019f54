#ifndef ENTLAB_CLI_CONFIG_HPP
#define ENTLAB_CLI_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace entlab::cli {

/// Bad flags, malformed config, unknown keys or failed preconditions (exit code 2).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unreadable config or unwritable output (exit code 3).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

inline Format parse_format(const std::string& s)
{
  if (s == "csv")
    return Format::csv;
  if (s == "json")
    return Format::json;
  throw UsageError("format must be csv or json, got '" + s + "'");
}

inline std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` text. Blank lines, lines starting with '#' and trailing
/// ` # comments` are ignored; repeated keys are an error.
inline KeyValues parse_key_values(std::istream& in, const std::string& origin)
{
  KeyValues out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string t = trim(line);
    if (const auto hash = t.find(" #"); hash != std::string::npos)
      t = trim(t.substr(0, hash));
    if (t.empty() || t.front() == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError(origin + ":" + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second)
      throw UsageError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
  }
  return out;
}

inline KeyValues read_key_values(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config file '" + path + "'");
  return parse_key_values(in, path);
}

/// Parses `key=value` as given to --set.
inline std::pair<std::string, std::string> split_assignment(const std::string& s)
{
  const auto eq = s.find('=');
  if (eq == std::string::npos || trim(s.substr(0, eq)).empty())
    throw UsageError("expected key=value, got '" + s + "'");
  return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

inline double to_double(const std::string& key, const std::string& text)
{
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("parameter '" + key + "': expected a number, got '" + text + "'");
  return v;
}

inline std::int64_t to_int(const std::string& key, const std::string& text)
{
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("parameter '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

inline std::uint64_t to_uint64(const std::string& key, const std::string& text)
{
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("parameter '" + key + "': expected a non-negative integer, got '" + text + "'");
  return v;
}

/// One documented experiment parameter.
struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Experiment parameters with defaults applied, after unknown keys were rejected.
class Params {
public:
  Params() = default;
  Params(const std::vector<ParamSpec>& schema, const KeyValues& given, const std::string& experiment)
  {
    for (const auto& [key, value] : given) {
      bool known = false;
      for (const auto& p : schema)
        known = known || p.key == key;
      if (!known)
        throw UsageError("unknown key '" + key + "' for experiment '" + experiment + "'");
    }
    for (const auto& p : schema) {
      auto it = given.find(p.key);
      values_.emplace_back(p.key, it == given.end() ? p.default_value : it->second);
    }
  }

  const std::string& text(const std::string& key) const
  {
    for (const auto& [k, v] : values_)
      if (k == key)
        return v;
    throw std::logic_error("parameter '" + key + "' is not declared");
  }

  double real(const std::string& key) const { return to_double(key, text(key)); }

  double positive(const std::string& key) const
  {
    const double v = real(key);
    if (!(v > 0.0))
      throw UsageError("parameter '" + key + "' must be positive");
    return v;
  }

  std::int64_t integer(const std::string& key, std::int64_t min_value) const
  {
    const auto v = to_int(key, text(key));
    if (v < min_value)
      throw UsageError("parameter '" + key + "' must be at least " + std::to_string(min_value));
    return v;
  }

  /// Comma-separated list of numbers.
  std::vector<double> list(const std::string& key) const
  {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ','))
      out.push_back(to_double(key, trim(item)));
    if (out.empty())
      throw UsageError("parameter '" + key + "' must list at least one value");
    return out;
  }

  /// Resolved values in schema order, for the config echo.
  const std::vector<std::pair<std::string, std::string>>& values() const { return values_; }

private:
  std::vector<std::pair<std::string, std::string>> values_;
};

/// A fully resolved experiment request.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 42;
  std::string out;   ///< empty: standard output
  Format format = Format::csv;
  unsigned threads = 1;
  bool timing = false; ///< embed wall-clock in JSON output
  KeyValues params;  ///< experiment-specific keys, validated against the schema at run time
};

/// Splits file values into harness keys and experiment parameters.
/// Harness keys: experiment, seed, out, format, threads.
inline ExperimentConfig config_from_key_values(const KeyValues& kv)
{
  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "experiment")
      c.experiment = value;
    else if (key == "seed")
      c.seed = to_uint64(key, value);
    else if (key == "out")
      c.out = value;
    else if (key == "format")
      c.format = parse_format(value);
    else if (key == "threads") {
      const auto t = to_int(key, value);
      if (t < 1)
        throw UsageError("threads must be at least 1");
      c.threads = static_cast<unsigned>(t);
    } else
      c.params[key] = value;
  }
  return c;
}

} // namespace entlab::cli

#endif // ENTLAB_CLI_CONFIG_HPP
