#include "vorres/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "vorres/error.hpp"
#include "vorres/text.hpp"

namespace vorres {

Config Config::parse(std::istream& in, std::string_view source) {
  Config cfg;
  std::string line;
  for (long lineno = 1; std::getline(in, line); ++lineno) {
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw DataError(std::string(source) + " line " + std::to_string(lineno) +
                      ": expected key = value");
    const std::string_view key = trim(s.substr(0, eq));
    if (key.empty())
      throw DataError(std::string(source) + " line " + std::to_string(lineno) + ": empty key");
    cfg.values_[std::string(key)] = std::string(trim(s.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  return parse(in, path.string());
}

void Config::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

void Config::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
}

void Config::set(const std::string& key, double value) { values_[key] = format_double(value); }

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key) const {
  auto v = get(key);
  if (!v) throw DataError("missing config key '" + key + "'");
  return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
  auto v = get(key);
  return v ? parse_long(*v, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  const std::string v = get_string(key);
  for (std::string_view f : split(v, ',')) out.push_back(parse_double(trim(f), key));
  return out;
}

}  // namespace vorres
