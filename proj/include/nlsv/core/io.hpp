#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nlsv/core/potential.hpp"

namespace nlsv {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Plain `key = value` configuration. Every lookup is recorded together with
/// the value actually used, so defaults can be echoed into a manifest.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(t.substr(0, eq));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      c.values_[key] = trim(t.substr(eq + 1));
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    const std::string v = it == values_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }

  double get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    double v = fallback;
    if (it != values_.end()) v = to_double(key, it->second);
    resolved_[key] = format(v);
    return v;
  }

  int get(const std::string& key, int fallback) const {
    const double v = get(key, static_cast<double>(fallback));
    if (v != static_cast<int>(v)) throw ConfigError(key + " must be an integer");
    resolved_[key] = std::to_string(static_cast<int>(v));
    return static_cast<int>(v);
  }

  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    std::vector<double> out = fallback;
    if (it != values_.end()) {
      out.clear();
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    }
    std::string echo;
    for (std::size_t i = 0; i < out.size(); ++i) echo += (i ? "," : "") + format(out[i]);
    resolved_[key] = echo;
    return out;
  }

  const std::map<std::string, std::string>& raw() const { return values_; }
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double to_double(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError(key + ": trailing characters in '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError(key + ": not a number: '" + s + "'");
    }
  }

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

inline PotentialDescriptor read_potential(const Config& c, const std::string& prefix = "potential") {
  using namespace potentials;
  const std::string kind = c.get(prefix, std::string("gaussian_barrier"));
  if (kind == "zero") return Zero{};
  if (kind == "gaussian_barrier") return GaussianBarrier{c.get(prefix + ".v0", 1.0), c.get(prefix + ".sigma", 1.0)};
  if (kind == "soliton_well") return SolitonWell{c.get(prefix + ".kappa", 1.0)};
  if (kind == "square_barrier") return SquareBarrier{c.get(prefix + ".v0", 4.0), c.get(prefix + ".a", 1.0)};
  if (kind == "zero_resonance") return ZeroResonance{c.get(prefix + ".b", 0.3)};
  throw ConfigError("unknown potential '" + kind + "'");
}

inline void write_potential(Config& c, const PotentialDescriptor& d, const std::string& prefix = "potential") {
  using namespace potentials;
  c.set(prefix, descriptor_name(d));
  std::visit(overloaded{
                 [](const Zero&) {},
                 [&](const GaussianBarrier& p) {
                   c.set(prefix + ".v0", Config::format(p.v0));
                   c.set(prefix + ".sigma", Config::format(p.sigma));
                 },
                 [&](const SolitonWell& p) { c.set(prefix + ".kappa", Config::format(p.kappa)); },
                 [&](const SquareBarrier& p) {
                   c.set(prefix + ".v0", Config::format(p.v0));
                   c.set(prefix + ".a", Config::format(p.a));
                 },
                 [&](const ZeroResonance& p) { c.set(prefix + ".b", Config::format(p.b)); },
             },
             d);
}

inline SpatialGrid read_grid(const Config& c, const std::string& prefix = "grid", double L = 40.0, int N = 2048) {
  return SpatialGrid(c.get(prefix + ".L", L), c.get(prefix + ".N", N));
}

inline void write_grid(Config& c, const SpatialGrid& g, const std::string& prefix = "grid") {
  c.set(prefix + ".L", Config::format(g.half_width()));
  c.set(prefix + ".N", std::to_string(g.size()));
}

/// Header row plus rows of doubles, 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<double> row) {
    if (row.size() != columns_.size()) throw Error("csv row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::size_t rows() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + Config::format(r[i]);
      out += "\n";
    }
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

inline CsvTable field_table(const SpatialGrid& g, const CVec& u) {
  CsvTable t({"x", "re_u", "im_u"});
  for (int i = 0; i < g.size(); ++i) t.add({g.x(i), u[i].real(), u[i].imag()});
  return t;
}

}  // namespace nlsv
