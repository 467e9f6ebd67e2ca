#include "amv/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amv/core/parse.hpp"

namespace amv {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::identities, "identities"},       {ExperimentKind::moments, "moments"},
      {ExperimentKind::convergence, "convergence"},     {ExperimentKind::heisenberg_bpz, "heisenberg-bpz"},
      {ExperimentKind::dirichlet, "dirichlet"},         {ExperimentKind::weak_amv, "weak-amv"},
      {ExperimentKind::amv_vs_cheeger, "amv-vs-cheeger"}, {ExperimentKind::mm_boundary, "mm-boundary"},
      {ExperimentKind::bg_profile, "bg-profile"},       {ExperimentKind::mv_poly, "mv-poly"},
      {ExperimentKind::amv_norm, "amv-norm"},           {ExperimentKind::maximal, "maximal"}};
  return names;
}

std::string key_error(const std::string& key, const std::string& what) { return "key '" + key + "': " + what; }

}  // namespace

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, s] : kind_names()) {
    if (s == name) return k;
  }
  throw ConfigError(key_error("kind", "unknown experiment kind '" + std::string(name) + "'"));
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, s] : kind_names()) {
    if (k == kind) return s;
  }
  return "?";
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& [k, s] : kind_names()) out.push_back(s);
  return out;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, std::string source) {
  ExperimentConfig cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const std::string where = cfg.source_ + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = (section.empty() ? "" : section + ".") + detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty() || key.back() == '.') throw ConfigError(where + ": empty key");
    if (cfg.entries_.count(key)) throw ConfigError(where + ": " + key_error(key, "duplicate key"));
    cfg.entries_[key] = value;
  }
  const auto kind = cfg.entries_.find("kind");
  if (kind == cfg.entries_.end()) throw ConfigError(cfg.source_ + ": missing key 'kind'");
  cfg.kind_ = parse_kind(kind->second);
  cfg.used_.insert("kind");
  const auto seed = cfg.entries_.find("seed");
  if (seed != cfg.entries_.end()) {
    const long v = detail::parse_long(seed->second, "key 'seed'");
    if (v < 0) throw ConfigError(key_error("seed", "must be non-negative"));
    cfg.seed_ = static_cast<std::uint64_t>(v);
    cfg.used_.insert("seed");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

std::uint64_t ExperimentConfig::seed() const {
  if (!seed_) throw ConfigError(key_error("seed", "a seed is mandatory (config key or --seed)"));
  return *seed_;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string norm;
  for (const auto& [k, v] : entries_) {
    if (k == "seed") continue;
    norm += k + " = " + v + "\n";
  }
  if (seed_) norm += "seed = " + std::to_string(*seed_) + "\n";
  return fnv1a(norm);
}

bool ExperimentConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed_ = static_cast<std::uint64_t>(detail::parse_long(value, "key 'seed'"));
    used_.insert(key);
  }
  entries_[key] = value;
}

const std::string* ExperimentConfig::raw(const std::string& key) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const auto* v = raw(key);
  return v ? *v : fallback;
}

std::string ExperimentConfig::text(const std::string& key) const {
  const auto* v = raw(key);
  if (!v) throw ConfigError(key_error(key, "required key is missing"));
  return *v;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto* v = raw(key);
  return v ? detail::parse_double(*v, "key '" + key + "'") : fallback;
}

double ExperimentConfig::number(const std::string& key) const { return detail::parse_double(text(key), "key '" + key + "'"); }

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  // accept 1e6-style budgets when they are whole numbers
  const double d = detail::parse_double(*v, "key '" + key + "'");
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(key_error(key, "expected an integer, got '" + *v + "'"));
  return static_cast<long>(d);
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "yes" || *v == "1") return true;
  if (*v == "false" || *v == "no" || *v == "0") return false;
  throw ConfigError(key_error(key, "expected true or false, got '" + *v + "'"));
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto* v = raw(key);
  return v ? detail::parse_doubles(*v, "key '" + key + "'") : fallback;
}

std::vector<std::vector<double>> ExperimentConfig::points(const std::string& key, const std::vector<std::vector<double>>& fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  std::vector<std::vector<double>> out;
  for (const auto& part : detail::split(*v, ';')) {
    if (part.empty()) continue;
    out.push_back(detail::parse_doubles(part, "key '" + key + "'"));
  }
  return out;
}

std::vector<std::string> ExperimentConfig::list(const std::string& key, const std::vector<std::string>& fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  std::vector<std::string> out;
  for (const auto& part : detail::split(*v, ';')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::vector<std::string> ExperimentConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace amv
