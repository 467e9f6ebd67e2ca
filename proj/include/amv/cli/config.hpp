#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "amv/core/common.hpp"

namespace amv {

enum class ExperimentKind {
  identities,
  moments,
  convergence,
  heisenberg_bpz,
  dirichlet,
  weak_amv,
  amv_vs_cheeger,
  mm_boundary,
  bg_profile,
  mv_poly,
  amv_norm,
  maximal
};

ExperimentKind parse_kind(std::string_view name);
std::string to_string(ExperimentKind kind);
std::vector<std::string> experiment_kinds();

/// Flat key = value text. `[section]` lines prefix the following keys with
/// "section."; '#' starts a comment. Keys may also be written dotted.
///
///   kind = convergence
///   seed = 7
///   [space]
///   box = 0,1
///   weight = exp_linear:1,0
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::string_view text, std::string source = "<string>");
  static ExperimentConfig load(const std::string& path);

  ExperimentKind kind() const { return kind_; }
  /// Throws ConfigError when no seed was given.
  std::uint64_t seed() const;
  bool has_seed() const { return seed_.has_value(); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  const std::string& source() const { return source_; }
  /// FNV-1a of the normalized entries (sorted key = value lines).
  std::uint64_t hash() const;

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  // Typed getters. Every getter marks the key as consumed; parse errors name the key.
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  /// ';'-separated list of comma lists, e.g. "0.5,0.5; 0.3,0.7".
  std::vector<std::vector<double>> points(const std::string& key, const std::vector<std::vector<double>>& fallback) const;
  /// ';'-separated list of strings.
  std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Keys present in the file but never read.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string* raw(const std::string& key) const;

  ExperimentKind kind_ = ExperimentKind::identities;
  std::optional<std::uint64_t> seed_;
  std::string source_;
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace amv
