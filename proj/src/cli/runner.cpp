#include "amv/cli/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "amv/core/parse.hpp"
#include "amv/weighted/moments.hpp"
#include "context.hpp"

namespace amv {

namespace cli {

std::string join(const std::vector<double>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + format_number(v[i]);
  return out;
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
  return out;
}

namespace {

std::string keyed(const std::string& key, const std::string& what) { return "key '" + key + "': " + what; }

}  // namespace

std::uint64_t Context::seed(std::initializer_list<std::uint64_t> tags) const { return stream_seed(cfg.seed(), tags); }

long Context::count(const std::string& key, long fallback, long minimum) {
  const long v = cfg.integer(key, fallback);
  if (v < minimum) {
    issue(key, "budget " + std::to_string(v) + " is below the minimum " + std::to_string(minimum));
  } else if (v > 4000000000L) {
    issue(key, "budget " + std::to_string(v) + " is unreasonably large");
  }
  budget.set(key, static_cast<long long>(v));
  return std::max(v, minimum);
}

ScalarField Context::field(const std::string& key, const std::string& fallback) const {
  const std::string d = fallback.empty() ? cfg.text(key) : cfg.text(key, fallback);
  try {
    return make_field(d);
  } catch (const ConfigError& e) {
    throw ConfigError(keyed(key, e.what()));
  }
}

WeightField Context::weight(const std::string& key, const std::string& fallback) const {
  try {
    return make_weight(cfg.text(key, fallback));
  } catch (const ConfigError& e) {
    throw ConfigError(keyed(key, e.what()));
  }
}

Box Context::box(const std::string& key, int d, const std::string& fallback) const {
  const auto v = cfg.numbers(key, detail::parse_doubles(fallback, key));
  std::vector<double> lo, hi;
  if (v.size() == 2) {
    lo.assign(d, v[0]);
    hi.assign(d, v[1]);
  } else if (v.size() == 2 * static_cast<std::size_t>(d)) {
    for (int i = 0; i < d; ++i) {
      lo.push_back(v[2 * i]);
      hi.push_back(v[2 * i + 1]);
    }
  } else {
    throw ConfigError(keyed(key, "expected lo,hi or " + std::to_string(2 * d) + " values lo1,hi1,.."));
  }
  try {
    return Box(lo, hi);
  } catch (const ConfigError& e) {
    throw ConfigError(keyed(key, e.what()));
  }
}

Point Context::point(const std::string& key, int d, const Point& fallback) const {
  const auto p = cfg.numbers(key, fallback);
  if (static_cast<int>(p.size()) != d) throw ConfigError(keyed(key, "expected " + std::to_string(d) + " coordinates"));
  return p;
}

std::vector<Point> Context::points(const std::string& key, int d, const std::vector<Point>& fallback) const {
  const auto ps = cfg.points(key, fallback);
  if (ps.empty()) throw ConfigError(keyed(key, "no points given"));
  for (const auto& p : ps) {
    if (static_cast<int>(p.size()) != d) throw ConfigError(keyed(key, "expected " + std::to_string(d) + " coordinates per point"));
  }
  return ps;
}

int Context::dim(int fallback) const {
  const long d = cfg.integer("space.dim", fallback);
  if (d < 1 || d > kMaxDim) throw ConfigError(keyed("space.dim", "dimension must be in [1, " + std::to_string(kMaxDim) + "]"));
  return static_cast<int>(d);
}

WeightedEuclidean Context::space(const std::string& box_fallback) {
  const int d = dim();
  const Box b = box("space.box", d, box_fallback);
  Norm norm = Norm::euclidean(d);
  try {
    norm = make_norm(cfg.text("space.norm", "lp:2"), d);
  } catch (const ConfigError& e) {
    throw ConfigError(keyed("space.norm", e.what()));
  }
  WeightField w = weight("space.weight", "const:1");
  try {
    w.check_positive_on(b);
  } catch (const ConfigError& e) {
    throw ConfigError(keyed("space.weight", e.what()));
  }
  return WeightedEuclidean(b, norm, w);
}

Eigen::MatrixXd Context::moment_matrix(const Norm& norm) const {
  MomentOptions opt;
  opt.seed = seed({90});
  return second_moment_tensor(norm, 2, opt).matrix();
}

BallQuadrature Context::quadrature(const Norm& norm, const std::string& mode, long count_fallback) {
  SamplingMode m;
  try {
    m = parse_sampling_mode(cfg.text("quadrature.mode", mode));
  } catch (const ConfigError& e) {
    throw ConfigError(keyed("quadrature.mode", e.what()));
  }
  const long n = count("quadrature.count", count_fallback, 2);
  budget.set("quadrature.mode", to_string(m));
  if (dry) return BallQuadrature(norm, std::min<long>(n, 64) & ~1L, m, 0);
  try {
    return BallQuadrature(norm, static_cast<std::size_t>(n), m, seed({1}));
  } catch (const ConfigError& e) {
    throw ConfigError(keyed("quadrature.count", e.what()));
  }
}

RadiiSchedule Context::schedule(double r0, double ratio, int n) const {
  const double a = cfg.number("schedule.r0", r0);
  const double q = cfg.number("schedule.ratio", ratio);
  const long c = cfg.integer("schedule.count", n);
  if (!(a > 0.0)) throw ConfigError(keyed("schedule.r0", "must be positive"));
  if (!(q > 0.0 && q < 1.0)) throw ConfigError(keyed("schedule.ratio", "must lie in (0, 1)"));
  if (c < 3 || c > 64) throw ConfigError(keyed("schedule.count", "must lie in [3, 64]"));
  return RadiiSchedule(a, q, static_cast<int>(c));
}

ExtrapolationModel Context::model(const std::string& fallback) const {
  try {
    return parse_extrapolation_model(cfg.text("schedule.model", fallback));
  } catch (const ConfigError& e) {
    throw ConfigError(keyed("schedule.model", e.what()));
  }
}

ScalarField Context::bump(double rho, const Point& center) const {
  const double r = cfg.number("phi.rho", rho);
  if (!(r > 0.0)) throw ConfigError(keyed("phi.rho", "must be positive"));
  return ScalarField::bump(r, point("phi.center", static_cast<int>(center.size()), center));
}

void Context::require_clearance(const WeightedEuclidean& sp, PointView x, double r, const std::string& key) {
  const double c = sp.clearance(x);
  if (r > c) {
    std::string where;
    for (std::size_t i = 0; i < x.size(); ++i) where += (i ? "," : "") + format_number(x[i]);
    issue(key, "clearance: radius " + format_number(r) + " exceeds the distance " + format_number(c) + " from (" + where + ") to the domain boundary");
  }
}

void Context::require_support(const WeightedEuclidean& sp, const ScalarField& f, double r, const std::string& key) {
  const auto s = f.support();
  if (!s) {
    issue(key, "test function has no compact support");
    return;
  }
  // the ball B_r(y) for y in supp f must stay in the box
  for (int i = 0; i < sp.dim(); ++i) {
    const double reach = r * sp.norm().axis_extent(i);
    if (s->lo[i] - reach < sp.box().lo[i] || s->hi[i] + reach > sp.box().hi[i]) {
      issue(key, "clearance: support grown by radius " + format_number(r) + " leaves the domain along axis " + std::to_string(i));
      return;
    }
  }
}

void Context::peclet(const Grid& grid, const Eigen::MatrixXd& diffusion, const VectorFieldFn& drift, Upwinding upwind, const std::string& key) {
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(diffusion).eigenvalues().minCoeff();
  double worst = 0.0;
  for (const std::size_t i : grid.interior()) {
    const Point x = grid.point(i);
    const Eigen::VectorXd b = drift(x);
    for (int a = 0; a < grid.dim(); ++a) worst = std::max(worst, std::abs(b[a]) * grid.h(a) / lmin);
  }
  results.set("max_peclet", worst);
  if (worst > 2.0) {
    const std::string msg = "Peclet number " + format_number(worst) + " exceeds 2 on the coarsest grid";
    if (upwind == Upwinding::never) {
      issue(key, msg + " and upwinding is disabled");
    } else {
      warn(key, msg + "; upwinded rows are first order");
    }
  }
}

}  // namespace cli

std::string ValidationIssue::str() const {
  std::string out = warning ? "warning: " : "issue: ";
  if (!key.empty()) out += "[" + key + "] ";
  return out + message;
}

bool runnable(const std::vector<ValidationIssue>& issues) {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) { return !i.warning; });
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<ValidationIssue> dry_run(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  cli::Context ctx(copy, true);
  try {
    copy.seed();
    cli::kind_function(copy.kind())(ctx);
  } catch (const ConfigError& e) {
    ctx.issue("", e.what());
    return ctx.issues;
  } catch (const DomainError& e) {
    ctx.issue("", e.what());
    return ctx.issues;
  } catch (const NumericalError& e) {
    ctx.issue("", e.what());
    return ctx.issues;
  }
  for (const auto& k : copy.unused_keys()) ctx.issue(k, "unknown key for kind " + to_string(copy.kind()));
  return ctx.issues;
}

}  // namespace

std::vector<ValidationIssue> validate(const ExperimentConfig& config) { return dry_run(config); }

RunResult run(ExperimentConfig config, const RunOptions& options) {
  RunResult result;
  if (options.seed) config.set_seed(*options.seed);
  if (options.workers > 0) set_worker_count(options.workers);
  result.out_dir = options.out_dir.empty() ? "amvlab_out/" + to_string(config.kind()) : options.out_dir;

  result.issues = dry_run(config);
  if (!runnable(result.issues)) {
    result.exit_code = kExitConfigError;
    for (const auto& i : result.issues) {
      if (!i.warning) result.message += (result.message.empty() ? "" : "\n") + i.str();
    }
    return result;
  }

  cli::Context ctx(config, false);
  try {
    cli::kind_function(config.kind())(ctx);
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  } catch (const DomainError& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  } catch (const NumericalError& e) {
    result.exit_code = kExitNumericalFailure;
    result.message = e.what();
    return result;
  }

  Record header;
  header.set("report", "amvlab");
  header.set("kind", to_string(config.kind()));
  header.set("config_hash", hex64(config.hash()));
  header.set("seed", std::to_string(config.seed()));
  for (const auto& [k, v] : config.entries()) {
    if (k != "kind" && k != "seed") header.set("config." + k, v);
  }
  header.append(ctx.budget, "budget.");
  for (std::size_t i = 0; i < result.issues.size(); ++i) header.set("warning." + std::to_string(i + 1), result.issues[i].str());

  Record asserts;
  bool all = true;
  for (const auto& a : ctx.assertions) {
    asserts.set("assert." + a.name, a.pass ? "pass" : "fail");
    asserts.set("assert." + a.name + ".detail", a.detail);
    all = all && a.pass;
  }
  asserts.set("status", all ? "pass" : "fail");
  result.assertions = ctx.assertions;
  result.exit_code = all ? kExitPass : kExitToleranceViolation;
  result.report = "# provenance\n" + header.str() + "# results\n" + ctx.results.str() + "# assertions\n" + asserts.str();
  for (const auto& [name, t] : ctx.tables) result.csvs.emplace_back(name + ".csv", t.str());

  if (options.write_files) {
    std::filesystem::create_directories(result.out_dir);
    write_text(result.out_dir + "/report.txt", result.report);
    for (const auto& [name, text] : result.csvs) write_text(result.out_dir + "/" + name, text);
  }
  return result;
}

RunResult run_file(const std::string& path, const RunOptions& options) {
  try {
    return run(ExperimentConfig::load(path), options);
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = kExitConfigError;
    r.message = e.what();
    return r;
  }
}

std::vector<std::string> catalog_listing() {
  std::vector<std::string> out;
  const auto section = [&out](const std::string& title, const std::vector<std::string>& items) {
    out.push_back(title + ":");
    for (const auto& i : items) out.push_back("  " + i);
  };
  section("experiment kinds", experiment_kinds());
  section("norms", norm_catalog());
  section("fields", field_catalog());
  section("weights", weight_catalog());
  section("quadrature modes", {"tensor_grid", "antithetic", "monte_carlo"});
  section("extrapolation models", {"even_powers", "general_power", "plain_last"});
  section("upwinding", {"when_needed", "always", "never"});
  section("solvers", {"automatic", "direct", "bicgstab"});
  return out;
}

}  // namespace amv
