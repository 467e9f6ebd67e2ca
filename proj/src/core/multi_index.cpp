#include "amv/core/multi_index.hpp"

#include <cmath>
#include <numeric>

#include "amv/core/common.hpp"

namespace amv {

namespace {

void fill(int n, int pos, int remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = k;
    fill(n, pos + 1, remaining - k, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int n, int degree) {
  if (n < 1 || degree < 0) throw ConfigError("multi_indices: need n >= 1 and degree >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  fill(n, 0, degree, cur, out);
  return out;
}

std::vector<MultiIndex> graded_multi_indices(int n, int max_degree) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_degree; ++k) {
    auto level = multi_indices(n, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

int total_degree(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

double factorial(int k) { return std::tgamma(k + 1.0); }

double multi_factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (const int a : alpha) f *= factorial(a);
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(factorial(n) / (factorial(k) * factorial(n - k)));
}

}  // namespace amv
