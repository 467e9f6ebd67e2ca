#pragma once

#include <vector>

namespace amv {

using MultiIndex = std::vector<int>;

/// All alpha in N^n with |alpha| = degree, lexicographically descending
/// (x1^k first).
std::vector<MultiIndex> multi_indices(int n, int degree);
/// All alpha with |alpha| <= degree in graded lexicographic order.
std::vector<MultiIndex> graded_multi_indices(int n, int max_degree);

int total_degree(const MultiIndex& alpha);
double factorial(int k);
/// alpha! = prod alpha_i!
double multi_factorial(const MultiIndex& alpha);
double binomial(int n, int k);

}  // namespace amv
