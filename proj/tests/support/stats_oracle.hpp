#pragma once

// Brute-force reference statistics used only by the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mm::testing {

inline std::vector<double> naive_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double below = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) ++below;
      if (v == x[i]) ++equal;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

/// Two-sided exact Mann-Whitney p by enumerating every subset of ranks 1..N.
inline double enumerate_mwu_p(int na, int nb, double u_obs) {
  const int n = na + nb;
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + na, 1);
  std::sort(pick.begin(), pick.end());
  double total = 0, le = 0, ge = 0;
  do {
    double r = 0;
    for (int i = 0; i < n; ++i)
      if (pick[i]) r += i + 1;
    const double u = r - na * (na + 1) / 2.0;
    ++total;
    if (u <= u_obs + 1e-9) ++le;
    if (u >= u_obs - 1e-9) ++ge;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return std::min(1.0, 2 * std::min(le, ge) / total);
}

/// H as the between-group share of rank variance; handles ties without a correction factor.
inline double variance_form_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  const std::vector<double> r = naive_ranks(pooled);
  const double n = static_cast<double>(pooled.size());
  const double rbar = (n + 1) / 2;
  double between = 0, total = 0;
  std::size_t at = 0;
  for (const auto& g : groups) {
    double s = 0;
    for (std::size_t i = 0; i < g.size(); ++i) s += r[at + i];
    const double gm = s / static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (gm - rbar) * (gm - rbar);
    at += g.size();
  }
  for (double v : r) total += (v - rbar) * (v - rbar);
  return total == 0 ? 0 : (n - 1) * between / total;
}

/// Permutation p of H over all orderings of the pooled sample.
inline double permutation_kw_p(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    pooled.insert(pooled.end(), g.begin(), g.end());
    sizes.push_back(g.size());
  }
  const double h_obs = variance_form_h(groups);
  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), 0);
  double total = 0, extreme = 0;
  do {
    std::vector<std::vector<double>> gs;
    std::size_t at = 0;
    for (std::size_t s : sizes) {
      std::vector<double> g;
      for (std::size_t i = 0; i < s; ++i) g.push_back(pooled[idx[at + i]]);
      gs.push_back(g);
      at += s;
    }
    ++total;
    if (variance_form_h(gs) >= h_obs - 1e-9) ++extreme;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return extreme / total;
}

}  // namespace mm::testing
