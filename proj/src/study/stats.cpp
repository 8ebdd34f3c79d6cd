#include "mm/study/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace mm {

namespace {

double poly(const double* c, int n, double x) {
  double r = c[n - 1];
  for (int i = n - 2; i >= 0; --i) r = r * x + c[i];
  return r;
}

double tie_term(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double t = 0;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double k = static_cast<double>(j - i);
    t += k * k * k - k;
    i = j;
  }
  return t;
}

bool has_ties(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  return std::adjacent_find(x.begin(), x.end()) != x.end();
}

double normal_upper(double z) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

double h_statistic(const std::vector<double>& ranks, const std::vector<std::size_t>& sizes, double n) {
  double s = 0;
  std::size_t at = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    double r = 0;
    for (std::size_t i = 0; i < sizes[g]; ++i) r += ranks[at++];
    s += r * r / static_cast<double>(sizes[g]);
  }
  return 12.0 / (n * (n + 1)) * s - 3 * (n + 1);
}

}  // namespace

StatResult with_flags(StatResult r) {
  r.significant = r.p_value && *r.p_value < kAlphaSignificant;
  r.highly_significant = r.p_value && *r.p_value < kAlphaHighlySignificant;
  return r;
}

nlohmann::json to_json(const StatResult& r) {
  nlohmann::json j = {{"test", r.test},
                      {"statistic", r.statistic},
                      {"significant", r.significant},
                      {"highly_significant", r.highly_significant},
                      {"method", r.method}};
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  return j;
}

double mean(const std::vector<double>& x) {
  if (x.empty()) throw StatsError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  const double m = mean(x);
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double standard_error(const std::vector<double>& x) {
  return x.empty() ? 0 : stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

std::vector<double> midranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) r[order[k]] = avg;
    i = j;
  }
  return r;
}

StatResult shapiro_wilk(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3 || n > 5000) throw StatsError("shapiro_wilk needs 3 <= n <= 5000");
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() < 1e-19 * std::max(1.0, std::abs(x.front())))
    throw StatsError("shapiro_wilk: all observations are identical");

  static const double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static const double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static const double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[] = {-0.4803, -0.082676, 0.0030302};
  static const double g[] = {-2.273, 0.459};

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half);  // coefficients of the upper half, largest first
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    boost::math::normal_distribution<double> z;
    std::vector<double> m(half);
    double summ2 = 0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = boost::math::quantile(z, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - m[0] / ssumm2;
    std::size_t first;
    double fac;
    if (n > 5) {
      const double a2 = -m[1] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2 * m[0] * m[0] - 2 * m[1] * m[1]) / (1 - 2 * a1 * a1 - 2 * a2 * a2));
      a[1] = a2;
      first = 2;
    } else {
      fac = std::sqrt((summ2 - 2 * m[0] * m[0]) / (1 - 2 * a1 * a1));
      first = 1;
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  const double mu = mean(x);
  double num = 0, ss = 0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  for (double v : x) ss += (v - mu) * (v - mu);
  double w = num * num / ss;
  w = std::min(w, 1.0);

  double p;
  if (n == 3) {
    const double pi6 = 6 / M_PI, stqr = M_PI / 3;
    p = std::max(0.0, std::min(1.0, pi6 * (std::asin(std::sqrt(w)) - stqr)));
  } else {
    const double w1 = std::log(1 - w);
    double y = w1, m, s;
    if (n <= 11) {
      const double gamma = poly(g, 2, an);
      if (y >= gamma) return with_flags({"shapiro_wilk", w, 1e-99, false, false, "as_r94"});
      y = -std::log(gamma - y);
      m = poly(c3, 4, an);
      s = std::exp(poly(c4, 4, an));
    } else {
      const double xx = std::log(an);
      m = poly(c5, 4, xx);
      s = std::exp(poly(c6, 3, xx));
    }
    p = normal_upper((y - m) / s);
  }
  return with_flags({"shapiro_wilk", w, p, false, false, "as_r94"});
}

StatResult kruskal_wallis(const std::vector<std::vector<double>>& groups, KruskalMode mode) {
  if (groups.size() < 2) throw StatsError("kruskal_wallis needs at least two groups");
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.empty()) throw StatsError("kruskal_wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
    sizes.push_back(g.size());
  }
  const double n = static_cast<double>(pooled.size());
  if (pooled.size() < 3) throw StatsError("kruskal_wallis needs at least three observations");
  const double ties = 1 - tie_term(pooled) / (n * n * n - n);
  if (ties <= 0) return with_flags({"kruskal_wallis", 0.0, 1.0, false, false, "degenerate"});
  const std::vector<double> ranks = midranks(pooled);
  const double h = h_statistic(ranks, sizes, n) / ties;

  if (mode == KruskalMode::ChiSquare) {
    boost::math::chi_squared_distribution<double> chi(static_cast<double>(groups.size() - 1));
    const double p = boost::math::cdf(boost::math::complement(chi, std::max(h, 0.0)));
    return with_flags({"kruskal_wallis", h, p, false, false, "chi2"});
  }

  if (pooled.size() > 10) throw StatsError("exact kruskal_wallis is limited to N <= 10");
  // Walk every distinct assignment of observation slots to groups.
  std::vector<int> label(pooled.size());
  std::vector<std::size_t> left = sizes;
  std::vector<double> arranged(pooled.size());
  std::size_t total = 0, extreme = 0;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == pooled.size()) {
      std::size_t at = 0;
      for (std::size_t g = 0; g < sizes.size(); ++g)
        for (std::size_t k = 0; k < pooled.size(); ++k)
          if (static_cast<std::size_t>(label[k]) == g) arranged[at++] = ranks[k];
      const double hk = h_statistic(arranged, sizes, n) / ties;
      ++total;
      if (hk >= h - 1e-9) ++extreme;
      return;
    }
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (left[g] == 0) continue;
      --left[g];
      label[i] = static_cast<int>(g);
      self(self, i + 1);
      ++left[g];
    }
  };
  rec(rec, 0);
  return with_flags({"kruskal_wallis", h, static_cast<double>(extreme) / static_cast<double>(total), false, false,
                     "exact"});
}

StatResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b, MannWhitneyMode mode) {
  if (a.empty() || b.empty()) throw StatsError("mann_whitney_u needs two non-empty samples");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double ra = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ra += ranks[i];
  const double u = ra - na * (na + 1) / 2;
  const bool ties = has_ties(pooled);

  bool exact = mode == MannWhitneyMode::Exact || (mode == MannWhitneyMode::Auto && !ties && pooled.size() <= 16);
  if (exact && ties) throw StatsError("exact mann_whitney_u needs untied data");
  if (exact) {
    // counts[m][k][u]: arrangements of m + k items with U = u for the first sample.
    const std::size_t m = a.size(), k = b.size();
    std::vector<std::vector<std::vector<double>>> f(m + 1, std::vector<std::vector<double>>(k + 1));
    for (std::size_t i = 0; i <= m; ++i)
      for (std::size_t j = 0; j <= k; ++j) {
        f[i][j].assign(i * j + 1, 0.0);
        if (i == 0 || j == 0) {
          f[i][j][0] = 1;
          continue;
        }
        for (std::size_t v = 0; v <= i * j; ++v) {
          double c = 0;
          if (v >= j && v - j <= (i - 1) * j) c += f[i - 1][j][v - j];
          if (v <= i * (j - 1)) c += f[i][j - 1][v];
          f[i][j][v] = c;
        }
      }
    const auto& dist = f[m][k];
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const double lo = std::min(u, na * nb - u);
    double tail = 0;
    for (std::size_t v = 0; static_cast<double>(v) <= lo + 1e-9; ++v) tail += dist[v];
    return with_flags({"mann_whitney_u", u, std::min(1.0, 2 * tail / total), false, false, "exact"});
  }

  const double nn = na + nb;
  const double var = na * nb / 12.0 * ((nn + 1) - tie_term(pooled) / (nn * (nn - 1)));
  if (var <= 0) return with_flags({"mann_whitney_u", u, 1.0, false, false, "normal"});
  const double mu = na * nb / 2;
  const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
  const double p = std::min(1.0, 2 * normal_upper(std::max(z, 0.0)));
  return with_flags({"mann_whitney_u", u, p, false, false, "normal"});
}

StatResult cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw StatsError("cohens_d needs at least two observations per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = stddev(a), sb = stddev(b);
  const double pooled = std::sqrt(((na - 1) * sa * sa + (nb - 1) * sb * sb) / (na + nb - 2));
  if (!(pooled > 0)) throw StatsError("cohens_d: pooled standard deviation is zero");
  return {"cohens_d", (mean(a) - mean(b)) / pooled, std::nullopt, false, false, "pooled_sd"};
}

}  // namespace mm
