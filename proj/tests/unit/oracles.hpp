#pragma once

// Plain-loop re-evaluations used as references. Deliberately naive: no
// Eigen expressions, no shared helpers with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline double loss(double z) { return std::log(1.0 + std::exp(-z)); }

// rows[i][k] score, flags[i][k] in {0,1}
inline double nu_risk(const std::vector<std::vector<double>>& scores,
                      const std::vector<std::vector<int>>& flags,
                      const std::vector<double>& pi, const std::vector<double>& pi_bar,
                      int correction /* 0 id, 1 abs, 2 relu */) {
  const std::size_t n = scores.size();
  const std::size_t q = pi.size();
  double total = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    double sum_n_pos = 0, sum_n_neg = 0, sum_u = 0;
    int nn = 0, nu = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (flags[i][k]) {
        sum_n_pos += loss(scores[i][k]);
        sum_n_neg += loss(-scores[i][k]);
        ++nn;
      } else {
        sum_u += loss(scores[i][k]);
        ++nu;
      }
    }
    double rp = 0.0;
    if (nn > 0) rp += (pi_bar[k] + pi[k] - 1.0) * sum_n_pos / nn;
    if (nu > 0) rp += (1.0 - pi_bar[k]) * sum_u / nu;
    if (correction == 1) rp = std::fabs(rp);
    if (correction == 2) rp = std::max(rp, 0.0);
    total += rp;
    if (nn > 0) total += (1.0 - pi[k]) * sum_n_neg / nn;
  }
  return total;
}

inline double ovr_risk(const std::vector<std::vector<double>>& scores,
                       const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t k = 0; k < scores[i].size(); ++k)
      s += static_cast<int>(k) == labels[i] ? loss(scores[i][k]) : loss(-scores[i][k]);
  return s / static_cast<double>(scores.size());
}

// Exhaustive BBE objective over every candidate threshold; the minimiser's
// ratio q_U / q_P is the estimate.
inline double bbe_brute(const std::vector<double>& zp, const std::vector<double>& zu,
                        double gamma, double delta) {
  std::vector<double> grid = zp;
  grid.insert(grid.end(), zu.begin(), zu.end());
  const double np = static_cast<double>(zp.size()), nu = static_cast<double>(zu.size());
  const double slack = std::sqrt(std::log(4.0 / delta) / (2.0 * np)) +
                       std::sqrt(std::log(4.0 / delta) / (2.0 * nu));
  double best = std::numeric_limits<double>::infinity();
  double theta = 0.0;
  for (double z : grid) {
    double cp = 0, cu = 0;
    for (double v : zp) cp += v >= z;
    for (double v : zu) cu += v >= z;
    const double qp = cp / np, qu = cu / nu;
    if (qp <= 0) continue;
    const double obj = qu / qp + (1.0 + gamma) / qp * slack;
    if (obj < best) {
      best = obj;
      theta = qu / qp;
    }
  }
  return std::clamp(theta, 0.0, 1.0);
}

// 1-nearest-centroid accuracy with centroids estimated from the data itself.
inline double nearest_centroid_accuracy(const std::vector<std::vector<double>>& x,
                                        const std::vector<int>& y, int q) {
  const std::size_t d = x.front().size();
  std::vector<std::vector<double>> c(q, std::vector<double>(d, 0.0));
  std::vector<int> cnt(q, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cnt[y[i]];
    for (std::size_t j = 0; j < d; ++j) c[y[i]][j] += x[i][j];
  }
  for (int k = 0; k < q; ++k)
    for (auto& v : c[k]) v /= std::max(cnt[k], 1);
  int hit = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int k = 0; k < q; ++k) {
      double dd = 0;
      for (std::size_t j = 0; j < d; ++j) dd += (x[i][j] - c[k][j]) * (x[i][j] - c[k][j]);
      if (dd < bd) {
        bd = dd;
        best = k;
      }
    }
    hit += best == y[i];
  }
  return static_cast<double>(hit) / static_cast<double>(x.size());
}

}  // namespace oracle
