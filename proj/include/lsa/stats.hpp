#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lsa::stats {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Upper tail of the standard normal.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Mid-ranks (1-based) with ties averaged.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mid;
        i = j + 1;
    }
    return r;
}

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sided Mann-Whitney U test of H1: x tends to exceed y. Normal
/// approximation with tie and continuity corrections.
inline TestResult mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y) {
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney: empty sample");
    std::vector<double> all(x);
    all.insert(all.end(), y.begin(), y.end());
    const auto r = ranks(all);
    double r1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) r1 += r[i];
    const double u = r1 - n1 * (n1 + 1.0) / 2.0;
    std::vector<double> sorted(all);
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double n = n1 + n2;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if (var <= 0.0) return {u, 1.0};
    const double z = (u - n1 * n2 / 2.0 - 0.5) / std::sqrt(var);
    return {u, normal_sf(z)};
}

/// Exact one-sided sign test of H1: median > 0. Zeros are dropped.
inline TestResult sign_test_greater(const std::vector<double>& v) {
    int pos = 0, n = 0;
    for (double x : v) {
        if (x == 0.0) continue;
        ++n;
        pos += x > 0.0 ? 1 : 0;
    }
    if (n == 0) return {0.0, 1.0};
    double p = 0.0;
    for (int k = pos; k <= n; ++k) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
    return {static_cast<double>(pos), std::min(1.0, p)};
}

/// One-sided Wilcoxon signed-rank test of H1: location > 0, normal
/// approximation with tie and continuity corrections. Zeros are dropped.
inline TestResult wilcoxon_greater(const std::vector<double>& v) {
    std::vector<double> nz, mag;
    for (double x : v)
        if (x != 0.0) {
            nz.push_back(x);
            mag.push_back(std::abs(x));
        }
    const double n = static_cast<double>(nz.size());
    if (nz.empty()) return {0.0, 1.0};
    const auto r = ranks(mag);
    double w = 0.0;
    for (std::size_t i = 0; i < nz.size(); ++i)
        if (nz[i] > 0.0) w += r[i];
    std::vector<double> sorted(mag);
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ties / 48.0;
    if (var <= 0.0) return {w, 1.0};
    const double z = (w - n * (n + 1.0) / 4.0 - 0.5) / std::sqrt(var);
    return {w, normal_sf(z)};
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need two equal samples of size >= 2");
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) { return pearson(ranks(x), ranks(y)); }

}  // namespace lsa::stats
