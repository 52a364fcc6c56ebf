#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "csgesture/rng.hpp"
#include "csgesture/tseries.hpp"

namespace oracle {

inline double euclid(const csg::Point2& a, const csg::Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Minimum alignment cost by enumerating every monotone warping path (exponential; n, m <= 6).
inline double dtw_bruteforce(const csg::CenterSeq& a, const csg::CenterSeq& b) {
    const std::size_t n = a.size(), m = b.size();
    double best = std::numeric_limits<double>::infinity();
    // explicit stack of (i, j, accumulated)
    std::vector<std::tuple<std::size_t, std::size_t, double>> stack{{0, 0, euclid(a[0], b[0])}};
    while (!stack.empty()) {
        auto [i, j, acc] = stack.back();
        stack.pop_back();
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, acc);
            continue;
        }
        if (i + 1 < n && j + 1 < m) stack.emplace_back(i + 1, j + 1, acc + euclid(a[i + 1], b[j + 1]));
        if (i + 1 < n) stack.emplace_back(i + 1, j, acc + euclid(a[i + 1], b[j]));
        if (j + 1 < m) stack.emplace_back(i, j + 1, acc + euclid(a[i], b[j + 1]));
    }
    return best;
}

/// Plain O(nm) recursion with squared local cost, written independently of the library.
inline double dtw_squared(const csg::CenterSeq& a, const csg::CenterSeq& b) {
    const std::size_t n = a.size(), m = b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
    d[0][0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j) {
            const double dx = a[i - 1].x - b[j - 1].x, dy = a[i - 1].y - b[j - 1].y;
            d[i][j] = dx * dx + dy * dy + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
        }
    return d[n][m];
}

/// Cost of the cheapest buffer window under full DTW, by trying every window.
inline double best_window(const csg::CenterSeq& buffer, const csg::CenterSeq& templ, std::size_t* start,
                          std::size_t* end, std::size_t* zero_windows = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t zeros = 0;
    for (std::size_t s = 0; s < buffer.size(); ++s)
        for (std::size_t e = s; e < buffer.size(); ++e) {
            const csg::CenterSeq w(buffer.begin() + static_cast<std::ptrdiff_t>(s),
                                   buffer.begin() + static_cast<std::ptrdiff_t>(e) + 1);
            // full DTW by recursion with Euclidean cost
            const std::size_t n = templ.size(), m = w.size();
            const double inf = std::numeric_limits<double>::infinity();
            std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
            d[0][0] = 0.0;
            for (std::size_t i = 1; i <= n; ++i)
                for (std::size_t j = 1; j <= m; ++j)
                    d[i][j] = euclid(templ[i - 1], w[j - 1]) + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
            if (d[n][m] == 0.0) ++zeros;
            if (d[n][m] < best) {
                best = d[n][m];
                *start = s;
                *end = e;
            }
        }
    if (zero_windows) *zero_windows = zeros;
    return best;
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix; returns eigenvalues sorted descending.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

inline csg::CenterSeq random_seq(csg::SplitMix64& rng, std::size_t length) {
    csg::CenterSeq s(length);
    for (auto& p : s) p = {rng.uniform(), rng.uniform()};
    return s;
}

/// Smooth random path in [0.1, 0.9]^2.
inline csg::CenterSeq random_path(csg::SplitMix64& rng, std::size_t length, double step = 0.05) {
    csg::CenterSeq s(length);
    csg::Point2 p{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
    csg::Point2 v{rng.normal(0.0, step), rng.normal(0.0, step)};
    for (auto& q : s) {
        q = p;
        v.x = 0.8 * v.x + 0.2 * rng.normal(0.0, step);
        v.y = 0.8 * v.y + 0.2 * rng.normal(0.0, step);
        p.x = std::clamp(p.x + v.x, 0.1, 0.9);
        p.y = std::clamp(p.y + v.y, 0.1, 0.9);
    }
    return s;
}

}  // namespace oracle
