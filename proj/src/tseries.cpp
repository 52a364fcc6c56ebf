#include "csgesture/tseries.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "csgesture/error.hpp"
#include "csgesture/rng.hpp"

namespace csg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double local(const Point2& a, const Point2& b, LocalCost cost) {
    if (cost == LocalCost::Euclidean) return distance(a, b);
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

void require_nonempty(const CenterSeq& s, const char* what) {
    if (s.empty()) fail(ErrorCode::EmptySequence, std::string(what) + " is empty");
}

// Row-major accumulated-cost matrix.
struct CostMatrix {
    std::size_t rows;
    std::size_t cols;
    std::vector<double> cells;

    CostMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, kInf) {}
    double& operator()(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

// One traceback step from (i, j), i > 0 and j > 0. Preference on ties: diagonal, then
// vertical (advance the first sequence), then horizontal.
void step_back(const CostMatrix& d, std::size_t& i, std::size_t& j) {
    const double diag = d(i - 1, j - 1);
    const double vert = d(i - 1, j);
    const double horz = d(i, j - 1);
    if (diag <= vert && diag <= horz) {
        --i;
        --j;
    } else if (vert <= horz) {
        --i;
    } else {
        --j;
    }
}

}  // namespace

DtwResult dtw(const CenterSeq& a, const CenterSeq& b, LocalCost cost, std::optional<std::size_t> window) {
    require_nonempty(a, "dtw: first sequence");
    require_nonempty(b, "dtw: second sequence");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::size_t band = std::max(n, m);
    if (window) band = std::max(*window, n > m ? n - m : m - n);

    CostMatrix d(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > band ? i - band : 0;
        const std::size_t hi = std::min(m - 1, i + band);
        for (std::size_t j = lo; j <= hi; ++j) {
            const double c = local(a[i], b[j], cost);
            if (i == 0 && j == 0) {
                d(i, j) = c;
                continue;
            }
            double best = kInf;
            if (i > 0 && j > 0) best = d(i - 1, j - 1);
            if (i > 0) best = std::min(best, d(i - 1, j));
            if (j > 0) best = std::min(best, d(i, j - 1));
            d(i, j) = c + best;
        }
    }

    DtwResult out;
    out.distance = d(n - 1, m - 1);
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    out.path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            step_back(d, i, j);
        }
        out.path.emplace_back(i, j);
    }
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

double dtw_distance(const CenterSeq& a, const CenterSeq& b, LocalCost cost) {
    require_nonempty(a, "dtw: first sequence");
    require_nonempty(b, "dtw: second sequence");
    const std::size_t m = b.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double c = local(a[i], b[j], cost);
            if (i == 0 && j == 0) {
                cur[j] = c;
            } else if (i == 0) {
                cur[j] = c + cur[j - 1];
            } else if (j == 0) {
                cur[j] = c + prev[j];
            } else {
                cur[j] = c + std::min({prev[j - 1], prev[j], cur[j - 1]});
            }
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

OpenEndResult dtw_open_end(const CenterSeq& buffer, const CenterSeq& templ) {
    require_nonempty(buffer, "dtw_open_end: buffer");
    require_nonempty(templ, "dtw_open_end: template");
    const std::size_t n = templ.size();
    const std::size_t m = buffer.size();

    // Rows follow the template, columns the buffer. Row 0 has no accumulated prefix, so a
    // match may start at any buffer position.
    CostMatrix d(n, m);
    for (std::size_t j = 0; j < m; ++j) d(0, j) = distance(templ[0], buffer[j]);
    for (std::size_t i = 1; i < n; ++i) {
        d(i, 0) = distance(templ[i], buffer[0]) + d(i - 1, 0);
        for (std::size_t j = 1; j < m; ++j) {
            d(i, j) = distance(templ[i], buffer[j]) + std::min({d(i - 1, j - 1), d(i - 1, j), d(i, j - 1)});
        }
    }

    OpenEndResult out;
    std::size_t end = 0;
    for (std::size_t j = 1; j < m; ++j) {
        if (d(n - 1, j) < d(n - 1, end)) end = j;
    }
    out.distance = d(n - 1, end);
    out.end = end;

    std::size_t i = n - 1;
    std::size_t j = end;
    out.path.emplace_back(j, i);
    while (i > 0) {
        if (j == 0) {
            --i;
        } else {
            step_back(d, i, j);
        }
        out.path.emplace_back(j, i);
    }
    std::reverse(out.path.begin(), out.path.end());
    out.start = j;
    return out;
}

DbaResult dba(const std::vector<CenterSeq>& sequences, const CenterSeq& init, const DbaOptions& opts) {
    if (sequences.empty()) fail(ErrorCode::EmptySequence, "dba: no sequences");
    require_nonempty(init, "dba: initial barycenter");
    for (const auto& s : sequences) require_nonempty(s, "dba: input sequence");

    DbaResult out;
    out.barycenter = init;
    const std::size_t tau = init.size();

    std::vector<WarpPath> paths(sequences.size());
    auto align = [&] {
        double total = 0.0;
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            auto r = dtw(out.barycenter, sequences[s], LocalCost::SquaredEuclidean);
            total += r.distance;
            paths[s] = std::move(r.path);
        }
        return total;
    };

    out.objective.push_back(align());
    std::vector<Point2> sums(tau);
    std::vector<std::size_t> counts(tau);
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        std::fill(sums.begin(), sums.end(), Point2{});
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < sequences.size(); ++s) {
            for (const auto& [bi, si] : paths[s]) {
                sums[bi].x += sequences[s][si].x;
                sums[bi].y += sequences[s][si].y;
                ++counts[bi];
            }
        }
        for (std::size_t i = 0; i < tau; ++i) {
            const double inv = 1.0 / static_cast<double>(counts[i]);
            out.barycenter[i] = {sums[i].x * inv, sums[i].y * inv};
        }
        const double previous = out.objective.back();
        out.objective.push_back(align());
        if (previous - out.objective.back() < opts.tol) break;
    }
    return out;
}

CenterSeq resample_linear(const CenterSeq& s, std::size_t length) {
    require_nonempty(s, "resample: input");
    if (length == 0) fail(ErrorCode::ConfigError, "resample: target length is zero");
    CenterSeq out(length);
    if (s.size() == 1 || length == 1) {
        std::fill(out.begin(), out.end(), s.front());
        return out;
    }
    const double scale = static_cast<double>(s.size() - 1) / static_cast<double>(length - 1);
    for (std::size_t i = 0; i < length; ++i) {
        const double pos = static_cast<double>(i) * scale;
        const auto lo = std::min(static_cast<std::size_t>(pos), s.size() - 1);
        const auto hi = std::min(lo + 1, s.size() - 1);
        const double w = pos - static_cast<double>(lo);
        out[i] = {s[lo].x + w * (s[hi].x - s[lo].x), s[lo].y + w * (s[hi].y - s[lo].y)};
    }
    return out;
}

KMeansResult kmeans_dtw(const std::vector<CenterSeq>& samples, std::size_t k, std::size_t tau,
                        const KMeansOptions& opts) {
    if (k == 0) fail(ErrorCode::ConfigError, "kmeans: K must be at least 1");
    if (samples.size() < k)
        fail(ErrorCode::ConfigError, "kmeans: K = " + std::to_string(k) + " exceeds sample count " +
                                         std::to_string(samples.size()));
    if (tau == 0) fail(ErrorCode::ConfigError, "kmeans: tau must be positive");
    for (const auto& s : samples) require_nonempty(s, "kmeans: sample");

    const std::size_t n = samples.size();

    // Greedy farthest-point medoids from a seeded start.
    SplitMix64 rng(opts.seed);
    std::vector<std::size_t> medoids{static_cast<std::size_t>(rng.below(n))};
    std::vector<double> nearest(n, kInf);
    std::vector<bool> chosen(n, false);
    chosen[medoids[0]] = true;
    while (medoids.size() < k) {
        const auto& last = samples[medoids.back()];
        std::size_t pick = n;
        for (std::size_t s = 0; s < n; ++s) {
            if (chosen[s]) continue;
            nearest[s] = std::min(nearest[s], dtw_distance(last, samples[s]));
            if (pick == n || nearest[s] > nearest[pick]) pick = s;
        }
        chosen[pick] = true;
        medoids.push_back(pick);
    }

    KMeansResult out;
    for (auto m : medoids) out.centers.push_back(resample_linear(samples[m], tau));

    std::vector<std::size_t> previous;
    std::vector<double> dist(n);
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        out.iterations = iter + 1;
        out.assignment.assign(n, 0);
        for (std::size_t s = 0; s < n; ++s) {
            double best = kInf;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = dtw_distance(out.centers[c], samples[s]);
                if (d < best) {
                    best = d;
                    out.assignment[s] = c;
                }
            }
            dist[s] = best;
        }

        // Reseed empty clusters with the worst-fitting sample of a cluster that can spare one.
        std::vector<std::size_t> sizes(k, 0);
        for (auto a : out.assignment) ++sizes[a];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t worst = n;
            for (std::size_t s = 0; s < n; ++s) {
                if (sizes[out.assignment[s]] < 2) continue;
                if (worst == n || dist[s] > dist[worst]) worst = s;
            }
            if (worst == n) break;
            --sizes[out.assignment[worst]];
            out.assignment[worst] = c;
            ++sizes[c];
            dist[worst] = 0.0;
            out.centers[c] = resample_linear(samples[worst], tau);
        }

        if (out.assignment == previous) break;
        previous = out.assignment;

        for (std::size_t c = 0; c < k; ++c) {
            std::vector<CenterSeq> members;
            for (std::size_t s = 0; s < n; ++s)
                if (out.assignment[s] == c) members.push_back(samples[s]);
            if (!members.empty()) out.centers[c] = dba(members, out.centers[c], opts.dba).barycenter;
        }
    }
    return out;
}

RescaleResult rescale(const CenterSeq& t, const std::vector<SuperSample>& supers, bool open_ended) {
    require_nonempty(t, "rescale: input sequence");
    if (supers.empty()) fail(ErrorCode::EmptySequence, "rescale: no super samples");
    const std::size_t tau = supers.front().points.size();
    for (const auto& s : supers) {
        require_nonempty(s.points, "rescale: super sample");
        if (s.points.size() != tau) fail(ErrorCode::ConfigError, "rescale: super samples differ in length");
    }

    RescaleResult out;
    out.distance = kInf;
    out.end = t.size() - 1;
    for (std::size_t k = 0; k < supers.size(); ++k) {
        if (open_ended) {
            const auto r = dtw_open_end(t, supers[k].points);
            if (r.distance < out.distance) {
                out.distance = r.distance;
                out.super_index = k;
                out.start = r.start;
                out.end = r.end;
            }
        } else {
            const double d = dtw_distance(supers[k].points, t);
            if (d < out.distance) {
                out.distance = d;
                out.super_index = k;
            }
        }
    }

    const CenterSeq window(t.begin() + static_cast<std::ptrdiff_t>(out.start),
                           t.begin() + static_cast<std::ptrdiff_t>(out.end) + 1);
    const auto& anchor = supers[out.super_index].points;
    const auto path = dtw(anchor, window).path;

    // Among the points matched to anchor[i], keep the closest one (first on ties).
    out.points.assign(tau, Point2{});
    std::vector<double> best(tau, kInf);
    for (const auto& [i, l] : path) {
        const double d = distance(anchor[i], window[l]);
        if (d < best[i]) {
            best[i] = d;
            out.points[i] = window[l];
        }
    }
    return out;
}

}  // namespace csg
