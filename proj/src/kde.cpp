#include "classex/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "classex/errors.hpp"
#include "classex/normal.hpp"
#include "classex/parallel.hpp"

namespace classex {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833411452;
constexpr double kSqrt8 = 2.8284271247461900976033774484193961;
constexpr double kDeltaSqCutoff = 1000.0; // beyond this the kernel terms underflow

double sample_sd(std::span<const double> xs) {
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

// Pairwise |x_i - x_j| collapsed onto a log grid; each bin keeps its
// exact pair count and mean distance. Criterion evaluations then cost
// O(bins) instead of O(n^2).
struct PairBins {
    std::vector<double> distance; // ascending bin means
    std::vector<double> count;
    double zero_count = 0.0;
    std::int64_t n = 0;
};

PairBins bin_pairs(std::span<const double> xs) {
    PairBins bins;
    bins.n = static_cast<std::int64_t>(xs.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            dmax = std::max(dmax, std::fabs(xs[i] - xs[j]));
        }
    }
    if (dmax == 0.0) return bins; // all samples identical
    const double dmin = dmax * 1e-9;
    const double log_ratio = std::log1p(3e-3);
    const auto nb = static_cast<std::size_t>(std::log(dmax / dmin) / log_ratio) + 2;
    std::vector<double> cnt(nb, 0.0), dsum(nb, 0.0);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            const double d = std::fabs(xs[i] - xs[j]);
            if (d < dmin) {
                bins.zero_count += 1.0;
                continue;
            }
            auto idx = static_cast<std::size_t>(std::log(d / dmin) / log_ratio);
            if (idx >= nb) idx = nb - 1;
            cnt[idx] += 1.0;
            dsum[idx] += d;
        }
    }
    for (std::size_t b = 0; b < nb; ++b) {
        if (cnt[b] > 0.0) {
            bins.count.push_back(cnt[b]);
            bins.distance.push_back(dsum[b] / cnt[b]);
        }
    }
    return bins;
}

double cv_criterion(const PairBins& bins, double h, BandwidthRule rule) {
    const auto n = static_cast<double>(bins.n);
    double sum = (rule == BandwidthRule::ucv) ? bins.zero_count * (1.0 - kSqrt8)
                                              : bins.zero_count * 12.0;
    for (std::size_t b = 0; b < bins.distance.size(); ++b) {
        const double delta = bins.distance[b] / h;
        const double d2 = delta * delta;
        if (d2 >= kDeltaSqCutoff) break; // distances ascend
        if (rule == BandwidthRule::ucv) {
            sum += bins.count[b] * (std::exp(-d2 / 4.0) - kSqrt8 * std::exp(-d2 / 2.0));
        } else {
            sum += bins.count[b] * std::exp(-d2 / 4.0) * (d2 * d2 - 12.0 * d2 + 12.0);
        }
    }
    const double pair_scale = (rule == BandwidthRule::ucv) ? 1.0 : 1.0 / 64.0;
    return 0.5 / (n * h * kSqrtPi) + pair_scale * sum / (n * n * h * kSqrtPi);
}

double minimize_criterion(const PairBins& bins, double lo, double hi, BandwidthRule rule) {
    // coarse log-grid scan picks the basin, golden section refines it
    constexpr int kGrid = 48;
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> grid(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        grid[static_cast<std::size_t>(i)] =
            std::exp(log_lo + (log_hi - log_lo) * i / (kGrid - 1.0));
        const double v = cv_criterion(bins, grid[static_cast<std::size_t>(i)], rule);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = grid[static_cast<std::size_t>(std::max(0, best - 1))];
    double b = grid[static_cast<std::size_t>(std::min(kGrid - 1, best + 1))];
    const double gr = 0.6180339887498948482;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cv_criterion(bins, c, rule), fd = cv_criterion(bins, d, rule);
    for (int it = 0; it < 48; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = cv_criterion(bins, c, rule);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = cv_criterion(bins, d, rule);
        }
    }
    return 0.5 * (a + b);
}

std::int64_t count_distinct(std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return static_cast<std::int64_t>(sorted.size());
}

} // namespace

double silverman_bandwidth(std::span<const double> samples) {
    const auto n = static_cast<double>(samples.size());
    if (samples.size() < 2) throw numeric_error("bandwidth needs at least 2 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto q = [&](double p) {
        const double pos = p * (n - 1.0);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    const double iqr = q(0.75) - q(0.25);
    const double sd = sample_sd(samples);
    double scale = std::min(sd, iqr / 1.34);
    if (scale <= 0.0) scale = std::max(sd, iqr / 1.34);
    return 0.9 * scale * std::pow(n, -0.2);
}

double oversmoothed_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw numeric_error("bandwidth needs at least 2 samples");
    return 1.144 * sample_sd(samples) * std::pow(static_cast<double>(samples.size()), -0.2);
}

double select_bandwidth(std::span<const double> samples, BandwidthRule rule) {
    if (rule == BandwidthRule::fixed) {
        throw input_error("select_bandwidth expects the bcv or ucv rule");
    }
    if (count_distinct(samples) < 3) {
        throw numeric_error("bandwidth selection needs at least 3 distinct samples");
    }
    const double h_os = oversmoothed_bandwidth(samples);
    if (!(h_os > 0.0)) throw numeric_error("bandwidth selection failed: zero sample spread");
    const PairBins bins = bin_pairs(samples);
    return minimize_criterion(bins, 0.1 * h_os, 10.0 * h_os, rule);
}

double kde_extrapolate(const ScoreTable& table, std::int64_t K, const KdeConfig& config,
                       KdeDiagnostics* diagnostics) {
    validate_score_table(table);
    if (K < 2) throw input_error("kde extrapolation target K must be >= 2");
    if (config.rule == BandwidthRule::fixed && !(config.fixed_bandwidth > 0.0)) {
        throw input_error("fixed KDE bandwidth must be positive");
    }

    const std::int64_t rows = table.k1 * table.r;
    const auto n_wrong = static_cast<std::size_t>(table.k1 - 1);

    // Pooled mode selects one bandwidth from all wrong-class scores; the
    // O(n^2) criterion runs on a sorted stride-subsample capped at 4096
    // points, which keeps the scale structure and stays deterministic.
    double pooled_bandwidth = 0.0;
    std::int64_t pooled_fallbacks = 0;
    if (config.pooled && config.rule != BandwidthRule::fixed) {
        std::vector<double> pool;
        pool.reserve(static_cast<std::size_t>(rows) * n_wrong);
        for (std::int64_t i = 0; i < table.k1; ++i) {
            for (std::int64_t j = 0; j < table.r; ++j) {
                const auto row = table.row(i, j);
                for (std::int64_t s = 0; s < table.k1; ++s) {
                    if (s != i) pool.push_back(row[static_cast<std::size_t>(s)]);
                }
            }
        }
        std::sort(pool.begin(), pool.end());
        if (pool.size() > 4096) {
            const std::size_t stride = pool.size() / 4096 + 1;
            std::vector<double> sub;
            for (std::size_t i = 0; i < pool.size(); i += stride) sub.push_back(pool[i]);
            pool = std::move(sub);
        }
        try {
            pooled_bandwidth = select_bandwidth(pool, config.rule);
        } catch (const numeric_error&) {
            pooled_bandwidth = silverman_bandwidth(pool);
            ++pooled_fallbacks;
        }
    }

    std::vector<double> per_obs(static_cast<std::size_t>(rows), 0.0);
    std::vector<std::int64_t> fallbacks(static_cast<std::size_t>(rows), 0);
    parallel_for(rows, config.threads, [&](std::int64_t cell) {
        const std::int64_t i = cell / table.r;
        const auto row = table.row(i, cell % table.r);
        const double true_score = row[static_cast<std::size_t>(i)];
        std::vector<double> wrong;
        wrong.reserve(n_wrong);
        for (std::int64_t s = 0; s < table.k1; ++s) {
            if (s != i) wrong.push_back(row[static_cast<std::size_t>(s)]);
        }

        double h;
        if (config.rule == BandwidthRule::fixed) {
            h = config.fixed_bandwidth;
        } else if (config.pooled) {
            h = pooled_bandwidth;
        } else {
            try {
                h = select_bandwidth(wrong, config.rule);
            } catch (const numeric_error&) {
                fallbacks[static_cast<std::size_t>(cell)] = 1;
                try {
                    h = silverman_bandwidth(wrong);
                } catch (const numeric_error&) {
                    h = 0.0;
                }
                if (!(h > 0.0)) {
                    h = 1e-9 * std::max(1.0, std::fabs(true_score));
                }
            }
        }

        // smoothed CDF at the true score: closed-form sum of normal CDFs
        double acc2 = 0.0;
        for (const double w : wrong) acc2 += norm_cdf((true_score - w) / h);
        acc2 /= static_cast<double>(n_wrong);
        per_obs[static_cast<std::size_t>(cell)] = std::pow(acc2, static_cast<double>(K - 1));
    });

    double total = 0.0;
    for (const double v : per_obs) total += v;
    if (diagnostics) {
        diagnostics->fallback_count = pooled_fallbacks;
        for (const auto f : fallbacks) diagnostics->fallback_count += f;
    }
    return total / static_cast<double>(rows);
}

} // namespace classex
