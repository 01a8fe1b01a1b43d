#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "classex/scores.hpp"

namespace classex {

enum class BandwidthRule { bcv, ucv, fixed };

struct KdeConfig {
    BandwidthRule rule = BandwidthRule::ucv;
    double fixed_bandwidth = 0.0; // required when rule == fixed
    // One bandwidth per observation by default; pooled selects a single
    // bandwidth from all wrong-class scores (faster, coarser).
    bool pooled = false;
    int threads = 1;
};

struct KdeDiagnostics {
    std::int64_t fallback_count = 0; // observations that fell back to Silverman's rule
};

// Silverman's rule of thumb, 0.9 * min(sd, IQR/1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

// Terrell's oversmoothed bandwidth for the Gaussian kernel,
// 1.144 * sd * n^(-1/5); used to bracket the cross-validation search.
double oversmoothed_bandwidth(std::span<const double> samples);

// Minimizes the biased or unbiased cross-validation criterion (Scott's
// closed forms for the Gaussian kernel) over [0.1*h_os, 10*h_os].
// The pair sums are evaluated on a fine log-binned approximation of the
// pairwise distances (relative bin width 3e-3), and the bracket is
// scanned on a log grid before golden-section refinement, so the search
// is deterministic and tolerates non-unimodal criteria.
// Requires at least 3 distinct samples; identical samples raise
// numeric_error.
double select_bandwidth(std::span<const double> samples, BandwidthRule rule);

// Kay-style KDE extrapolation: for each observation, smooth the k1-1
// wrong-class scores with a Gaussian kernel, take the smoothed CDF at
// the true score as the single-competitor win probability acc_2 (a
// closed-form sum of normal CDFs), and average acc_2^(K-1).
// Observations whose bandwidth selection fails fall back to Silverman's
// rule and are counted in the diagnostics.
double kde_extrapolate(const ScoreTable& table, std::int64_t K, const KdeConfig& config,
                       KdeDiagnostics* diagnostics = nullptr);

} // namespace classex
