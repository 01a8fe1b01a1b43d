#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classex/ranks.hpp"
#include "classex/scores.hpp"

namespace classex {

enum class Provenance { observed, extrapolated };

std::string provenance_name(Provenance p);

// Accuracy estimates keyed by label-set size, with provenance.
struct AccuracyCurve {
    struct Entry {
        std::int64_t k = 0;
        double value = 0.0;
        Provenance provenance = Provenance::observed;
    };

    std::int64_t k1 = 0; // source class count
    std::int64_t r = 0;  // observations per class
    std::vector<Entry> entries; // sorted by k, unique

    void insert(std::int64_t k, double value, Provenance provenance);
    const Entry* find(std::int64_t k) const;
};

// Fraction of observations whose correct label tops the full candidate
// set; equals the curve value at k = k1.
double test_accuracy(const RankHistogram& hist);

// Average test accuracy over all size-k subsets of the label set,
// computed from the rank histogram alone:
//   ATA_k = sum_rho counts[rho] * C(rho-1, k-1) / (C(k1, k) * r * k).
// The binomial ratio is evaluated through log-gamma differences with a
// single exponentiation per term, so nothing overflows for k1 up to 1e6.
double ata_value(const RankHistogram& hist, std::int64_t k);

AccuracyCurve ata_curve(const RankHistogram& hist, const std::vector<std::int64_t>& ks,
                        int threads = 1);

// Test accuracy of one uniformly drawn k2-subset of the label set; the
// single-draw unbiased comparator for ATA_{k2}.
double fresh_task_accuracy(const ScoreTable& table, std::int64_t k2, std::uint64_t seed);

// Default fit grid: every k in [2, k1] up to 10^4 classes, a log-spaced
// subsample above that.
std::vector<std::int64_t> default_k_grid(std::int64_t k1);

} // namespace classex
