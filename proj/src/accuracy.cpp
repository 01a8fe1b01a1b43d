#include "classex/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "classex/errors.hpp"
#include "classex/parallel.hpp"
#include "classex/rng.hpp"

namespace classex {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::observed: return "observed";
        case Provenance::extrapolated: return "extrapolated";
    }
    return "unknown";
}

void AccuracyCurve::insert(std::int64_t k, double value, Provenance provenance) {
    if (k < 1) throw input_error("curve entries need k >= 1");
    if (k == 1 && value != 1.0) {
        throw input_error("a single-class task is always correct: the k=1 entry must be 1");
    }
    Entry e{k, value, provenance};
    const auto it = std::lower_bound(entries.begin(), entries.end(), k,
                                     [](const Entry& a, std::int64_t kk) { return a.k < kk; });
    if (it != entries.end() && it->k == k) {
        *it = e;
    } else {
        entries.insert(it, e);
    }
}

const AccuracyCurve::Entry* AccuracyCurve::find(std::int64_t k) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), k,
                                     [](const Entry& a, std::int64_t kk) { return a.k < kk; });
    if (it != entries.end() && it->k == k) return &*it;
    return nullptr;
}

double test_accuracy(const RankHistogram& hist) {
    return static_cast<double>(hist.counts.back()) / static_cast<double>(hist.total());
}

namespace {

// log C(n, k) for n >= k >= 0
double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

double ata_value(const RankHistogram& hist, std::int64_t k) {
    if (k < 2 || k > hist.k1) {
        throw input_error("ata: k=" + std::to_string(k) + " out of range [2," +
                          std::to_string(hist.k1) + "]");
    }
    const double log_total = log_choose(static_cast<double>(hist.k1), static_cast<double>(k));
    double acc = 0.0;
    // C(rho-1, k-1) = 0 for rho < k
    for (std::int64_t rho = k; rho <= hist.k1; ++rho) {
        const auto count = hist.counts[static_cast<std::size_t>(rho - 1)];
        if (count == 0) continue;
        const double log_ratio =
            log_choose(static_cast<double>(rho - 1), static_cast<double>(k - 1)) - log_total;
        acc += static_cast<double>(count) * std::exp(log_ratio);
    }
    const double value = acc / (static_cast<double>(hist.r) * static_cast<double>(k));
    return std::clamp(value, 0.0, 1.0);
}

AccuracyCurve ata_curve(const RankHistogram& hist, const std::vector<std::int64_t>& ks,
                        int threads) {
    AccuracyCurve curve;
    curve.k1 = hist.k1;
    curve.r = hist.r;
    std::vector<double> values(ks.size());
    parallel_for(static_cast<std::int64_t>(ks.size()), threads, [&](std::int64_t idx) {
        values[static_cast<std::size_t>(idx)] = ata_value(hist, ks[static_cast<std::size_t>(idx)]);
    });
    for (std::size_t idx = 0; idx < ks.size(); ++idx) {
        curve.insert(ks[idx], values[idx], Provenance::observed);
    }
    return curve;
}

double fresh_task_accuracy(const ScoreTable& table, std::int64_t k2, std::uint64_t seed) {
    if (k2 < 2 || k2 > table.k1) {
        throw input_error("fresh_task_accuracy: k2=" + std::to_string(k2) + " out of range [2," +
                          std::to_string(table.k1) + "]");
    }
    RandomStream stream(mix64(seed, rng_tag::fresh_task));
    const auto subset = stream.sample_without_replacement(table.k1, k2);
    std::int64_t correct = 0;
    for (std::int64_t ii = 0; ii < k2; ++ii) {
        const auto i = subset[static_cast<std::size_t>(ii)];
        for (std::int64_t j = 0; j < table.r; ++j) {
            const auto row = table.row(i, j);
            const double own = row[static_cast<std::size_t>(i)];
            bool top = true;
            for (const auto s : subset) {
                if (s != i && row[static_cast<std::size_t>(s)] >= own) {
                    top = false;
                    break;
                }
            }
            correct += top;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(k2 * table.r);
}

std::vector<std::int64_t> default_k_grid(std::int64_t k1) {
    std::vector<std::int64_t> ks;
    if (k1 <= 10000) {
        ks.reserve(static_cast<std::size_t>(k1 - 1));
        for (std::int64_t k = 2; k <= k1; ++k) ks.push_back(k);
        return ks;
    }
    // log-spaced grid of ~2000 unique sizes, always including 2 and k1
    const double lo = std::log(2.0), hi = std::log(static_cast<double>(k1));
    const int n = 2000;
    std::int64_t last = 1;
    for (int i = 0; i <= n; ++i) {
        const auto k = static_cast<std::int64_t>(
            std::llround(std::exp(lo + (hi - lo) * static_cast<double>(i) / n)));
        if (k > last && k <= k1) {
            ks.push_back(k);
            last = k;
        }
    }
    if (ks.back() != k1) ks.push_back(k1);
    return ks;
}

} // namespace classex
