#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classex/scores.hpp"

namespace classex {

// Correct-label ranks R_j^{i,i}: for each test observation, the number
// of candidate scores less than or equal to the correct class's score.
struct RankTensor {
    std::int64_t k1 = 0;
    std::int64_t r = 0;
    std::vector<std::int32_t> ranks; // (i*r + j), values in [1, k1]

    std::int32_t at(std::int64_t i, std::int64_t j) const {
        return ranks[static_cast<std::size_t>(i * r + j)];
    }
};

// counts[rho-1] = number of observations whose correct label has rank
// rho; sufficient statistic for every subsampled accuracy.
struct RankHistogram {
    std::int64_t k1 = 0;
    std::int64_t r = 0;
    std::vector<std::int64_t> counts; // length k1

    std::int64_t total() const { return k1 * r; }
};

RankTensor compute_ranks(const ScoreTable& table, int threads = 1);

RankHistogram make_histogram(const RankTensor& ranks);

// Parses the alternative rank input (header `true_class,obs,rank`).
RankHistogram load_rank_csv(const std::string& path);

} // namespace classex
