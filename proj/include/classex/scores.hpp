#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace classex {

struct TieBreakConfig {
    // Relative magnitude of the uniform noise added to rows that contain
    // tied scores; rows without ties are left untouched.
    double epsilon = 1e-9;
    std::uint64_t seed = 0;
};

// Dense score table of a marginal classifier: k1 true classes, r test
// observations per class, and one score per candidate class.
// Layout: scores[(i*r + j)*k1 + s] = score of candidate s for test
// observation j of true class i.
struct ScoreTable {
    std::int64_t k1 = 0;
    std::int64_t r = 0;
    std::vector<double> scores;

    double at(std::int64_t i, std::int64_t j, std::int64_t s) const {
        return scores[static_cast<std::size_t>((i * r + j) * k1 + s)];
    }
    double& at(std::int64_t i, std::int64_t j, std::int64_t s) {
        return scores[static_cast<std::size_t>((i * r + j) * k1 + s)];
    }
    std::span<const double> row(std::int64_t i, std::int64_t j) const {
        return {scores.data() + (i * r + j) * k1, static_cast<std::size_t>(k1)};
    }
    std::span<double> row(std::int64_t i, std::int64_t j) {
        return {scores.data() + (i * r + j) * k1, static_cast<std::size_t>(k1)};
    }
};

// Validates shape and finiteness (k1 >= 2, r >= 1, all entries finite).
void validate_score_table(const ScoreTable& table);

// Adds seeded uniform noise to every row that contains tied scores.
// Noise magnitude is epsilon * (max - min) over the whole table (falling
// back to epsilon * max(1, |max|) for a constant table). Each row draws
// from its own (seed, i, j)-derived stream, so the result is independent
// of iteration order. Returns the number of rows that were perturbed.
std::int64_t break_ties(ScoreTable& table, const TieBreakConfig& config);

// Parses a score CSV (header `true_class,obs,score_1,...,score_k1`,
// classes and observations 1-indexed) without applying tie-breaking.
ScoreTable load_score_csv(const std::string& path);

// load_score_csv + validate + break_ties: the standard ingestion path.
ScoreTable ingest_scores(const std::string& path, const TieBreakConfig& config);

// Builds the sub-table on the given class indices (0-based, into both
// the true-class and candidate axes). Indices may repeat (bootstrap
// resampling); duplicated classes create exact ties, which are re-broken
// with the supplied config.
ScoreTable restrict_classes(const ScoreTable& table, std::span<const std::int64_t> classes,
                            const TieBreakConfig& config);

} // namespace classex
