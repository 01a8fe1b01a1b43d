#include "classex/scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "classex/csv.hpp"
#include "classex/errors.hpp"
#include "classex/rng.hpp"

namespace classex {

void validate_score_table(const ScoreTable& table) {
    if (table.k1 < 2) throw input_error("score table needs at least 2 classes");
    if (table.r < 1) throw input_error("score table needs at least 1 observation per class");
    const auto expected = static_cast<std::size_t>(table.k1 * table.r * table.k1);
    if (table.scores.size() != expected) {
        throw input_error("score table storage does not match k1*r*k1");
    }
    for (const double v : table.scores) {
        if (!std::isfinite(v)) throw input_error("score table contains a non-finite entry");
    }
}

namespace {

bool row_has_ties(std::span<const double> row) {
    // k1 is small enough that the quadratic scan would do, but sorting a
    // scratch copy keeps this O(k log k) for wide tables.
    static thread_local std::vector<double> scratch;
    scratch.assign(row.begin(), row.end());
    std::sort(scratch.begin(), scratch.end());
    return std::adjacent_find(scratch.begin(), scratch.end()) != scratch.end();
}

double noise_scale(const ScoreTable& table, double epsilon) {
    const auto [lo, hi] = std::minmax_element(table.scores.begin(), table.scores.end());
    const double spread = *hi - *lo;
    if (spread > 0.0) return epsilon * spread;
    return epsilon * std::max(1.0, std::fabs(*hi));
}

} // namespace

std::int64_t break_ties(ScoreTable& table, const TieBreakConfig& config) {
    const double scale = noise_scale(table, config.epsilon);
    std::int64_t perturbed = 0;
    for (std::int64_t i = 0; i < table.k1; ++i) {
        for (std::int64_t j = 0; j < table.r; ++j) {
            auto row = table.row(i, j);
            if (!row_has_ties(row)) continue;
            RandomStream stream(mix64(config.seed, rng_tag::tie_break,
                                      static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j)));
            // Redraw until distinct; a repeat is a probability-zero event
            // but the loop makes the invariant unconditional.
            do {
                for (auto& v : row) v += scale * (stream.uniform() - 0.5);
            } while (row_has_ties(row));
            ++perturbed;
        }
    }
    return perturbed;
}

ScoreTable load_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open score file: " + path);

    std::string line;
    std::size_t line_no = 0;
    // header
    for (;;) {
        if (!std::getline(in, line)) throw input_error(path + ": empty file");
        ++line_no;
        if (!line.empty() && line[0] != '#') break;
    }
    const auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "true_class" || header[1] != "obs") {
        throw input_error(path + ": expected header true_class,obs,score_1,...,score_k1");
    }
    const auto k1 = static_cast<std::int64_t>(header.size() - 2);

    struct Row {
        std::int64_t cls, obs;
        std::vector<double> scores;
    };
    std::vector<Row> rows;
    std::int64_t max_obs = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (static_cast<std::int64_t>(fields.size()) != k1 + 2) {
            throw input_error(where + ": expected " + std::to_string(k1 + 2) + " fields, got " +
                              std::to_string(fields.size()));
        }
        Row row;
        row.cls = parse_int_field(fields[0], where);
        row.obs = parse_int_field(fields[1], where);
        if (row.cls < 1 || row.cls > k1) {
            throw input_error(where + ": true_class " + std::to_string(row.cls) +
                              " out of range [1," + std::to_string(k1) + "]");
        }
        if (row.obs < 1) throw input_error(where + ": obs must be >= 1");
        row.scores.reserve(static_cast<std::size_t>(k1));
        for (std::int64_t s = 0; s < k1; ++s) {
            const double v = parse_double_field(fields[static_cast<std::size_t>(s + 2)], where);
            if (!std::isfinite(v)) throw input_error(where + ": non-finite score");
            row.scores.push_back(v);
        }
        max_obs = std::max(max_obs, row.obs);
        rows.push_back(std::move(row));
    }
    if (k1 < 2) throw input_error(path + ": need at least 2 classes");
    if (rows.empty()) throw input_error(path + ": no data rows");
    const std::int64_t r = max_obs;
    if (static_cast<std::int64_t>(rows.size()) != k1 * r) {
        throw input_error(path + ": expected " + std::to_string(k1 * r) + " rows (k1=" +
                          std::to_string(k1) + ", r=" + std::to_string(r) + "), got " +
                          std::to_string(rows.size()));
    }

    ScoreTable table;
    table.k1 = k1;
    table.r = r;
    table.scores.assign(static_cast<std::size_t>(k1 * r * k1),
                        std::numeric_limits<double>::quiet_NaN());
    std::vector<char> seen(static_cast<std::size_t>(k1 * r), 0);
    for (const auto& row : rows) {
        const auto cell = static_cast<std::size_t>((row.cls - 1) * r + (row.obs - 1));
        if (seen[cell]) {
            throw input_error(path + ": duplicate record for true_class=" + std::to_string(row.cls) +
                              " obs=" + std::to_string(row.obs));
        }
        seen[cell] = 1;
        std::copy(row.scores.begin(), row.scores.end(),
                  table.scores.begin() + static_cast<std::ptrdiff_t>(cell * static_cast<std::size_t>(k1)));
    }
    for (std::size_t cell = 0; cell < seen.size(); ++cell) {
        if (!seen[cell]) {
            throw input_error(path + ": missing record for true_class=" +
                              std::to_string(static_cast<std::int64_t>(cell) / r + 1) + " obs=" +
                              std::to_string(static_cast<std::int64_t>(cell) % r + 1));
        }
    }
    return table;
}

ScoreTable ingest_scores(const std::string& path, const TieBreakConfig& config) {
    ScoreTable table = load_score_csv(path);
    validate_score_table(table);
    break_ties(table, config);
    return table;
}

ScoreTable restrict_classes(const ScoreTable& table, std::span<const std::int64_t> classes,
                            const TieBreakConfig& config) {
    const auto k = static_cast<std::int64_t>(classes.size());
    if (k < 2) throw input_error("restriction needs at least 2 classes");
    for (const auto c : classes) {
        if (c < 0 || c >= table.k1) throw input_error("class index out of range in restriction");
    }
    ScoreTable out;
    out.k1 = k;
    out.r = table.r;
    out.scores.resize(static_cast<std::size_t>(k * table.r * k));
    for (std::int64_t i = 0; i < k; ++i) {
        for (std::int64_t j = 0; j < table.r; ++j) {
            const auto src = table.row(classes[static_cast<std::size_t>(i)], j);
            auto dst = out.row(i, j);
            for (std::int64_t s = 0; s < k; ++s) {
                dst[static_cast<std::size_t>(s)] = src[static_cast<std::size_t>(classes[static_cast<std::size_t>(s)])];
            }
        }
    }
    // Duplicated classes (with-replacement resampling) produce exact
    // ties; re-break them so the rank invariants hold on the sub-table.
    break_ties(out, config);
    return out;
}

} // namespace classex
