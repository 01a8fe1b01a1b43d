#include "classex/ranks.hpp"

#include <algorithm>
#include <fstream>

#include "classex/csv.hpp"
#include "classex/errors.hpp"
#include "classex/parallel.hpp"

namespace classex {

RankTensor compute_ranks(const ScoreTable& table, int threads) {
    RankTensor out;
    out.k1 = table.k1;
    out.r = table.r;
    out.ranks.resize(static_cast<std::size_t>(table.k1 * table.r));
    const std::int64_t rows = table.k1 * table.r;
    parallel_for(rows, threads, [&](std::int64_t cell) {
        const std::int64_t i = cell / table.r;
        const auto row = table.row(i, cell % table.r);
        const double own = row[static_cast<std::size_t>(i)];
        std::int32_t rank = 0;
        for (const double s : row) {
            rank += (own >= s);
        }
        out.ranks[static_cast<std::size_t>(cell)] = rank;
    });
    return out;
}

RankHistogram make_histogram(const RankTensor& ranks) {
    RankHistogram h;
    h.k1 = ranks.k1;
    h.r = ranks.r;
    h.counts.assign(static_cast<std::size_t>(ranks.k1), 0);
    for (const auto rho : ranks.ranks) {
        if (rho < 1 || rho > ranks.k1) throw input_error("rank out of [1, k1]");
        ++h.counts[static_cast<std::size_t>(rho - 1)];
    }
    return h;
}

RankHistogram load_rank_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open rank file: " + path);

    std::string line;
    std::size_t line_no = 0;
    for (;;) {
        if (!std::getline(in, line)) throw input_error(path + ": empty file");
        ++line_no;
        if (!line.empty() && line[0] != '#') break;
    }
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "true_class" || header[1] != "obs" ||
        header[2] != "rank") {
        throw input_error(path + ": expected header true_class,obs,rank");
    }

    std::vector<std::int64_t> classes, ranks;
    std::int64_t max_class = 0, max_obs = 0, max_rank = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw input_error(where + ": expected 3 fields");
        const auto cls = parse_int_field(fields[0], where);
        const auto obs = parse_int_field(fields[1], where);
        const auto rank = parse_int_field(fields[2], where);
        if (cls < 1 || obs < 1 || rank < 1) throw input_error(where + ": fields must be >= 1");
        max_class = std::max(max_class, cls);
        max_obs = std::max(max_obs, obs);
        max_rank = std::max(max_rank, rank);
        classes.push_back(cls);
        ranks.push_back(rank);
    }
    if (max_class < 2) throw input_error(path + ": need at least 2 classes");
    if (max_rank > max_class) {
        throw input_error(path + ": rank " + std::to_string(max_rank) + " exceeds class count " +
                          std::to_string(max_class));
    }
    if (static_cast<std::int64_t>(ranks.size()) != max_class * max_obs) {
        throw input_error(path + ": expected " + std::to_string(max_class * max_obs) +
                          " rows for k1=" + std::to_string(max_class) + ", r=" +
                          std::to_string(max_obs));
    }
    RankHistogram h;
    h.k1 = max_class;
    h.r = max_obs;
    h.counts.assign(static_cast<std::size_t>(max_class), 0);
    for (const auto rank : ranks) ++h.counts[static_cast<std::size_t>(rank - 1)];
    return h;
}

} // namespace classex
