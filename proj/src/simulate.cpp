#include "classex/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>

#include "classex/accuracy.hpp"
#include "classex/csv.hpp"
#include "classex/errors.hpp"
#include "classex/extrapolate.hpp"
#include "classex/kde.hpp"
#include "classex/normal.hpp"
#include "classex/parallel.hpp"
#include "classex/ranks.hpp"
#include "classex/rng.hpp"

namespace classex {

double toy_ga_exact(std::vector<double> labels, double rho) {
    if (labels.empty()) throw input_error("toy_ga_exact needs at least one label");
    if (!(std::fabs(rho) < 1.0)) throw input_error("toy model needs |rho| < 1");
    std::sort(labels.begin(), labels.end());
    const auto k = static_cast<std::int64_t>(labels.size());
    const double denom = 2.0 * std::sqrt(1.0 - rho * rho);
    double acc = 0.0;
    for (std::int64_t i = 0; i < k; ++i) {
        const double y = labels[static_cast<std::size_t>(i)];
        const double right =
            (i + 1 < k) ? norm_cdf(rho * (labels[static_cast<std::size_t>(i + 1)] - y) / denom)
                        : 1.0;
        const double left =
            (i > 0) ? norm_cdf(rho * (labels[static_cast<std::size_t>(i - 1)] - y) / denom) : 0.0;
        acc += right - left;
    }
    return acc / static_cast<double>(k);
}

double toy_favorability(double x_star, double y, double rho) {
    if (!(std::fabs(rho) < 1.0)) throw input_error("toy model needs |rho| < 1");
    if (rho == 0.0) return 0.5; // scores carry no information; ties split evenly
    const double a = std::fabs(rho);
    const double d = std::fabs(rho * y - x_star);
    // losing probability: a fresh competitor lands closer to x*
    const double lose = norm_cdf((x_star + d) / a) - norm_cdf((x_star - d) / a);
    return 1.0 - lose;
}

std::vector<double> toy_favorability_sample(const ToyModel& model, std::int64_t n,
                                            std::uint64_t seed) {
    if (n < 1) throw input_error("favorability sample size must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    RandomStream stream(mix64(seed, rng_tag::toy, 0));
    const double noise = std::sqrt(1.0 - model.rho * model.rho);
    for (auto& u : out) {
        const double y = stream.normal();
        const double x = model.rho * y + noise * stream.normal();
        u = toy_favorability(x, y, model.rho);
    }
    return out;
}

double aga_from_favorability_sample(std::span<const double> u_sample, std::int64_t k) {
    if (u_sample.empty()) throw input_error("empty favorability sample");
    if (k < 2) throw input_error("aga needs k >= 2");
    // For the empirical CDF D-hat, (k-1) int D-hat(u) u^{k-2} du =
    // (1/n) sum_i (1 - u_i^{k-1}); the identity then gives the mean of
    // u_i^{k-1}.
    double acc = 0.0;
    for (const double u : u_sample) {
        acc += 1.0 - std::pow(u, static_cast<double>(k - 1));
    }
    return 1.0 - acc / static_cast<double>(u_sample.size());
}

double toy_aga_mc(const ToyModel& model, std::int64_t k, std::int64_t n_sets, std::uint64_t seed,
                  double* standard_error) {
    if (k < 1) throw input_error("aga needs k >= 1");
    if (n_sets < 1) throw input_error("toy_aga_mc needs at least one label set");
    RandomStream stream(mix64(seed, rng_tag::toy, 1, static_cast<std::uint64_t>(k)));
    std::vector<double> labels(static_cast<std::size_t>(k));
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t s = 0; s < n_sets; ++s) {
        for (auto& y : labels) y = stream.normal();
        const double ga = toy_ga_exact(labels, model.rho);
        sum += ga;
        sum_sq += ga * ga;
    }
    const auto n = static_cast<double>(n_sets);
    const double mean = sum / n;
    if (standard_error) {
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        *standard_error = std::sqrt(var / n);
    }
    return mean;
}

ScoreTable simulate_gaussian_task(const GaussianMixtureModel& model, std::int64_t k,
                                  std::uint64_t seed) {
    if (k < 2) throw input_error("gaussian task needs k >= 2");
    if (model.dim < 1 || model.r_test < 1) throw input_error("bad gaussian model parameters");
    if (!(model.sigma > 0.0)) throw input_error("gaussian noise level must be positive");

    const auto dim = static_cast<std::size_t>(model.dim);
    std::vector<double> train(static_cast<std::size_t>(k) * dim);
    std::vector<double> test(static_cast<std::size_t>(k * model.r_test) * dim);
    {
        RandomStream stream(mix64(seed, rng_tag::sim_task, static_cast<std::uint64_t>(k)));
        std::vector<double> center(dim);
        for (std::int64_t c = 0; c < k; ++c) {
            for (auto& v : center) v = stream.normal();
            for (std::size_t d = 0; d < dim; ++d) {
                train[static_cast<std::size_t>(c) * dim + d] = center[d] + model.sigma * stream.normal();
            }
            for (std::int64_t j = 0; j < model.r_test; ++j) {
                const auto base = static_cast<std::size_t>(c * model.r_test + j) * dim;
                for (std::size_t d = 0; d < dim; ++d) {
                    test[base + d] = center[d] + model.sigma * stream.normal();
                }
            }
        }
    }

    ScoreTable table;
    table.k1 = k;
    table.r = model.r_test;
    table.scores.resize(static_cast<std::size_t>(k * model.r_test * k));
    for (std::int64_t i = 0; i < k; ++i) {
        for (std::int64_t j = 0; j < model.r_test; ++j) {
            const auto obs = &test[static_cast<std::size_t>(i * model.r_test + j) * dim];
            auto row = table.row(i, j);
            for (std::int64_t s = 0; s < k; ++s) {
                const auto tr = &train[static_cast<std::size_t>(s) * dim];
                double d2 = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double diff = obs[d] - tr[d];
                    d2 += diff * diff;
                }
                row[static_cast<std::size_t>(s)] = -d2;
            }
        }
    }
    return table;
}

std::vector<double> default_study_sigmas() {
    // variances {0.08, 0.12, 0.18, 0.27, 0.40, 0.60}
    return {0.28284271247461901, 0.34641016151377546, 0.42426406871192851,
            0.51961524227066318, 0.63245553203367588, 0.77459666924148340};
}

namespace {

double rmse(const std::vector<double>& errors) {
    double ss = 0.0;
    for (const double e : errors) ss += e * e;
    return std::sqrt(ss / static_cast<double>(errors.size()));
}

} // namespace

std::vector<StudySummary> summarize_study(const StudyConfig& config,
                                          const std::vector<StudyRow>& rows) {
    std::vector<StudySummary> out;
    const auto n_sigma = config.sigmas.size();
    for (const auto& method : config.methods) {
        StudySummary s;
        s.method = method;
        // errors[sigma_idx][replicate]
        std::vector<std::vector<double>> errors(n_sigma);
        for (const auto& row : rows) {
            if (row.method != method) continue;
            const auto it = std::find(config.sigmas.begin(), config.sigmas.end(), row.sigma);
            if (it == config.sigmas.end()) continue;
            errors[static_cast<std::size_t>(it - config.sigmas.begin())].push_back(
                row.predicted - row.true_ta);
        }
        s.rmse_per_sigma.resize(n_sigma, 0.0);
        s.bias_per_sigma.resize(n_sigma, 0.0);
        for (std::size_t g = 0; g < n_sigma; ++g) {
            if (errors[g].empty()) throw input_error("study summary: missing rows for a sigma");
            s.rmse_per_sigma[g] = rmse(errors[g]);
            double mean = 0.0;
            for (const double e : errors[g]) mean += e;
            s.bias_per_sigma[g] = mean / static_cast<double>(errors[g].size());
        }
        s.max_rmse = *std::max_element(s.rmse_per_sigma.begin(), s.rmse_per_sigma.end());

        // bootstrap over replicates, maximum nested inside each round
        const std::int64_t B = config.bootstrap_rounds;
        if (B > 1) {
            RandomStream stream(mix64(config.seed, rng_tag::bootstrap, fnv1a64(method)));
            double sum = 0.0, sum_sq = 0.0;
            std::vector<double> resampled;
            for (std::int64_t b = 0; b < B; ++b) {
                double max_rmse_b = 0.0;
                for (std::size_t g = 0; g < n_sigma; ++g) {
                    const auto& errs = errors[g];
                    resampled.clear();
                    for (std::size_t i = 0; i < errs.size(); ++i) {
                        resampled.push_back(
                            errs[stream.below(static_cast<std::uint64_t>(errs.size()))]);
                    }
                    max_rmse_b = std::max(max_rmse_b, rmse(resampled));
                }
                sum += max_rmse_b;
                sum_sq += max_rmse_b * max_rmse_b;
            }
            const auto nb = static_cast<double>(B);
            const double mean = sum / nb;
            s.se = std::sqrt(std::max(0.0, (sum_sq - nb * mean * mean) / (nb - 1.0)));
        }
        out.push_back(std::move(s));
    }
    return out;
}

StudyReport run_study(const StudyConfig& config) {
    StudyConfig cfg = config;
    if (cfg.sigmas.empty()) cfg.sigmas = default_study_sigmas();
    if (cfg.h_grid.empty()) cfg.h_grid = default_bandwidth_grid();
    if (cfg.k2 <= cfg.k1 || cfg.k1 < 4) throw input_error("study needs k2 > k1 >= 4");
    if (cfg.replicates < 1) throw input_error("study needs at least one replicate");
    for (const auto& m : cfg.methods) {
        if (m != "classexreg" && m != "kde-bcv" && m != "kde-ucv") {
            throw input_error("unknown study method: " + m);
        }
    }

    const bool wants_classexreg =
        std::find(cfg.methods.begin(), cfg.methods.end(), "classexreg") != cfg.methods.end();
    SelectionContext context;
    if (wants_classexreg) {
        context = make_selection_context(cfg.k1, cfg.r_test,
                                         candidate_bases(cfg.r_test, cfg.k1, cfg.h_grid),
                                         {cfg.k2}, cfg.threads);
    }

    // resume journal: previously completed units are skipped
    struct UnitKey {
        std::size_t sigma_idx;
        std::int64_t replicate;
    };
    std::vector<UnitKey> units;
    std::vector<std::vector<StudyRow>> unit_rows;
    std::vector<StudyRow> done_rows;
    std::vector<char> done(cfg.sigmas.size() * static_cast<std::size_t>(cfg.replicates), 0);
    if (!cfg.journal_path.empty()) {
        std::ifstream journal(cfg.journal_path);
        std::string line;
        while (journal && std::getline(journal, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto fields = split_csv_line(line);
            if (fields.size() != 5) continue;
            StudyRow row;
            row.sigma = parse_double_field(fields[0], "journal");
            row.replicate = parse_int_field(fields[1], "journal");
            row.method = fields[2];
            row.predicted = parse_double_field(fields[3], "journal");
            row.true_ta = parse_double_field(fields[4], "journal");
            const auto it = std::find(cfg.sigmas.begin(), cfg.sigmas.end(), row.sigma);
            if (it == cfg.sigmas.end() || row.replicate < 0 || row.replicate >= cfg.replicates) {
                continue;
            }
            done_rows.push_back(row);
        }
        // a unit counts as done when every requested method is present
        for (std::size_t g = 0; g < cfg.sigmas.size(); ++g) {
            for (std::int64_t rep = 0; rep < cfg.replicates; ++rep) {
                std::size_t found = 0;
                for (const auto& m : cfg.methods) {
                    for (const auto& row : done_rows) {
                        if (row.sigma == cfg.sigmas[g] && row.replicate == rep &&
                            row.method == m) {
                            ++found;
                            break;
                        }
                    }
                }
                if (found == cfg.methods.size()) {
                    done[g * static_cast<std::size_t>(cfg.replicates) +
                         static_cast<std::size_t>(rep)] = 1;
                }
            }
        }
    }

    for (std::size_t g = 0; g < cfg.sigmas.size(); ++g) {
        for (std::int64_t rep = 0; rep < cfg.replicates; ++rep) {
            if (!done[g * static_cast<std::size_t>(cfg.replicates) + static_cast<std::size_t>(rep)]) {
                units.push_back({g, rep});
            }
        }
    }
    unit_rows.resize(units.size());

    std::mutex journal_mutex;
    std::ofstream journal;
    if (!cfg.journal_path.empty()) {
        journal.open(cfg.journal_path, std::ios::app);
    }

    parallel_for(static_cast<std::int64_t>(units.size()), cfg.threads, [&](std::int64_t u) {
        const auto [sigma_idx, rep] = units[static_cast<std::size_t>(u)];
        const double sigma = cfg.sigmas[sigma_idx];

        GaussianMixtureModel model;
        model.dim = cfg.dim;
        model.sigma = sigma;
        model.r_test = cfg.r_test;
        const std::uint64_t task_seed = mix64(cfg.seed, rng_tag::study,
                                              static_cast<std::uint64_t>(sigma_idx),
                                              static_cast<std::uint64_t>(rep));
        const ScoreTable full = simulate_gaussian_task(model, cfg.k2, task_seed);
        const double true_ta = test_accuracy(make_histogram(compute_ranks(full, 1)));

        // the first k1 classes of an i.i.d. task are themselves a
        // uniform draw of k1 classes
        std::vector<std::int64_t> head(static_cast<std::size_t>(cfg.k1));
        for (std::int64_t i = 0; i < cfg.k1; ++i) head[static_cast<std::size_t>(i)] = i;
        TieBreakConfig tie;
        tie.seed = mix64(task_seed, rng_tag::tie_break);
        const ScoreTable sub = restrict_classes(full, head, tie);

        auto& rows = unit_rows[static_cast<std::size_t>(u)];
        for (const auto& method : cfg.methods) {
            StudyRow row;
            row.sigma = sigma;
            row.replicate = rep;
            row.method = method;
            row.true_ta = true_ta;
            if (method == "classexreg") {
                SelectionOptions opts;
                opts.resamples = cfg.resamples;
                opts.seed = mix64(task_seed, rng_tag::resample);
                opts.threads = 1; // parallelism lives at the unit level
                const PipelineResult res = extrapolate_with_context(sub, {cfg.k2}, context, opts);
                row.predicted = res.predictions.front().value;
            } else {
                KdeConfig kde;
                kde.rule = (method == "kde-bcv") ? BandwidthRule::bcv : BandwidthRule::ucv;
                kde.threads = 1;
                row.predicted = kde_extrapolate(sub, cfg.k2, kde);
            }
            rows.push_back(row);
        }
        if (journal.is_open()) {
            std::lock_guard<std::mutex> lock(journal_mutex);
            for (const auto& row : rows) {
                journal << format_double(row.sigma) << ',' << row.replicate << ',' << row.method
                        << ',' << format_double(row.predicted) << ','
                        << format_double(row.true_ta) << '\n';
            }
            journal.flush();
        }
    });

    StudyReport report;
    report.config = cfg;
    report.rows = std::move(done_rows);
    for (auto& rows : unit_rows) {
        for (auto& row : rows) report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(), [&](const StudyRow& a, const StudyRow& b) {
        if (a.sigma != b.sigma) return a.sigma < b.sigma;
        if (a.replicate != b.replicate) return a.replicate < b.replicate;
        return a.method < b.method;
    });
    report.summaries = summarize_study(cfg, report.rows);
    return report;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw input_error("ks_statistic needs a nonempty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

double ks_critical_value(std::int64_t n, double alpha) {
    if (n < 1 || alpha <= 0.0 || alpha >= 1.0) throw input_error("bad KS parameters");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

} // namespace classex
