#include "classex/extrapolate.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "classex/errors.hpp"
#include "classex/parallel.hpp"
#include "classex/ranks.hpp"
#include "classex/rng.hpp"

namespace classex {

namespace {
constexpr double kSingularValueCutoff = 1e-10;

std::vector<double> solve_least_squares(const Eigen::MatrixXd& design,
                                        const Eigen::VectorXd& target, double* rss) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSingularValueCutoff);
    const Eigen::VectorXd beta = svd.solve(target);
    if (rss) *rss = (design * beta - target).squaredNorm();
    return {beta.data(), beta.data() + beta.size()};
}
} // namespace

ExtrapolationFit fit(const AccuracyCurve& curve, const BasisSpec& basis,
                     const MomentMatrix& moments) {
    if (moments.m != basis.size()) {
        throw input_error("moment matrix does not match basis size");
    }
    std::vector<const AccuracyCurve::Entry*> rows;
    for (const auto& e : curve.entries) {
        if (e.provenance == Provenance::observed && e.k >= 2) rows.push_back(&e);
    }
    if (rows.size() < 2) {
        throw input_error("fit needs at least two observed curve entries with k >= 2");
    }
    const auto m = basis.size();
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t row = 0; row < rows.size(); ++row) {
        target(static_cast<Eigen::Index>(row)) = 1.0 - rows[row]->value;
        for (std::int64_t ell = 0; ell < m; ++ell) {
            design(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(ell)) =
                moments.at(ell, rows[row]->k);
        }
    }

    ExtrapolationFit out;
    out.basis = basis;
    out.k1 = curve.k1;
    out.r = curve.r;
    out.fitted_ks.reserve(rows.size());
    for (const auto* e : rows) out.fitted_ks.push_back(e->k);
    out.beta = solve_least_squares(design, target, &out.rss);
    const auto d_hat = [&](double u) {
        double acc = 0.0;
        for (std::int64_t ell = 0; ell < m; ++ell) {
            acc += out.beta[static_cast<std::size_t>(ell)] * basis.eval(ell, u);
        }
        return acc;
    };
    out.d_at_zero = d_hat(0.0);
    out.d_at_one = d_hat(1.0);
    double prev = out.d_at_zero;
    for (int i = 1; i <= 1000; ++i) {
        const double cur = d_hat(static_cast<double>(i) / 1000.0);
        if (cur < prev - 1e-12) {
            out.d_monotone = false;
            break;
        }
        prev = cur;
    }
    return out;
}

double predict_raw(const ExtrapolationFit& fit, const MomentMatrix& moments, std::int64_t k2) {
    if (k2 < 2) throw input_error("prediction target k2 must be >= 2");
    double acc = 0.0;
    for (std::int64_t ell = 0; ell < fit.basis.size(); ++ell) {
        acc += fit.beta[static_cast<std::size_t>(ell)] * moments.at(ell, k2);
    }
    return 1.0 - acc;
}

double predict(const ExtrapolationFit& fit, const MomentMatrix& moments, std::int64_t k2) {
    return std::clamp(predict_raw(fit, moments, k2), 0.0, 1.0);
}

SelectionContext make_selection_context(std::int64_t k1, std::int64_t r,
                                        const std::vector<BasisSpec>& candidates,
                                        const std::vector<std::int64_t>& k2_targets,
                                        int threads) {
    if (k1 < 4) throw input_error("basis selection needs k1 >= 4");
    SelectionContext ctx;
    ctx.k1 = k1;
    ctx.r = r;
    ctx.candidates = candidates;
    const std::int64_t k0 = k1 / 2;
    for (std::int64_t k = 2; k <= k0; ++k) ctx.inner_ks.push_back(k);
    ctx.fit_ks = default_k_grid(k1);

    std::vector<std::int64_t> inner_grid = ctx.inner_ks;
    inner_grid.push_back(k1);
    std::vector<std::int64_t> full_grid = ctx.fit_ks;
    for (const auto k2 : k2_targets) {
        if (k2 < 2) throw input_error("prediction target k2 must be >= 2");
        full_grid.push_back(k2);
    }

    ctx.inner_moments.resize(candidates.size());
    ctx.full_moments.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        ctx.inner_moments[c] = moments(candidates[c], inner_grid, threads);
        ctx.full_moments[c] = moments(candidates[c], full_grid, threads);
    }
    return ctx;
}

namespace {

double candidate_bandwidth(const BasisSpec& basis) {
    return basis.kind == BasisKind::radial ? basis.bandwidth : 0.0;
}

} // namespace

SelectionReport select_basis(const ScoreTable& table, const SelectionContext& context,
                             const SelectionOptions& options) {
    if (table.k1 != context.k1 || table.r != context.r) {
        throw input_error("selection context does not match score table shape");
    }
    if (table.k1 < 4) throw input_error("basis selection needs k1 >= 4");
    if (options.resamples < 1) throw input_error("selection needs at least one resample");
    if (context.candidates.empty()) throw input_error("selection needs at least one candidate");

    const std::int64_t k1 = table.k1;
    const std::int64_t k0 = k1 / 2;
    const std::int64_t L = options.resamples;
    const auto n_cand = static_cast<std::int64_t>(context.candidates.size());

    const RankHistogram full_hist = make_histogram(compute_ranks(table, options.threads));
    const double ata_k1 = ata_value(full_hist, k1);

    // per-(resample, candidate) squared errors; summed in fixed order
    // after the parallel region so results are schedule-independent
    std::vector<double> sq_err(static_cast<std::size_t>(L * n_cand), 0.0);
    std::vector<std::int64_t> redraws(static_cast<std::size_t>(L), 0);

    parallel_for(L, options.threads, [&](std::int64_t ell) {
        RandomStream stream(mix64(options.seed, rng_tag::resample, static_cast<std::uint64_t>(ell)));
        std::vector<std::int64_t> subset;
        if (options.with_replacement) {
            for (;;) {
                subset = stream.sample_with_replacement(k1, k0);
                std::vector<std::int64_t> distinct = subset;
                std::sort(distinct.begin(), distinct.end());
                distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
                if (static_cast<std::int64_t>(distinct.size()) >= 2) break;
                ++redraws[static_cast<std::size_t>(ell)];
            }
        } else {
            subset = stream.sample_without_replacement(k1, k0);
        }
        TieBreakConfig tie;
        tie.epsilon = options.tie_epsilon;
        tie.seed = mix64(options.seed, rng_tag::resample, static_cast<std::uint64_t>(ell), 1);
        const ScoreTable sub = restrict_classes(table, subset, tie);
        const RankHistogram hist = make_histogram(compute_ranks(sub, 1));

        AccuracyCurve inner;
        inner.k1 = k0;
        inner.r = table.r;
        for (const auto k : context.inner_ks) {
            inner.insert(k, ata_value(hist, k), Provenance::observed);
        }
        for (std::int64_t c = 0; c < n_cand; ++c) {
            const auto& mm = context.inner_moments[static_cast<std::size_t>(c)];
            const ExtrapolationFit f = fit(inner, context.candidates[static_cast<std::size_t>(c)], mm);
            const double pred = predict(f, mm, k1);
            const double err = pred - ata_k1;
            sq_err[static_cast<std::size_t>(ell * n_cand + c)] = err * err;
        }
    });

    SelectionReport report;
    report.resamples = L;
    report.k0 = k0;
    report.with_replacement = options.with_replacement;
    report.seed = options.seed;
    for (const auto n : redraws) report.redraws += n;
    report.candidates.resize(static_cast<std::size_t>(n_cand));
    for (std::int64_t c = 0; c < n_cand; ++c) {
        auto& cand = report.candidates[static_cast<std::size_t>(c)];
        cand.basis = context.candidates[static_cast<std::size_t>(c)];
        for (std::int64_t ell = 0; ell < L; ++ell) {
            cand.error += sq_err[static_cast<std::size_t>(ell * n_cand + c)];
        }
    }
    report.chosen = 0;
    for (std::int64_t c = 1; c < n_cand; ++c) {
        const auto& best = report.candidates[static_cast<std::size_t>(report.chosen)];
        const auto& cur = report.candidates[static_cast<std::size_t>(c)];
        const bool better =
            cur.error < best.error ||
            (cur.error == best.error &&
             candidate_bandwidth(cur.basis) < candidate_bandwidth(best.basis));
        if (better) report.chosen = c;
    }
    return report;
}

PipelineResult extrapolate_with_context(const ScoreTable& table,
                                        const std::vector<std::int64_t>& k2_list,
                                        const SelectionContext& context,
                                        const SelectionOptions& options) {
    PipelineResult out;
    out.selection = select_basis(table, context, options);

    const RankHistogram hist = make_histogram(compute_ranks(table, options.threads));
    out.curve = ata_curve(hist, context.fit_ks, options.threads);

    const auto chosen = static_cast<std::size_t>(out.selection.chosen);
    const auto& mm = context.full_moments[chosen];
    out.fit = fit(out.curve, context.candidates[chosen], mm);

    for (const auto k2 : k2_list) {
        const double value = predict(out.fit, mm, k2);
        out.predictions.push_back({k2, value, Provenance::extrapolated});
        if (!out.curve.find(k2)) {
            out.curve.insert(k2, value, Provenance::extrapolated);
        }
    }
    return out;
}

PipelineResult extrapolate_pipeline(const ScoreTable& table,
                                    const std::vector<std::int64_t>& k2_list,
                                    const PipelineConfig& config) {
    validate_score_table(table);
    const auto candidates = candidate_bases(table.r, table.k1, config.h_grid);
    const SelectionContext context = make_selection_context(
        table.k1, table.r, candidates, k2_list, config.selection.threads);
    return extrapolate_with_context(table, k2_list, context, config.selection);
}

} // namespace classex
