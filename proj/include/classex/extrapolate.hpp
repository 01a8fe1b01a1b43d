#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "classex/accuracy.hpp"
#include "classex/basis.hpp"
#include "classex/scores.hpp"

namespace classex {

// Least-squares fit of 1 - ATA_k on the basis moments H_{l,k}.
struct ExtrapolationFit {
    BasisSpec basis;
    std::vector<double> beta;
    std::int64_t k1 = 0;
    std::int64_t r = 0;
    std::vector<std::int64_t> fitted_ks;
    double rss = 0.0;
    // Diagnostics on the implied D-hat; the coefficients are not
    // constrained to make it a CDF. When d_monotone holds (checked on a
    // 1000-point grid), predictions are non-increasing in k; a false
    // value is a warning, not an error.
    double d_at_zero = 0.0;
    double d_at_one = 0.0;
    bool d_monotone = true;
};

// beta = argmin sum_k ((1 - ATA_k) - sum_l beta_l H_{l,k})^2 over the
// curve's observed entries, solved by SVD; singular values below
// 1e-10 x the largest are dropped, so rank-deficient designs yield the
// minimum-norm solution.
ExtrapolationFit fit(const AccuracyCurve& curve, const BasisSpec& basis,
                     const MomentMatrix& moments);

// 1 - sum_l beta_l H_{l,k2}; predict() clamps to [0,1], predict_raw()
// exposes the unclamped value.
double predict_raw(const ExtrapolationFit& fit, const MomentMatrix& moments, std::int64_t k2);
double predict(const ExtrapolationFit& fit, const MomentMatrix& moments, std::int64_t k2);

struct SelectionReport {
    struct Candidate {
        BasisSpec basis;
        double error = 0.0; // sum over resamples of squared prediction error at k1
    };
    std::vector<Candidate> candidates;
    std::int64_t chosen = -1;
    std::int64_t resamples = 0;       // L
    std::int64_t k0 = 0;              // inner source size, floor(k1/2)
    bool with_replacement = false;
    std::int64_t redraws = 0;         // degenerate with-replacement draws redrawn
    std::uint64_t seed = 0;
};

// Precomputed per-candidate moment matrices reused across fits of the
// same problem shape (k1, r, targets). Building one is the expensive
// step, so studies construct it once.
struct SelectionContext {
    std::int64_t k1 = 0;
    std::int64_t r = 0;
    std::vector<BasisSpec> candidates;
    std::vector<MomentMatrix> inner_moments; // k-grid 2..k0 plus k1
    std::vector<MomentMatrix> full_moments;  // fit grid plus prediction targets
    std::vector<std::int64_t> fit_ks;
    std::vector<std::int64_t> inner_ks;
};

SelectionContext make_selection_context(std::int64_t k1, std::int64_t r,
                                        const std::vector<BasisSpec>& candidates,
                                        const std::vector<std::int64_t>& k2_targets,
                                        int threads = 1);

struct SelectionOptions {
    std::int64_t resamples = 10;
    std::uint64_t seed = 0;
    bool with_replacement = false;
    int threads = 1;
    double tie_epsilon = 1e-9;
};

// Resampling-based basis selection: L subsamples of k0 = floor(k1/2)
// classes; every candidate is fitted on the inner curve and scored by
// its squared prediction error against the full-data ATA_{k1}. Ties are
// broken toward the smallest bandwidth, so the choice does not depend
// on candidate order.
SelectionReport select_basis(const ScoreTable& table, const SelectionContext& context,
                             const SelectionOptions& options);

struct PipelineConfig {
    std::vector<double> h_grid = default_bandwidth_grid();
    SelectionOptions selection;
};

struct PipelineResult {
    AccuracyCurve curve; // observed entries plus extrapolated entries at new k
    std::vector<AccuracyCurve::Entry> predictions; // one per requested k2
    ExtrapolationFit fit;
    SelectionReport selection;
};

// ranks -> histogram -> ATA curve -> basis selection -> full-data fit ->
// predictions at each requested k2.
PipelineResult extrapolate_pipeline(const ScoreTable& table,
                                    const std::vector<std::int64_t>& k2_list,
                                    const PipelineConfig& config);

// Pipeline variant reusing a prebuilt context (the study path).
PipelineResult extrapolate_with_context(const ScoreTable& table,
                                        const std::vector<std::int64_t>& k2_list,
                                        const SelectionContext& context,
                                        const SelectionOptions& options);

} // namespace classex
