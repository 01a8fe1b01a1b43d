#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "classex/scores.hpp"

namespace classex {

// Bivariate-normal toy model: (Y, X) jointly normal with correlation
// rho, so X | Y=y ~ N(rho*y, 1-rho^2), and the Bayes score is
// m_y(x) = -(x - rho*y)^2 / (2(1-rho^2)).
struct ToyModel {
    double rho = 0.7;
};

// Exact generalization accuracy of the Bayes rule for a fixed label set:
// decision regions are bounded by midpoints of the conditional means
// rho*y, so per sorted label
//   Pr(correct | i) = Phi(rho(y[i+1]-y[i]) / (2 sqrt(1-rho^2)))
//                   - Phi(rho(y[i-1]-y[i]) / (2 sqrt(1-rho^2)))
// with y[0] = -inf, y[k+1] = +inf. At rho = 0 every label set scores
// 1/k. Labels may be passed in any order; a sorted copy is used.
double toy_ga_exact(std::vector<double> labels, double rho);

// Favorability of label y at test point x*: the probability that y's
// score beats an independent competitor Y' ~ N(0,1), i.e.
// Pr[|rho*y - x*| < |rho*Y' - x*|]. Equals 1 at a perfect match
// (x* = rho*y) and decays to 0 with distance. rho = 0 carries no
// information and returns 1/2 by symmetry.
double toy_favorability(double x_star, double y, double rho);

// n draws of the correct-pair favorability U* = U_{X*}(M_{Y*}) under the
// joint law; the empirical distribution estimates D(u).
std::vector<double> toy_favorability_sample(const ToyModel& model, std::int64_t n,
                                            std::uint64_t seed);

// Average accuracy through the moment identity,
//   AGA_k = 1 - (k-1) int_0^1 D(u) u^{k-2} du,
// evaluated exactly for the empirical CDF of the given U* sample
// (piecewise integration gives mean of u_i^{k-1}).
double aga_from_favorability_sample(std::span<const double> u_sample, std::int64_t k);

// Direct Monte Carlo: average of toy_ga_exact over label sets drawn
// i.i.d. from N(0,1). Returns the mean; *standard_error (optional)
// receives the Monte Carlo standard error.
double toy_aga_mc(const ToyModel& model, std::int64_t k, std::int64_t n_sets,
                  std::uint64_t seed, double* standard_error = nullptr);

// Isotropic Gaussian mixture with a 1-nearest-neighbor classifier:
// class centers Y ~ N(0, I_dim), one training draw and r_test test draws
// per class from N(Y, sigma^2 I), score = -squared distance to the
// training point.
struct GaussianMixtureModel {
    std::int64_t dim = 10;
    double sigma = 0.5;
    std::int64_t r_test = 1;
};

ScoreTable simulate_gaussian_task(const GaussianMixtureModel& model, std::int64_t k,
                                  std::uint64_t seed);

struct StudyConfig {
    std::int64_t k1 = 500;
    std::int64_t k2 = 1000;
    std::vector<double> sigmas;     // noise standard deviations
    std::int64_t replicates = 20;
    std::uint64_t seed = 0;
    std::int64_t dim = 10;
    std::int64_t r_test = 1;
    std::vector<std::string> methods = {"classexreg", "kde-bcv", "kde-ucv"};
    std::vector<double> h_grid;     // empty -> default grid
    std::int64_t resamples = 10;    // L for basis selection
    int threads = 1;
    std::int64_t bootstrap_rounds = 1000;
    // When set, each finished work unit appends a line here (resume
    // journal); removed by the CLI after a successful run.
    std::string journal_path;
};

// Noise grid used by the desk-scale study: true TA_1000 spans roughly
// 0.92 down to 0.11 for the dim-10 mixture.
std::vector<double> default_study_sigmas();

struct StudyRow {
    double sigma = 0.0;
    std::int64_t replicate = 0;
    std::string method;
    double predicted = 0.0;
    double true_ta = 0.0;
};

struct StudySummary {
    std::string method;
    double max_rmse = 0.0;
    double se = 0.0; // bootstrap standard error of the max-RMSE
    std::vector<double> rmse_per_sigma;
    std::vector<double> bias_per_sigma;
};

struct StudyReport {
    StudyConfig config;
    std::vector<StudyRow> rows;          // sorted by (sigma, replicate, method)
    std::vector<StudySummary> summaries; // one per method
};

// For each (sigma, replicate): generate a k2-class task, record its test
// accuracy as ground truth, restrict to the first k1 classes, and let
// every method predict accuracy at k2. RMSE and bias per sigma, plus the
// max-RMSE across sigmas with a bootstrap standard error (the maximum is
// taken inside each bootstrap round).
StudyReport run_study(const StudyConfig& config);

// Aggregates rows into per-method summaries (exposed for resumed runs).
std::vector<StudySummary> summarize_study(const StudyConfig& config,
                                          const std::vector<StudyRow>& rows);

// Two-sided Kolmogorov-Smirnov distance between a sample and a
// continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// Asymptotic critical value sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(std::int64_t n, double alpha);

} // namespace classex
