#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "classex/accuracy.hpp"
#include "classex/basis.hpp"
#include "classex/errors.hpp"
#include "classex/extrapolate.hpp"
#include "classex/kde.hpp"
#include "classex/ranks.hpp"
#include "classex/scores.hpp"
#include "classex/simulate.hpp"

namespace py = pybind11;
using namespace classex;

namespace {

ScoreTable table_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> scores) {
    const auto buf = scores.request();
    if (buf.ndim != 3 || buf.shape[0] != buf.shape[2]) {
        throw py::value_error("scores must have shape (k1, r, k1)");
    }
    ScoreTable t;
    t.k1 = static_cast<std::int64_t>(buf.shape[0]);
    t.r = static_cast<std::int64_t>(buf.shape[1]);
    const auto* data = static_cast<const double*>(buf.ptr);
    t.scores.assign(data, data + buf.size);
    validate_score_table(t);
    return t;
}

py::array_t<double> table_to_array(const ScoreTable& t) {
    py::array_t<double> out({t.k1, t.r, t.k1});
    std::copy(t.scores.begin(), t.scores.end(), out.mutable_data());
    return out;
}

RankHistogram hist_from_table(const ScoreTable& t, int threads) {
    return make_histogram(compute_ranks(t, threads));
}

py::dict curve_to_dict(const AccuracyCurve& curve) {
    py::list ks, values, provenance;
    for (const auto& e : curve.entries) {
        ks.append(e.k);
        values.append(e.value);
        provenance.append(provenance_name(e.provenance));
    }
    py::dict out;
    out["k"] = ks;
    out["accuracy"] = values;
    out["provenance"] = provenance;
    return out;
}

} // namespace

PYBIND11_MODULE(_classex, m) {
    m.doc() = "Accuracy extrapolation for marginal multi-class classifiers";

    py::register_exception<input_error>(m, "InputError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "ranks",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores, int threads) {
            const auto t = table_from_array(std::move(scores));
            const auto rt = compute_ranks(t, threads);
            py::array_t<std::int32_t> out({rt.k1, rt.r});
            std::copy(rt.ranks.begin(), rt.ranks.end(), out.mutable_data());
            return out;
        },
        py::arg("scores"), py::arg("threads") = 1,
        "Correct-label ranks for a (k1, r, k1) score array");

    m.def(
        "test_accuracy",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores) {
            return test_accuracy(hist_from_table(table_from_array(std::move(scores)), 1));
        },
        py::arg("scores"), "Top-1 accuracy on the full label set");

    m.def(
        "ata_curve",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores,
           std::vector<std::int64_t> ks, int threads) {
            const auto t = table_from_array(std::move(scores));
            const auto hist = hist_from_table(t, threads);
            if (ks.empty()) ks = default_k_grid(t.k1);
            return curve_to_dict(ata_curve(hist, ks, threads));
        },
        py::arg("scores"), py::arg("ks") = std::vector<std::int64_t>{}, py::arg("threads") = 1,
        "Average subsampled accuracy for each k");

    m.def(
        "extrapolate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores,
           std::vector<std::int64_t> k2, std::vector<double> h_grid, std::int64_t resamples,
           std::uint64_t seed, bool with_replacement, int threads) {
            const auto t = table_from_array(std::move(scores));
            PipelineConfig config;
            if (!h_grid.empty()) config.h_grid = std::move(h_grid);
            config.selection.resamples = resamples;
            config.selection.seed = seed;
            config.selection.with_replacement = with_replacement;
            config.selection.threads = threads;
            const auto res = extrapolate_pipeline(t, k2, config);
            py::dict out;
            out["curve"] = curve_to_dict(res.curve);
            py::list preds;
            for (const auto& p : res.predictions) {
                py::dict d;
                d["k"] = p.k;
                d["accuracy"] = p.value;
                preds.append(d);
            }
            out["predictions"] = preds;
            out["beta"] = res.fit.beta;
            out["residual_rss"] = res.fit.rss;
            const auto& chosen = res.selection.candidates[static_cast<std::size_t>(res.selection.chosen)];
            out["chosen_basis"] = chosen.basis.label();
            out["chosen_bandwidth"] =
                chosen.basis.kind == BasisKind::radial ? chosen.basis.bandwidth : 0.0;
            py::list errors;
            for (const auto& c : res.selection.candidates) errors.append(c.error);
            out["selection_errors"] = errors;
            return out;
        },
        py::arg("scores"), py::arg("k2"), py::arg("h_grid") = std::vector<double>{},
        py::arg("resamples") = 10, py::arg("seed") = 0, py::arg("with_replacement") = false,
        py::arg("threads") = 1,
        "Full pipeline: accuracy curve, basis selection, fit, predictions at k2");

    m.def(
        "kde_extrapolate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores, std::int64_t K,
           const std::string& rule, double bandwidth, bool pooled, int threads) {
            const auto t = table_from_array(std::move(scores));
            KdeConfig config;
            config.pooled = pooled;
            config.threads = threads;
            if (rule == "bcv") {
                config.rule = BandwidthRule::bcv;
            } else if (rule == "ucv") {
                config.rule = BandwidthRule::ucv;
            } else if (rule == "fixed") {
                config.rule = BandwidthRule::fixed;
                config.fixed_bandwidth = bandwidth;
            } else {
                throw py::value_error("rule must be 'bcv', 'ucv' or 'fixed'");
            }
            return kde_extrapolate(t, K, config);
        },
        py::arg("scores"), py::arg("K"), py::arg("rule") = "ucv", py::arg("bandwidth") = 0.0,
        py::arg("pooled") = false, py::arg("threads") = 1,
        "Kernel-density extrapolation baseline");

    m.def(
        "select_bandwidth",
        [](std::vector<double> samples, const std::string& rule) {
            return select_bandwidth(samples,
                                    rule == "bcv" ? BandwidthRule::bcv : BandwidthRule::ucv);
        },
        py::arg("samples"), py::arg("rule") = "ucv",
        "Cross-validated Gaussian-kernel bandwidth (Scott's BCV/UCV)");

    m.def(
        "basis_moments",
        [](double bandwidth, std::int64_t k1, std::int64_t r, std::vector<std::int64_t> ks,
           int threads) {
            const auto basis = radial_basis(bandwidth, knot_range(r, k1));
            const auto mm = moments(basis, ks, threads);
            py::array_t<double> H({mm.m, static_cast<std::int64_t>(mm.ks.size())});
            std::copy(mm.values.begin(), mm.values.end(), H.mutable_data());
            py::dict out;
            out["H"] = H;
            out["ks"] = mm.ks;
            out["knots"] = basis.knots;
            return out;
        },
        py::arg("bandwidth"), py::arg("k1"), py::arg("r"), py::arg("ks"), py::arg("threads") = 1,
        "Moment matrix of the radial basis with the standard knot rule");

    m.def("toy_ga_exact", &toy_ga_exact, py::arg("labels"), py::arg("rho"),
          "Exact per-label-set accuracy in the bivariate-normal toy model");
    m.def("toy_favorability", &toy_favorability, py::arg("x_star"), py::arg("y"), py::arg("rho"),
          "Win probability of label y at test point x* against a random competitor");
    m.def(
        "simulate_gaussian_task",
        [](std::int64_t k, double sigma, std::int64_t dim, std::int64_t r_test,
           std::uint64_t seed) {
            GaussianMixtureModel model;
            model.dim = dim;
            model.sigma = sigma;
            model.r_test = r_test;
            return table_to_array(simulate_gaussian_task(model, k, seed));
        },
        py::arg("k"), py::arg("sigma"), py::arg("dim") = 10, py::arg("r_test") = 1,
        py::arg("seed") = 0,
        "Score table of a 1-NN classifier on the isotropic Gaussian mixture");

    m.attr("__version__") = "0.1.0";
}
