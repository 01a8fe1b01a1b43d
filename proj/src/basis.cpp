#include "classex/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "classex/errors.hpp"
#include "classex/normal.hpp"
#include "classex/parallel.hpp"
#include "classex/quadrature.hpp"

namespace classex {

std::int64_t BasisSpec::size() const {
    switch (kind) {
        case BasisKind::constant: return 1;
        case BasisKind::monomial: return static_cast<std::int64_t>(powers.size());
        case BasisKind::radial: return static_cast<std::int64_t>(knots.size()) + 1;
    }
    return 0;
}

double BasisSpec::eval(std::int64_t ell, double u) const {
    if (ell < 0 || ell >= size()) {
        throw input_error("basis element index " + std::to_string(ell) + " out of range");
    }
    if (u < 0.0 || u > 1.0) throw input_error("basis argument must lie in [0,1]");
    switch (kind) {
        case BasisKind::constant:
            return 1.0;
        case BasisKind::monomial:
            return std::pow(u, powers[static_cast<std::size_t>(ell)]);
        case BasisKind::radial:
            if (ell == 0) return 1.0;
            // endpoints by continuous limit: Phi^-1 returns +-inf there
            return norm_cdf((norm_quantile(u) - knots[static_cast<std::size_t>(ell - 1)]) /
                            bandwidth);
    }
    return 0.0;
}

std::string BasisSpec::label() const {
    std::ostringstream out;
    switch (kind) {
        case BasisKind::constant:
            out << "constant";
            break;
        case BasisKind::monomial: {
            out << "monomial(";
            for (std::size_t i = 0; i < powers.size(); ++i) {
                if (i) out << ",";
                out << powers[i];
            }
            out << ")";
            break;
        }
        case BasisKind::radial:
            out << "radial(h=" << bandwidth << ", m=" << size() << ")";
            break;
    }
    return out.str();
}

BasisSpec constant_basis() {
    BasisSpec b;
    b.kind = BasisKind::constant;
    return b;
}

BasisSpec monomial_basis(std::vector<double> powers) {
    if (powers.empty()) throw input_error("monomial basis needs at least one power");
    BasisSpec b;
    b.kind = BasisKind::monomial;
    b.powers = std::move(powers);
    return b;
}

BasisSpec radial_basis(double bandwidth, double knot_limit) {
    if (bandwidth <= 0.0) throw input_error("radial bandwidth must be positive");
    if (knot_limit < 0.0) throw input_error("knot limit must be nonnegative");
    BasisSpec b;
    b.kind = BasisKind::radial;
    b.bandwidth = bandwidth;
    const double step = bandwidth / 2.0;
    const auto n_side = static_cast<std::int64_t>(std::floor(knot_limit / step));
    b.knots.reserve(static_cast<std::size_t>(2 * n_side + 1));
    for (std::int64_t i = -n_side; i <= n_side; ++i) {
        b.knots.push_back(static_cast<double>(i) * step);
    }
    return b;
}

double knot_range(std::int64_t r, std::int64_t k1) {
    if (r < 1 || k1 < 2) throw input_error("knot_range requires r >= 1, k1 >= 2");
    const double denom = static_cast<double>(r) * static_cast<double>(k1) * static_cast<double>(k1);
    return norm_quantile(1.0 - 1.0 / denom);
}

std::vector<BasisSpec> candidate_bases(std::int64_t r, std::int64_t k1,
                                       const std::vector<double>& h_grid) {
    if (h_grid.empty()) throw input_error("bandwidth grid is empty");
    const double limit = knot_range(r, k1);
    std::vector<BasisSpec> out;
    out.reserve(h_grid.size());
    for (const double h : h_grid) {
        out.push_back(radial_basis(h, limit));
    }
    return out;
}

double MomentMatrix::at(std::int64_t ell, std::int64_t k) const {
    const auto it = std::lower_bound(ks.begin(), ks.end(), k);
    if (it == ks.end() || *it != k) {
        throw input_error("moment matrix has no entry for k=" + std::to_string(k));
    }
    const auto kidx = static_cast<std::size_t>(it - ks.begin());
    return values[static_cast<std::size_t>(ell) * ks.size() + kidx];
}

bool MomentMatrix::has_k(std::int64_t k) const {
    return std::binary_search(ks.begin(), ks.end(), k);
}

namespace {

// Quadrature nodes for one k: v-nodes mapped through the grading map,
// then u = v^{1/(k-1)} and z = Phi^-1(u) precomputed once so that each
// basis element only costs one CDF evaluation per node.
struct KNodes {
    std::vector<double> weight; // GL weight * grading derivative
    std::vector<double> u;
    std::vector<double> z;
};

KNodes make_nodes(const GaussLegendre& rule, std::int64_t k, bool need_probit) {
    KNodes nodes;
    const std::size_t n = rule.nodes.size();
    nodes.weight.resize(n);
    nodes.u.resize(n);
    if (need_probit) nodes.z.resize(n);
    const double inv = 1.0 / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = rule.nodes[i];
        const double v = smoothstep_value(w);
        nodes.weight[i] = rule.weights[i] * smoothstep_deriv(w);
        const double u = (k == 2) ? v : std::pow(v, inv);
        nodes.u[i] = u;
        if (need_probit) nodes.z[i] = norm_quantile(u);
    }
    return nodes;
}

double integrate_element(const BasisSpec& basis, std::int64_t ell, const KNodes& nodes) {
    double acc = 0.0;
    const std::size_t n = nodes.weight.size();
    if (basis.kind == BasisKind::radial && ell > 0) {
        const double t = basis.knots[static_cast<std::size_t>(ell - 1)];
        const double inv_h = 1.0 / basis.bandwidth;
        for (std::size_t i = 0; i < n; ++i) {
            acc += nodes.weight[i] * norm_cdf((nodes.z[i] - t) * inv_h);
        }
    } else if (basis.kind == BasisKind::monomial) {
        const double p = basis.powers[static_cast<std::size_t>(ell)];
        for (std::size_t i = 0; i < n; ++i) {
            acc += nodes.weight[i] * std::pow(nodes.u[i], p);
        }
    } else {
        // constant element
        for (std::size_t i = 0; i < n; ++i) acc += nodes.weight[i];
    }
    return acc;
}

} // namespace

MomentMatrix moments(const BasisSpec& basis, const std::vector<std::int64_t>& ks, int threads) {
    for (const auto k : ks) {
        if (k < 2) throw input_error("moments require k >= 2");
    }
    MomentMatrix mm;
    mm.m = basis.size();
    mm.ks = ks;
    std::sort(mm.ks.begin(), mm.ks.end());
    mm.ks.erase(std::unique(mm.ks.begin(), mm.ks.end()), mm.ks.end());
    const std::size_t nk = mm.ks.size();
    mm.values.assign(static_cast<std::size_t>(mm.m) * nk, 0.0);

    const bool need_probit = basis.kind == BasisKind::radial;
    parallel_for(static_cast<std::int64_t>(nk), threads, [&](std::int64_t kidx) {
        const auto k = mm.ks[static_cast<std::size_t>(kidx)];
        const KNodes base = make_nodes(GaussLegendre::base(), k, need_probit);
        const KNodes fine = make_nodes(GaussLegendre::doubled(), k, need_probit);
        for (std::int64_t ell = 0; ell < mm.m; ++ell) {
            const double lo = integrate_element(basis, ell, base);
            const double hi = integrate_element(basis, ell, fine);
            if (std::fabs(hi - lo) > 1e-6 * std::max(1.0, std::fabs(hi))) {
                throw numeric_error("moment quadrature did not converge for element " +
                                    std::to_string(ell) + ", k=" + std::to_string(k) +
                                    " (order-doubling shift " + std::to_string(std::fabs(hi - lo)) +
                                    ")");
            }
            mm.values[static_cast<std::size_t>(ell) * nk + static_cast<std::size_t>(kidx)] = hi;
        }
    });
    return mm;
}

double moment_direct(const BasisSpec& basis, std::int64_t ell, std::int64_t k) {
    if (k < 2) throw input_error("moments require k >= 2");
    const auto& rule = GaussLegendre::doubled();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = rule.nodes[i];
        const double u = smoothstep_value(w);
        const double weight = rule.weights[i] * smoothstep_deriv(w);
        const double beta_weight =
            (k == 2) ? 1.0 : static_cast<double>(k - 1) * std::pow(u, static_cast<double>(k - 2));
        acc += weight * beta_weight * basis.eval(ell, u);
    }
    return acc;
}

} // namespace classex
