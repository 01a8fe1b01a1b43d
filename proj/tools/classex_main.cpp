// classex: accuracy-extrapolation toolkit for marginal multi-class
// classifiers. Subcommands: ata, extrapolate, kde, simulate, moments.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "classex/accuracy.hpp"
#include "classex/basis.hpp"
#include "classex/csv.hpp"
#include "classex/errors.hpp"
#include "classex/extrapolate.hpp"
#include "classex/kde.hpp"
#include "classex/ranks.hpp"
#include "classex/simulate.hpp"

namespace fs = std::filesystem;
using namespace classex;

namespace {

constexpr const char* kVersion = "0.1.0";

// Parses "2,5,10" lists and "lo:hi" / "lo:hi:step" ranges.
std::vector<std::int64_t> parse_k_list(const std::vector<std::string>& specs) {
    std::vector<std::int64_t> out;
    for (const auto& spec : specs) {
        for (const auto& part : split_csv_line(spec)) {
            if (part.empty()) continue;
            const auto c1 = part.find(':');
            if (c1 == std::string::npos) {
                out.push_back(parse_int_field(part, "k list"));
                continue;
            }
            const auto c2 = part.find(':', c1 + 1);
            const auto lo = parse_int_field(part.substr(0, c1), "k range");
            const auto hi = parse_int_field(
                c2 == std::string::npos ? part.substr(c1 + 1) : part.substr(c1 + 1, c2 - c1 - 1),
                "k range");
            const auto step =
                c2 == std::string::npos ? 1 : parse_int_field(part.substr(c2 + 1), "k range");
            if (step < 1 || hi < lo) throw input_error("bad k range: " + part);
            for (std::int64_t k = lo; k <= hi; k += step) out.push_back(k);
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::vector<std::string>& specs,
                                      const std::string& what) {
    std::vector<double> out;
    for (const auto& spec : specs) {
        for (const auto& part : split_csv_line(spec)) {
            if (!part.empty()) out.push_back(parse_double_field(part, what));
        }
    }
    return out;
}

// Resolved configuration recorded in every output header; insertion
// order is the canonical order.
class ResolvedConfig {
public:
    void set(const std::string& key, const std::string& value) {
        items_.emplace_back(key, value);
    }
    void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, double value) { set(key, format_double(value)); }

    std::string to_string() const {
        std::string out;
        for (const auto& [k, v] : items_) {
            if (!out.empty()) out += " ";
            out += k + "=" + v;
        }
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

void write_header(std::ostream& out, const std::string& command, const ResolvedConfig& config,
                  std::uint64_t seed) {
    const std::string resolved = config.to_string();
    char hash[32];
    std::snprintf(hash, sizeof(hash), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(resolved)));
    out << "# classex " << kVersion << "\n";
    out << "# command: " << command << "\n";
    out << "# config: " << resolved << "\n";
    out << "# config-hash: " << hash << "\n";
    out << "# seed: " << seed << "\n";
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    if (!dir.empty()) fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    if (!out) throw input_error("cannot write output file: " + path.string());
    return out;
}

nlohmann::json basis_to_json(const BasisSpec& basis) {
    nlohmann::json j;
    switch (basis.kind) {
        case BasisKind::constant: j["kind"] = "constant"; break;
        case BasisKind::monomial: j["kind"] = "monomial"; j["powers"] = basis.powers; break;
        case BasisKind::radial:
            j["kind"] = "radial";
            j["bandwidth"] = basis.bandwidth;
            j["knots"] = basis.knots;
            break;
    }
    j["size"] = basis.size();
    return j;
}

struct CommonOptions {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--seed", opts.seed, "Random seed (default 0)");
    cmd->add_option("--threads", opts.threads,
                    "Worker thread cap; 0 = hardware (results do not depend on it)");
    cmd->add_option("--out-dir", opts.out_dir, "Directory for output files");
}

// Expands `--config FILE` by appending the file's key=value pairs as
// `--key value` arguments, except keys already given on the command
// line, so explicit flags always win. Lines starting with '#' are
// comments; a value of true/false toggles a flag.
std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw input_error("--config needs a file path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (config_path.empty()) return out;
    std::ifstream in(config_path);
    if (!in) throw input_error("cannot open config file: " + config_path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        const std::string flag = "--" + key;
        bool already = false;
        for (const auto& a : out) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) already = true;
        }
        if (already) continue;
        if (value == "true") {
            out.push_back(flag);
        } else if (value != "false") {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    return out;
}

// ---- ata ----------------------------------------------------------------

struct AtaArgs {
    CommonOptions common;
    std::string scores_path, ranks_path;
    std::vector<std::string> ks;
    double tie_epsilon = 1e-9;
};

void run_ata(const AtaArgs& args) {
    if (args.scores_path.empty() == args.ranks_path.empty()) {
        throw input_error("ata needs exactly one of --scores or --ranks");
    }
    RankHistogram hist;
    if (!args.scores_path.empty()) {
        TieBreakConfig tie;
        tie.epsilon = args.tie_epsilon;
        tie.seed = args.common.seed;
        const ScoreTable table = ingest_scores(args.scores_path, tie);
        hist = make_histogram(compute_ranks(table, args.common.threads));
    } else {
        hist = load_rank_csv(args.ranks_path);
    }
    const auto ks = args.ks.empty() ? default_k_grid(hist.k1) : parse_k_list(args.ks);
    const AccuracyCurve curve = ata_curve(hist, ks, args.common.threads);

    ResolvedConfig config;
    config.set("scores", args.scores_path.empty() ? "-" : args.scores_path);
    config.set("ranks", args.ranks_path.empty() ? "-" : args.ranks_path);
    config.set("k1", hist.k1);
    config.set("r", hist.r);
    std::string klist;
    for (const auto k : ks) klist += (klist.empty() ? "" : ",") + std::to_string(k);
    config.set("ks", klist);
    config.set("tie-epsilon", args.tie_epsilon);
    config.set("seed", static_cast<std::int64_t>(args.common.seed));

    auto out = open_output(args.common.out_dir, "ata_curve.csv");
    write_header(out, "ata", config, args.common.seed);
    out << "k,accuracy,provenance\n";
    for (const auto& e : curve.entries) {
        out << e.k << ',' << format_double(e.value) << ',' << provenance_name(e.provenance)
            << '\n';
    }
}

// ---- extrapolate ---------------------------------------------------------

struct ExtrapolateArgs {
    CommonOptions common;
    std::string scores_path;
    std::vector<std::string> k2;
    std::vector<std::string> h_grid;
    std::int64_t resamples = 10;
    bool with_replacement = false;
    double tie_epsilon = 1e-9;
};

void run_extrapolate(const ExtrapolateArgs& args) {
    TieBreakConfig tie;
    tie.epsilon = args.tie_epsilon;
    tie.seed = args.common.seed;
    const ScoreTable table = ingest_scores(args.scores_path, tie);
    const auto k2_list = parse_k_list(args.k2);
    if (k2_list.empty()) throw input_error("extrapolate needs at least one --k2 target");
    for (const auto k2 : k2_list) {
        if (k2 < 2) throw input_error("--k2 targets must be >= 2");
    }

    PipelineConfig pipeline;
    if (!args.h_grid.empty()) pipeline.h_grid = parse_double_list(args.h_grid, "h grid");
    pipeline.selection.resamples = args.resamples;
    pipeline.selection.seed = args.common.seed;
    pipeline.selection.with_replacement = args.with_replacement;
    pipeline.selection.threads = args.common.threads;
    pipeline.selection.tie_epsilon = args.tie_epsilon;
    const PipelineResult result = extrapolate_pipeline(table, k2_list, pipeline);

    ResolvedConfig config;
    config.set("scores", args.scores_path);
    config.set("k1", table.k1);
    config.set("r", table.r);
    std::string k2s;
    for (const auto k : k2_list) k2s += (k2s.empty() ? "" : ",") + std::to_string(k);
    config.set("k2", k2s);
    std::string hs;
    for (const auto h : pipeline.h_grid) hs += (hs.empty() ? "" : ",") + format_double(h);
    config.set("h-grid", hs);
    config.set("resamples", args.resamples);
    config.set("with-replacement", args.with_replacement ? "true" : "false");
    config.set("tie-epsilon", args.tie_epsilon);
    config.set("seed", static_cast<std::int64_t>(args.common.seed));

    auto csv = open_output(args.common.out_dir, "predictions.csv");
    write_header(csv, "extrapolate", config, args.common.seed);
    csv << "k,accuracy,provenance\n";
    for (const auto& e : result.curve.entries) {
        if (e.provenance == Provenance::observed) {
            csv << e.k << ',' << format_double(e.value) << ",observed\n";
        }
    }
    for (const auto& e : result.predictions) {
        csv << e.k << ',' << format_double(e.value) << ",extrapolated\n";
    }

    nlohmann::json j;
    j["meta"] = {{"tool", std::string("classex ") + kVersion},
                 {"command", "extrapolate"},
                 {"config", config.to_string()},
                 {"config_hash", fnv1a64(config.to_string())},
                 {"seed", args.common.seed}};
    j["basis"] = basis_to_json(result.fit.basis);
    j["beta"] = result.fit.beta;
    j["k1"] = result.fit.k1;
    j["r"] = result.fit.r;
    j["fitted_ks"] = result.fit.fitted_ks;
    j["residual_rss"] = result.fit.rss;
    j["d_at_zero"] = result.fit.d_at_zero;
    j["d_at_one"] = result.fit.d_at_one;
    j["d_monotone"] = result.fit.d_monotone;
    if (!result.fit.d_monotone) {
        std::cerr << "warning: fitted D-hat is not monotone; extrapolated accuracies may not "
                     "decrease in k\n";
    }
    j["selection"] = nlohmann::json::object();
    j["selection"]["resamples"] = result.selection.resamples;
    j["selection"]["k0"] = result.selection.k0;
    j["selection"]["chosen"] = result.selection.chosen;
    j["selection"]["redraws"] = result.selection.redraws;
    j["selection"]["sampling"] = result.selection.with_replacement
                                     ? "with-replacement (bootstrap resampling of classes)"
                                     : "without-replacement (default; deviates from "
                                       "with-replacement resampling to keep ranks "
                                       "non-degenerate)";
    j["selection"]["candidates"] = nlohmann::json::array();
    for (const auto& cand : result.selection.candidates) {
        nlohmann::json cj = basis_to_json(cand.basis);
        cj["error"] = cand.error;
        j["selection"]["candidates"].push_back(cj);
    }
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& e : result.predictions) {
        preds.push_back({{"k", e.k}, {"accuracy", e.value}});
    }
    j["predictions"] = preds;
    auto fit_out = open_output(args.common.out_dir, "fit.json");
    fit_out << j.dump(2) << '\n';
}

// ---- kde -----------------------------------------------------------------

struct KdeArgs {
    CommonOptions common;
    std::string scores_path;
    std::vector<std::string> k2;
    std::string rule = "ucv";
    double bandwidth = 0.0;
    bool pooled = false;
    double tie_epsilon = 1e-9;
};

void run_kde(const KdeArgs& args) {
    TieBreakConfig tie;
    tie.epsilon = args.tie_epsilon;
    tie.seed = args.common.seed;
    const ScoreTable table = ingest_scores(args.scores_path, tie);
    const auto k2_list = parse_k_list(args.k2);
    if (k2_list.empty()) throw input_error("kde needs at least one --k2 target");

    KdeConfig kde;
    kde.threads = args.common.threads;
    kde.pooled = args.pooled;
    std::string provenance;
    if (args.rule == "bcv") {
        kde.rule = BandwidthRule::bcv;
        provenance = "kde-bcv";
    } else if (args.rule == "ucv") {
        kde.rule = BandwidthRule::ucv;
        provenance = "kde-ucv";
    } else if (args.rule == "fixed") {
        kde.rule = BandwidthRule::fixed;
        kde.fixed_bandwidth = args.bandwidth;
        provenance = "kde-fixed";
    } else {
        throw input_error("unknown KDE rule: " + args.rule + " (expected bcv, ucv or fixed)");
    }

    ResolvedConfig config;
    config.set("scores", args.scores_path);
    config.set("k1", table.k1);
    config.set("r", table.r);
    std::string k2s;
    for (const auto k : k2_list) k2s += (k2s.empty() ? "" : ",") + std::to_string(k);
    config.set("k2", k2s);
    config.set("rule", args.rule);
    if (kde.rule == BandwidthRule::fixed) config.set("bandwidth", args.bandwidth);
    config.set("pooled", args.pooled ? "true" : "false");
    config.set("tie-epsilon", args.tie_epsilon);
    config.set("seed", static_cast<std::int64_t>(args.common.seed));

    auto out = open_output(args.common.out_dir, "kde_predictions.csv");
    write_header(out, "kde", config, args.common.seed);
    out << "k,accuracy,provenance\n";
    KdeDiagnostics diag;
    for (const auto k2 : k2_list) {
        const double value = kde_extrapolate(table, k2, kde, &diag);
        out << k2 << ',' << format_double(value) << ',' << provenance << '\n';
    }
    if (diag.fallback_count > 0) {
        std::cerr << "kde: bandwidth selection fell back to Silverman's rule for "
                  << diag.fallback_count << " observation(s)\n";
    }
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    CommonOptions common;
    StudyConfig study;
    std::vector<std::string> sigmas;
    std::vector<std::string> h_grid;
    std::vector<std::string> methods;
    bool resume = false;
};

void run_simulate(const SimulateArgs& args) {
    StudyConfig cfg = args.study;
    cfg.seed = args.common.seed;
    cfg.threads = args.common.threads;
    if (!args.sigmas.empty()) cfg.sigmas = parse_double_list(args.sigmas, "sigma grid");
    if (cfg.sigmas.empty()) cfg.sigmas = default_study_sigmas();
    if (!args.h_grid.empty()) cfg.h_grid = parse_double_list(args.h_grid, "h grid");
    if (!args.methods.empty()) {
        cfg.methods.clear();
        for (const auto& spec : args.methods) {
            for (const auto& m : split_csv_line(spec)) {
                if (!m.empty()) cfg.methods.push_back(m);
            }
        }
    }

    const fs::path out_dir(args.common.out_dir);
    if (!out_dir.empty()) fs::create_directories(out_dir);
    const fs::path journal = out_dir / "study_journal.part";
    if (!args.resume && fs::exists(journal)) fs::remove(journal);
    cfg.journal_path = journal.string();

    const StudyReport report = run_study(cfg);

    ResolvedConfig config;
    config.set("k1", cfg.k1);
    config.set("k2", cfg.k2);
    std::string sg;
    for (const auto s : cfg.sigmas) sg += (sg.empty() ? "" : ",") + format_double(s);
    config.set("sigmas", sg);
    config.set("replicates", cfg.replicates);
    config.set("dim", cfg.dim);
    config.set("r-test", cfg.r_test);
    std::string ms;
    for (const auto& m : cfg.methods) ms += (ms.empty() ? "" : ",") + m;
    config.set("methods", ms);
    config.set("resamples", cfg.resamples);
    config.set("bootstrap", cfg.bootstrap_rounds);
    config.set("seed", static_cast<std::int64_t>(cfg.seed));

    auto rows_out = open_output(out_dir, "study_replicates.csv");
    write_header(rows_out, "simulate", config, cfg.seed);
    rows_out << "k1,k2,sigma,replicate,method,predicted,true_ta\n";
    for (const auto& row : report.rows) {
        rows_out << cfg.k1 << ',' << cfg.k2 << ',' << format_double(row.sigma) << ','
                 << row.replicate << ',' << row.method << ',' << format_double(row.predicted)
                 << ',' << format_double(row.true_ta) << '\n';
    }

    auto summary_out = open_output(out_dir, "study_summary.csv");
    write_header(summary_out, "simulate", config, cfg.seed);
    summary_out << "k1,k2,method,max_rmse,se\n";
    for (const auto& s : report.summaries) {
        summary_out << cfg.k1 << ',' << cfg.k2 << ',' << s.method << ','
                    << format_double(s.max_rmse) << ',' << format_double(s.se) << '\n';
    }
    rows_out.close();
    summary_out.close();
    // the journal is scratch for resumption; a completed run leaves only
    // the deterministic outputs behind
    if (fs::exists(journal)) fs::remove(journal);

    for (const auto& s : report.summaries) {
        std::cout << s.method << ": max RMSE " << format_double(s.max_rmse) << " (se "
                  << format_double(s.se) << ")\n";
    }
}

// ---- moments ----------------------------------------------------------------

struct MomentsArgs {
    CommonOptions common;
    double bandwidth = 0.0;
    std::vector<std::string> powers;
    std::int64_t k1 = 0;
    std::int64_t r = 1;
    std::vector<std::string> ks;
};

void run_moments(const MomentsArgs& args) {
    BasisSpec basis;
    if (args.bandwidth > 0.0 && !args.powers.empty()) {
        throw input_error("moments takes either --h (radial) or --powers (monomial), not both");
    }
    if (args.bandwidth > 0.0) {
        if (args.k1 < 2) throw input_error("radial moments need --k1 >= 2 for the knot rule");
        basis = radial_basis(args.bandwidth, knot_range(args.r, args.k1));
    } else if (!args.powers.empty()) {
        basis = monomial_basis(parse_double_list(args.powers, "powers"));
    } else {
        throw input_error("moments needs --h or --powers");
    }
    if (args.ks.empty()) throw input_error("moments needs --ks");
    const auto ks = parse_k_list(args.ks);
    const MomentMatrix mm = moments(basis, ks, args.common.threads);

    ResolvedConfig config;
    config.set("basis", basis.label());
    config.set("k1", args.k1);
    config.set("r", args.r);
    std::string klist;
    for (const auto k : mm.ks) klist += (klist.empty() ? "" : ",") + std::to_string(k);
    config.set("ks", klist);
    config.set("seed", static_cast<std::int64_t>(args.common.seed));

    auto out = open_output(args.common.out_dir, "moments.csv");
    write_header(out, "moments", config, args.common.seed);
    out << "ell,k,H\n";
    for (std::int64_t ell = 0; ell < mm.m; ++ell) {
        for (const auto k : mm.ks) {
            out << ell + 1 << ',' << k << ',' << format_double(mm.at(ell, k)) << '\n';
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accuracy extrapolation for marginal multi-class classifiers"};
    app.set_version_flag("--version", std::string("classex ") + kVersion);
    app.require_subcommand(1);

    AtaArgs ata_args;
    auto* ata_cmd = app.add_subcommand("ata", "Subsampled accuracy curve from scores or ranks");
    add_common(ata_cmd, ata_args.common);
    ata_cmd->add_option("--scores", ata_args.scores_path, "Score CSV (true_class,obs,score_*)");
    ata_cmd->add_option("--ranks", ata_args.ranks_path, "Rank CSV (true_class,obs,rank)");
    ata_cmd->add_option("--ks", ata_args.ks, "Subset sizes, e.g. 2,5,10 or 2:100");
    ata_cmd->add_option("--tie-eps", ata_args.tie_epsilon, "Relative tie-breaking noise");

    ExtrapolateArgs ex_args;
    auto* ex_cmd = app.add_subcommand("extrapolate",
                                      "Basis regression on the accuracy curve, predicting "
                                      "accuracy at larger label sets");
    add_common(ex_cmd, ex_args.common);
    ex_cmd->add_option("--scores", ex_args.scores_path, "Score CSV")->required();
    ex_cmd->add_option("--k2", ex_args.k2, "Prediction targets")->required();
    ex_cmd->add_option("--h-grid", ex_args.h_grid, "Radial bandwidth grid (default 0.1..1.0)");
    ex_cmd->add_option("--resamples", ex_args.resamples, "Model-selection resamples (default 10)");
    ex_cmd->add_flag("--with-replacement", ex_args.with_replacement,
                     "Resample classes with replacement during selection");
    ex_cmd->add_option("--tie-eps", ex_args.tie_epsilon, "Relative tie-breaking noise");

    KdeArgs kde_args;
    auto* kde_cmd = app.add_subcommand("kde", "Kernel-density extrapolation baseline");
    add_common(kde_cmd, kde_args.common);
    kde_cmd->add_option("--scores", kde_args.scores_path, "Score CSV")->required();
    kde_cmd->add_option("--k2", kde_args.k2, "Prediction targets")->required();
    kde_cmd->add_option("--rule", kde_args.rule, "Bandwidth rule: bcv, ucv or fixed");
    kde_cmd->add_option("--bandwidth", kde_args.bandwidth, "Bandwidth for --rule fixed");
    kde_cmd->add_flag("--pooled", kde_args.pooled, "One pooled bandwidth for all observations");
    kde_cmd->add_option("--tie-eps", kde_args.tie_epsilon, "Relative tie-breaking noise");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate",
                                       "Gaussian-mixture study comparing extrapolation methods");
    add_common(sim_cmd, sim_args.common);
    sim_cmd->add_option("--k1", sim_args.study.k1, "Source class count (default 500)");
    sim_cmd->add_option("--k2", sim_args.study.k2, "Target class count (default 1000)");
    sim_cmd->add_option("--sigmas", sim_args.sigmas, "Noise standard deviations");
    sim_cmd->add_option("--replicates", sim_args.study.replicates, "Replicates per sigma");
    sim_cmd->add_option("--dim", sim_args.study.dim, "Feature dimension (default 10)");
    sim_cmd->add_option("--r-test", sim_args.study.r_test, "Test observations per class");
    sim_cmd->add_option("--methods", sim_args.methods,
                        "Methods: classexreg, kde-bcv, kde-ucv");
    sim_cmd->add_option("--resamples", sim_args.study.resamples, "Selection resamples");
    sim_cmd->add_option("--h-grid", sim_args.h_grid, "Radial bandwidth grid");
    sim_cmd->add_option("--bootstrap", sim_args.study.bootstrap_rounds,
                        "Bootstrap rounds for the max-RMSE standard error");
    sim_cmd->add_flag("--resume", sim_args.resume, "Reuse a previous run's journal");

    MomentsArgs mom_args;
    auto* mom_cmd = app.add_subcommand("moments", "Export basis moment constants for audit");
    add_common(mom_cmd, mom_args.common);
    mom_cmd->add_option("--bandwidth", mom_args.bandwidth, "Radial bandwidth");
    mom_cmd->add_option("--powers", mom_args.powers, "Monomial powers, e.g. 0,1,2,5");
    mom_cmd->add_option("--k1", mom_args.k1, "Class count for the radial knot rule");
    mom_cmd->add_option("--r", mom_args.r, "Observations per class for the knot rule");
    mom_cmd->add_option("--ks", mom_args.ks, "k grid, e.g. 2,10,100 or 2:500");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        for (auto* cmd : {ata_cmd, ex_cmd, kde_cmd, sim_cmd, mom_cmd}) {
            cmd->add_option("--config", "Key-value config file; flags override its entries");
        }
        args = apply_config_file(args);
        std::reverse(args.begin(), args.end()); // CLI11 consumes in reverse
        app.parse(args);
        if (ata_cmd->parsed()) run_ata(ata_args);
        if (ex_cmd->parsed()) run_extrapolate(ex_args);
        if (kde_cmd->parsed()) run_kde(kde_args);
        if (sim_cmd->parsed()) run_simulate(sim_args);
        if (mom_cmd->parsed()) run_moments(mom_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
