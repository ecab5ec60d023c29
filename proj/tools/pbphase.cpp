// pbphase: command line front end for the phase-statistics library.
//
// Exit codes: 0 success, 1 computation/input-data error (truncation,
// convergence, consistency, parse or validation failures), 2 usage error.

#include <charconv>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbphase/pbphase.hpp"

namespace {

using nlohmann::ordered_json;
using namespace pbphase;

enum class OutputFormat { csv, json };

struct CommonOpts {
    double tol = 1e-14;          // truncation tail tolerance (env PBPHASE_TOL)
    long max_terms = 1'000'000;  // hard series-length cap
    std::string out_path;        // empty = stdout
    OutputFormat format = OutputFormat::csv;
};

TruncationPolicy make_policy(const CommonOpts& c) {
    TruncationPolicy p;
    p.tail_mass_tol = c.tol;
    p.hard_max_terms = c.max_terms;
    return p;
}

std::ostream& open_output(const CommonOpts& c, std::ofstream& file) {
    if (c.out_path.empty()) return std::cout;
    file.open(c.out_path);
    if (!file) throw ValidationError("cannot open output file: " + c.out_path);
    return file;
}

// Ordered key/value report emitted as two-column CSV or a JSON object.
class ScalarReport {
public:
    void add(const std::string& key, double v) { items_.emplace_back(key, ordered_json(v)); }
    void add(const std::string& key, bool v) { items_.emplace_back(key, ordered_json(v)); }
    void add(const std::string& key, long v) { items_.emplace_back(key, ordered_json(v)); }

    void write(const CommonOpts& c) const {
        std::ofstream file;
        auto& os = open_output(c, file);
        if (c.format == OutputFormat::csv) {
            os << "key,value\n";
            for (const auto& [k, v] : items_) {
                os << k << ',';
                if (v.is_number_float())
                    os << format_g17(v.get<double>());
                else
                    os << v.dump();
                os << '\n';
            }
        } else {
            ordered_json obj;
            for (const auto& [k, v] : items_) obj[k] = v;
            os << obj.dump(2) << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, ordered_json>> items_;
};

int run_dist(double nbar, double delta_xi, long grid, const CommonOpts& c) {
    if (grid < 2 || grid > 100000)
        throw std::invalid_argument("dist: --grid must lie in [2, 100000]");
    const auto dist = build_distribution(CoherentSpec(nbar, delta_xi), make_policy(c));
    std::vector<double> phi(grid), density(grid);
    for (long i = 0; i < grid; ++i) {
        phi[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(grid);
        density[i] = eval_density(dist, phi[i]);
    }
    std::ofstream file;
    auto& os = open_output(c, file);
    if (c.format == OutputFormat::csv) {
        os << "# state: coherent\n";
        os << "# nbar: " << format_g17(nbar) << '\n';
        os << "# delta_xi: " << format_g17(delta_xi) << '\n';
        os << "phi,density\n";
        for (long i = 0; i < grid; ++i)
            os << format_g17(phi[i]) << ',' << format_g17(density[i]) << '\n';
    } else {
        ordered_json j;
        j["state"] = "coherent";
        j["nbar"] = nbar;
        j["delta_xi"] = delta_xi;
        j["columns"] = ordered_json::object();
        j["columns"]["phi"] = phi;
        j["columns"]["density"] = density;
        os << j.dump(2) << '\n';
    }
    return 0;
}

int run_moments(double nbar, double delta_xi, const CommonOpts& c) {
    const auto dist = build_distribution(CoherentSpec(nbar, delta_xi), make_policy(c));
    const auto m1 = moment(dist, 1);
    const auto m2 = moment(dist, 2);
    ScalarReport r;
    r.add("mean_phase", m1.value);
    r.add("mean_phase_tail_bound", m1.tail_bound);
    r.add("second_moment", m2.value);
    r.add("second_moment_tail_bound", m2.tail_bound);
    r.add("variance", m2.value - m1.value * m1.value);
    r.write(c);
    return 0;
}

int run_variance(double nbar, double delta_xi, const CommonOpts& c) {
    const auto v = variance_phase(CoherentSpec(nbar, delta_xi), make_policy(c));
    ScalarReport r;
    r.add("variance", v.variance);
    r.add("mean_phase", v.mean);
    r.add("lower_bound", v.lower_bound);
    r.add("upper_bound", v.upper_bound);
    r.add("satisfies_bounds", v.satisfies_bounds);
    r.write(c);
    return 0;
}

int run_bounds(double nbar, const CommonOpts& c) {
    if (!(nbar >= 0.0))
        throw std::invalid_argument("bounds: --nbar must be >= 0");
    ScalarReport r;
    r.add("lower_bound", 1.0 / (4.0 * nbar + 3.0 / (kPi * kPi)));
    r.add("upper_bound", kPi * kPi);
    r.write(c);
    return 0;
}

int run_fluct_pb(double nbar, const CommonOpts& c) {
    const auto policy = make_policy(c);
    const auto psi = psi_pb(nbar, policy);
    ScalarReport r;
    r.add("fluct_pb", 1.0 - psi.value * psi.value);
    r.add("psi", psi.value);
    r.add("psi_tail_bound", psi.tail_bound);
    r.add("terms_used", psi.terms_used);
    r.write(c);
    return 0;
}

int run_fluct_sg(double nbar, const CommonOpts& c) {
    const auto policy = make_policy(c);
    ScalarReport r;
    r.add("fluct_sg", trig_fluct_sg(nbar, policy));
    r.add("fluct_pb", trig_fluct_pb(nbar, policy));
    r.add("vacuum_weight", std::exp(-nbar));
    r.write(c);
    return 0;
}

int run_sgpd(double nbar, const CommonOpts& c) {
    const auto policy = make_policy(c);
    ScalarReport r;
    r.add("fluct_sgpd", fluct_sgpd(nbar, policy));
    r.add("psi_product", psi_product_form(nbar, policy));
    r.write(c);
    return 0;
}

int run_pbpd(double nbar, const std::optional<double>& nbar2, const CommonOpts& c) {
    const auto policy = make_policy(c);
    ScalarReport r;
    if (nbar2) {
        r.add("fluct_pbpd", fluct_pbpd(nbar, *nbar2, policy));
        r.add("nbar1", nbar);
        r.add("nbar2", *nbar2);
    } else {
        r.add("fluct_pbpd", fluct_pbpd(nbar, policy));
        r.add("nbar", nbar);
    }
    r.write(c);
    return 0;
}

int run_nfm_norm(const NfmInputs& in, const CommonOpts& c) {
    ScalarReport r;
    r.add("normalization", normalization_n(in));
    r.add("defect", normalization_defect(in));
    r.add("a1_sq", in.a1_sq);
    r.add("a2_sq", in.a2_sq);
    r.add("xi1", in.xi1);
    r.add("xi2", in.xi2);
    r.write(c);
    return 0;
}

int run_nfm_cos(double nbar1, double nbar2, const CommonOpts& c) {
    const auto v = mean_cos_ratio(nbar1, nbar2, make_policy(c));
    if (!v.regime_ok)
        std::cerr << "warning: port-2 intensity " << format_g17(nbar2)
                  << " is below the strong-beam regime (>= 25); "
                     "the reported ratio is a formal value\n";
    ScalarReport r;
    r.add("cos_ratio", v.value);
    r.add("regime_ok", v.regime_ok);
    r.write(c);
    return 0;
}

int run_nfm_cos2(double nbar2, const CommonOpts& c) {
    ScalarReport r;
    r.add("cos2", cos2_vacuum_port(nbar2));
    r.write(c);
    return 0;
}

int run_nfm_cos4(double alpha_sq, const CommonOpts& c) {
    const auto v = cos4_vacuum_port(alpha_sq, make_policy(c));
    ScalarReport r;
    r.add("cos4_exact", v.exact.value);
    r.add("cos4_tail_bound", v.exact.tail_bound);
    r.add("terms_used", v.exact.terms_used);
    r.add("cos4_approx", v.approx_analytic);
    if (v.approx_small_alpha) r.add("cos4_small_alpha", *v.approx_small_alpha);
    r.add("normalization", v.normalization);
    r.add("agreement_gap", v.agreement_gap);
    r.add("within_agreement_band", v.within_agreement_band);
    r.write(c);
    return 0;
}

int run_figure(const std::string& id_str, const FigureParams& params,
               const std::vector<std::string>& overlay_paths, bool apply_gbl,
               const CommonOpts& c) {
    const FigureId id = parse_figure_id(id_str);
    std::vector<ExperimentTable> overlays;
    overlays.reserve(overlay_paths.size());
    for (const auto& path : overlay_paths) overlays.push_back(load_experiment(path));
    if (apply_gbl) {
        bool any = false;
        for (auto& t : overlays)
            if (detail::label_matches(t.label, "gbl")) {
                t = gbl_adjust(t);
                any = true;
            }
        if (!any)
            throw ValidationError("--gbl-adjust given but no GBL overlay was loaded");
    }
    const auto table = emit_figure(id, params, overlays);
    std::ofstream file;
    auto& os = open_output(c, file);
    if (c.format == OutputFormat::csv)
        write_csv(table, os);
    else
        write_json(table, os);
    return 0;
}

int run_check(const CommonOpts& c) {
    const auto results = run_all_checks(make_policy(c));
    bool all_passed = true;
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name
                  << " margin=" << format_g17(r.margin) << " (" << r.detail << ")\n";
    }
    std::cout << (all_passed ? "all checks passed" : "some checks FAILED") << '\n';
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase statistics for optical beams: window-phase "
                 "distributions, fluctuation measures and post-selected "
                 "two-port quantities"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    auto* tol_opt = app.add_option("--tol", common.tol,
                                   "truncation tail tolerance (env PBPHASE_TOL)")
                        ->check(CLI::Range(1e-300, 1e-1));
    app.add_option("--max-terms", common.max_terms, "hard series-length cap")
        ->check(CLI::Range(1L, 100'000'000L));
    app.add_option("--out", common.out_path, "output file (default stdout)");
    const std::map<std::string, OutputFormat> format_map{
        {"csv", OutputFormat::csv}, {"json", OutputFormat::json}};
    app.add_option("--format", common.format, "output format")
        ->transform(CLI::CheckedTransformer(format_map, CLI::ignore_case));

    double nbar = 0.0, delta_xi = 0.0;
    std::optional<double> nbar2_opt;
    double nbar2 = 50.0;
    long grid = 720;

    auto* dist_cmd = app.add_subcommand("dist", "tabulate the window-phase density");
    dist_cmd->add_option("--nbar", nbar, "mean photon number")->required();
    dist_cmd->add_option("--delta-xi", delta_xi, "beam phase relative to the window edge");
    dist_cmd->add_option("--grid", grid, "number of sample points");

    auto* moments_cmd = app.add_subcommand("moments", "first and second window-phase moments");
    moments_cmd->add_option("--nbar", nbar, "mean photon number")->required();
    moments_cmd->add_option("--delta-xi", delta_xi, "beam phase relative to the window edge");

    auto* variance_cmd = app.add_subcommand("variance", "window-phase variance with bounds");
    variance_cmd->add_option("--nbar", nbar, "mean photon number")->required();
    variance_cmd->add_option("--delta-xi", delta_xi, "beam phase relative to the window edge");

    auto* bounds_cmd = app.add_subcommand("bounds", "variance bounds at a given intensity");
    bounds_cmd->add_option("--nbar", nbar, "mean photon number")->required();

    auto* fpb_cmd = app.add_subcommand("fluct-pb",
                                       "trigonometric fluctuation of the window phase");
    fpb_cmd->add_option("--nbar", nbar, "mean photon number")->required();

    auto* fsg_cmd = app.add_subcommand("fluct-sg",
                                       "trigonometric fluctuation of the ladder operators");
    fsg_cmd->add_option("--nbar", nbar, "mean photon number")->required();

    auto* sgpd_cmd = app.add_subcommand("sgpd",
                                        "phase-difference fluctuation (ladder operators)");
    sgpd_cmd->add_option("--nbar", nbar, "mean photon number per beam")->required();

    auto* pbpd_cmd = app.add_subcommand("pbpd",
                                        "phase-difference fluctuation (window phases)");
    pbpd_cmd->add_option("--nbar", nbar, "mean photon number (beam 1)")->required();
    pbpd_cmd->add_option("--nbar2", nbar2_opt, "mean photon number of beam 2 if different");

    double a1 = 0.0, a2 = 0.0;
    NfmInputs nfm;
    auto* norm_cmd = app.add_subcommand("nfm-norm",
                                        "post-selection normalization of the two-port setup");
    auto* a1sq_opt = norm_cmd->add_option("--a1-sq", nfm.a1_sq, "port-1 intensity |alpha_1|^2");
    auto* a2sq_opt = norm_cmd->add_option("--a2-sq", nfm.a2_sq, "port-2 intensity |alpha_2|^2");
    norm_cmd->add_option("--a1", a1, "port-1 amplitude |alpha_1| (alias for --a1-sq)")
        ->excludes(a1sq_opt);
    norm_cmd->add_option("--a2", a2, "port-2 amplitude |alpha_2| (alias for --a2-sq)")
        ->excludes(a2sq_opt);
    norm_cmd->add_option("--xi1", nfm.xi1, "port-1 phase");
    norm_cmd->add_option("--xi2", nfm.xi2, "port-2 phase");

    auto* ncos_cmd = app.add_subcommand("nfm-cos",
                                        "mean relative-phase cosine over cos(xi2-xi1)");
    ncos_cmd->add_option("--nbar", nbar, "port-1 mean photon number")->required();
    ncos_cmd->add_option("--nbar2", nbar2, "port-2 mean photon number (strong beam)");

    double cos_intensity = 0.0;
    auto* ncos2_cmd = app.add_subcommand("nfm-cos2",
                                         "post-selected <cos^2> with a vacuum port");
    ncos2_cmd->add_option("--a2-sq", cos_intensity, "port-2 intensity (value is constant in it)");

    auto* ncos4_cmd = app.add_subcommand("nfm-cos4",
                                         "post-selected <cos^4> with a vacuum port");
    auto* c4sq_opt = ncos4_cmd->add_option("--a2-sq", cos_intensity, "port-2 intensity |alpha|^2");
    double c4_amp = 0.0;
    ncos4_cmd->add_option("--a2", c4_amp, "port-2 amplitude (alias for --a2-sq)")
        ->excludes(c4sq_opt);

    FigureParams fig_params;
    std::string figure_id;
    int fig_grid = 0;
    std::vector<std::string> overlay_paths;
    bool apply_gbl = false;
    auto* fig_cmd = app.add_subcommand("figure", "emit one figure-reproduction table");
    fig_cmd->add_option("id", figure_id, "figure identifier (fig1..fig8, no fig4)")->required();
    fig_cmd->add_option("--nbar", fig_params.nbar, "beam intensity where applicable");
    fig_cmd->add_option("--nbar2", fig_params.nbar2, "second-beam intensity where applicable");
    fig_cmd->add_option("--nbar-max", fig_params.nbar_max, "abscissa upper end (0 = default)");
    fig_cmd->add_option("--grid", fig_grid, "abscissa sample count (0 = default)");
    fig_cmd->add_option("--overlay", overlay_paths, "experimental overlay CSV (repeatable)");
    fig_cmd->add_flag("--gbl-adjust", apply_gbl,
                      "apply the two-measurement adjustment to GBL overlays");

    auto* check_cmd = app.add_subcommand("check", "run the full invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);  // prints the message
        return 2;
    }

    // The environment fallback is validated by hand: a malformed or
    // out-of-range value must be a usage error, not silently ignored.
    if (tol_opt->count() == 0) {
        if (const char* env = std::getenv("PBPHASE_TOL")) {
            const std::string text(env);
            double v = 0.0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
                !(v >= 1e-300) || !(v <= 1e-1)) {
                std::cerr << "usage error: PBPHASE_TOL='" << text
                          << "' must be a number in [1e-300, 0.1]\n";
                return 2;
            }
            common.tol = v;
        }
    }

    try {
        if (*dist_cmd) return run_dist(nbar, delta_xi, grid, common);
        if (*moments_cmd) return run_moments(nbar, delta_xi, common);
        if (*variance_cmd) return run_variance(nbar, delta_xi, common);
        if (*bounds_cmd) return run_bounds(nbar, common);
        if (*fpb_cmd) return run_fluct_pb(nbar, common);
        if (*fsg_cmd) return run_fluct_sg(nbar, common);
        if (*sgpd_cmd) return run_sgpd(nbar, common);
        if (*pbpd_cmd) return run_pbpd(nbar, nbar2_opt, common);
        if (*norm_cmd) {
            if (norm_cmd->count("--a1")) nfm.a1_sq = a1 * a1;
            if (norm_cmd->count("--a2")) nfm.a2_sq = a2 * a2;
            return run_nfm_norm(nfm, common);
        }
        if (*ncos_cmd) return run_nfm_cos(nbar, nbar2, common);
        if (*ncos2_cmd) return run_nfm_cos2(cos_intensity, common);
        if (*ncos4_cmd) {
            if (ncos4_cmd->count("--a2")) cos_intensity = c4_amp * c4_amp;
            return run_nfm_cos4(cos_intensity, common);
        }
        if (*fig_cmd) {
            fig_params.grid_points = fig_grid;
            fig_params.policy = make_policy(common);
            return run_figure(figure_id, fig_params, overlay_paths, apply_gbl, common);
        }
        if (*check_cmd) return run_check(common);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
