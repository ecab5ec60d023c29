#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pbphase/common.hpp"
#include "pbphase/distribution.hpp"
#include "pbphase/experiment.hpp"
#include "pbphase/fluctuations.hpp"
#include "pbphase/nfm.hpp"
#include "pbphase/relative_phase.hpp"
#include "pbphase/state.hpp"

// Figure-reproduction tables: named numeric columns over a parameter grid,
// plus parameter metadata and optional experimental overlays, emitted as
// CSV (17 significant digits) or JSON (stable key order).

namespace pbphase {

/// Locale-independent shortest faithful decimal at 17 significant digits.
inline std::string format_g17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

enum class FigureId { fig1, fig2, fig3, fig5, fig6, fig7, fig8 };

inline const char* figure_name(FigureId id) {
    switch (id) {
        case FigureId::fig1: return "fig1";
        case FigureId::fig2: return "fig2";
        case FigureId::fig3: return "fig3";
        case FigureId::fig5: return "fig5";
        case FigureId::fig6: return "fig6";
        case FigureId::fig7: return "fig7";
        case FigureId::fig8: return "fig8";
    }
    return "?";
}

inline FigureId parse_figure_id(std::string_view name) {
    if (name == "fig1") return FigureId::fig1;
    if (name == "fig2") return FigureId::fig2;
    if (name == "fig3") return FigureId::fig3;
    if (name == "fig5") return FigureId::fig5;
    if (name == "fig6") return FigureId::fig6;
    if (name == "fig7") return FigureId::fig7;
    if (name == "fig8") return FigureId::fig8;
    throw std::invalid_argument("unsupported figure '" + std::string(name) +
                                "' (expected fig1, fig2, fig3, fig5, fig6, fig7 or fig8)");
}

struct FigureParams {
    double nbar = 4.0;       // beam intensity for fig1
    double nbar2 = 50.0;     // port-2 intensity for fig5/fig6
    double nbar_max = 0.0;   // abscissa upper end; 0 selects the per-figure default
    int grid_points = 0;     // 0 selects the per-figure default
    TruncationPolicy policy;
    double agreement_band = 1e-3;
};

struct FigureTable {
    std::string figure_id;
    std::vector<std::pair<std::string, std::string>> metadata;  // ordered
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;  // column-major, equal lengths
    std::vector<ExperimentTable> overlays;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

namespace detail {

inline std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return g;
}

// {0} followed by n-1 logarithmic points from 10^-1 to hi.  The log points
// start at 0.1: the simplified variance lower bound is exact at nbar = 0 and
// holds for nbar >= 0.1, but is a vacuum-anchored interpolation that the true
// variance undercuts slightly for 0 < nbar < ~0.03 at delta_xi = pi.
inline std::vector<double> log_grid_with_zero(double hi, int n) {
    std::vector<double> g;
    g.reserve(n);
    g.push_back(0.0);
    const double lo_exp = -1.0, hi_exp = std::log10(hi);
    for (int i = 0; i < n - 1; ++i)
        g.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) / (n - 2)));
    return g;
}

inline std::string join_g17(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_g17(values[i]);
    }
    return out;
}

inline bool label_matches(const std::string& label, std::string_view tag) {
    std::string lower(label);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower.find(tag) != std::string::npos;
}

inline void attach_overlays(FigureTable& table, FigureId id,
                            const std::vector<ExperimentTable>& overlays) {
    std::vector<std::string_view> allowed;
    switch (id) {
        case FigureId::fig3: allowed = {"gbl"}; break;
        case FigureId::fig5: allowed = {"nfm"}; break;
        case FigureId::fig6: allowed = {"gbl", "nfm"}; break;
        case FigureId::fig7: allowed = {"nfm"}; break;
        case FigureId::fig8: allowed = {"nfm"}; break;
        default: break;
    }
    for (const auto& ov : overlays) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](std::string_view tag) {
            return label_matches(ov.label, tag);
        });
        if (!ok)
            throw ValidationError("overlay-mismatch: dataset '" + ov.label +
                                  "' is not applicable to " + figure_name(id));
        table.overlays.push_back(ov);
    }
}

}  // namespace detail

/// Compute one figure-reproduction table.  Defaults follow the reference
/// parameter choices (nbar = 4 for fig1, port-2 intensity 50 for fig5/fig6).
inline FigureTable emit_figure(FigureId id, const FigureParams& params = {},
                               const std::vector<ExperimentTable>& overlays = {}) {
    if (!(params.nbar >= 0.0) || params.nbar > 200.0 ||
        !(params.nbar2 >= 0.0) || params.nbar2 > 200.0)
        throw std::invalid_argument("emit_figure: intensities must lie in [0, 200]");
    if (params.grid_points < 0 || params.grid_points > 100000)
        throw std::invalid_argument("emit_figure: grid size must lie in [0, 1e5]");
    if (params.grid_points != 0 && params.grid_points < 2)
        throw std::invalid_argument("emit_figure: grid needs at least 2 points");
    if (params.nbar_max < 0.0 || params.nbar_max > 200.0)
        throw std::invalid_argument("emit_figure: nbar_max must lie in [0, 200]");

    const auto grid_or = [&](int dflt) {
        return params.grid_points == 0 ? dflt : params.grid_points;
    };
    const auto max_or = [&](double dflt) {
        return params.nbar_max == 0.0 ? dflt : params.nbar_max;
    };

    FigureTable t;
    t.figure_id = figure_name(id);
    t.metadata.emplace_back("tail_mass_tol", format_g17(params.policy.tail_mass_tol));

    switch (id) {
        case FigureId::fig1: {
            // Window-phase mean and variance vs the relative phase delta_xi
            // at fixed intensity.
            const int g = grid_or(720);
            t.metadata.emplace_back("nbar", format_g17(params.nbar));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            const auto state = NumberBasisState::coherent(
                CoherentSpec(params.nbar), params.policy);
            const auto& p = state.probs();
            std::vector<std::complex<double>> coeffs(p.size());
            for (std::size_t n = 0; n < p.size(); ++n) coeffs[n] = std::sqrt(p[n]);
            std::vector<double> dxi(g), mean(g), var(g);
            for (int i = 0; i < g; ++i) {
                dxi[i] = kTwoPi * static_cast<double>(i) / g;
                const auto dist = PhaseDistribution::from_coefficients(
                    coeffs, dxi[i], state.amplitude_tail());
                const double m1 = moment(dist, 1).value;
                const double m2 = moment(dist, 2).value;
                mean[i] = m1;
                var[i] = m2 - m1 * m1;
            }
            t.column_names = {"delta_xi", "mean_phase", "variance"};
            t.columns = {std::move(dxi), std::move(mean), std::move(var)};
            break;
        }
        case FigureId::fig2: {
            // Window-phase variance vs intensity for a set of delta_xi,
            // with the variance bounds and the trigonometric measure.
            const int g = grid_or(40);
            const double hi = max_or(100.0);
            const std::vector<double> dxis = {1e-3, kPi / 2.0, kPi};
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            t.metadata.emplace_back("delta_xi_values", detail::join_g17(dxis));
            const auto nbars = detail::log_grid_with_zero(hi, g);
            const int rows = static_cast<int>(nbars.size());
            std::vector<double> lower(rows), upper(rows), pb(rows);
            std::vector<std::vector<double>> vars(dxis.size(), std::vector<double>(rows));
            for (int i = 0; i < rows; ++i) {
                const double nb = nbars[i];
                lower[i] = 1.0 / (4.0 * nb + 3.0 / (kPi * kPi));
                upper[i] = kPi * kPi;
                pb[i] = trig_fluct_pb(nb, params.policy);
                for (std::size_t k = 0; k < dxis.size(); ++k)
                    vars[k][i] = variance_phase(CoherentSpec(nb, dxis[k]), params.policy).variance;
            }
            t.column_names = {"nbar",           "lower_bound",    "upper_bound",
                              "var_dxi_0p001",  "var_dxi_halfpi", "var_dxi_pi",
                              "fluct_pb"};
            t.columns = {nbars, std::move(lower), std::move(upper), std::move(vars[0]),
                         std::move(vars[1]), std::move(vars[2]), std::move(pb)};
            break;
        }
        case FigureId::fig3: {
            // Two-beam comparison: doubled single-beam variance at two
            // delta_xi values against the phase-difference measures.
            const int g = grid_or(201);
            const double hi = max_or(10.0);
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            t.metadata.emplace_back("delta_xi_values",
                                    detail::join_g17({kPi, kPi / 2.0}));
            const auto nbars = detail::linear_grid(0.0, hi, g);
            std::vector<double> twopi_var(g), twohalf_var(g), sgpd(g), pbpd(g);
            for (int i = 0; i < g; ++i) {
                twopi_var[i] = fluct_pb_doubled(nbars[i], kPi, params.policy);
                twohalf_var[i] = fluct_pb_doubled(nbars[i], kPi / 2.0, params.policy);
                sgpd[i] = fluct_sgpd(nbars[i], params.policy);
                pbpd[i] = fluct_pbpd(nbars[i], params.policy);
            }
            t.column_names = {"nbar", "two_var_dxi_pi", "two_var_dxi_halfpi", "sgpd", "pbpd"};
            t.columns = {nbars, std::move(twopi_var), std::move(twohalf_var),
                         std::move(sgpd), std::move(pbpd)};
            break;
        }
        case FigureId::fig5: {
            // <cos(phi2-phi1)>/cos(xi2-xi1) vs the port-1 intensity with an
            // intense port 2.
            const int g = grid_or(201);
            const double hi = max_or(10.0);
            t.metadata.emplace_back("nbar2", format_g17(params.nbar2));
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            const auto nbars = detail::linear_grid(0.0, hi, g);
            std::vector<double> ratio(g);
            for (int i = 0; i < g; ++i)
                ratio[i] = mean_cos_ratio(nbars[i], params.nbar2, params.policy).value;
            t.column_names = {"nbar1", "cos_ratio"};
            t.columns = {nbars, std::move(ratio)};
            break;
        }
        case FigureId::fig6: {
            // Relative phase variance (D cos)^2 + (D sin)^2 of the two-port
            // setup: 1 - psi(n1)^2 psi(n2)^2 with port 2 fixed.
            const int g = grid_or(201);
            const double hi = max_or(10.0);
            t.metadata.emplace_back("nbar2", format_g17(params.nbar2));
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            const auto nbars = detail::linear_grid(0.0, hi, g);
            std::vector<double> rel(g);
            for (int i = 0; i < g; ++i)
                rel[i] = fluct_pbpd(nbars[i], params.nbar2, params.policy);
            t.column_names = {"nbar1", "rel_var"};
            t.columns = {nbars, std::move(rel)};
            break;
        }
        case FigureId::fig7: {
            // Post-selected <cos^2> and <cos^4> vs the port-2 intensity with
            // a vacuum port 1.
            const int g = grid_or(81);
            const double hi = max_or(20.0);
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            t.metadata.emplace_back("agreement_band", format_g17(params.agreement_band));
            const auto nbars = detail::linear_grid(0.0, hi, g);
            std::vector<double> cos2(g), cos4(g), cos4_approx(g);
            for (int i = 0; i < g; ++i) {
                cos2[i] = cos2_vacuum_port(nbars[i]);
                const auto r = cos4_vacuum_port(nbars[i], params.policy, params.agreement_band);
                cos4[i] = r.exact.value;
                cos4_approx[i] = r.approx_analytic;
            }
            t.column_names = {"nbar", "cos2", "cos4_exact", "cos4_approx"};
            t.columns = {nbars, std::move(cos2), std::move(cos4), std::move(cos4_approx)};
            break;
        }
        case FigureId::fig8: {
            // Zoom of the <cos^4> curve near 3/8 where the post-selection
            // correction is visible; the quadratic fit column is only quoted
            // for intensities <= 1 (NaN elsewhere).
            const int g = grid_or(201);
            const double hi = max_or(10.0);
            t.metadata.emplace_back("nbar_max", format_g17(hi));
            t.metadata.emplace_back("grid_points", std::to_string(g));
            t.metadata.emplace_back("agreement_band", format_g17(params.agreement_band));
            const auto nbars = detail::linear_grid(0.0, hi, g);
            std::vector<double> cos4(g), approx(g), small(g);
            for (int i = 0; i < g; ++i) {
                const auto r = cos4_vacuum_port(nbars[i], params.policy, params.agreement_band);
                cos4[i] = r.exact.value;
                approx[i] = r.approx_analytic;
                small[i] = r.approx_small_alpha
                               ? *r.approx_small_alpha
                               : std::numeric_limits<double>::quiet_NaN();
            }
            t.column_names = {"nbar", "cos4_exact", "cos4_approx", "cos4_small_alpha"};
            t.columns = {nbars, std::move(cos4), std::move(approx), std::move(small)};
            break;
        }
    }

    detail::attach_overlays(t, id, overlays);
    return t;
}

inline void write_csv(const FigureTable& table, std::ostream& out) {
    out << "# figure: " << table.figure_id << '\n';
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << ": " << value << '\n';
    for (std::size_t c = 0; c < table.column_names.size(); ++c) {
        if (c) out << ',';
        out << table.column_names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ',';
            out << format_g17(table.columns[c][r]);
        }
        out << '\n';
    }
    for (const auto& ov : table.overlays) {
        out << "# overlay: " << ov.label << '\n';
        out << "# overlay-adjustments:";
        for (const auto& a : ov.adjustments) out << ' ' << a;
        out << '\n';
        out << "# overlay-header: n_bar,value,value_err,n_bar_err\n";
        for (const auto& p : ov.points) {
            out << "# overlay-point: " << format_g17(p.n_bar) << ',' << format_g17(p.value)
                << ',' << (p.value_err ? format_g17(*p.value_err) : std::string())
                << ',' << format_g17(p.n_bar_err) << '\n';
        }
    }
}

inline void write_json(const FigureTable& table, std::ostream& out) {
    nlohmann::ordered_json j;
    j["figure"] = table.figure_id;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.metadata) meta[key] = value;
    j["metadata"] = std::move(meta);
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < table.column_names.size(); ++c)
        cols[table.column_names[c]] = table.columns[c];
    j["columns"] = std::move(cols);
    nlohmann::ordered_json ovs = nlohmann::ordered_json::array();
    for (const auto& ov : table.overlays) {
        nlohmann::ordered_json o;
        o["label"] = ov.label;
        o["adjustments"] = ov.adjustments;
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& p : ov.points) {
            nlohmann::ordered_json q;
            q["n_bar"] = p.n_bar;
            q["value"] = p.value;
            if (p.value_err)
                q["value_err"] = *p.value_err;
            else
                q["value_err"] = nullptr;
            q["n_bar_err"] = p.n_bar_err;
            pts.push_back(std::move(q));
        }
        o["points"] = std::move(pts);
        ovs.push_back(std::move(o));
    }
    j["overlays"] = std::move(ovs);
    out << j.dump(2) << '\n';
}

/// Re-load the numeric block of an emitted CSV (comments are skipped);
/// used for round-trip verification.
inline FigureTable read_figure_csv(std::istream& in) {
    FigureTable t;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = detail::trim(line);
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            constexpr std::string_view kFigKey = "figure:";
            const std::string_view body = detail::trim(stripped.substr(1));
            if (body.substr(0, kFigKey.size()) == kFigKey)
                t.figure_id = std::string(detail::trim(body.substr(kFigKey.size())));
            continue;
        }
        const auto fields = detail::split_csv(stripped);
        if (!header_seen) {
            for (const auto& f : fields) t.column_names.emplace_back(f);
            t.columns.assign(fields.size(), {});
            header_seen = true;
            continue;
        }
        if (fields.size() != t.column_names.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.column_names.size()) + " fields, got " +
                             std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto tok = fields[c];
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": non-numeric field '" + std::string(tok) + "'");
            t.columns[c].push_back(v);
        }
    }
    if (!header_seen) throw ParseError("missing header line");
    return t;
}

inline FigureTable read_figure_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open figure file: " + path.string());
    return read_figure_csv(in);
}

}  // namespace pbphase
