// Acceptance gate: one line per criterion, [PASS]/[FAIL] with the measured
// values and the pinned tolerances; exits nonzero if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pbphase/pbphase.hpp"

using namespace pbphase;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

void report(int index, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", index, detail.c_str());
    if (!ok) ++g_failures;
}

void note(const std::string& text) {
    std::printf("                    note: %s\n", text.c_str());
}

// Vacuum beam: variance exactly pi^2/3 and saturation of the lower bound.
void criterion_1() {
    const Timer t;
    const auto r = variance_phase(CoherentSpec(0.0, 1.0));
    const double dev = std::fabs(r.variance - kPi * kPi / 3.0);
    const double sat_gap = std::fabs(r.variance - r.lower_bound);
    const double el = t.seconds();
    report(1, dev <= 1e-10 && sat_gap <= 1e-10 && el < 1.0,
           "vacuum variance = " + format_g17(r.variance) + ", |dev from pi^2/3| = " +
               fmt(dev) + " (tol 1e-10), lower-bound saturation gap = " + fmt(sat_gap) +
               " (tol 1e-10), " + fmt(el) + " s (budget 1 s)");
}

// Variance bracketed by 1/(4 nbar + 3/pi^2) and pi^2 over the design grid.
void criterion_2() {
    const Timer t;
    double min_slack = 1e300, worst_nb = 0.0, worst_dxi = 0.0;
    int points = 0;
    for (double nb : detail::log_nbar_grid_40()) {
        const double lower = 1.0 / (4.0 * nb + 3.0 / (kPi * kPi));
        for (double dxi : detail::dxi_design_grid()) {
            const double v = variance_phase(CoherentSpec(nb, dxi)).variance;
            const double slack =
                std::min(v - (lower - 1e-9), (kPi * kPi + 1e-9) - v);
            if (slack < min_slack) {
                min_slack = slack;
                worst_nb = nb;
                worst_dxi = dxi;
            }
            ++points;
        }
    }
    const double el = t.seconds();
    report(2, min_slack >= 0.0 && el < 30.0,
           std::to_string(points) + "-point bound sandwich: min slack = " + fmt(min_slack) +
               " (needs >= 0, slackened by 1e-9) at nbar = " + fmt(worst_nb) +
               ", delta_xi = " + fmt(worst_dxi) + ", " + fmt(el) + " s (budget 30 s)");
}

// Large-intensity limits of the variance.
void criterion_3() {
    const Timer t;
    const double v100 = variance_phase(CoherentSpec(100.0, kPi)).variance;
    const double rel = std::fabs(v100 - 1.0 / 400.0) * 400.0;
    const double v50 = variance_phase(CoherentSpec(50.0, 0.0)).variance;
    const double floor50 = 0.9 * kPi * kPi;
    const double el = t.seconds();
    report(3, rel <= 0.2 && v50 >= floor50 && el < 10.0,
           "var(nbar=100, dxi=pi) = " + format_g17(v100) + ", rel dev from 1/(4 nbar) = " +
               fmt(rel) + " (tol 0.2); var(nbar=50, dxi=0) = " + format_g17(v50) +
               " >= " + fmt(floor50) + "; " + fmt(el) + " s (budget 10 s)");
}

// Product-form psi equals the squared single-beam series.
void criterion_4() {
    double worst = 0.0;
    for (double nb : {0.1, 1.0, 4.0, 10.0, 50.0}) {
        const double p = psi_pb(nb).value;
        worst = std::max(worst, std::fabs(psi_product_form(nb) - p * p));
    }
    report(4, worst <= 1e-12,
           "max |psi_product - psi^2| over nbar in {0.1, 1, 4, 10, 50} = " + fmt(worst) +
               " (tol 1e-12)");
}

// Closed forms vs direct distribution quadrature.
void criterion_5() {
    double worst = 0.0;
    for (double nb : {0.5, 2.0, 8.0}) {
        const auto dist = build_distribution(CoherentSpec(nb, 0.7));
        const double psi_q = std::abs(trig_moment_quadrature(dist, 1, 4096));
        worst = std::max(worst, std::fabs((1.0 - psi_q * psi_q) - trig_fluct_pb(nb)));

        const TwoBeamSpec two(CoherentSpec(nb, 0.7), CoherentSpec(nb, 1.934));
        const double pd_quad = relative_fluct_quadrature(two, 4096);
        worst = std::max(worst, std::fabs(pd_quad - fluct_pbpd(nb)));
    }
    report(5, worst <= 1e-7,
           "max |closed form - quadrature| for the single- and two-beam measures at "
           "nbar in {0.5, 2, 8} = " +
               fmt(worst) + " (tol 1e-7)");
}

// Ladder-operator measure sits exactly half a vacuum weight below.
void criterion_6() {
    double worst = 0.0;
    for (double nb : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0})
        worst = std::max(worst, std::fabs((trig_fluct_pb(nb) - trig_fluct_sg(nb)) -
                                          0.5 * std::exp(-nb)));
    report(6, worst <= 1e-15,
           "max |(pb - sg) - e^{-nbar}/2| over 11 intensities = " + fmt(worst) +
               " (tol 1e-15)");
}

// Diagonal-mixture closed forms.
void criterion_7() {
    const auto mix = NumberBasisState::mixture({0.2, 0.3, 0.5});
    const auto v = variance_phase(mix);
    const double mean_dev = std::fabs(v.mean - kPi);
    const double var_dev = std::fabs(v.variance - kPi * kPi / 3.0);
    const double pb_dev = std::fabs(trig_fluct_pb(mix) - 1.0);
    const double sg_dev = std::fabs(trig_fluct_sg(mix) - (1.0 - 0.5 * 0.2));
    const double worst = std::max({mean_dev, var_dev, pb_dev, sg_dev});
    report(7, worst <= 1e-10,
           "mixture (P0 = 0.2): |mean - pi| = " + fmt(mean_dev) + ", |var - pi^2/3| = " +
               fmt(var_dev) + ", |pb - 1| = " + fmt(pb_dev) + ", |sg - 0.9| = " +
               fmt(sg_dev) + " (tol 1e-10)");
}

// Number-phase uncertainty products.
void criterion_8() {
    std::mt19937_64 gen(0x5eed2026ULL);
    double min_margin = 1e300;
    for (int i = 0; i < 50; ++i) {
        const double nb = std::pow(10.0, -2.0 + 4.0 * detail::uniform01(gen));
        const double dxi = kTwoPi * detail::uniform01(gen);
        min_margin =
            std::min(min_margin, check_uncertainty(CoherentSpec(nb, dxi)).heisenberg_margin);
    }
    bool judge_all = true;
    double min_judge = 1e300;
    for (double nb : {0.0, 0.5, 1.0, 4.0, 25.0}) {
        const auto u = check_uncertainty(CoherentSpec(nb, kPi));
        judge_all = judge_all && u.judge_applicable;
        min_judge = std::min(min_judge, u.judge_margin);
    }
    report(8, min_margin >= -1e-12 && judge_all && min_judge >= -1e-12,
           "50 seeded samples: min Heisenberg margin = " + fmt(min_margin) +
               " (needs >= -1e-12); window-edge bound at dxi = pi: min margin = " +
               fmt(min_judge) + " (needs >= -1e-12)");
}

// Post-selected constants.
void criterion_9() {
    bool cos2_exact = true;
    for (double x : {0.0, 1.0, 50.0, 400.0})
        cos2_exact = cos2_exact && (cos2_vacuum_port(x) == 0.5);
    const double c12_dev = std::fabs(c12_squared_sg(20.0) - 0.25);
    report(9, cos2_exact && c12_dev < 1e-8,
           std::string("<cos^2> with a vacuum port == 0.5 exactly: ") +
               (cos2_exact ? "yes" : "no") + "; |<C12^2>(nbar=20) - 1/4| = " +
               fmt(c12_dev) + " (tol 1e-8)");
}

// <cos^4> plateau and its small-intensity approximation.
void criterion_10() {
    const Timer t;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i <= 80; ++i) {
        const double a = 20.0 * static_cast<double>(i) / 80.0;
        const double v = cos4_vacuum_port(a).exact.value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool in_band = lo >= 0.37 && hi <= 0.39;

    bool fit_present = true;
    double worst_rel = 0.0;
    for (double a : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        const auto r = cos4_vacuum_port(a);
        if (!r.approx_small_alpha) {
            fit_present = false;
            continue;
        }
        worst_rel = std::max(worst_rel, std::fabs(*r.approx_small_alpha - r.exact.value) /
                                            r.exact.value);
    }
    const double el = t.seconds();
    report(10, in_band && fit_present && worst_rel <= 0.01 && el < 60.0,
           "exact <cos^4> range over [0, 20] = [" + fmt(lo) + ", " + fmt(hi) +
               "] (band [0.37, 0.39]); small-intensity fit max rel dev for "
               "alpha_sq <= 1 = " +
               fmt(worst_rel) + " (tol 0.01); " + fmt(el) + " s (budget 60 s)");

    double amp_gap = 0.0, pre_gap = 0.0;
    for (double a : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        amp_gap = std::max(amp_gap, cos4_vacuum_port(a).agreement_gap);
        pre_gap = std::max(
            pre_gap,
            cos4_vacuum_port(a, {}, 1e-3, QuarterReading::quarter_prefactor).agreement_gap);
    }
    note("the printed series base is typographically ambiguous; the default "
         "amplitude reading matches the analytic approximation to " +
         fmt(amp_gap) + " (within the 1e-3 band) while the prefactor reading "
                        "misses it by " +
         fmt(pre_gap) + " — both readings are available programmatically");
}

// Finite-dimensional operator construction converges to the continuum.
void criterion_11() {
    const auto state = NumberBasisState::coherent(CoherentSpec(4.0, kPi));
    const double limit = variance_phase(state).variance;
    double errs[3] = {0.0, 0.0, 0.0};
    const int dims[3] = {100, 400, 1600};
    for (int i = 0; i < 3; ++i)
        errs[i] = std::fabs(finite_s_operator_check(state, dims[i]).variance - limit);
    const bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
    report(11, monotone && errs[2] < 1e-3,
           "|finite-s variance - limit| at s = {100, 400, 1600} = {" + fmt(errs[0]) + ", " +
               fmt(errs[1]) + ", " + fmt(errs[2]) +
               "}: strictly decreasing, terminal < 1e-3");
}

bool same_bits(const FigureTable& a, const FigureTable& b) {
    if (a.columns.size() != b.columns.size()) return false;
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
        if (a.columns[c].size() != b.columns[c].size()) return false;
        for (std::size_t r = 0; r < a.columns[c].size(); ++r)
            if (std::bit_cast<std::uint64_t>(a.columns[c][r]) !=
                std::bit_cast<std::uint64_t>(b.columns[c][r]))
                return false;
    }
    return true;
}

const std::vector<double>& col(const FigureTable& t, const std::string& name) {
    for (std::size_t c = 0; c < t.column_names.size(); ++c)
        if (t.column_names[c] == name) return t.columns[c];
    throw std::runtime_error("missing column " + name);
}

// Figure tables: completeness, determinism, per-figure structure.
void criterion_12() {
    const Timer t;
    std::ostringstream issues;
    const FigureId ids[] = {FigureId::fig1, FigureId::fig2, FigureId::fig3, FigureId::fig5,
                            FigureId::fig6, FigureId::fig7, FigureId::fig8};
    for (FigureId id : ids) {
        const auto a = emit_figure(id);
        const auto b = emit_figure(id);
        if (!same_bits(a, b)) issues << ' ' << figure_name(id) << ":nondeterministic";
        if (a.rows() == 0 || a.column_names.size() != a.columns.size())
            issues << ' ' << figure_name(id) << ":malformed";
        for (std::size_t c = 0; c < a.columns.size(); ++c) {
            const bool nan_ok =
                std::string(figure_name(id)) == "fig8" && a.column_names[c] == "cos4_small_alpha";
            for (double v : a.columns[c])
                if (!std::isfinite(v) && !nan_ok) {
                    issues << ' ' << figure_name(id) << ":non-finite:" << a.column_names[c];
                    break;
                }
        }
    }

    const auto f1 = emit_figure(FigureId::fig1);
    if (std::fabs(col(f1, "mean_phase")[360] - kPi) > 1e-10)
        issues << " fig1:midpoint-mean";
    for (int i : {60, 180, 300})
        if (std::fabs(col(f1, "variance")[i] - col(f1, "variance")[720 - i]) > 1e-9)
            issues << " fig1:symmetry";

    const auto f2 = emit_figure(FigureId::fig2);
    for (const char* name : {"var_dxi_0p001", "var_dxi_halfpi", "var_dxi_pi"}) {
        const auto& v = col(f2, name);
        const auto& lower = col(f2, "lower_bound");
        const auto& upper = col(f2, "upper_bound");
        for (std::size_t r = 0; r < f2.rows(); ++r)
            if (v[r] < lower[r] - 1e-9 || v[r] > upper[r] + 1e-9) {
                issues << " fig2:bounds:" << name;
                break;
            }
    }

    const auto f7 = emit_figure(FigureId::fig7);
    for (double v : col(f7, "cos2"))
        if (v != 0.5) {
            issues << " fig7:cos2";
            break;
        }

    const std::string bad = issues.str();
    const double el = t.seconds();
    report(12, bad.empty(),
           bad.empty()
               ? "7 figure tables complete, bit-identical across repeat emission, "
                 "structural assertions hold (fig1 midpoint/symmetry, fig2 bounds, "
                 "fig7 constant column), " +
                     fmt(el) + " s"
               : "issues:" + bad);
}

}  // namespace

int main() {
    std::printf("acceptance suite: phase-statistics library\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("acceptance: %d/12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
