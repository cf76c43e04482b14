#include "atlas/curves.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace atlas {

namespace {

// Shared evaluation context: solves u (and v where needed) at arbitrary l > l*,
// warm-starting from the previous solve when the jump in l is moderate.
class CurveEval {
public:
    CurveEval(const CoefficientSet& coeffs, const EigenPair& eig, double dS)
        : coeffs_(coeffs), eig_(eig), dS_(dS), expansion_(threshold_expansion(coeffs, eig)) {}

    double l_star() const { return eig_.l_star; }
    double dS() const { return dS_; }
    const ThresholdExpansion& expansion() const { return expansion_; }

    const Field& u_at(double l) {
        if (has_warm_ && warm_l_ == l) return warm_u_;
        const Field* warm = nullptr;
        if (has_warm_ && std::abs(std::log(l / warm_l_)) < 0.7) warm = &warm_u_;
        Field u = solve_u(coeffs_, eig_, l, warm);
        warm_u_ = std::move(u);
        warm_l_ = l;
        has_warm_ = true;
        return warm_u_;
    }

    double n_di(double l) {
        if (l == eig_.l_star) return 1.0;
        const Field& u = u_at(l);
        const double L = coeffs_.grid->length;
        return l * (L - coeffs_.dI * integrate(u)) / (eig_.l_star * L);
    }

    double n_dids(double l) {
        if (l == eig_.l_star) return 1.0;
        const Field& u = u_at(l);
        const double L = coeffs_.grid->length;
        const double int_u = integrate(u);
        return (l * (L - coeffs_.dI * int_u) + dS_ * l * int_u) / (eig_.l_star * L);
    }

    // int u^l + l int v^l, the quantity whose sup defines M*.
    double int_uv_sum(double l) {
        if (l == eig_.l_star) return limit_int_lv();
        const Field& u = u_at(l);
        Field v = solve_v(coeffs_, l, u);
        return integrate(u) + l * integrate(v);
    }

    CurveSample sample(double l) {
        if (l == eig_.l_star) return limit_sample();
        const Field& u = u_at(l);
        Field v = solve_v(coeffs_, l, u);
        return assemble(l, integrate(u), l * integrate(v));
    }

    CurveSample assemble(double l, double int_u, double int_lv) const {
        const double L = coeffs_.grid->length;
        const double ls = eig_.l_star;
        CurveSample s;
        s.l = l;
        s.int_u = int_u;
        s.int_lv = int_lv;
        s.n_di = l * (L - coeffs_.dI * int_u) / (ls * L);
        s.n_dids = s.n_di + dS_ * l * int_u / (ls * L);
        s.slope = (L + (dS_ - coeffs_.dI) * (int_lv + int_u)) / (ls * L);
        return s;
    }

    // Limits as l -> l*: N = 1, int u -> 0 and l int v -> l* c* int(phi1).
    double limit_int_lv() const { return eig_.l_star * expansion_.c_star * integrate(eig_.phi1); }

    CurveSample limit_sample() const {
        const double L = coeffs_.grid->length;
        CurveSample s;
        s.l = eig_.l_star;
        s.int_u = 0.0;
        s.int_lv = limit_int_lv();
        s.n_di = 1.0;
        s.n_dids = 1.0;
        s.slope = (L + (dS_ - coeffs_.dI) * s.int_lv) / (eig_.l_star * L);
        return s;
    }

private:
    const CoefficientSet& coeffs_;
    const EigenPair& eig_;
    double dS_;
    ThresholdExpansion expansion_;
    Field warm_u_;
    double warm_l_ = -1.0;
    bool has_warm_ = false;
};

std::vector<double> log_spaced(double from, double to, int per_decade) {
    const double lg0 = std::log10(from), lg1 = std::log10(to);
    const int count = std::max(2, static_cast<int>(std::ceil((lg1 - lg0) * per_decade)) + 1);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = std::pow(10.0, lg0 + (lg1 - lg0) * i / (count - 1));
    out.front() = from;
    out.back() = to;
    return out;
}

std::vector<CurveSample> sweep_samples(CurveEval& ev, std::span<const double> ls) {
    std::vector<CurveSample> out;
    out.reserve(ls.size());
    for (double l : ls) out.push_back(ev.sample(l));
    return out;
}

// Golden-section extremum refinement on [a, b]; sign = +1 maximizes.
template <class F>
std::pair<double, double> golden_extremum(F&& f, double a, double b, double sign, int iters = 60) {
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * std::abs(b); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = sign * f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = sign * f(x1);
        }
    }
    return (f1 > f2) ? std::make_pair(x1, sign * f1) : std::make_pair(x2, sign * f2);
}

// Bisection for a sign change of f on [a, b].
template <class F>
double bisect_sign_change(F&& f, double a, double b, double fa) {
    double mid = 0.5 * (a + b);
    for (int i = 0; i < 100 && (b - a) > 1e-14 * std::abs(b); ++i) {
        mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm >= 0.0) == (fa >= 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return mid;
}

double slope_of(const CurveSample& s, const CoefficientSet& coeffs, const EigenPair& eig, double dS) {
    const double L = coeffs.grid->length;
    return (L + (dS - coeffs.dI) * (s.int_lv + s.int_u)) / (eig.l_star * L);
}

// Slope samples inherit the Newton null-direction error of u through the
// almost singular linear solve for v; the envelope decays like
// eps_mach (dI/h^2 + reaction) / (l - l*). Sign changes are only trusted
// where both slopes clear that envelope.
double slope_noise(const CoefficientSet& coeffs, const EigenPair& eig, double l) {
    const double h2 = coeffs.grid->h * coeffs.grid->h;
    const double eps = std::numeric_limits<double>::epsilon();
    return 2.0 * eps * (coeffs.dI / h2 + l * max_value(coeffs.beta) + max_value(coeffs.gamma)) /
           (l - eig.l_star);
}

// Interior critical points from slope sign changes along the samples,
// bisection-refined. The tolerance band keeps roundoff around an exactly
// flat curve (constant coefficients) from producing spurious breaks.
std::vector<double> detect_breaks(const std::vector<CurveSample>& samples, CurveEval& ev,
                                  const CoefficientSet& coeffs, const EigenPair& eig, double dS) {
    double max_sum = ev.limit_int_lv();
    for (const CurveSample& s : samples) max_sum = std::max(max_sum, s.int_lv + s.int_u);
    const double L = coeffs.grid->length;
    const double scale = (L + std::abs(dS - coeffs.dI) * max_sum) / (eig.l_star * L);
    const double tol = 1e-11 * scale;

    std::vector<double> breaks;
    double prev_l = eig.l_star;
    double prev_slope = slope_of(ev.limit_sample(), coeffs, eig, dS);
    double prev_band = tol;
    for (const CurveSample& s : samples) {
        // Within 1e-5 of l* trust the analytic limit slope over the computed one.
        if ((s.l - eig.l_star) / eig.l_star < 1e-5) {
            prev_l = s.l;
            continue;
        }
        const double band = tol + slope_noise(coeffs, eig, s.l);
        const double cur = slope_of(s, coeffs, eig, dS);
        const bool crossing =
            (prev_slope > prev_band && cur < -band) || (prev_slope < -prev_band && cur > band);
        if (crossing) {
            const double a = std::max(prev_l, eig.l_star * (1.0 + 1e-5));
            auto slope_fn = [&](double l) { return slope_of(ev.sample(l), coeffs, eig, dS); };
            breaks.push_back(bisect_sign_change(slope_fn, a, s.l, prev_slope));
        }
        if (std::abs(cur) > band || std::abs(prev_slope) > prev_band) {
            prev_slope = cur;
            prev_band = band;
        }
        prev_l = s.l;
    }
    return breaks;
}

} // namespace

CurveSample eval_curve(const CoefficientSet& coeffs, const EigenPair& eig, double l, double dS,
                       const Field* warm_start) {
    if (l < eig.l_star) throw ConfigError("eval_curve: l below the threshold l*");
    CurveEval ev(coeffs, eig, dS);
    if (l == eig.l_star) return ev.limit_sample();
    LogisticPoint p = logistic_point(coeffs, eig, l, warm_start);
    return ev.assemble(l, p.int_u, p.int_lv);
}

CurveSample eval_curve(const CoefficientSet& coeffs, const EigenPair& eig, double l) {
    return eval_curve(coeffs, eig, l, coeffs.dS);
}

double slope_limit_check(const CoefficientSet& coeffs, const EigenPair& eig, double dS) {
    return dS / (coeffs.dI * eig.l_star);
}

Thresholds compute_thresholds(const CoefficientSet& coeffs, const EigenPair& eig, std::optional<double> dS) {
    const SolverOptions& opts = coeffs.opts;
    const double ls = eig.l_star;
    const double L = coeffs.grid->length;
    const double dS_eff = dS.value_or(0.0);

    Field ratio(*coeffs.grid);
    for (int i = 0; i < coeffs.grid->n; ++i)
        ratio.values[static_cast<std::size_t>(i)] =
            coeffs.gamma.values[static_cast<std::size_t>(i)] / coeffs.beta.values[static_cast<std::size_t>(i)];
    const double tail = average(ratio) * eig.r1;

    CurveEval ev(coeffs, eig, dS_eff);
    const double start = ls * (1.0 + opts.scan_start_offset);
    double end = ls * opts.scan_max_factor;

    // Extend until the dS = 0 curve has settled near its analytic tail.
    std::vector<double> ls_scan;
    std::vector<CurveSample> samples;
    for (int extension = 0;; ++extension) {
        ls_scan = log_spaced(start, end, opts.scan_per_decade);
        samples = sweep_samples(ev, ls_scan);
        const CurveSample& back = samples.back();
        const bool tail_ok = std::abs(back.n_di - tail) <= 1e-3 * std::max(1.0, tail) &&
                             std::abs(back.int_lv + back.int_u - L / coeffs.dI) <= 1e-2 * L / coeffs.dI;
        if (tail_ok) break;
        if (extension >= 6)
            throw SolverFailure("compute_thresholds: no tail convergence by l = " + std::to_string(end) +
                                "; |N - tail| = " + std::to_string(std::abs(back.n_di - tail)));
        end *= 10.0;
    }

    Thresholds out;
    out.r0_low_tail = tail;

    // Scan minimum of N_dI, golden-refined when interior.
    std::size_t imin = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].n_di < samples[imin].n_di) imin = i;
    double scan_min = samples[imin].n_di;
    if (imin > 0 && imin + 1 < samples.size()) {
        auto f = [&](double l) { return ev.n_di(l); };
        scan_min = std::min(scan_min,
                            golden_extremum(f, ls_scan[imin - 1], ls_scan[imin + 1], -1.0).second);
    }
    scan_min = std::min(scan_min, 1.0); // N_dI(l*) = 1 is part of the infimum range
    out.r0_low_scan = scan_min;
    out.r0_low_at_tail = tail < scan_min;
    out.r0_low = std::min(scan_min, tail);

    // M* = (dI/|Omega|) sup int(u + l v), including both endpoint limits.
    // Samples within 1e-2 of l* sit inside the v-noise strip; the analytic
    // endpoint value anchors that side of the sup instead.
    std::size_t imax = 0;
    bool have_interior = false;
    double sup_sum = std::max(ev.limit_int_lv(), L / coeffs.dI);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if ((samples[i].l - ls) / ls < 1e-2) continue;
        if (!have_interior ||
            samples[i].int_lv + samples[i].int_u > samples[imax].int_lv + samples[imax].int_u) {
            imax = i;
            have_interior = true;
        }
    }
    if (have_interior) {
        double best_interior = samples[imax].int_lv + samples[imax].int_u;
        if (imax > 0 && imax + 1 < samples.size()) {
            auto f = [&](double l) { return ev.int_uv_sum(l); };
            best_interior = std::max(
                best_interior, golden_extremum(f, ls_scan[imax - 1], ls_scan[imax + 1], +1.0).second);
        }
        sup_sum = std::max(sup_sum, best_interior);
    }
    out.m_star_big = coeffs.dI * sup_sum / L;
    out.d_low = (1.0 - 1.0 / out.m_star_big) * coeffs.dI;
    if (out.d_low < 0.0) out.d_low = 0.0;

    // Segment structure, with a doubling-refinement consistency check.
    std::vector<double> breaks = detect_breaks(samples, ev, coeffs, eig, dS_eff);
    {
        std::vector<double> ls2 = log_spaced(start, end, 2 * opts.scan_per_decade);
        std::vector<CurveSample> s2 = sweep_samples(ev, ls2);
        std::vector<double> breaks2 = detect_breaks(s2, ev, coeffs, eig, dS_eff);
        if (breaks2.size() != breaks.size()) {
            std::vector<double> ls4 = log_spaced(start, end, 4 * opts.scan_per_decade);
            std::vector<CurveSample> s4 = sweep_samples(ev, ls4);
            std::vector<double> breaks4 = detect_breaks(s4, ev, coeffs, eig, dS_eff);
            if (breaks4.size() != breaks2.size())
                throw SolverFailure("compute_thresholds: segment count unstable under scan refinement (" +
                                    std::to_string(breaks.size()) + "/" + std::to_string(breaks2.size()) +
                                    "/" + std::to_string(breaks4.size()) + ")");
            breaks = std::move(breaks4);
        } else {
            breaks = std::move(breaks2);
        }
    }
    out.segment_breaks = breaks;

    if (dS && breaks.size() >= 2) {
        std::vector<double> crit_values;
        crit_values.reserve(breaks.size());
        for (double b : breaks) crit_values.push_back(ev.n_dids(b));
        const double r02 = crit_values.front();
        const double r01 = *std::min_element(crit_values.begin(), crit_values.end());
        const double r03 = *std::max_element(crit_values.begin(), crit_values.end());
        out.r0_thresh = std::array<double, 3>{r01, r02, r03};
    }
    return out;
}

EquilibriumSet classify(const CoefficientSet& coeffs, const EigenPair& eig, double r0, double dS) {
    if (!(r0 > 0.0)) throw ConfigError("classify: r0 must be positive");
    if (!(dS > 0.0)) throw ConfigError("classify: dS must be positive");
    const SolverOptions& opts = coeffs.opts;
    const double ls = eig.l_star;

    CurveEval ev(coeffs, eig, dS);
    const double start = ls * (1.0 + opts.scan_start_offset);
    double end = ls * opts.scan_max_factor;
    const double slope_floor = 0.5 * slope_limit_check(coeffs, eig, dS);
    const double margin = 1e-6 * std::max(1.0, r0);

    std::vector<double> ls_scan;
    std::vector<CurveSample> samples;
    for (;;) {
        ls_scan = log_spaced(start, end, opts.scan_per_decade);
        samples = sweep_samples(ev, ls_scan);
        const CurveSample& back = samples.back();
        if (back.n_dids > r0 + margin && back.slope > 0.0 && back.slope >= slope_floor) break;
        if (end > ls * 1e12)
            throw SolverFailure("classify: curve did not commit above r0 by l = " + std::to_string(end));
        end *= 10.0;
    }

    struct RawRoot {
        double l;
        bool degenerate;
    };
    std::vector<RawRoot> raw;

    // Transversal crossings of N_dIdS(l) = r0.
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double ga = samples[i - 1].n_dids - r0;
        const double gb = samples[i].n_dids - r0;
        if ((ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0)) {
            auto fn = [&](double l) { return ev.n_dids(l) - r0; };
            const double root = bisect_sign_change(fn, samples[i - 1].l, samples[i].l, ga);
            if (std::abs(ev.n_dids(root) - r0) > opts.root_tol)
                throw SolverFailure("classify: bisected root misses tolerance at l = " + std::to_string(root));
            raw.push_back({root, false});
        }
    }

    // Tangential roots sit at critical points where the curve touches r0.
    std::vector<double> breaks = detect_breaks(samples, ev, coeffs, eig, dS);
    for (double b : breaks) {
        if (std::abs(ev.n_dids(b) - r0) <= opts.root_tol) {
            bool known = false;
            for (const RawRoot& r : raw)
                if (std::abs(r.l - b) <= 1e-7 * b) {
                    known = true;
                    break;
                }
            if (!known) raw.push_back({b, true});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const RawRoot& a, const RawRoot& b) { return a.l < b.l; });

    EquilibriumSet out;
    out.r0 = r0;
    out.dS = dS;
    const double mass_target = r0 * ls * coeffs.grid->length;
    const Field* warm = nullptr;
    for (const RawRoot& r : raw) {
        LogisticPoint p = logistic_point(coeffs, eig, r.l, warm);
        EquilibriumRoot root;
        root.l = r.l;
        root.S = Field(*coeffs.grid);
        root.I = Field(*coeffs.grid);
        for (std::size_t i = 0; i < p.u.values.size(); ++i) {
            root.S.values[i] = r.l * (1.0 - coeffs.dI * p.u.values[i]);
            root.I.values[i] = dS * r.l * p.u.values[i];
        }
        root.slope = (coeffs.grid->length + (dS - coeffs.dI) * (p.int_lv + p.int_u)) /
                     (ls * coeffs.grid->length);
        root.degenerate = r.degenerate || std::abs(root.slope) < opts.degenerate_slope_tol;

        double mass = 0.0;
        for (std::size_t i = 0; i < root.S.values.size(); ++i)
            mass += coeffs.grid->weights[i] * (root.S.values[i] + root.I.values[i]);
        if (std::abs(mass - mass_target) > 1e-8 * mass_target)
            throw SolverFailure("classify: reconstructed root violates the mass identity at l = " +
                                std::to_string(r.l));

        out.roots.push_back(std::move(root));
        warm = nullptr; // roots are far apart; fresh guesses are more reliable
    }

    if (!out.roots.empty()) {
        out.roots.front().is_minimal = true;
        out.roots.back().is_maximal = true;
        for (std::size_t k = 1; k < out.roots.size(); ++k) {
            for (std::size_t i = 0; i < out.roots[k].I.values.size(); ++i)
                if (!(out.roots[k].I.values[i] > out.roots[k - 1].I.values[i]))
                    throw SolverFailure("classify: root I-profiles are not strictly ordered");
        }
    }
    out.count = static_cast<int>(out.roots.size());
    return out;
}

std::vector<std::array<double, 3>> bifurcation_diagram(const CoefficientSet& coeffs, const EigenPair& eig,
                                                       double dS, std::span<const double> l_grid) {
    for (std::size_t i = 0; i < l_grid.size(); ++i) {
        if (!(l_grid[i] > eig.l_star)) throw ConfigError("bifurcation_diagram: l grid must lie above l*");
        if (i > 0 && !(l_grid[i] > l_grid[i - 1]))
            throw ConfigError("bifurcation_diagram: l grid must be ascending");
    }
    CurveEval ev(coeffs, eig, dS);
    std::vector<std::array<double, 3>> out;
    out.reserve(l_grid.size());
    for (double l : l_grid) {
        CurveSample s = ev.sample(l);
        out.push_back({s.n_dids, dS * l * s.int_u, l});
    }
    return out;
}

double d1_star(const CoefficientSet& coeffs, const EigenPair& eig, double r0) {
    const SolverOptions& opts = coeffs.opts;
    const double ls = eig.l_star;
    const double L = coeffs.grid->length;
    CurveEval ev(coeffs, eig, 0.0);
    std::vector<double> ls_scan =
        log_spaced(ls * (1.0 + opts.scan_start_offset), ls * opts.scan_max_factor, opts.scan_per_decade);
    std::vector<CurveSample> samples = sweep_samples(ev, ls_scan);

    auto value = [&](const CurveSample& s) {
        return (s.n_di < r0 && s.int_u > 0.0) ? (r0 - s.n_di) * L * ls / (s.l * s.int_u) : 0.0;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (value(samples[i]) > value(samples[best])) best = i;
    if (value(samples[best]) <= 0.0)
        throw ConfigError("d1_star: r0 does not exceed the scanned minimum of N_dI");

    double d1 = value(samples[best]);
    if (best > 0 && best + 1 < samples.size()) {
        auto f = [&](double l) { return value(ev.sample(l)); };
        d1 = std::max(d1, golden_extremum(f, ls_scan[best - 1], ls_scan[best + 1], +1.0).second);
    }
    return d1;
}

} // namespace atlas
