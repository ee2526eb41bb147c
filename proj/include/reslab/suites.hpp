#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "reslab/apostol.hpp"
#include "reslab/config.hpp"
#include "reslab/dilation.hpp"
#include "reslab/regularity.hpp"
#include "reslab/report.hpp"

namespace reslab {

namespace detail {

// Wall-clock is only consulted when timing was requested, so default runs
// stay byte-identical.
class SuiteTimer {
  public:
    explicit SuiteTimer(bool enabled) : enabled_(enabled) {
        if (enabled_) last_ = std::chrono::steady_clock::now();
    }
    double lap() {
        if (!enabled_) return 0.0;
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

  private:
    bool enabled_;
    std::chrono::steady_clock::time_point last_;
};

inline std::string lam_tag(cx z) { return "lam=" + format_cx(z); }

}  // namespace detail

inline PeriodicSeq suite_weights(const ExperimentConfig& cfg) {
    if (cfg.op == "weighted") return PeriodicSeq::from_reals({}, cfg.weights);
    return PeriodicSeq::constant(cx{1.0, 0.0});
}

inline Op suite_operator(const ExperimentConfig& cfg) { return forward_shift(suite_weights(cfg)); }

// smallest |product of k consecutive weights|; scanning one full period of
// start positions past the head covers every window that can occur
inline double min_window_product(const PeriodicSeq& w, unsigned k) {
    std::size_t starts = w.head().size() + w.cycle().size();
    double best = 0.0;
    for (std::size_t s = 1; s <= starts; ++s) {
        double prod = 1.0;
        for (unsigned i = 0; i < k; ++i) prod *= std::abs(w.at(s + i));
        if (s == 1 || prod < best) best = prod;
    }
    return best;
}

// ---------------------------------------------------------------------------
// spectra: windowed gamma values against the weight-product closed form,
// radius extrapolation, scaling equivariance, and the power law.
inline Report run_spectra(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    Op t = suite_operator(cfg);
    PeriodicSeq w = suite_weights(cfg);
    std::string optag = "op=" + cfg.op;

    const unsigned kmax = 32;
    GammaTable table =
        gamma_sequence(t, kmax, [](unsigned k) { return static_cast<std::size_t>(8 * k + 64); });
    double dev = 0.0;
    for (const GammaRow& row : table.rows) {
        double closed = min_window_product(w, row.k);
        dev = std::max(dev, std::abs(row.gamma / closed - 1.0));
    }
    rep.records.push_back(make_record("gamma-window-exact[" + optag + ";kmax=32]",
                                      "reduced-minimum-modulus", dev, dev, 1e-10, tm.lap()));

    RadiusEstimate est = regularity_radius_estimate(table);
    double closed_r = *shift_radius_closed(t);
    rep.records.push_back(make_record(
        "radius-extrapolated[" + optag + "]", "regularity-radius", est.value,
        std::abs(est.value - closed_r) + (est.certified ? 0.0 : 1.0), 1e-3, tm.lap()));

    Op doubled = scalar_mul(cx{2.0, 0.0}, forward_shift());
    double sc_closed = *shift_radius_closed(doubled);
    rep.records.push_back(make_record("radius-scaling-closed[op=scaled-shift]",
                                      "radius-scaling", sc_closed, std::abs(sc_closed - 2.0),
                                      1e-12, tm.lap()));
    RadiusEstimate sc_est = regularity_radius_estimate(gamma_sequence(doubled, 8));
    rep.records.push_back(make_record("radius-scaling-measured[op=scaled-shift]",
                                      "radius-scaling", sc_est.value,
                                      std::abs(sc_est.value - 2.0), 1e-9, tm.lap()));

    PowerLawReport pl = power_law_check(t, 2, 24, 12);
    rep.records.push_back(make_record("power-law[" + optag + ";n=2]", "radius-power-law",
                                      pl.s_power, pl.gap + (pl.certified ? 0.0 : 1.0), 5e-3,
                                      tm.lap()));
    return rep;
}

// ---------------------------------------------------------------------------
// radius: the distance formula through its three routes at lambda = 0.
inline Report run_radius(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    Op t = suite_operator(cfg);
    std::string optag = "op=" + cfg.op;
    double closed_r = *shift_radius_closed(t);

    DistanceRoutes routes = zemanek_gap(t, cx{0.0, 0.0}, cfg.budget, cfg.seed, 24);
    double closed = routes.closed ? *routes.closed : 0.0;
    rep.records.push_back(make_record("dist-closed[" + optag + ";lam=0]", "distance-formula",
                                      closed, std::abs(closed - closed_r), 1e-12, tm.lap()));

    double best = routes.family_route;
    double opt_resid, opt_tol;
    if (cfg.op == "shift") {
        opt_resid = std::abs(best - 1.0);  // two-sided: the optimum is pinned at 1
        opt_tol = 1e-3;
    } else {
        opt_resid = std::max(0.0, closed_r - 1e-2 - best);  // one-sided floor
        opt_tol = 0.0;
    }
    rep.records.push_back(make_record("optimizer-best[" + optag + ";lam=0]", "radius-formula",
                                      best, opt_resid, opt_tol, tm.lap()));
    rep.records.push_back(make_record(
        "optimizer-never-worse[" + optag + "]", "radius-formula",
        routes.optimizer.best_value - routes.optimizer.base_value,
        std::max(0.0, routes.optimizer.best_value - routes.optimizer.base_value), 0.0,
        tm.lap()));
    rep.records.push_back(make_record(
        "gamma-route[" + optag + ";lam=0]", "regularity-radius", routes.gamma_route.value,
        std::abs(routes.gamma_route.value - closed_r) + (routes.gamma_route.certified ? 0.0 : 1.0),
        1e-3, tm.lap()));
    rep.records.push_back(make_record("routes-gap[" + optag + ";lam=0]", "distance-routes-agree",
                                      routes.max_gap, routes.max_gap, 2e-2, tm.lap()));
    return rep;
}

// ---------------------------------------------------------------------------
// resolvent: the series form of the left resolvent of the forward shift,
// then the complement and Moore-Penrose window families side by side.
inline Report run_resolvent(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    Op u = forward_shift();
    std::vector<cx> grid = cfg.lambda_grid;
    if (grid.empty())
        grid = {cx{0.8, 0.0},  cx{0.5, 0.0},        cx{0.0, 0.3},
                cx{-0.4, 0.0}, cx{0.25, -0.25},     cx{-0.1, 0.6}};
    std::vector<TailVec> probes = standard_probes(cfg.seed);

    ResolventMap series = neumann_generalized_resolvent(backward_shift());
    for (cx lam : grid) {
        ResidualReport lr = residual_left_inverse(series, u, lam, probes, cfg.tol);
        rep.records.push_back(make_record("series-left-unit[" + detail::lam_tag(lam) + "]",
                                          "one-sided-unit", lr.part("left-unit"),
                                          lr.part("left-unit"), 1e-9, tm.lap()));
        ResidualReport gi = residual_generalized_inverse(series, u, lam, probes, cfg.tol);
        rep.records.push_back(make_record("series-inner-identity[" + detail::lam_tag(lam) + "]",
                                          "inner-identity", gi.part("inner-identity"),
                                          gi.part("inner-identity"), 1e-9, tm.lap()));
        rep.records.push_back(make_record("series-outer-identity[" + detail::lam_tag(lam) + "]",
                                          "outer-identity", gi.part("outer-identity"),
                                          gi.part("outer-identity"), 1e-9, tm.lap()));
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        ResidualReport ri =
            residual_resolvent_identity(series, grid[i], grid[i + 1], probes, cfg.tol);
        rep.records.push_back(make_record("series-resolvent-identity[" + detail::lam_tag(grid[i]) +
                                              ";mu=" + format_cx(grid[i + 1]) + "]",
                                          "resolvent-identity", ri.part("resolvent-identity"),
                                          ri.part("resolvent-identity"), 1e-9, tm.lap()));
    }
    double terms = static_cast<double>(neumann_term_budget(0.8, 1.0, 1e-10));
    rep.records.push_back(make_record("series-term-budget[q=0.8]", "series-certified-tail", terms,
                                      std::max(0.0, 60.0 - terms), 0.0, tm.lap()));

    std::size_t nwin = cfg.n ? cfg.n : 96;
    Domain disk = Domain::disk(cx{0.0, 0.0}, 0.9);
    ResolventMap comp = make_complement_family(u, {TailVec::basis(1)}, nwin, disk);
    std::vector<cx> cg{cx{0.3, 0.0}, cx{0.0, 0.5}, cx{-0.2, 0.35}};
    for (cx lam : cg) {
        ResidualReport lr = residual_left_inverse(comp, u, lam, probes, cfg.tol);
        rep.records.push_back(make_record("complement-left-unit[" + detail::lam_tag(lam) + "]",
                                          "one-sided-unit", lr.part("left-unit"),
                                          lr.part("left-unit"), 1e-10, tm.lap()));
    }
    for (std::size_t i = 0; i + 1 < cg.size(); ++i) {
        ResidualReport ri = residual_resolvent_identity(comp, cg[i], cg[i + 1], probes, cfg.tol);
        rep.records.push_back(make_record(
            "complement-resolvent-identity[" + detail::lam_tag(cg[i]) + ";mu=" +
                format_cx(cg[i + 1]) + "]",
            "resolvent-identity", ri.part("resolvent-identity"), ri.part("resolvent-identity"),
            1e-10, tm.lap()));
    }
    ResidualReport cd = residual_derivative(comp, cx{0.3, 0.0}, probes, 1e-4, cfg.tol);
    double cdv = std::max(cd.part("derivative-re"), cd.part("derivative-im"));
    rep.records.push_back(make_record("complement-derivative[lam=0.3+0i;step=1e-4]",
                                      "derivative-criterion", cdv, cdv, 1e-3, tm.lap()));

    ResolventMap mp = make_mp_family(u, nwin, disk);
    ResidualReport ml = residual_left_inverse(mp, u, cx{0.3, 0.0}, probes, cfg.tol);
    rep.records.push_back(make_record("mp-left-unit[lam=0.3+0i]", "one-sided-unit",
                                      ml.part("left-unit"), ml.part("left-unit"), 1e-10,
                                      tm.lap()));
    ResidualReport mri =
        residual_resolvent_identity(mp, cx{0.3, 0.0}, cx{0.0, 0.5}, probes, cfg.tol);
    double mriv = mri.part("resolvent-identity");
    rep.records.push_back(make_record("mp-resolvent-identity-fails[lam=0.3+0i;mu=0+0.5i]",
                                      "pointwise-inverse-not-resolvent", mriv,
                                      std::max(0.0, 1e-2 - mriv), 0.0, tm.lap()));
    double mdmin = 0.0;
    bool firststep = true;
    for (double step : {1e-4, 5e-5, 2e-5}) {
        ResidualReport md = residual_derivative(mp, cx{0.3, 0.0}, probes, step, cfg.tol);
        double v = std::max(md.part("derivative-re"), md.part("derivative-im"));
        if (firststep || v < mdmin) mdmin = v;
        firststep = false;
    }
    rep.records.push_back(make_record("mp-derivative-fails[lam=0.3+0i]", "derivative-criterion",
                                      mdmin, std::max(0.0, 1e-2 - mdmin), 0.0, tm.lap()));
    return rep;
}

// ---------------------------------------------------------------------------
// gadget: the five defining identities on an 8-point grid.
inline Report run_gadget(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    Gadget g = example_gadget();
    std::vector<cx> grid = cfg.lambda_grid;
    if (grid.empty()) {
        for (int j = 0; j < 8; ++j) {
            double r = 0.88 * (j + 1) / 8.0;
            double th = 2.0 * 3.14159265358979323846 * j / 8.0;
            grid.push_back(cx{r * std::cos(th), r * std::sin(th)});
        }
    }
    std::vector<TailVec> probes = unit_probes(16);
    for (cx lam : grid) {
        ResidualReport r = verify_gadget(g, lam, probes, cfg.tol);
        for (const auto& part : r.parts)
            rep.records.push_back(make_record("gadget-" + part.first + "[" +
                                                  detail::lam_tag(lam) + "]",
                                              "gadget-" + part.first, part.second, part.second,
                                              1e-9, tm.lap()));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// extend: block dilation of the forward shift over the complement family,
// with the Moore-Penrose family and the uncoupled model as controls.
inline Report run_extend(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    Gadget g = example_gadget();
    Op u = forward_shift();
    std::size_t nwin = cfg.n ? cfg.n : 96;
    Domain disk = Domain::disk(cx{0.0, 0.0}, 0.9);
    ResolventMap comp = make_complement_family(u, {TailVec::basis(1)}, nwin, disk);
    ExtensionModel em = build_extension(u, comp, g, cx{0.3, 0.0}, true, 48);

    std::vector<cx> grid{cx{0.0, 0.0}, cx{0.3, 0.0}, cx{0.0, 0.5}};
    for (cx lam : grid) {
        std::vector<BlockVec> probes = block_probes(em.parts(), cfg.seed);
        ResidualReport r = verify_extension(em, lam, probes, cfg.tol);
        rep.records.push_back(make_record("extend-left-unit[" + detail::lam_tag(lam) + "]",
                                          "extension-unit", r.part("left-unit"),
                                          r.part("left-unit"), 1e-9, tm.lap()));
        rep.records.push_back(make_record("extend-right-unit[" + detail::lam_tag(lam) + "]",
                                          "extension-unit", r.part("right-unit"),
                                          r.part("right-unit"), 1e-9, tm.lap()));
        double cz = coupling_block_mass(em, lam, 8, cfg.tol);
        rep.records.push_back(make_record("extend-coupling-zero[" + detail::lam_tag(lam) + "]",
                                          "inverse-block-structure", cz, cz, 0.0, tm.lap()));
        double cr = compression_residual(em, lam, standard_probes(cfg.seed), cfg.tol);
        rep.records.push_back(make_record("extend-compression[" + detail::lam_tag(lam) + "]",
                                          "compression-identity", cr, cr, 1e-10, tm.lap()));
    }

    double var = ttilde_variation(em, cx{0.3, 0.0}, cx{0.0, 0.5}, 48, cfg.tol);
    rep.records.push_back(make_record("extend-variation[family=complement]",
                                      "extension-lambda-independent", var, var, 1e-10, tm.lap()));
    ResolventMap mp = make_mp_family(u, nwin, disk);
    ExtensionModel emp = build_extension(u, mp, g, cx{0.3, 0.0}, true, 48);
    double mpvar = ttilde_variation(emp, cx{0.3, 0.0}, cx{0.0, 0.5}, 48, cfg.tol);
    rep.records.push_back(make_record("extend-variation[family=mp]",
                                      "moving-kernel-moves-extension", mpvar,
                                      std::max(0.0, 0.05 - mpvar), 0.0, tm.lap()));

    ExtensionModel bad = build_extension(u, comp, g, cx{0.3, 0.0}, false, 48);
    ResidualReport rb =
        verify_extension(bad, cx{0.3, 0.0}, block_probes(bad.parts(), cfg.seed), cfg.tol);
    rep.records.push_back(make_record("extend-corrupted-control[lam=0.3+0i]",
                                      "coupling-is-essential", rb.max_residual,
                                      std::max(0.0, 0.1 - rb.max_residual), 0.0, tm.lap()));

    for (cx lam : {cx{0.0, 0.0}, cx{0.3, 0.0}, cx{0.5, 0.0}}) {
        GrowthReport gr = resolvent_growth(em, lam, 64, cfg.tol);
        rep.records.push_back(make_record("extend-growth[" + detail::lam_tag(lam) + ";k=64]",
                                          "resolvent-growth-rate", gr.root, gr.rel_gap, 5e-2,
                                          tm.lap()));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// apostol: the assembled three-block inverse, its projections, and the rank
// bookkeeping, inside the disk and out in the annulus.
inline Report run_apostol(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    cx lam{0.3, 0.0}, mu{0.0, 0.5};
    TriangularCalculus coupled_calc;
    for (bool coupled : {false, true}) {
        std::string vtag = coupled ? "variant=coupled" : "variant=uncoupled";
        TriangularSystem sys = example_triangular(coupled);
        TriangularCalculus calc = make_calculus(sys);
        std::vector<BlockVec> probes = block_probes(3, cfg.seed);
        ResidualReport ids = triangular_identity_residuals(calc, lam, probes, cfg.tol);
        rep.records.push_back(make_record("apostol-inner-identity[" + vtag + ";lam=0.3+0i]",
                                          "inner-identity", ids.part("inner-identity"),
                                          ids.part("inner-identity"), 1e-9, tm.lap()));
        rep.records.push_back(make_record("apostol-outer-identity[" + vtag + ";lam=0.3+0i]",
                                          "outer-identity", ids.part("outer-identity"),
                                          ids.part("outer-identity"), 1e-9, tm.lap()));
        ResidualReport pr = projection_residuals(calc, lam, mu, probes, cfg.tol);
        for (const char* part : {"p-chain", "q-chain", "p-idempotent"})
            rep.records.push_back(make_record(std::string("apostol-") + part + "[" + vtag +
                                                  ";lam=0.3+0i;mu=0+0.5i]",
                                              "projection-chain", pr.part(part), pr.part(part),
                                              1e-9, tm.lap()));
        if (coupled) coupled_calc = calc;
    }

    Gadget g = example_gadget();
    BlockVec cand = BlockVec::zeros(3);
    cand.part[0] = g.k_of(cx{0.5, 0.0}, 1e-13);
    RankComparison rc = compare_ranks(coupled_calc, cx{0.5, 0.0}, 64, cand);
    rep.records.push_back(make_record(
        "apostol-rank-match[lam=0.5+0i;n=64]", "defect-rank-agreement",
        static_cast<double>(rc.rank_p),
        std::abs(static_cast<double>(rc.rank_p) - static_cast<double>(rc.rank_a)), 0.0,
        tm.lap()));
    rep.records.push_back(make_record("apostol-q-kernel[lam=0.5+0i]", "defect-rank-agreement",
                                      rc.q_on_kernel, rc.q_on_kernel, 1e-8, tm.lap()));
    rep.records.push_back(make_record("apostol-q-floor[lam=0.5+0i]", "defect-rank-agreement",
                                      rc.q_nonzero_floor,
                                      std::max(0.0, 0.1 - rc.q_nonzero_floor), 0.0, tm.lap()));

    cx outer{4.0, 0.0};
    std::vector<BlockVec> probes = block_probes(3, cfg.seed);
    double pdist = 0.0;
    for (const BlockVec& x : probes)
        pdist = std::max(pdist, distance_upper(coupled_calc.p(outer, x, cfg.tol), x));
    rep.records.push_back(make_record("apostol-outer-region[lam=4+0i]",
                                      "true-resolvent-outside", pdist, pdist, 1e-9, tm.lap()));
    return rep;
}

// ---------------------------------------------------------------------------
// ransford: sigma_min scan of the doubling operator and the failed mean
// inequality. The deep on-circle dip needs astronomically wide windows; what
// is checkable at this size is the drop below the interior plateau, the
// certified interior floor, and the center-versus-mean gap.
inline Report run_ransford(const ExperimentConfig& cfg) {
    Report rep;
    detail::SuiteTimer tm(cfg.timings);
    std::size_t half_n = cfg.n ? cfg.n : 256;
    cx beta{1.0, 0.0};
    double rt2 = std::sqrt(2.0);

    double on_min = 0.0;
    for (int j = 0; j < 5; ++j) {
        double th = 2.0 * 3.14159265358979323846 * j / 5.0;
        double s = doubling_sigma_min(beta, cx{rt2 * std::cos(th), rt2 * std::sin(th)}, half_n);
        if (j == 0 || s < on_min) on_min = s;
    }
    double plateau = doubling_sigma_min(beta, cx{0.0, 0.0}, half_n);
    rep.records.push_back(make_record("ransford-circle-dip[n=" + std::to_string(half_n) + "]",
                                      "window-sigma-scan", on_min,
                                      std::max(0.0, on_min - 0.5 * plateau), 0.0, tm.lap()));

    double in_min = 0.0;
    bool first = true;
    std::vector<cx> inner{cx{0.0, 0.0}, cx{0.4, 0.0}};
    for (int j = 0; j < 3; ++j) {
        double th = 2.0 * 3.14159265358979323846 * j / 3.0;
        inner.push_back(cx{0.8 * rt2 * std::cos(th), 0.8 * rt2 * std::sin(th)});
    }
    for (cx z : inner) {
        double s = doubling_sigma_min(beta, z, half_n);
        if (first || s < in_min) in_min = s;
        first = false;
    }
    rep.records.push_back(make_record("ransford-interior-floor[n=" + std::to_string(half_n) + "]",
                                      "window-sigma-scan", in_min,
                                      std::max(0.0, 0.1 - in_min), 0.0, tm.lap()));

    SubharmonicReport sub = subharmonic_scan(std::min<std::size_t>(half_n, 256), 16);
    double target = -0.5 * std::log(2.0);
    double resid = std::abs(sub.circle_mean - target) + std::abs(sub.phi_center) +
                   (sub.mean_dominates ? 1.0 : 0.0);
    rep.records.push_back(make_record("ransford-mean-gap[points=16]", "mean-inequality-fails",
                                      sub.circle_mean, resid, 1e-3, tm.lap()));
    return rep;
}

inline Report run_all(const ExperimentConfig& cfg) {
    Report rep;
    ExperimentConfig shift_cfg = cfg;
    shift_cfg.op = "shift";
    ExperimentConfig weighted_cfg = cfg;
    weighted_cfg.op = "weighted";
    rep.append(run_spectra(shift_cfg));
    rep.append(run_spectra(weighted_cfg));
    rep.append(run_radius(shift_cfg));
    rep.append(run_radius(weighted_cfg));
    rep.append(run_resolvent(cfg));
    rep.append(run_gadget(cfg));
    rep.append(run_extend(cfg));
    rep.append(run_apostol(cfg));
    rep.append(run_ransford(cfg));
    return rep;
}

inline Report run_suite(const ExperimentConfig& cfg) {
    if (cfg.suite == "spectra") return run_spectra(cfg);
    if (cfg.suite == "radius") return run_radius(cfg);
    if (cfg.suite == "resolvent") return run_resolvent(cfg);
    if (cfg.suite == "gadget") return run_gadget(cfg);
    if (cfg.suite == "extend") return run_extend(cfg);
    if (cfg.suite == "apostol") return run_apostol(cfg);
    if (cfg.suite == "ransford") return run_ransford(cfg);
    if (cfg.suite == "all") return run_all(cfg);
    throw config_error("unknown suite '" + cfg.suite + "'");
}

}  // namespace reslab
