#pragma once

#include <map>
#include <memory>
#include <vector>

#include "reslab/dense_numerics.hpp"
#include "reslab/resolvent.hpp"

namespace reslab {

// Shift pair with an explicit inverse family on the disk: S is the backward
// shift, U the forward one, and U(lambda) = (lambda U - I)^{-1} U is a right
// inverse of lambda - S whose left defect is the rank-one r(.) K(lambda),
// with K(lambda) the geometric column (1, lambda, lambda^2, ...) spanning
// ker(lambda - S) and r reading the first coordinate.
struct Gadget {
    Op s, u;
    Domain dom;

    Op u_of(cx lambda) const { return compose(geometric_inverse(lambda, u), u); }

    TailVec k_of(cx lambda, double tol = 1e-12) const {
        double q = std::abs(lambda);
        if (q >= 1.0) throw outside_domain("geometric column diverges at modulus >= 1");
        TailVec k;
        if (q == 0.0) {
            k.a = {cx{1.0, 0.0}};
            return k;
        }
        double scale = 1.0 / std::sqrt(1.0 - q * q);
        std::size_t m = 0;
        double mass = q * scale;
        while (mass > tol) {
            ++m;
            mass *= q;
        }
        k.a.resize(m + 1);
        cx p{1.0, 0.0};
        for (std::size_t i = 0; i <= m; ++i, p *= lambda) k.a[i] = p;
        k.tail = mass;
        return k;
    }

    static cx r_of(const TailVec& x) { return x.a.empty() ? cx{0.0, 0.0} : x.a[0]; }
    static double r_err(const TailVec& x) { return x.tail; }
};

inline Gadget example_gadget(double radius = 0.9) {
    Gadget g;
    g.s = backward_shift();
    g.u = forward_shift();
    g.dom = Domain::disk(cx{0.0, 0.0}, radius);
    return g;
}

// The five defining identities, reported as one residual part each,
// maximized over the probes.
inline ResidualReport verify_gadget(const Gadget& g, cx lambda,
                                    const std::vector<TailVec>& probes, double tol = 1e-12) {
    if (!g.dom.contains(lambda)) throw outside_domain("gadget checked outside its disk");
    ResidualReport rep;
    rep.probes = probes.size();
    Op a = lambda_minus(lambda, g.s);
    Op ul = g.u_of(lambda);
    TailVec k = g.k_of(lambda, tol);
    double knorm = k.norm_upper();

    TailVec ak = apply(a, k, tol);
    rep.bump("kernel-direction", ak.norm_upper());
    rep.bump("normalization", std::abs(Gadget::r_of(k) - cx{1.0, 0.0}) + Gadget::r_err(k));

    for (const TailVec& x : probes) {
        TailVec ux = apply(ul, x, tol);
        rep.bump("right-unit", distance_upper(apply(a, ux, tol), x));
        rep.bump("functional-kills-range", std::abs(Gadget::r_of(ux)) + Gadget::r_err(ux));
        TailVec uax = apply(ul, apply(a, x, tol), tol);
        TailVec expect = sub(x, scaled(Gadget::r_of(x), k));
        rep.bump("left-unit-defect",
                 distance_upper(uax, expect) + Gadget::r_err(x) * knorm);
    }
    return rep;
}

// Kernel of the n-window of a resolvent-like map at one point: singular
// directions below rank_tol relative cut, re-orthonormalized and phase-fixed
// so the basis is reproducible.
struct KernelData {
    std::size_t dim = 0;
    std::vector<TailVec> basis;
    double gap = 0.0;  // smallest kept sigma over largest dropped sigma
    std::vector<double> sigma;
};

inline KernelData kernel_data(const ResolventMap& l, cx lambda, std::size_t n,
                              double rank_tol = 1e-9, double tol = 1e-13) {
    std::vector<TailVec> cols(n);
    std::size_t rows = n;
    for (std::size_t j = 0; j < n; ++j) {
        cols[j] = l(lambda, TailVec::basis(j + 1), tol);
        rows = std::max(rows, cols[j].a.size());
    }
    DenseMatrix w(rows, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < cols[j].a.size(); ++i) w.at(i, j) = cols[j].a[i];
    SvdResult svd = jacobi_svd(w);
    KernelData kd;
    kd.sigma = svd.sigma;
    double cut = rank_tol * (svd.sigma.empty() ? 0.0 : svd.sigma[0]);
    std::size_t rank = 0;
    while (rank < svd.sigma.size() && svd.sigma[rank] > cut) ++rank;
    kd.dim = n - rank;
    double dropped = rank < n ? svd.sigma[rank] : 0.0;
    double kept = rank > 0 ? svd.sigma[rank - 1] : 1e18;
    kd.gap = dropped > 1e-300 ? kept / dropped : 1e18;
    if (kd.dim > 0 && kd.gap < 10.0)
        throw kernel_dimension_unstable("sigma gap " + format_short(kd.gap) +
                                        " too thin to trust the kernel dimension");
    for (std::size_t c = rank; c < n; ++c) {
        TailVec v;
        v.a.resize(n);
        for (std::size_t i = 0; i < n; ++i) v.a[i] = svd.V.at(i, c);
        // two Gram-Schmidt passes against the vectors already kept
        for (int pass = 0; pass < 2; ++pass)
            for (const TailVec& b : kd.basis) {
                cx overlap = inner(v, b);
                v = sub(v, scaled(overlap, b));
            }
        double nrm = v.rep_norm();
        if (nrm < 1e-12) throw kernel_dimension_unstable("kernel basis degenerated");
        v = scaled(cx{1.0 / nrm, 0.0}, v);
        cx phase{1.0, 0.0};
        for (const cx& c2 : v.a)
            if (std::abs(c2) > 1e-8) {
                phase = std::conj(c2) / std::abs(c2);
                break;
            }
        v = scaled(phase, v);
        v.trim();
        kd.basis.push_back(std::move(v));
    }
    return kd;
}

// Dilation of a left-invertible-type operator: the base space is augmented
// with one shift copy per kernel direction of L(lambda). The coupled variant
// feeds the first coordinate of each extra slot back into the base through
// the kernel direction, which is exactly what makes lambda - ttilde
// two-sided invertible with rtilde as its inverse; dropping the coupling on
// both sides is the negative control.
struct ExtensionModel {
    Op t;
    ResolventMap l;
    Gadget g;
    std::size_t m = 0;
    bool coupled = true;
    std::size_t kernel_window = 48;
    double kernel_rank_tol = 1e-9;
    std::shared_ptr<std::map<detail::CxKey, std::vector<TailVec>>> kernels =
        std::make_shared<std::map<detail::CxKey, std::vector<TailVec>>>();

    std::size_t parts() const { return 1 + m; }

    const std::vector<TailVec>& kernel_at(cx lambda) const {
        detail::CxKey key{lambda.real(), lambda.imag()};
        auto it = kernels->find(key);
        if (it == kernels->end()) {
            KernelData kd = kernel_data(l, lambda, kernel_window, kernel_rank_tol);
            if (kd.dim != m)
                throw kernel_dimension_unstable("kernel dimension " + std::to_string(kd.dim) +
                                                " drifted from " + std::to_string(m));
            it = kernels->emplace(key, std::move(kd.basis)).first;
        }
        return it->second;
    }

    Op ttilde(cx lambda) const {
        std::size_t p = parts();
        std::vector<Op> grid(p * p, nullptr);
        grid[0] = t;
        const std::vector<TailVec>& basis = kernel_at(lambda);
        for (std::size_t j = 1; j < p; ++j) {
            grid[j * p + j] = g.s;
            if (coupled)
                grid[j] = scalar_mul(cx{-1.0, 0.0}, rank_one(basis[j - 1], TailVec::basis(1)));
        }
        return block_op(p, p, std::move(grid));
    }

    BlockVec rtilde(cx lambda, const BlockVec& x, double tol = 1e-12) const {
        if (x.parts() != parts()) throw shape_error("block arity mismatch in extension");
        const std::vector<TailVec>& basis = kernel_at(lambda);
        BlockVec y = BlockVec::zeros(parts());
        y.part[0] = l(lambda, x.part[0], tol);
        TailVec w = sub(x.part[0], apply(lambda_minus(lambda, t), y.part[0], tol));
        Op ul = g.u_of(lambda);
        TailVec k = coupled ? g.k_of(lambda, tol) : TailVec{};
        for (std::size_t j = 0; j < m; ++j) {
            TailVec yj = apply(ul, x.part[1 + j], tol);
            if (coupled) {
                cx cj = inner(w, basis[j]);
                double cj_err = inner_error_bound(w, basis[j]);
                yj = add(yj, scaled(cj, k));
                yj.tail += cj_err * k.norm_upper();
            }
            y.part[1 + j] = std::move(yj);
        }
        return y;
    }
};

inline ExtensionModel build_extension(Op t, ResolventMap l, Gadget g, cx probe_lambda,
                                      bool coupled = true, std::size_t kernel_window = 48) {
    ExtensionModel em;
    em.t = std::move(t);
    em.l = std::move(l);
    em.g = std::move(g);
    em.coupled = coupled;
    em.kernel_window = kernel_window;
    KernelData kd = kernel_data(em.l, probe_lambda, kernel_window, em.kernel_rank_tol);
    em.m = kd.dim;
    detail::CxKey key{probe_lambda.real(), probe_lambda.imag()};
    em.kernels->emplace(key, std::move(kd.basis));
    return em;
}

inline ResidualReport verify_extension(const ExtensionModel& em, cx lambda,
                                       const std::vector<BlockVec>& probes,
                                       double tol = 1e-12) {
    ResidualReport rep;
    rep.probes = probes.size();
    Op at = lambda_minus(lambda, em.ttilde(lambda));
    for (const BlockVec& x : probes) {
        BlockVec ax = apply(at, x, tol);
        rep.bump("left-unit", distance_upper(em.rtilde(lambda, ax, tol), x));
        BlockVec rx = em.rtilde(lambda, x, tol);
        rep.bump("right-unit", distance_upper(apply(at, rx, tol), x));
    }
    return rep;
}

// rtilde fed pure shift-slot data must leave the base slot untouched; the
// base row of the block inverse has no coupling entries at all.
inline double coupling_block_mass(const ExtensionModel& em, cx lambda, std::size_t count = 8,
                                  double tol = 1e-12) {
    double worst = 0.0;
    for (std::size_t j = 0; j < em.m; ++j)
        for (std::size_t kidx = 1; kidx <= count; ++kidx) {
            BlockVec x = BlockVec::basis_in(1 + j, kidx, em.parts());
            BlockVec y = em.rtilde(lambda, x, tol);
            worst = std::max(worst, y.part[0].norm_upper());
        }
    return worst;
}

// Compressing rtilde to the base slot must reproduce L itself.
inline double compression_residual(const ExtensionModel& em, cx lambda,
                                   const std::vector<TailVec>& probes, double tol = 1e-12) {
    double worst = 0.0;
    for (const TailVec& h : probes) {
        BlockVec x = BlockVec::zeros(em.parts());
        x.part[0] = h;
        BlockVec y = em.rtilde(lambda, x, tol);
        worst = std::max(worst, distance_upper(y.part[0], em.l(lambda, h, tol)));
    }
    return worst;
}

// Operator 2-norm of ttilde(l1) - ttilde(l2) on a block window. Zero exactly
// when the kernel directions do not move with lambda.
inline double ttilde_variation(const ExtensionModel& em, cx l1, cx l2, std::size_t n = 48,
                               double tol = 1e-12) {
    DenseMatrix a = truncate_block(em.ttilde(l1), em.parts(), n, tol);
    DenseMatrix b = truncate_block(em.ttilde(l2), em.parts(), n, tol);
    DenseMatrix d = madd(a, mscale(cx{-1.0, 0.0}, b));
    return norm2(d, 1e-10).value;
}

struct GrowthReport {
    std::vector<double> norms;
    double root = 0.0;
    double target = 0.0;
    double rel_gap = 0.0;
};

// Iterating the block inverse from the base cyclic vector: the k-th root of
// the norm climbs to 1/(1 - |lambda|), the reciprocal distance to the circle.
inline GrowthReport resolvent_growth(const ExtensionModel& em, cx lambda, unsigned kmax = 64,
                                     double tol = 1e-12) {
    GrowthReport rep;
    BlockVec v = BlockVec::basis_in(0, 1, em.parts());
    for (unsigned k = 0; k < kmax; ++k) {
        v = em.rtilde(lambda, v, tol);
        rep.norms.push_back(v.norm_upper());
    }
    rep.root = std::pow(rep.norms.back(), 1.0 / kmax);
    rep.target = 1.0 / (1.0 - std::abs(lambda));
    rep.rel_gap = std::abs(rep.root - rep.target) / rep.target;
    return rep;
}

// ---------------------------------------------------------------------------
// Doubling operator probe: T(beta) e_n = e_{2n-1} + beta e_{2n} is an
// isometry times sqrt(1 + |beta|^2), so windows of z - T(beta) have a
// certified singular-value floor ||z| - sqrt(1 + |beta|^2)|, yet the measured
// sigma_min near the critical circle stays far above zero at any feasible
// window size. The center-versus-circle-mean comparison below is the honest
// part: it exhibits the failure of the mean inequality directly.
inline DenseMatrix doubling_window(cx beta, cx z, std::size_t half_n) {
    DenseMatrix w(2 * half_n, half_n);
    for (std::size_t k = 1; k <= half_n; ++k) {
        w.at(k - 1, k - 1) += z;
        w.at(2 * k - 2, k - 1) -= cx{1.0, 0.0};
        w.at(2 * k - 1, k - 1) -= beta;
    }
    return w;
}

inline double doubling_sigma_min(cx beta, cx z, std::size_t half_n) {
    SpectralEstimate est = smallest_singular_value(doubling_window(beta, z, half_n));
    return est.value;
}

inline double doubling_certified_floor(cx beta, cx z) {
    return std::abs(std::abs(z) - std::sqrt(1.0 + std::norm(beta)));
}

struct SubharmonicReport {
    double phi_center = 0.0;
    double circle_mean = 0.0;
    bool mean_dominates = true;  // a subharmonic function would make this true
};

// phi(beta) = -log sigma_min(window of -T(beta)). The 16-point mean over the
// unit circle lands at -log sqrt(2) while the center value is 0, so the
// center strictly dominates the mean.
inline SubharmonicReport subharmonic_scan(std::size_t half_n = 256, std::size_t points = 16) {
    SubharmonicReport rep;
    rep.phi_center = -std::log(doubling_sigma_min(cx{0.0, 0.0}, cx{0.0, 0.0}, half_n));
    double acc = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        double th = 2.0 * 3.14159265358979323846 * static_cast<double>(j) / points;
        cx beta{std::cos(th), std::sin(th)};
        acc += -std::log(doubling_sigma_min(beta, cx{0.0, 0.0}, half_n));
    }
    rep.circle_mean = acc / points;
    rep.mean_dominates = rep.circle_mean >= rep.phi_center - 1e-9;
    return rep;
}

}  // namespace reslab
