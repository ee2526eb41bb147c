#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reslab/dense_numerics.hpp"
#include "reslab/operator_expr.hpp"

namespace reslab {

// Evaluation regions. A domain is a finite union; identities relating two
// points (resolvent equation, derivative) require both points in the same
// region, and nothing here ever infers connectivity on its own.
struct Region {
    enum class Shape { disk, annulus } shape = Shape::disk;
    cx center{0.0, 0.0};
    double r_in = 0.0;
    double r_out = 1.0;

    bool contains(cx z) const {
        double d = std::abs(z - center);
        if (shape == Shape::disk) return d < r_out;
        return d > r_in && d < r_out;
    }

    static Region disk(cx center, double radius) {
        Region r;
        r.shape = Shape::disk;
        r.center = center;
        r.r_out = radius;
        return r;
    }
    static Region annulus(double r_in, double r_out) {
        Region r;
        r.shape = Shape::annulus;
        r.r_in = r_in;
        r.r_out = r_out;
        return r;
    }
};

struct Domain {
    std::vector<Region> regions;

    static Domain disk(cx center, double radius) { return Domain{{Region::disk(center, radius)}}; }
    static Domain annulus(double r_in, double r_out) {
        return Domain{{Region::annulus(r_in, r_out)}};
    }

    Domain also(Region r) const {
        Domain d = *this;
        d.regions.push_back(r);
        return d;
    }

    int region_index(cx z) const {
        for (std::size_t i = 0; i < regions.size(); ++i)
            if (regions[i].contains(z)) return static_cast<int>(i);
        return -1;
    }
    bool contains(cx z) const { return region_index(z) >= 0; }
};

enum class ResolventKind { left, right, generalized, two_sided };

// A lambda-indexed family of operator actions with a declared domain. eval
// receives points already validated against the domain.
struct ResolventMap {
    Domain dom;
    ResolventKind kind = ResolventKind::left;
    std::size_t parts = 1;
    std::function<BlockVec(cx, const BlockVec&, double)> eval;

    BlockVec operator()(cx lambda, const BlockVec& x, double tol = 1e-12) const {
        if (!dom.contains(lambda))
            throw outside_domain("evaluation point " + format_cx(lambda) +
                                 " is outside the declared domain");
        return eval(lambda, x, tol);
    }
    TailVec operator()(cx lambda, const TailVec& x, double tol = 1e-12) const {
        BlockVec y = (*this)(lambda, BlockVec::single(x), tol);
        if (y.parts() != 1) throw shape_error("scalar resolvent evaluation returned blocks");
        return y.part[0];
    }
};

namespace detail {
struct CxKey {
    double re, im;
    bool operator<(const CxKey& o) const {
        return re < o.re || (re == o.re && im < o.im);
    }
};
inline CxKey key_of(cx z) { return CxKey{z.real(), z.imag()}; }
}  // namespace detail

// ---------------------------------------------------------------------------
// Moore-Penrose one-sided inverse on a rectangular window.
//
// The window keeps every nonzero row of the first n columns of (lambda - T).
// Cutting those rows instead (a square window) can make the matrix invertible
// and destroy the kernel the construction is about, so the rectangle is not
// an optimization but a correctness requirement.
struct MpWindow {
    DenseMatrix a;       // rows x n
    LuFactors gram_lu;   // LU of A^H A
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::size_t n = 0;

    // least-squares left action: g |-> (A^H A)^{-1} A^H g
    TailVec apply_left(const TailVec& g) const {
        std::size_t rows = a.rows();
        std::vector<cx> b(rows, cx{0.0, 0.0});
        double dropped_sq = 0.0;
        for (std::size_t i = 0; i < g.a.size(); ++i) {
            if (i < rows)
                b[i] = g.a[i];
            else
                dropped_sq += std::norm(g.a[i]);
        }
        std::vector<cx> rhs = matvec_adj(a, b);
        std::vector<cx> f = gram_lu.solve(rhs);
        TailVec out{std::move(f)};
        double dropped = std::sqrt(dropped_sq) + g.tail;
        if (dropped > 0.0 && sigma_min > 0.0) out.tail += dropped / sigma_min;
        return out;
    }
};

inline MpWindow mp_window(const Op& t, cx lambda, std::size_t n, double tol = 1e-13) {
    Op a_op = lambda_minus(lambda, t);
    MpWindow w;
    w.n = n;
    w.a = column_window(a_op, n, tol);
    std::vector<double> sv = singular_values(w.a);
    w.sigma_max = sv.empty() ? 0.0 : sv.front();
    w.sigma_min = sv.empty() ? 0.0 : sv.back();
    if (w.sigma_max == 0.0 || w.sigma_min <= 1e-12 * w.sigma_max)
        throw not_left_invertible("window of (lambda - T) at " + format_cx(lambda) +
                                  " is rank deficient, sigma_min " + format_short(w.sigma_min));
    w.gram_lu = lu_factor(gram(w.a));
    return w;
}

// Family of Moore-Penrose left inverses with one factorization per point.
inline ResolventMap make_mp_family(Op t, std::size_t n, Domain dom) {
    auto cache = std::make_shared<std::map<detail::CxKey, std::shared_ptr<MpWindow>>>();
    ResolventMap m;
    m.dom = std::move(dom);
    m.kind = ResolventKind::left;
    m.eval = [t = std::move(t), n, cache](cx lambda, const BlockVec& x, double tol) -> BlockVec {
        auto it = cache->find(detail::key_of(lambda));
        if (it == cache->end()) {
            auto w = std::make_shared<MpWindow>(mp_window(t, lambda, n, tol));
            it = cache->emplace(detail::key_of(lambda), std::move(w)).first;
        }
        if (x.parts() != 1) throw shape_error("mp family expects single-component vectors");
        return BlockVec::single(it->second->apply_left(x.part[0]));
    };
    return m;
}

// Unit vector spanning ker of the Moore-Penrose left inverse at lambda,
// computed from the right singular vectors of the n x n window of L.
inline TailVec mp_kernel_direction(const Op& t, cx lambda, std::size_t n, double tol = 1e-13) {
    MpWindow w = mp_window(t, lambda, n, tol);
    DenseMatrix lw(n, n);
    for (std::size_t j = 1; j <= n; ++j) {
        TailVec col = w.apply_left(TailVec::basis(j));
        for (std::size_t i = 0; i < n && i < col.a.size(); ++i) lw.at(i, j - 1) = col.a[i];
    }
    SvdResult svd = jacobi_svd(lw);
    std::vector<cx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = svd.V.at(i, n - 1);
    TailVec k{std::move(v)};
    // fix the phase: first significantly nonzero coordinate real positive
    for (const cx& c : k.a) {
        if (std::abs(c) > 1e-8) {
            k = scaled(std::conj(c) / std::abs(c), k);
            break;
        }
    }
    return k;
}

// ---------------------------------------------------------------------------
// Left resolvent along a complement: H = Im(lambda - T) + M with M fixed,
// L(lambda) g = the unique f solving (lambda - T) f + m = g, m in M. Solved
// as least squares on the stacked window [A | M].
struct ComplementWindow {
    DenseMatrix b;  // rows x (n + m)
    LuFactors gram_lu;
    double sigma_min = 0.0;
    std::size_t n = 0, m = 0;

    TailVec apply(const TailVec& g) const {
        std::size_t rows = b.rows();
        std::vector<cx> rhs_full(rows, cx{0.0, 0.0});
        double dropped_sq = 0.0;
        for (std::size_t i = 0; i < g.a.size(); ++i) {
            if (i < rows)
                rhs_full[i] = g.a[i];
            else
                dropped_sq += std::norm(g.a[i]);
        }
        std::vector<cx> rhs = matvec_adj(b, rhs_full);
        std::vector<cx> sol = gram_lu.solve(rhs);
        TailVec out{std::vector<cx>(sol.begin(), sol.begin() + static_cast<long>(n))};
        double dropped = std::sqrt(dropped_sq) + g.tail;
        if (dropped > 0.0 && sigma_min > 0.0) out.tail += dropped / sigma_min;
        return out;
    }
};

inline ComplementWindow complement_window(const Op& t, const std::vector<TailVec>& mbasis,
                                          cx lambda, std::size_t n, double tol = 1e-13) {
    Op a_op = lambda_minus(lambda, t);
    std::vector<TailVec> cols;
    cols.reserve(n + mbasis.size());
    std::size_t rows = n;
    for (std::size_t j = 1; j <= n; ++j) {
        cols.push_back(apply(a_op, TailVec::basis(j), tol));
        rows = std::max(rows, cols.back().a.size());
    }
    for (const TailVec& mv : mbasis) {
        cols.push_back(mv);
        rows = std::max(rows, mv.a.size());
    }
    ComplementWindow w;
    w.n = n;
    w.m = mbasis.size();
    w.b = DenseMatrix(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].a.size(); ++i) w.b.at(i, j) = cols[j].a[i];
    std::vector<double> sv = singular_values(w.b);
    double smax = sv.empty() ? 0.0 : sv.front();
    w.sigma_min = sv.empty() ? 0.0 : sv.back();
    if (smax == 0.0 || w.sigma_min <= 1e-10 * smax)
        throw complement_degenerate("window columns of (lambda - T) plus complement at " +
                                    format_cx(lambda) + " are numerically dependent");
    w.gram_lu = lu_factor(gram(w.b));
    return w;
}

inline ResolventMap make_complement_family(Op t, std::vector<TailVec> mbasis, std::size_t n,
                                           Domain dom) {
    auto cache = std::make_shared<std::map<detail::CxKey, std::shared_ptr<ComplementWindow>>>();
    ResolventMap m;
    m.dom = std::move(dom);
    m.kind = ResolventKind::left;
    m.eval = [t = std::move(t), mbasis = std::move(mbasis), n, cache](
                 cx lambda, const BlockVec& x, double tol) -> BlockVec {
        auto it = cache->find(detail::key_of(lambda));
        if (it == cache->end()) {
            auto w = std::make_shared<ComplementWindow>(
                complement_window(t, mbasis, lambda, n, tol));
            it = cache->emplace(detail::key_of(lambda), std::move(w)).first;
        }
        if (x.parts() != 1) throw shape_error("complement family expects single-component vectors");
        return BlockVec::single(it->second->apply(x.part[0]));
    };
    return m;
}

// ---------------------------------------------------------------------------
// Generalized resolvent from a generalized inverse S0 of T by power series:
//   G(lambda) = -sum_{k >= 0} lambda^k S0^{k+1},
// convergent on |lambda| < 1 / ||S0||. The sign makes the two defining
// identities hold, which the scalar case pins down: for T = c invertible,
// S0 = 1/c, the sum is 1/(c - lambda) and G must be (lambda - c)^{-1}.
inline std::size_t neumann_term_budget(double q, double lead, double tol) {
    if (q <= 0.0) return 1;
    std::size_t m = 0;
    double rem = lead * q / (1.0 - q);
    while (rem > tol && m < 1000000) {
        rem *= q;
        ++m;
    }
    return m + 1;
}

inline ResolventMap neumann_generalized_resolvent(Op s0) {
    double nb = norm_bound(s0);
    double radius = nb > 0.0 ? 1.0 / nb : 1e18;
    ResolventMap m;
    m.dom = Domain::disk(cx{0.0, 0.0}, radius);
    m.kind = ResolventKind::generalized;
    m.eval = [s0 = std::move(s0), nb](cx lambda, const BlockVec& xb, double tol) -> BlockVec {
        if (xb.parts() != 1) throw shape_error("series resolvent expects single-component vectors");
        const TailVec& x = xb.part[0];
        double q = std::abs(lambda) * nb;
        TailVec term = apply(s0, x, tol);
        TailVec y = scaled(cx{-1.0, 0.0}, term);
        double mass = term.norm_upper();
        double coef = 1.0;
        for (std::size_t k = 1; k <= 2000000; ++k) {
            term = scaled(lambda, apply(s0, term, tol));
            if (term.support() == 0 && term.tail == 0.0) return BlockVec::single(std::move(y));
            y = sub(y, term);
            coef *= q;
            double remainder = mass * coef * q / (1.0 - q);
            if (remainder <= tol) {
                y.tail += remainder;
                return BlockVec::single(std::move(y));
            }
        }
        throw not_converged("generalized resolvent series did not reach tolerance");
    };
    return m;
}

// ---------------------------------------------------------------------------
// Residual checks. All distances include the certified tails, so a small
// reported residual really is a bound, not an optimistic sample.
struct ResidualReport {
    double max_residual = 0.0;
    std::size_t probes = 0;
    std::vector<std::pair<std::string, double>> parts;

    double part(const std::string& name) const {
        for (const auto& p : parts)
            if (p.first == name) return p.second;
        throw shape_error("no residual part named " + name);
    }
    void bump(const std::string& name, double v) {
        for (auto& p : parts)
            if (p.first == name) {
                p.second = std::max(p.second, v);
                max_residual = std::max(max_residual, v);
                return;
            }
        parts.emplace_back(name, v);
        max_residual = std::max(max_residual, v);
    }
};

// || L(lambda)((lambda - T) x) - x || over probes
inline ResidualReport residual_left_inverse(const ResolventMap& l, const Op& t, cx lambda,
                                            const std::vector<TailVec>& probes,
                                            double tol = 1e-12) {
    Op a_op = lambda_minus(lambda, t);
    ResidualReport rep;
    for (const TailVec& x : probes) {
        TailVec ax = apply(a_op, x, tol);
        TailVec lax = l(lambda, ax, tol);
        rep.bump("left-unit", distance_upper(lax, x));
        ++rep.probes;
    }
    return rep;
}

// || (lambda - T)(R(lambda) x) - x || over probes
inline ResidualReport residual_right_inverse(const ResolventMap& r, const Op& t, cx lambda,
                                             const std::vector<TailVec>& probes,
                                             double tol = 1e-12) {
    Op a_op = lambda_minus(lambda, t);
    ResidualReport rep;
    for (const TailVec& x : probes) {
        TailVec rx = r(lambda, x, tol);
        TailVec arx = apply(a_op, rx, tol);
        rep.bump("right-unit", distance_upper(arx, x));
        ++rep.probes;
    }
    return rep;
}

// First resolvent equation R(lambda) - R(mu) = (mu - lambda) R(lambda) R(mu),
// only meaningful with both points in one declared region.
inline ResidualReport residual_resolvent_identity(const ResolventMap& r, cx lambda, cx mu,
                                                  const std::vector<TailVec>& probes,
                                                  double tol = 1e-12) {
    int ri = r.dom.region_index(lambda), rj = r.dom.region_index(mu);
    if (ri < 0 || rj < 0)
        throw outside_domain("resolvent identity point outside the declared domain");
    if (ri != rj)
        throw domain_mismatch("resolvent identity needs both points in one declared region");
    ResidualReport rep;
    for (const TailVec& x : probes) {
        TailVec rl = r(lambda, x, tol);
        TailVec rm = r(mu, x, tol);
        TailVec rlm = r(lambda, rm, tol);
        TailVec lhs = sub(rl, rm);
        TailVec rhs = scaled(mu - lambda, rlm);
        rep.bump("resolvent-identity", distance_upper(lhs, rhs));
        ++rep.probes;
    }
    return rep;
}

// Both defining identities of a generalized resolvent, A = lambda - T:
//   inner: A G(lambda) A x == A x      outer: G(lambda) A G(lambda) x == G(lambda) x
inline ResidualReport residual_generalized_inverse(const ResolventMap& g, const Op& t, cx lambda,
                                                   const std::vector<TailVec>& probes,
                                                   double tol = 1e-12) {
    Op a_op = lambda_minus(lambda, t);
    ResidualReport rep;
    for (const TailVec& x : probes) {
        TailVec ax = apply(a_op, x, tol);
        TailVec gax = g(lambda, ax, tol);
        TailVec agax = apply(a_op, gax, tol);
        rep.bump("inner-identity", distance_upper(agax, ax));

        TailVec gx = g(lambda, x, tol);
        TailVec agx = apply(a_op, gx, tol);
        TailVec gagx = g(lambda, agx, tol);
        rep.bump("outer-identity", distance_upper(gagx, gx));
        ++rep.probes;
    }
    return rep;
}

// Derivative criterion for one-sided resolvents: d/dlambda L = -L^2, probed
// by symmetric-free forward differences in the directions 1 and i.
inline ResidualReport residual_derivative(const ResolventMap& l, cx lambda,
                                          const std::vector<TailVec>& probes, double step = 1e-4,
                                          double tol = 1e-12) {
    ResidualReport rep;
    for (cx dir : {cx{1.0, 0.0}, cx{0.0, 1.0}}) {
        cx h = step * dir;
        if (!l.dom.contains(lambda + h) ||
            l.dom.region_index(lambda + h) != l.dom.region_index(lambda))
            throw outside_domain("derivative step leaves the declared region");
        for (const TailVec& x : probes) {
            TailVec lx = l(lambda, x, tol);
            TailVec lhx = l(lambda + h, x, tol);
            TailVec fd = scaled(cx{1.0, 0.0} / h, sub(lhx, lx));
            TailVec llx = l(lambda, lx, tol);
            // derivative = -L^2, so fd + L^2 x should vanish to O(step)
            rep.bump(dir.real() != 0.0 ? "derivative-re" : "derivative-im",
                     distance_upper(fd, scaled(cx{-1.0, 0.0}, llx)));
        }
        rep.probes += probes.size();
    }
    return rep;
}

}  // namespace reslab
