#pragma once

#include <utility>

#include "reslab/resolvent.hpp"

namespace reslab {

// Upper triangular 3x3 operator
//   T = [ Tr  A   B  ]
//       [ 0   T0  C  ]
//       [ 0   0   Tl ]
// where lambda - Tr is right invertible, lambda - T0 invertible and
// lambda - Tl left invertible on the shared domain. From one-sided resolvents
// of the diagonal a generalized resolvent of T is assembled in closed form.
struct TriangularSystem {
    Op tr, t0, tl;      // diagonal blocks
    Op a, b, c;         // couplings (null = structural zero)
    ResolventMap rr;    // right resolvent of tr
    ResolventMap r0;    // two-sided resolvent of t0
    ResolventMap ll;    // left resolvent of tl
    Domain dom;         // declared joint domain
};

inline Op triangular_operator(const TriangularSystem& s) {
    std::vector<Op> grid(9);
    grid[0] = s.tr;
    grid[1] = s.a;
    grid[2] = s.b;
    grid[4] = s.t0;
    grid[5] = s.c;
    grid[8] = s.tl;
    return block_op(3, 3, std::move(grid));
}

// Inverting lambda - T flips the sign of every coupling block, so
// G(lambda) = [ Rr   Rr A R0   Rr (A R0 C + B) Ll ]
//             [ 0    R0        R0 C Ll            ]
//             [ 0    0         Ll                 ]
inline ResolventMap assemble_generalized(const TriangularSystem& s) {
    ResolventMap m;
    m.dom = s.dom;
    m.kind = ResolventKind::generalized;
    m.parts = 3;
    m.eval = [s](cx lambda, const BlockVec& x, double tol) -> BlockVec {
        if (x.parts() != 3) throw shape_error("triangular resolvent expects 3 components");
        const TailVec& x0 = x.part[0];
        const TailVec& x1 = x.part[1];
        const TailVec& x2 = x.part[2];
        TailVec w = s.ll(lambda, x2, tol);
        TailVec y2 = w;
        TailVec y1 = s.r0(lambda, x1, tol);
        if (s.c) {
            TailVec cw = apply(s.c, w, tol);
            y1 = add(y1, s.r0(lambda, cw, tol));
        }
        TailVec y0 = s.rr(lambda, x0, tol);
        if (s.a) {
            TailVec r0x1 = s.r0(lambda, x1, tol);
            y0 = add(y0, s.rr(lambda, apply(s.a, r0x1, tol), tol));
            if (s.c) {
                TailVec r0cw = s.r0(lambda, apply(s.c, w, tol), tol);
                y0 = add(y0, s.rr(lambda, apply(s.a, r0cw, tol), tol));
            }
        }
        if (s.b) y0 = add(y0, s.rr(lambda, apply(s.b, w, tol), tol));
        BlockVec y;
        y.part = {std::move(y0), std::move(y1), std::move(y2)};
        return y;
    };
    return m;
}

// P(lambda) = (lambda - T) G(lambda) and Q(lambda) = G(lambda) (lambda - T)
// as actions; the defining algebra gives P(lambda) P(mu) = P(lambda) and
// Q(lambda) Q(mu) = Q(mu) on a connected region.
struct TriangularCalculus {
    Op top;             // the assembled 3x3 operator
    ResolventMap g;
    Domain dom;

    BlockVec p(cx lambda, const BlockVec& x, double tol = 1e-12) const {
        return apply(lambda_minus(lambda, top), g(lambda, x, tol), tol);
    }
    BlockVec q(cx lambda, const BlockVec& x, double tol = 1e-12) const {
        return g(lambda, apply(lambda_minus(lambda, top), x, tol), tol);
    }
};

inline TriangularCalculus make_calculus(const TriangularSystem& s) {
    return TriangularCalculus{triangular_operator(s), assemble_generalized(s), s.dom};
}

inline ResidualReport projection_residuals(const TriangularCalculus& calc, cx lambda, cx mu,
                                           const std::vector<BlockVec>& probes,
                                           double tol = 1e-12) {
    int ri = calc.dom.region_index(lambda), rj = calc.dom.region_index(mu);
    if (ri < 0 || rj < 0) throw outside_domain("projection check point outside domain");
    if (ri != rj) throw domain_mismatch("projection check needs one region");
    ResidualReport rep;
    for (const BlockVec& x : probes) {
        BlockVec pm = calc.p(mu, x, tol);
        BlockVec ppm = calc.p(lambda, pm, tol);
        BlockVec pl = calc.p(lambda, x, tol);
        rep.bump("p-chain", distance_upper(ppm, pl));

        BlockVec qm = calc.q(mu, x, tol);
        BlockVec qqm = calc.q(lambda, qm, tol);
        rep.bump("q-chain", distance_upper(qqm, qm));

        BlockVec pp = calc.p(lambda, pl, tol);
        rep.bump("p-idempotent", distance_upper(pp, pl));
        ++rep.probes;
    }
    return rep;
}

// Generalized-inverse identities for the assembled map, block edition.
inline ResidualReport triangular_identity_residuals(const TriangularCalculus& calc, cx lambda,
                                                    const std::vector<BlockVec>& probes,
                                                    double tol = 1e-12) {
    Op a_op = lambda_minus(lambda, calc.top);
    ResidualReport rep;
    for (const BlockVec& x : probes) {
        BlockVec ax = apply(a_op, x, tol);
        BlockVec gax = calc.g(lambda, ax, tol);
        BlockVec agax = apply(a_op, gax, tol);
        rep.bump("inner-identity", distance_upper(agax, ax));

        BlockVec gx = calc.g(lambda, x, tol);
        BlockVec agx = apply(a_op, gx, tol);
        BlockVec gagx = calc.g(lambda, agx, tol);
        rep.bump("outer-identity", distance_upper(gagx, gx));
        ++rep.probes;
    }
    return rep;
}

// Numerical ranks of the windows of P(lambda) and of (lambda - T) agree, and
// Q annihilates exactly the kernel directions of (lambda - T).
struct RankComparison {
    std::size_t rank_p = 0;
    std::size_t rank_a = 0;
    double q_on_kernel = 0.0;     // ||Q v|| on the supplied kernel candidate
    double q_nonzero_floor = 0.0; // min ||Q e_j|| over basis probes off the kernel
};

// Rectangular window of a block action: all parts*n columns are kept exactly,
// each slot getting as many rows as its largest column support. Square
// per-block cuts would fabricate rank drops for forward-shift blocks.
inline DenseMatrix action_window_rect(const std::function<BlockVec(const BlockVec&)>& act,
                                      std::size_t parts, std::size_t n) {
    std::vector<std::vector<TailVec>> cols;
    std::vector<std::size_t> slot_rows(parts, n);
    for (std::size_t j = 0; j < parts; ++j) {
        for (std::size_t k = 1; k <= n; ++k) {
            BlockVec col = act(BlockVec::basis_in(j, k, parts));
            if (col.parts() != parts) throw shape_error("action window shape mismatch");
            for (std::size_t i = 0; i < parts; ++i)
                slot_rows[i] = std::max(slot_rows[i], col.part[i].a.size());
            cols.push_back(std::move(col.part));
        }
    }
    std::vector<std::size_t> offset(parts, 0);
    std::size_t total_rows = 0;
    for (std::size_t i = 0; i < parts; ++i) {
        offset[i] = total_rows;
        total_rows += slot_rows[i];
    }
    DenseMatrix m(total_rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < parts; ++i)
            for (std::size_t r = 0; r < cols[j][i].a.size(); ++r)
                m.at(offset[i] + r, j) = cols[j][i].a[r];
    return m;
}

inline RankComparison compare_ranks(const TriangularCalculus& calc, cx lambda, std::size_t n,
                                    const BlockVec& kernel_candidate, double rank_tol = 1e-9,
                                    double tol = 1e-12) {
    DenseMatrix pw = action_window_rect(
        [&](const BlockVec& v) { return calc.p(lambda, v, tol); }, 3, n);
    Op a_op = lambda_minus(lambda, calc.top);
    DenseMatrix aw = action_window_rect(
        [&](const BlockVec& v) { return apply(a_op, v, tol); }, 3, n);
    RankComparison rc;
    rc.rank_p = gamma_min_modulus(pw, rank_tol).rank;
    rc.rank_a = gamma_min_modulus(aw, rank_tol).rank;
    rc.q_on_kernel = calc.q(lambda, kernel_candidate, tol).norm_upper();
    bool first = true;
    for (std::size_t slot = 0; slot < 3; ++slot) {
        for (std::size_t k = 2; k <= 6; ++k) {  // e_1 can graze the kernel, start at e_2
            BlockVec e = BlockVec::basis_in(slot, k, 3);
            double nq = calc.q(lambda, e, tol).norm_upper();
            if (first || nq < rc.q_nonzero_floor) rc.q_nonzero_floor = nq;
            first = false;
        }
    }
    return rc;
}

// ---------------------------------------------------------------------------
// Ready-made example system: backward shift | scalar t0 | forward shift, with
// optional rank-one couplings, on disk |lambda| < 0.9 plus an outer annulus
// where all three diagonal resolvents are genuine two-sided inverses.
inline ResolventMap shift_right_resolvent_family(Domain dom) {
    Op u = forward_shift();
    Op bs = backward_shift();
    ResolventMap m;
    m.dom = std::move(dom);
    m.kind = ResolventKind::right;
    m.eval = [u, bs](cx lambda, const BlockVec& x, double tol) -> BlockVec {
        if (std::abs(lambda) < 1.0) {
            // right inverse of (lambda - backward): (lambda U - I)^{-1} U
            return apply(compose(geometric_inverse(lambda, u), u), x, tol);
        }
        // |lambda| > 1: true resolvent of the backward shift
        cx inv = cx{1.0, 0.0} / lambda;
        return scaled(-inv, apply(geometric_inverse(inv, bs), x, tol));
    };
    return m;
}

inline ResolventMap shift_left_resolvent_family(Domain dom) {
    Op u = forward_shift();
    Op bs = backward_shift();
    ResolventMap m;
    m.dom = std::move(dom);
    m.kind = ResolventKind::left;
    m.eval = [u, bs](cx lambda, const BlockVec& x, double tol) -> BlockVec {
        if (std::abs(lambda) < 1.0) {
            // left inverse of (lambda - forward): (lambda B - I)^{-1} B
            return apply(compose(geometric_inverse(lambda, bs), bs), x, tol);
        }
        cx inv = cx{1.0, 0.0} / lambda;
        return scaled(-inv, apply(geometric_inverse(inv, u), x, tol));
    };
    return m;
}

inline ResolventMap scalar_resolvent_family(cx t0, Domain dom) {
    ResolventMap m;
    m.dom = std::move(dom);
    m.kind = ResolventKind::two_sided;
    m.eval = [t0](cx lambda, const BlockVec& x, double) -> BlockVec {
        return scaled(cx{1.0, 0.0} / (lambda - t0), x);
    };
    return m;
}

inline TriangularSystem example_triangular(bool coupled, cx t0 = cx{2.0, 0.0}) {
    Domain dom = Domain::disk(cx{0.0, 0.0}, 0.9).also(Region::annulus(3.0, 1e9));
    TriangularSystem s;
    s.tr = backward_shift();
    s.t0 = diagonal(PeriodicSeq::constant(t0));
    s.tl = forward_shift();
    if (coupled) {
        s.a = scalar_mul(cx{0.4, 0.0}, rank_one(TailVec::basis(1), TailVec::basis(1)));
        s.b = scalar_mul(cx{0.25, 0.1}, rank_one(TailVec::basis(2), TailVec::basis(1)));
        s.c = scalar_mul(cx{0.5, 0.0}, rank_one(TailVec::basis(1), TailVec::basis(3)));
    }
    s.rr = shift_right_resolvent_family(dom);
    s.r0 = scalar_resolvent_family(t0, dom);
    s.ll = shift_left_resolvent_family(dom);
    s.dom = dom;
    return s;
}

}  // namespace reslab
