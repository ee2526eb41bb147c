#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "reslab/dense.hpp"
#include "reslab/tail_vector.hpp"

namespace reslab {

// Eventually periodic scalar sequence, 1-based. Index n reads head[n-1] while
// inside the head, then cycles forever. This is the weight/diagonal data for
// the structured operators; sup_abs is exact, which keeps norm bounds honest.
class PeriodicSeq {
  public:
    PeriodicSeq() : cycle_{cx{0.0, 0.0}} {}
    PeriodicSeq(std::vector<cx> head, std::vector<cx> cycle)
        : head_(std::move(head)), cycle_(std::move(cycle)) {
        if (cycle_.empty()) throw shape_error("periodic sequence needs a nonempty cycle");
    }

    static PeriodicSeq constant(cx v) { return PeriodicSeq({}, {v}); }

    static PeriodicSeq from_reals(const std::vector<double>& head,
                                  const std::vector<double>& cycle) {
        std::vector<cx> h, c;
        for (double v : head) h.emplace_back(v, 0.0);
        for (double v : cycle) c.emplace_back(v, 0.0);
        return PeriodicSeq(std::move(h), std::move(c));
    }

    cx at(std::size_t n) const {
        if (n == 0) throw shape_error("sequence index is 1-based");
        if (n <= head_.size()) return head_[n - 1];
        return cycle_[(n - head_.size() - 1) % cycle_.size()];
    }

    double sup_abs() const {
        double s = 0.0;
        for (const cx& v : head_) s = std::max(s, std::abs(v));
        for (const cx& v : cycle_) s = std::max(s, std::abs(v));
        return s;
    }

    bool strictly_positive() const {
        for (const cx& v : head_)
            if (v.imag() != 0.0 || v.real() <= 0.0) return false;
        for (const cx& v : cycle_)
            if (v.imag() != 0.0 || v.real() <= 0.0) return false;
        return true;
    }

    const std::vector<cx>& head() const { return head_; }
    const std::vector<cx>& cycle() const { return cycle_; }

  private:
    std::vector<cx> head_;
    std::vector<cx> cycle_;
};

enum class NodeKind {
    identity,
    forward_shift,
    backward_shift,
    diagonal,
    rank_one,
    inner_functional,
    scalar_mul,
    sum,
    compose,
    geometric_inverse,
    direct_sum,
    block,
};

struct Node;
using Op = std::shared_ptr<const Node>;

// Expression node for operators on ell^2 and on finite direct sums of it.
// Instances are immutable; sharing subtrees is safe and encouraged.
struct Node {
    NodeKind kind{NodeKind::identity};
    PeriodicSeq seq;
    TailVec u, v;
    cx alpha{0.0, 0.0};
    std::vector<Op> kids;
    std::size_t brows = 0, bcols = 0;
    double nb = 0.0;  // certified upper bound on the operator norm
};

inline double norm_bound(const Op& op) { return op->nb; }

namespace detail {
inline std::shared_ptr<Node> make_node(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}
}  // namespace detail

inline Op identity() {
    auto n = detail::make_node(NodeKind::identity);
    n->nb = 1.0;
    return n;
}

// e_k -> w_k e_{k+1}
inline Op forward_shift(PeriodicSeq w) {
    auto n = detail::make_node(NodeKind::forward_shift);
    n->nb = w.sup_abs();
    n->seq = std::move(w);
    return n;
}
inline Op forward_shift() { return forward_shift(PeriodicSeq::constant(cx{1.0, 0.0})); }

// e_{k+1} -> w_k e_k, e_1 -> 0
inline Op backward_shift(PeriodicSeq w) {
    auto n = detail::make_node(NodeKind::backward_shift);
    n->nb = w.sup_abs();
    n->seq = std::move(w);
    return n;
}
inline Op backward_shift() { return backward_shift(PeriodicSeq::constant(cx{1.0, 0.0})); }

inline Op diagonal(PeriodicSeq d) {
    auto n = detail::make_node(NodeKind::diagonal);
    n->nb = d.sup_abs();
    n->seq = std::move(d);
    return n;
}

// x -> <x, v> u
inline Op rank_one(TailVec u, TailVec v) {
    auto n = detail::make_node(NodeKind::rank_one);
    n->nb = u.norm_upper() * v.norm_upper();
    n->u = std::move(u);
    n->v = std::move(v);
    return n;
}

// x -> <x, v> e_1 (a functional carried as an operator with range span{e_1})
inline Op inner_functional(TailVec v) {
    auto n = detail::make_node(NodeKind::inner_functional);
    n->nb = v.norm_upper();
    n->v = std::move(v);
    return n;
}

inline Op scalar_mul(cx alpha, Op child) {
    auto n = detail::make_node(NodeKind::scalar_mul);
    n->nb = std::abs(alpha) * child->nb;
    n->alpha = alpha;
    n->kids.push_back(std::move(child));
    return n;
}

inline Op op_sum(std::vector<Op> kids) {
    if (kids.empty()) throw shape_error("sum of zero operators");
    auto n = detail::make_node(NodeKind::sum);
    for (const Op& k : kids) n->nb += k->nb;
    n->kids = std::move(kids);
    return n;
}
inline Op op_sum(Op a, Op b) { return op_sum(std::vector<Op>{std::move(a), std::move(b)}); }

// compose(a, b) acts as a after b: x -> a(b(x)).
inline Op compose(std::vector<Op> kids) {
    if (kids.empty()) throw shape_error("composition of zero operators");
    auto n = detail::make_node(NodeKind::compose);
    n->nb = 1.0;
    for (const Op& k : kids) n->nb *= k->nb;
    n->kids = std::move(kids);
    return n;
}
inline Op compose(Op a, Op b) { return compose(std::vector<Op>{std::move(a), std::move(b)}); }

// (lambda*U - I)^{-1}, defined when |lambda| * norm_bound(U) < 1; the apply
// path sums the Neumann series -sum_k lambda^k U^k x with a certified tail.
inline Op geometric_inverse(cx lambda, Op contraction) {
    double q = std::abs(lambda) * contraction->nb;
    if (q >= 1.0)
        throw contractive_violation("geometric_inverse needs |lambda|*norm < 1, got " +
                                    format_short(q));
    auto n = detail::make_node(NodeKind::geometric_inverse);
    n->nb = 1.0 / (1.0 - q);
    n->alpha = lambda;
    n->kids.push_back(std::move(contraction));
    return n;
}

inline Op direct_sum(std::vector<Op> kids) {
    if (kids.empty()) throw shape_error("direct sum of zero operators");
    auto n = detail::make_node(NodeKind::direct_sum);
    n->nb = 0.0;
    for (const Op& k : kids) n->nb = std::max(n->nb, k->nb);
    n->brows = n->bcols = kids.size();
    n->kids = std::move(kids);
    return n;
}

// Row-major grid of scalar operators between direct sums; a null entry is a
// structural zero block. The norm bound is the Frobenius combination of the
// entry bounds, which is crude but certified.
inline Op block_op(std::size_t rows, std::size_t cols, std::vector<Op> grid) {
    if (grid.size() != rows * cols) throw shape_error("block grid has wrong size");
    auto n = detail::make_node(NodeKind::block);
    double s = 0.0;
    for (const Op& e : grid)
        if (e) s += e->nb * e->nb;
    n->nb = std::sqrt(s);
    n->brows = rows;
    n->bcols = cols;
    n->kids = std::move(grid);
    return n;
}

// Adjoint, rewritten to the leaves at construction so no adjoint node is ever
// applied. entry(adjoint(T), i, j) == conj(entry(T, j, i)) is a tested
// invariant, not an assumption.
inline Op adjoint(const Op& op) {
    switch (op->kind) {
        case NodeKind::identity:
            return op;
        case NodeKind::forward_shift: {
            std::vector<cx> h, c;
            for (const cx& z : op->seq.head()) h.push_back(std::conj(z));
            for (const cx& z : op->seq.cycle()) c.push_back(std::conj(z));
            return backward_shift(PeriodicSeq(std::move(h), std::move(c)));
        }
        case NodeKind::backward_shift: {
            std::vector<cx> h, c;
            for (const cx& z : op->seq.head()) h.push_back(std::conj(z));
            for (const cx& z : op->seq.cycle()) c.push_back(std::conj(z));
            return forward_shift(PeriodicSeq(std::move(h), std::move(c)));
        }
        case NodeKind::diagonal: {
            std::vector<cx> h, c;
            for (const cx& z : op->seq.head()) h.push_back(std::conj(z));
            for (const cx& z : op->seq.cycle()) c.push_back(std::conj(z));
            return diagonal(PeriodicSeq(std::move(h), std::move(c)));
        }
        case NodeKind::rank_one:
            return rank_one(op->v, op->u);
        case NodeKind::inner_functional:
            return rank_one(op->v, TailVec::basis(1));
        case NodeKind::scalar_mul:
            return scalar_mul(std::conj(op->alpha), adjoint(op->kids[0]));
        case NodeKind::sum: {
            std::vector<Op> ks;
            for (const Op& k : op->kids) ks.push_back(adjoint(k));
            return op_sum(std::move(ks));
        }
        case NodeKind::compose: {
            std::vector<Op> ks;
            for (auto it = op->kids.rbegin(); it != op->kids.rend(); ++it)
                ks.push_back(adjoint(*it));
            return compose(std::move(ks));
        }
        case NodeKind::geometric_inverse:
            return geometric_inverse(std::conj(op->alpha), adjoint(op->kids[0]));
        case NodeKind::direct_sum: {
            std::vector<Op> ks;
            for (const Op& k : op->kids) ks.push_back(adjoint(k));
            return direct_sum(std::move(ks));
        }
        case NodeKind::block: {
            std::vector<Op> grid(op->kids.size());
            for (std::size_t i = 0; i < op->brows; ++i)
                for (std::size_t j = 0; j < op->bcols; ++j) {
                    const Op& e = op->kids[i * op->bcols + j];
                    if (e) grid[j * op->brows + i] = adjoint(e);
                }
            return block_op(op->bcols, op->brows, std::move(grid));
        }
    }
    throw shape_error("unknown node kind in adjoint");
}

// lambda*I - X, shape-polymorphic (works for scalar and block operators).
inline Op lambda_minus(cx lambda, Op x) {
    return op_sum(scalar_mul(lambda, identity()), scalar_mul(cx{-1.0, 0.0}, std::move(x)));
}

inline Op op_power(const Op& op, unsigned k) {
    if (k == 0) return identity();
    std::vector<Op> kids(k, op);
    return k == 1 ? op : compose(std::move(kids));
}

BlockVec apply(const Op& op, const BlockVec& x, double tol);

namespace detail {

inline const TailVec& only_part(const BlockVec& x, const char* what) {
    if (x.parts() != 1) throw shape_error(std::string(what) + " expects a single-component vector");
    return x.part[0];
}

inline TailVec apply_forward(const PeriodicSeq& w, const TailVec& x) {
    TailVec y;
    if (!x.a.empty()) {
        y.a.assign(x.a.size() + 1, cx{0.0, 0.0});
        for (std::size_t k = 0; k < x.a.size(); ++k) y.a[k + 1] = w.at(k + 1) * x.a[k];
    }
    y.tail = w.sup_abs() * x.tail;
    return y;
}

inline TailVec apply_backward(const PeriodicSeq& w, const TailVec& x) {
    TailVec y;
    if (x.a.size() > 1) {
        y.a.assign(x.a.size() - 1, cx{0.0, 0.0});
        for (std::size_t k = 0; k + 1 < x.a.size(); ++k) y.a[k] = w.at(k + 1) * x.a[k + 1];
    }
    y.tail = w.sup_abs() * x.tail;
    return y;
}

inline TailVec apply_diagonal(const PeriodicSeq& d, const TailVec& x) {
    TailVec y = x;
    for (std::size_t k = 0; k < y.a.size(); ++k) y.a[k] *= d.at(k + 1);
    y.tail = d.sup_abs() * x.tail;
    return y;
}

inline TailVec apply_rank_one(const TailVec& u, const TailVec& v, const TailVec& x) {
    cx c = inner(x, v);
    double ec = inner_error_bound(x, v);
    TailVec y = scaled(c, u);
    y.tail += ec * u.norm_upper();
    return y;
}

inline TailVec apply_geometric(const Op& node, const TailVec& x, double tol) {
    const Op& c = node->kids[0];
    cx lambda = node->alpha;
    double q = std::abs(lambda) * c->nb;
    double mass = x.norm_upper();
    TailVec y = scaled(cx{-1.0, 0.0}, x);
    if (mass == 0.0) return y;
    TailVec t = x;
    double coef = 1.0;  // q^k at term k
    for (std::size_t k = 1; k <= 2000000; ++k) {
        BlockVec ct = apply(c, BlockVec::single(std::move(t)), tol);
        t = scaled(lambda, only_part(ct, "geometric_inverse"));
        if (t.support() == 0 && t.tail == 0.0) return y;  // series terminated exactly
        y = sub(y, t);
        coef *= q;
        double remainder = mass * coef * q / (1.0 - q);
        if (remainder <= tol) {
            y.tail += remainder;
            return y;
        }
    }
    throw not_converged("geometric series did not reach tolerance");
}

}  // namespace detail

// Evaluate op at x. tol bounds each internal series truncation in ell^2; all
// truncation and propagation error lands in the result's tail field, so the
// output is a certified enclosure rather than a bare approximation.
inline BlockVec apply(const Op& op, const BlockVec& x, double tol = 1e-14) {
    using detail::only_part;
    switch (op->kind) {
        case NodeKind::identity:
            return x;
        case NodeKind::forward_shift:
            return BlockVec::single(detail::apply_forward(op->seq, only_part(x, "forward_shift")));
        case NodeKind::backward_shift:
            return BlockVec::single(
                detail::apply_backward(op->seq, only_part(x, "backward_shift")));
        case NodeKind::diagonal:
            return BlockVec::single(detail::apply_diagonal(op->seq, only_part(x, "diagonal")));
        case NodeKind::rank_one:
            return BlockVec::single(
                detail::apply_rank_one(op->u, op->v, only_part(x, "rank_one")));
        case NodeKind::inner_functional:
            return BlockVec::single(
                detail::apply_rank_one(TailVec::basis(1), op->v, only_part(x, "inner_functional")));
        case NodeKind::scalar_mul: {
            BlockVec y = apply(op->kids[0], x, tol);
            return scaled(op->alpha, y);
        }
        case NodeKind::sum: {
            BlockVec y = apply(op->kids[0], x, tol);
            for (std::size_t i = 1; i < op->kids.size(); ++i)
                y = add(y, apply(op->kids[i], x, tol));
            return y;
        }
        case NodeKind::compose: {
            BlockVec y = x;
            for (auto it = op->kids.rbegin(); it != op->kids.rend(); ++it)
                y = apply(*it, y, tol);
            return y;
        }
        case NodeKind::geometric_inverse:
            return BlockVec::single(
                detail::apply_geometric(op, only_part(x, "geometric_inverse"), tol));
        case NodeKind::direct_sum: {
            if (x.parts() != op->kids.size())
                throw shape_error("direct_sum component count mismatch");
            BlockVec y;
            for (std::size_t i = 0; i < op->kids.size(); ++i) {
                BlockVec yi = apply(op->kids[i], BlockVec::single(x.part[i]), tol);
                y.part.push_back(only_part(yi, "direct_sum entry"));
            }
            return y;
        }
        case NodeKind::block: {
            if (x.parts() != op->bcols) throw shape_error("block column count mismatch");
            BlockVec y = BlockVec::zeros(op->brows);
            for (std::size_t i = 0; i < op->brows; ++i) {
                for (std::size_t j = 0; j < op->bcols; ++j) {
                    const Op& e = op->kids[i * op->bcols + j];
                    if (!e) continue;
                    BlockVec yij = apply(e, BlockVec::single(x.part[j]), tol);
                    y.part[i] = add(y.part[i], only_part(yij, "block entry"));
                }
            }
            return y;
        }
    }
    throw shape_error("unknown node kind in apply");
}

inline TailVec apply(const Op& op, const TailVec& x, double tol = 1e-14) {
    BlockVec y = apply(op, BlockVec::single(x), tol);
    return detail::only_part(y, "scalar apply");
}

inline TailVec apply_power(const Op& op, TailVec x, unsigned k, double tol = 1e-14) {
    for (unsigned i = 0; i < k; ++i) x = apply(op, x, tol);
    return x;
}

// Matrix entry <T e_j, e_i>, 1-based.
inline cx entry(const Op& op, std::size_t i, std::size_t j, double tol = 1e-14) {
    return apply(op, TailVec::basis(j), tol).coeff(i);
}

// Square window: columns are T e_j cut to the first n coordinates.
inline DenseMatrix truncate(const Op& op, std::size_t n, double tol = 1e-14) {
    DenseMatrix m(n, n);
    for (std::size_t j = 1; j <= n; ++j) {
        TailVec col = apply(op, TailVec::basis(j), tol);
        std::size_t rows = std::min<std::size_t>(n, col.a.size());
        for (std::size_t i = 0; i < rows; ++i) m.at(i, j - 1) = col.a[i];
    }
    return m;
}

struct Truncation {
    DenseMatrix matrix;
    double defect;  // max over columns of the ell^2 mass dropped by the cut
};

inline Truncation truncate_certified(const Op& op, std::size_t n, double tol = 1e-14) {
    Truncation t{DenseMatrix(n, n), 0.0};
    for (std::size_t j = 1; j <= n; ++j) {
        TailVec col = apply(op, TailVec::basis(j), tol);
        double dropped_sq = 0.0;
        for (std::size_t i = 0; i < col.a.size(); ++i) {
            if (i < n)
                t.matrix.at(i, j - 1) = col.a[i];
            else
                dropped_sq += std::norm(col.a[i]);
        }
        t.defect = std::max(t.defect, std::sqrt(dropped_sq) + col.tail);
    }
    return t;
}

// Rectangular window with exact columns: all of T e_j for j <= cols is kept,
// the row count adapting to the largest column support. Square truncation of
// a forward-shift power silently zeroes its last columns; this variant is
// what the kernel and gamma computations must use instead.
inline DenseMatrix column_window(const Op& op, std::size_t cols, double tol = 1e-14,
                                 std::size_t min_rows = 0) {
    std::vector<TailVec> col(cols);
    std::size_t rows = std::max(min_rows, cols);
    for (std::size_t j = 1; j <= cols; ++j) {
        col[j - 1] = apply(op, TailVec::basis(j), tol);
        rows = std::max(rows, col[j - 1].a.size());
    }
    DenseMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < col[j].a.size(); ++i) m.at(i, j) = col[j].a[i];
    return m;
}

// Window of a block operator: parts*n square, block (i,j) holds the window of
// grid entry (i,j). Works for any expression whose action is defined on
// `parts` components.
inline DenseMatrix truncate_block(const Op& op, std::size_t parts, std::size_t n,
                                  double tol = 1e-14) {
    DenseMatrix m(parts * n, parts * n);
    for (std::size_t j = 0; j < parts; ++j) {
        for (std::size_t k = 1; k <= n; ++k) {
            BlockVec col = apply(op, BlockVec::basis_in(j, k, parts), tol);
            if (col.parts() != parts) throw shape_error("block window shape mismatch");
            for (std::size_t i = 0; i < parts; ++i) {
                std::size_t rows = std::min<std::size_t>(n, col.part[i].a.size());
                for (std::size_t r = 0; r < rows; ++r)
                    m.at(i * n + r, j * n + (k - 1)) = col.part[i].a[r];
            }
        }
    }
    return m;
}

}  // namespace reslab
