#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "reslab/base.hpp"

namespace reslab {

// Finitely represented vector in ell^2 plus a certified bound on the ell^2
// mass of everything beyond the stored coefficients. a[i] is the coefficient
// of basis vector e_{i+1} (coordinates are 1-based throughout the library).
struct TailVec {
    std::vector<cx> a;
    double tail = 0.0;

    TailVec() = default;
    explicit TailVec(std::vector<cx> coeffs, double tail_bound = 0.0)
        : a(std::move(coeffs)), tail(tail_bound) {}

    static TailVec zero() { return TailVec{}; }

    static TailVec basis(std::size_t k) {
        TailVec v;
        v.a.assign(k, cx{0.0, 0.0});
        v.a[k - 1] = cx{1.0, 0.0};
        return v;
    }

    cx coeff(std::size_t n) const {
        return (n >= 1 && n <= a.size()) ? a[n - 1] : cx{0.0, 0.0};
    }

    std::size_t len() const { return a.size(); }

    // Index of the last nonzero stored coefficient, 0 when none.
    std::size_t support() const {
        for (std::size_t i = a.size(); i > 0; --i)
            if (a[i - 1] != cx{0.0, 0.0}) return i;
        return 0;
    }

    double rep_norm_sq() const {
        double s = 0.0;
        for (const cx& c : a) s += std::norm(c);
        return s;
    }
    double rep_norm() const { return std::sqrt(rep_norm_sq()); }

    // Upper bound on the true ell^2 norm.
    double norm_upper() const { return std::sqrt(rep_norm_sq() + tail * tail); }

    TailVec& trim() {
        a.resize(support());
        return *this;
    }
};

inline TailVec add(const TailVec& x, const TailVec& y) {
    TailVec r;
    r.a.resize(std::max(x.a.size(), y.a.size()), cx{0.0, 0.0});
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i];
    for (std::size_t i = 0; i < y.a.size(); ++i) r.a[i] += y.a[i];
    r.tail = x.tail + y.tail;
    return r;
}

inline TailVec sub(const TailVec& x, const TailVec& y) {
    TailVec r;
    r.a.resize(std::max(x.a.size(), y.a.size()), cx{0.0, 0.0});
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i];
    for (std::size_t i = 0; i < y.a.size(); ++i) r.a[i] -= y.a[i];
    r.tail = x.tail + y.tail;
    return r;
}

inline TailVec scaled(cx alpha, const TailVec& x) {
    TailVec r = x;
    for (cx& c : r.a) c *= alpha;
    r.tail = std::abs(alpha) * x.tail;
    return r;
}

inline void axpy(cx alpha, const TailVec& x, TailVec& y) {
    if (y.a.size() < x.a.size()) y.a.resize(x.a.size(), cx{0.0, 0.0});
    for (std::size_t i = 0; i < x.a.size(); ++i) y.a[i] += alpha * x.a[i];
    y.tail += std::abs(alpha) * x.tail;
}

// <x, y> = sum x_i conj(y_i) over the represented parts.
inline cx inner(const TailVec& x, const TailVec& y) {
    cx s{0.0, 0.0};
    std::size_t n = std::min(x.a.size(), y.a.size());
    for (std::size_t i = 0; i < n; ++i) s += x.a[i] * std::conj(y.a[i]);
    return s;
}

// Bound on |<x,y>_true - <x,y>_represented| from the two tails.
inline double inner_error_bound(const TailVec& x, const TailVec& y) {
    return x.tail * y.norm_upper() + y.tail * x.rep_norm();
}

// Upper bound on ||x - y|| including both tails.
inline double distance_upper(const TailVec& x, const TailVec& y) {
    double s = 0.0;
    std::size_t n = std::max(x.a.size(), y.a.size());
    for (std::size_t i = 0; i < n; ++i) {
        cx xi = i < x.a.size() ? x.a[i] : cx{0.0, 0.0};
        cx yi = i < y.a.size() ? y.a[i] : cx{0.0, 0.0};
        s += std::norm(xi - yi);
    }
    return std::sqrt(s) + x.tail + y.tail;
}

inline bool eps_equal(const TailVec& x, const TailVec& y, double eps) {
    return distance_upper(x, y) <= eps;
}

inline TailVec normalized(const TailVec& x) {
    double n = x.rep_norm();
    if (n == 0.0) return x;
    return scaled(cx{1.0 / n, 0.0}, x);
}

// Vector in a finite direct sum of copies of ell^2.
struct BlockVec {
    std::vector<TailVec> part;

    BlockVec() = default;
    explicit BlockVec(std::vector<TailVec> parts) : part(std::move(parts)) {}

    static BlockVec single(TailVec v) {
        BlockVec b;
        b.part.push_back(std::move(v));
        return b;
    }

    static BlockVec zeros(std::size_t parts) {
        BlockVec b;
        b.part.resize(parts);
        return b;
    }

    // e_k placed in one slot, zeros elsewhere.
    static BlockVec basis_in(std::size_t slot, std::size_t k, std::size_t parts) {
        BlockVec b = zeros(parts);
        b.part[slot] = TailVec::basis(k);
        return b;
    }

    std::size_t parts() const { return part.size(); }

    double norm_upper() const {
        double s = 0.0, t = 0.0;
        for (const TailVec& p : part) {
            s += p.rep_norm_sq();
            t += p.tail;
        }
        return std::sqrt(s) + t;
    }
};

inline BlockVec add(const BlockVec& x, const BlockVec& y) {
    if (x.parts() != y.parts()) throw shape_error("block vector size mismatch in add");
    BlockVec r;
    r.part.reserve(x.parts());
    for (std::size_t i = 0; i < x.parts(); ++i) r.part.push_back(add(x.part[i], y.part[i]));
    return r;
}

inline BlockVec sub(const BlockVec& x, const BlockVec& y) {
    if (x.parts() != y.parts()) throw shape_error("block vector size mismatch in sub");
    BlockVec r;
    r.part.reserve(x.parts());
    for (std::size_t i = 0; i < x.parts(); ++i) r.part.push_back(sub(x.part[i], y.part[i]));
    return r;
}

inline BlockVec scaled(cx alpha, const BlockVec& x) {
    BlockVec r;
    r.part.reserve(x.parts());
    for (const TailVec& p : x.part) r.part.push_back(scaled(alpha, p));
    return r;
}

inline double distance_upper(const BlockVec& x, const BlockVec& y) {
    if (x.parts() != y.parts()) throw shape_error("block vector size mismatch in distance");
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < x.parts(); ++i) {
        std::size_t n = std::max(x.part[i].a.size(), y.part[i].a.size());
        for (std::size_t j = 0; j < n; ++j) {
            cx xi = j < x.part[i].a.size() ? x.part[i].a[j] : cx{0.0, 0.0};
            cx yi = j < y.part[i].a.size() ? y.part[i].a[j] : cx{0.0, 0.0};
            s += std::norm(xi - yi);
        }
        t += x.part[i].tail + y.part[i].tail;
    }
    return std::sqrt(s) + t;
}

// Deterministic probe sets used by every residual check: the first `count`
// basis vectors plus seeded random vectors of bounded support, normalized.
inline std::vector<TailVec> unit_probes(std::size_t count) {
    std::vector<TailVec> ps;
    ps.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) ps.push_back(TailVec::basis(k));
    return ps;
}

inline std::vector<TailVec> random_probes(std::size_t count, std::size_t support,
                                          std::uint64_t seed) {
    DetRng rng(seed);
    std::vector<TailVec> ps;
    ps.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<cx> c(support);
        for (cx& z : c) z = rng.complex_symmetric();
        ps.push_back(normalized(TailVec(std::move(c))));
    }
    return ps;
}

inline std::vector<TailVec> standard_probes(std::uint64_t seed) {
    std::vector<TailVec> ps = unit_probes(16);
    for (TailVec& p : random_probes(8, 12, seed)) ps.push_back(std::move(p));
    return ps;
}

// Block probes: every basis probe in every slot, a seeded random vector per
// slot, and a few probes with mass in all slots at once.
inline std::vector<BlockVec> block_probes(std::size_t parts, std::uint64_t seed,
                                          std::size_t basis_count = 8) {
    std::vector<BlockVec> ps;
    for (std::size_t s = 0; s < parts; ++s)
        for (std::size_t k = 1; k <= basis_count; ++k)
            ps.push_back(BlockVec::basis_in(s, k, parts));
    DetRng rng(seed);
    for (std::size_t s = 0; s < parts; ++s) {
        BlockVec b = BlockVec::zeros(parts);
        std::vector<cx> c(10);
        for (cx& z : c) z = rng.complex_symmetric();
        b.part[s] = normalized(TailVec(std::move(c)));
        ps.push_back(std::move(b));
    }
    for (int t = 0; t < 4; ++t) {
        BlockVec b = BlockVec::zeros(parts);
        for (std::size_t s = 0; s < parts; ++s) {
            std::vector<cx> c(6);
            for (cx& z : c) z = rng.complex_symmetric();
            b.part[s] = TailVec(std::move(c));
        }
        double n = 0.0;
        for (const TailVec& p : b.part) n += p.rep_norm_sq();
        n = std::sqrt(n);
        if (n > 0.0)
            for (TailVec& p : b.part) p = scaled(cx{1.0 / n, 0.0}, p);
        ps.push_back(std::move(b));
    }
    return ps;
}

}  // namespace reslab
