#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "reslab/base.hpp"

namespace reslab {

// Row-major complex dense matrix. Rectangular shapes are allowed; several
// window constructions are deliberately tall (more rows than columns).
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cx{0.0, 0.0}) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = cx{1.0, 0.0};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cx& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cx& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cx>& data() const { return a_; }
    std::vector<cx>& data() { return a_; }

    double frob_norm() const {
        double s = 0.0;
        for (const cx& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

    DenseMatrix adjoint() const {
        DenseMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m.at(j, i) = std::conj(at(i, j));
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cx> a_;
};

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw shape_error("matmul shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            cx aik = a.at(i, k);
            if (aik == cx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c.at(i, j) += aik * b.at(k, j);
        }
    }
    return c;
}

inline std::vector<cx> matvec(const DenseMatrix& a, const std::vector<cx>& x) {
    if (a.cols() != x.size()) throw shape_error("matvec shape mismatch");
    std::vector<cx> y(a.rows(), cx{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cx s{0.0, 0.0};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a.at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// y = A^H x without forming the adjoint.
inline std::vector<cx> matvec_adj(const DenseMatrix& a, const std::vector<cx>& x) {
    if (a.rows() != x.size()) throw shape_error("matvec_adj shape mismatch");
    std::vector<cx> y(a.cols(), cx{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cx xi = x[i];
        if (xi == cx{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += std::conj(a.at(i, j)) * xi;
    }
    return y;
}

inline DenseMatrix madd(const DenseMatrix& a, const DenseMatrix& b, cx beta = cx{1.0, 0.0}) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw shape_error("madd shape mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += beta * b.data()[i];
    return c;
}

inline DenseMatrix mscale(cx alpha, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (cx& z : c.data()) z *= alpha;
    return c;
}

inline double vec_norm(const std::vector<cx>& x) {
    double s = 0.0;
    for (const cx& z : x) s += std::norm(z);
    return std::sqrt(s);
}

inline cx vec_dot(const std::vector<cx>& x, const std::vector<cx>& y) {
    cx s{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::conj(y[i]);
    return s;
}

// LU with partial pivoting. Pivots below `pivot_floor` abort factorization:
// solve() on such data would amplify noise past any usable certificate.
struct LuFactors {
    DenseMatrix lu;
    std::vector<std::size_t> piv;
    int sign = 1;
    double min_pivot = 0.0;

    cx det() const {
        cx d{static_cast<double>(sign), 0.0};
        for (std::size_t i = 0; i < lu.rows(); ++i) d *= lu.at(i, i);
        return d;
    }

    std::vector<cx> solve(std::vector<cx> b) const {
        std::size_t n = lu.rows();
        if (b.size() != n) throw shape_error("lu solve size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (piv[i] != i) std::swap(b[i], b[piv[i]]);
            for (std::size_t j = 0; j < i; ++j) b[i] -= lu.at(i, j) * b[j];
        }
        for (std::size_t i = n; i > 0; --i) {
            std::size_t r = i - 1;
            for (std::size_t j = i; j < n; ++j) b[r] -= lu.at(r, j) * b[j];
            b[r] /= lu.at(r, r);
        }
        return b;
    }
};

inline LuFactors lu_factor(DenseMatrix a, double pivot_floor = 1e-300) {
    if (a.rows() != a.cols()) throw shape_error("lu_factor needs a square matrix");
    std::size_t n = a.rows();
    LuFactors f;
    f.piv.assign(n, 0);
    f.min_pivot = n ? std::abs(a.at(0, 0)) : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a.at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(a.at(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        f.piv[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
            f.sign = -f.sign;
        }
        double pv = std::abs(a.at(k, k));
        if (pv < f.min_pivot) f.min_pivot = pv;
        if (pv < pivot_floor)
            throw singular_to_tolerance("pivot " + format_short(pv) + " below floor at step " +
                                        std::to_string(k));
        for (std::size_t i = k + 1; i < n; ++i) {
            cx m = a.at(i, k) / a.at(k, k);
            a.at(i, k) = m;
            if (m == cx{0.0, 0.0}) continue;
            for (std::size_t j = k + 1; j < n; ++j) a.at(i, j) -= m * a.at(k, j);
        }
    }
    f.lu = std::move(a);
    return f;
}

// A^H A, exploiting contiguous column support to skip zero overlap. Column
// supports of shift-power windows are short intervals, so this is near-linear
// there while staying correct for general dense input.
inline DenseMatrix gram(const DenseMatrix& a) {
    std::size_t m = a.rows(), n = a.cols();
    std::vector<std::size_t> lo(n, m), hi(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (a.at(i, j) != cx{0.0, 0.0}) {
                if (lo[j] == m) lo[j] = i;
                hi[j] = i + 1;
            }
        }
    }
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            std::size_t s = std::max(lo[i], lo[j]);
            std::size_t e = std::min(hi[i], hi[j]);
            if (s >= e) continue;
            cx acc{0.0, 0.0};
            for (std::size_t r = s; r < e; ++r) acc += std::conj(a.at(r, i)) * a.at(r, j);
            g.at(i, j) = acc;
            if (i != j) g.at(j, i) = std::conj(acc);
        }
    }
    return g;
}

}  // namespace reslab
