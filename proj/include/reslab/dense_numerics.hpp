#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "reslab/dense.hpp"

namespace reslab {

struct SpectralEstimate {
    double value = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct SvdResult {
    std::vector<double> sigma;  // descending
    DenseMatrix V;              // right singular vectors, columns match sigma
};

// One-sided Jacobi SVD. Orthogonalizes column pairs with exact plane
// rotations, so small singular values come out with high relative accuracy,
// which LU or normal-equation routes lose on ill-conditioned windows. This is
// the oracle the iterative estimators are tested against.
inline SvdResult jacobi_svd(DenseMatrix a, bool want_v = true, int max_sweeps = 80) {
    if (a.rows() < a.cols()) {
        DenseMatrix padded(a.cols(), a.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) padded.at(i, j) = a.at(i, j);
        a = std::move(padded);
    }
    std::size_t m = a.rows(), n = a.cols();
    DenseMatrix v = want_v ? DenseMatrix::identity(n) : DenseMatrix();
    const double off_tol = 1e-15;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                cx g{0.0, 0.0};
                double alpha = 0.0, beta = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    cx cp = a.at(r, p), cq = a.at(r, q);
                    g += cp * std::conj(cq);
                    alpha += std::norm(cp);
                    beta += std::norm(cq);
                }
                double ag = std::abs(g);
                if (alpha == 0.0 || beta == 0.0 || ag <= off_tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                // Phase-align column q against p, then a real Jacobi rotation
                // zeroes the cross term of the 2x2 Gram block.
                cx phase = g / ag;
                double zeta = (beta - alpha) / (2.0 * ag);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double cs = 1.0 / std::sqrt(1.0 + t * t);
                double sn = cs * t;
                cx spq = sn * std::conj(phase);
                cx sqp = -sn * phase;
                for (std::size_t r = 0; r < m; ++r) {
                    cx cp = a.at(r, p), cq = a.at(r, q);
                    a.at(r, p) = cs * cp + sqp * cq;
                    a.at(r, q) = spq * cp + cs * cq;
                }
                if (want_v) {
                    for (std::size_t r = 0; r < n; ++r) {
                        cx cp = v.at(r, p), cq = v.at(r, q);
                        v.at(r, p) = cs * cp + sqp * cq;
                        v.at(r, q) = spq * cp + cs * cq;
                    }
                }
            }
        }
        if (!rotated) break;
    }
    SvdResult res;
    res.sigma.resize(n);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += std::norm(a.at(r, j));
        res.sigma[j] = std::sqrt(s);
        order[j] = j;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return res.sigma[x] > res.sigma[y]; });
    std::vector<double> sorted(n);
    DenseMatrix vs = want_v ? DenseMatrix(n, n) : DenseMatrix();
    for (std::size_t j = 0; j < n; ++j) {
        sorted[j] = res.sigma[order[j]];
        if (want_v)
            for (std::size_t r = 0; r < n; ++r) vs.at(r, j) = v.at(r, order[j]);
    }
    res.sigma = std::move(sorted);
    res.V = std::move(vs);
    return res;
}

inline std::vector<double> singular_values(const DenseMatrix& a) {
    return jacobi_svd(a, false).sigma;
}

// Largest singular value by power iteration on A^H A. Starts from all-ones;
// if that stalls (e.g. the start is orthogonal to the top space) a seeded
// random restart runs the second half of the budget.
inline SpectralEstimate norm2(const DenseMatrix& a, double tol = 1e-10,
                              std::size_t maxit = 10000) {
    std::size_t n = a.cols();
    SpectralEstimate est;
    if (n == 0 || a.rows() == 0) {
        est.converged = true;
        return est;
    }
    auto run = [&](std::vector<cx> v, std::size_t budget) {
        double nv = vec_norm(v);
        if (nv == 0.0) return;
        for (cx& z : v) z /= nv;
        double prev = -1.0;
        for (std::size_t it = 0; it < budget; ++it) {
            std::vector<cx> w = matvec(a, v);
            double s = vec_norm(w);
            ++est.iterations;
            if (s == 0.0) {
                est.value = 0.0;
                est.residual = 0.0;
                est.converged = true;
                return;
            }
            std::vector<cx> u = matvec_adj(a, w);
            double nu = vec_norm(u);
            if (prev >= 0.0 && std::abs(s - prev) <= tol * std::max(s, 1e-300)) {
                est.value = s;
                // residual of v as a singular-vector candidate: ||A^H A v - s^2 v||
                double r = 0.0;
                for (std::size_t i = 0; i < n; ++i) r += std::norm(u[i] - s * s * v[i]);
                est.residual = std::sqrt(r) / std::max(s * s, 1e-300);
                est.converged = true;
                return;
            }
            prev = s;
            est.value = s;
            if (nu == 0.0) {
                est.converged = true;
                est.value = s;
                return;
            }
            for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / nu;
        }
    };
    run(std::vector<cx>(n, cx{1.0, 0.0}), maxit / 2);
    if (!est.converged) {
        DetRng rng(0x5eedu);
        std::vector<cx> v(n);
        for (cx& z : v) z = rng.complex_symmetric();
        run(std::move(v), maxit - maxit / 2);
    }
    return est;
}

// Spectral radius via the norm limit of repeated squaring. Norms of A^(2^j)
// are tracked in log scale to dodge overflow, and the sequence
// log ||A^e||^(1/e) is Richardson-extrapolated over same-parity levels, which
// cancels the O(1/e) bias exactly for the periodic-weight operators the
// laboratory cares about. exponent_cap bounds the power used, which matters
// when the matrix is a corner of an infinite operator and high powers would
// see the artificial boundary.
inline SpectralEstimate spectral_radius(const DenseMatrix& a, double tol = 1e-6,
                                        std::size_t max_doublings = 40,
                                        double exponent_cap = 1e18) {
    if (a.rows() != a.cols()) throw shape_error("spectral_radius needs a square matrix");
    SpectralEstimate est;
    if (a.rows() == 0) {
        est.converged = true;
        return est;
    }
    DenseMatrix b = a;
    double logscale = 0.0;  // log of the factor pulled out of b so far
    double e = 1.0;         // current exponent: b * exp(logscale) == A^e
    std::vector<double> exps, ys, extr;
    for (std::size_t j = 0; j <= max_doublings; ++j) {
        double m = b.frob_norm();
        ++est.iterations;
        if (!std::isfinite(m)) throw not_converged("norm overflow in spectral_radius");
        if (m < 1e-300) {
            // A^e vanished: nilpotent at this exponent, radius is exactly 0.
            est.value = 0.0;
            est.residual = 0.0;
            est.converged = true;
            return est;
        }
        double y = (std::log(m) + logscale) / e;
        exps.push_back(e);
        ys.push_back(y);
        est.value = std::exp(y);
        if (ys.size() >= 3) {
            std::size_t i = ys.size() - 1;
            double r = (exps[i] * ys[i] - exps[i - 2] * ys[i - 2]) / (exps[i] - exps[i - 2]);
            extr.push_back(r);
            est.value = std::exp(r);
            if (extr.size() >= 2) {
                double prev = std::exp(extr[extr.size() - 2]);
                double diff = std::abs(est.value - prev);
                est.residual = diff / std::max(1.0, est.value);
                if (est.residual <= tol) {
                    est.converged = true;
                    return est;
                }
            }
        }
        if (2.0 * e > exponent_cap) return est;
        for (cx& z : b.data()) z /= m;
        b = matmul(b, b);
        logscale = 2.0 * (logscale + std::log(m));
        e *= 2.0;
    }
    return est;
}

// Smallest singular value by inverse iteration on the Gram matrix. Exact
// singularity (an LU pivot below the floor) reports 0. Accuracy degrades as
// the square of the condition number; callers needing tiny sigma on wild
// windows should go through gamma_min_modulus, which switches to Jacobi.
inline SpectralEstimate smallest_singular_value(const DenseMatrix& a, double tol = 1e-12,
                                                std::size_t maxit = 10000) {
    SpectralEstimate est;
    std::size_t n = a.cols();
    if (n == 0) {
        est.converged = true;
        return est;
    }
    DenseMatrix g = gram(a);
    LuFactors lu;
    try {
        lu = lu_factor(g);
    } catch (const singular_to_tolerance&) {
        est.value = 0.0;
        est.residual = 0.0;
        est.converged = true;
        return est;
    }
    std::vector<cx> v(n, cx{1.0, 0.0});
    double nv = vec_norm(v);
    for (cx& z : v) z /= nv;
    double rho = -1.0;
    for (std::size_t it = 0; it < maxit; ++it) {
        std::vector<cx> y = lu.solve(v);
        double ny = vec_norm(y);
        ++est.iterations;
        if (!std::isfinite(ny) || ny == 0.0) break;
        // G y = v  =>  Rayleigh quotient of y is <y, v> / ||y||^2
        double r = vec_dot(y, v).real() / (ny * ny);
        for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / ny;
        if (rho >= 0.0 && std::abs(r - rho) <= tol * std::max(r, 1e-300)) {
            rho = r;
            est.converged = true;
            break;
        }
        rho = r;
    }
    rho = std::max(rho, 0.0);
    est.value = std::sqrt(rho);
    std::vector<cx> gv = matvec(g, v);
    double rsd = 0.0;
    for (std::size_t i = 0; i < n; ++i) rsd += std::norm(gv[i] - rho * v[i]);
    est.residual = std::sqrt(rsd) / std::max(rho, 1e-300);
    return est;
}

struct GammaResult {
    double value = 0.0;      // smallest singular value above the rank cut
    double sigma_max = 0.0;
    std::size_t rank = 0;
    bool ambiguous_gap = false;  // some sigma within 10x of the cut
    bool rank_deficient = false;
};

// Reduced minimum modulus of a window: smallest singular value once
// rank-deficiency at rank_tol (relative to sigma_max) is discarded. Jacobi is
// used up to a generous size because the interesting windows are wildly
// scaled shift powers where only Jacobi keeps relative accuracy; genuinely
// large inputs fall back to norm2 + inverse iteration with deflation.
inline GammaResult gamma_min_modulus(const DenseMatrix& a, double rank_tol = 1e-9,
                                     std::size_t jacobi_limit = 384) {
    GammaResult res;
    std::size_t n = a.cols();
    if (n == 0) return res;
    if (n <= jacobi_limit) {
        std::vector<double> s = singular_values(a);
        res.sigma_max = s.empty() ? 0.0 : s.front();
        if (res.sigma_max == 0.0) return res;
        double cut = rank_tol * res.sigma_max;
        for (double sv : s) {
            if (sv > cut) {
                ++res.rank;
                res.value = sv;
            }
            if (sv > cut / 10.0 && sv < cut * 10.0) res.ambiguous_gap = true;
        }
        res.rank_deficient = res.rank < n;
        return res;
    }
    SpectralEstimate top = norm2(a);
    res.sigma_max = top.value;
    if (res.sigma_max == 0.0) return res;
    double cut = rank_tol * res.sigma_max;
    DenseMatrix g = gram(a);
    std::vector<std::vector<cx>> null_basis;
    for (int round = 0; round < 9; ++round) {
        LuFactors lu;
        bool exact_singular = false;
        try {
            lu = lu_factor(g);
        } catch (const singular_to_tolerance&) {
            exact_singular = true;
        }
        std::vector<cx> v(n, cx{1.0, 0.0});
        auto project = [&](std::vector<cx>& x) {
            for (const auto& b : null_basis) {
                cx c = vec_dot(x, b);
                for (std::size_t i = 0; i < n; ++i) x[i] -= c * b[i];
            }
        };
        double sigma = 0.0;
        if (!exact_singular) {
            project(v);
            double nv = vec_norm(v);
            if (nv == 0.0) break;
            for (cx& z : v) z /= nv;
            double rho = -1.0;
            for (std::size_t it = 0; it < 4000; ++it) {
                std::vector<cx> y = lu.solve(v);
                project(y);
                double ny = vec_norm(y);
                if (!std::isfinite(ny) || ny == 0.0) break;
                double r = vec_dot(y, v).real() / (ny * ny);
                for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / ny;
                if (rho >= 0.0 && std::abs(r - rho) <= 1e-12 * std::max(r, 1e-300)) {
                    rho = r;
                    break;
                }
                rho = r;
            }
            sigma = std::sqrt(std::max(rho, 0.0));
        }
        if (sigma > cut / 10.0 && sigma < cut * 10.0) res.ambiguous_gap = true;
        if (!exact_singular && sigma > cut) {
            res.value = sigma;
            res.rank = n - null_basis.size();
            res.rank_deficient = !null_basis.empty();
            return res;
        }
        res.rank_deficient = true;
        if (exact_singular) {
            // cannot extract a vector from a dead LU; give up on deflation
            break;
        }
        null_basis.push_back(v);
    }
    // deflation exhausted; last resort is the oracle itself
    std::vector<double> s = singular_values(a);
    res.sigma_max = s.empty() ? 0.0 : s.front();
    double cut2 = rank_tol * res.sigma_max;
    res.rank = 0;
    res.value = 0.0;
    for (double sv : s) {
        if (sv > cut2) {
            ++res.rank;
            res.value = sv;
        }
        if (sv > cut2 / 10.0 && sv < cut2 * 10.0) res.ambiguous_gap = true;
    }
    res.rank_deficient = res.rank < n;
    return res;
}

// Dense eigenvalues: Householder reduction to Hessenberg form followed by
// shifted QR with deflation. Intended as a cross-check oracle at n <= 64.
inline std::vector<cx> eig_oracle(DenseMatrix a, double tol = 1e-13) {
    if (a.rows() != a.cols()) throw shape_error("eig_oracle needs a square matrix");
    std::size_t n = a.rows();
    std::vector<cx> eigs;
    if (n == 0) return eigs;
    if (n == 1) return {a.at(0, 0)};

    // Hessenberg reduction
    for (std::size_t k = 0; k + 2 < n; ++k) {
        std::vector<cx> x(n - k - 1);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = a.at(k + 1 + i, k);
        double nx = vec_norm(x);
        if (nx == 0.0) continue;
        cx phase = x[0] != cx{0.0, 0.0} ? x[0] / std::abs(x[0]) : cx{1.0, 0.0};
        cx alpha = -phase * nx;
        x[0] -= alpha;
        double nv = vec_norm(x);
        if (nv < 1e-300) continue;
        for (cx& z : x) z /= nv;
        // rows k+1..n-1: A <- A - 2 v (v^H A)
        for (std::size_t j = 0; j < n; ++j) {
            cx s{0.0, 0.0};
            for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * a.at(k + 1 + i, j);
            s *= 2.0;
            for (std::size_t i = 0; i < x.size(); ++i) a.at(k + 1 + i, j) -= x[i] * s;
        }
        // cols k+1..n-1: A <- A - 2 (A v) v^H
        for (std::size_t i = 0; i < n; ++i) {
            cx s{0.0, 0.0};
            for (std::size_t j = 0; j < x.size(); ++j) s += a.at(i, k + 1 + j) * x[j];
            s *= 2.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                a.at(i, k + 1 + j) -= s * std::conj(x[j]);
        }
    }

    auto givens = [](cx f, cx g, cx& c, cx& s) {
        double af = std::abs(f), r = std::sqrt(std::norm(f) + std::norm(g));
        if (r == 0.0) {
            c = cx{1.0, 0.0};
            s = cx{0.0, 0.0};
            return;
        }
        if (af == 0.0) {
            c = cx{0.0, 0.0};
            s = std::conj(g) / std::abs(g);
            return;
        }
        c = cx{af / r, 0.0};
        s = (f / af) * std::conj(g) / r;
    };

    std::size_t hi = n;  // active block is rows/cols [0, hi)
    std::size_t total_iters = 0, budget = 40 * n * n + 200;
    while (hi > 0) {
        if (hi == 1) {
            eigs.push_back(a.at(0, 0));
            break;
        }
        // deflate converged subdiagonal entries from the bottom
        double splitmag =
            tol * (std::abs(a.at(hi - 1, hi - 1)) + std::abs(a.at(hi - 2, hi - 2)) + 1e-300);
        if (std::abs(a.at(hi - 1, hi - 2)) <= splitmag) {
            eigs.push_back(a.at(hi - 1, hi - 1));
            --hi;
            continue;
        }
        if (hi == 2) {
            cx p = a.at(0, 0), q = a.at(0, 1), r = a.at(1, 0), s2 = a.at(1, 1);
            cx tr = p + s2, disc = std::sqrt(tr * tr - 4.0 * (p * s2 - q * r));
            eigs.push_back((tr + disc) / 2.0);
            eigs.push_back((tr - disc) / 2.0);
            hi = 0;
            continue;
        }
        if (++total_iters > budget) throw not_converged("qr iteration exceeded its budget");
        // Wilkinson shift from the trailing 2x2
        cx p = a.at(hi - 2, hi - 2), q = a.at(hi - 2, hi - 1);
        cx r = a.at(hi - 1, hi - 2), s2 = a.at(hi - 1, hi - 1);
        cx tr = p + s2, disc = std::sqrt(tr * tr - 4.0 * (p * s2 - q * r));
        cx e1 = (tr + disc) / 2.0, e2 = (tr - disc) / 2.0;
        cx mu = (std::abs(e1 - s2) < std::abs(e2 - s2)) ? e1 : e2;
        if (total_iters % 16 == 0) mu += cx{0.5, 0.25} * std::abs(a.at(hi - 1, hi - 2));
        for (std::size_t i = 0; i < hi; ++i) a.at(i, i) -= mu;
        // QR by Givens on the Hessenberg band, then RQ
        std::vector<cx> cs(hi - 1), sn(hi - 1);
        for (std::size_t i = 0; i + 1 < hi; ++i) {
            givens(a.at(i, i), a.at(i + 1, i), cs[i], sn[i]);
            for (std::size_t j = i; j < hi; ++j) {
                cx t1 = a.at(i, j), t2 = a.at(i + 1, j);
                a.at(i, j) = cs[i] * t1 + sn[i] * t2;
                a.at(i + 1, j) = -std::conj(sn[i]) * t1 + cs[i] * t2;
            }
        }
        for (std::size_t i = 0; i + 1 < hi; ++i) {
            for (std::size_t row = 0; row <= std::min(i + 2, hi - 1); ++row) {
                cx t1 = a.at(row, i), t2 = a.at(row, i + 1);
                a.at(row, i) = t1 * std::conj(cs[i]) + t2 * std::conj(sn[i]);
                a.at(row, i + 1) = -t1 * sn[i] + t2 * std::conj(cs[i]);
            }
        }
        for (std::size_t i = 0; i < hi; ++i) a.at(i, i) += mu;
    }
    return eigs;
}

}  // namespace reslab
