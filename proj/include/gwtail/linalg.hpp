#pragma once

// Dense helpers for the small (N <= ~8) matrices this project works with.
// Everything is deterministic: fixed pivoting rules, fixed iteration order.

#include <algorithm>
#include <cmath>
#include <span>

#include "gwtail/types.hpp"

namespace gwtail {

// Row-major square complex matrix.
struct CMat {
    int n = 0;
    cvec a;

    CMat() = default;
    explicit CMat(int n_) : n(n_), a(std::size_t(n_) * n_, cx(0.0)) {}

    cx& operator()(int i, int j) { return a[std::size_t(i) * n + j]; }
    const cx& operator()(int i, int j) const { return a[std::size_t(i) * n + j]; }

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    cvec mul(const cvec& v) const {
        cvec out(n, cx(0.0));
        for (int i = 0; i < n; ++i) {
            cx s = 0.0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    CMat mul(const CMat& b) const {
        CMat out(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const cx aik = (*this)(i, k);
                if (aik == cx(0.0)) continue;
                for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }
};

// Row-major square real matrix.
struct RMat {
    int n = 0;
    rvec a;

    RMat() = default;
    explicit RMat(int n_) : n(n_), a(std::size_t(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * n + j]; }
    const double& operator()(int i, int j) const { return a[std::size_t(i) * n + j]; }

    std::span<const double> row(int i) const { return {a.data() + std::size_t(i) * n, std::size_t(n)}; }

    rvec mul(const rvec& v) const {
        rvec out(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    cvec mul(const cvec& v) const {
        cvec out(n, cx(0.0));
        for (int i = 0; i < n; ++i) {
            cx s = 0.0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    RMat mul(const RMat& b) const {
        RMat out(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const double aik = (*this)(i, k);
                for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    CMat to_complex() const {
        CMat m(n);
        for (std::size_t i = 0; i < a.size(); ++i) m.a[i] = a[i];
        return m;
    }
};

// Solves A x = b by LU with partial pivoting; A is copied.
cvec lu_solve(CMat A, cvec b);

// Inverse via LU against the identity.
CMat invert(const CMat& A);

// 1-norm condition estimate: ||A||_1 * ||A^{-1}||_1.
double cond_1(const CMat& A, const CMat& Ainv);

double det(RMat A);

// Adjugate via cofactors; adj(A) * A = det(A) * I. For a 1x1 matrix returns [1].
RMat adjugate(const RMat& A);

// Characteristic polynomial coefficients c[0..n] with
// p(x) = c[n] x^n + ... + c[0], c[n] = 1 (Faddeev-LeVerrier).
rvec char_poly(const RMat& A);

// All roots of a monic polynomial (coefficients as above) by Durand-Kerner
// with deterministic starting points, followed by Newton polish.
cvec poly_roots(const rvec& coeffs);

// Null-space basis of A (complex), dimension `dim`, via Gaussian elimination
// with full pivoting. Throws NumericError if the numerical null space is
// smaller than requested.
std::vector<cvec> null_space(CMat A, int dim, double tol);

}  // namespace gwtail
