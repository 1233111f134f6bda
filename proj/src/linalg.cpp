#include "gwtail/linalg.hpp"

#include <cmath>
#include <numbers>

namespace gwtail {

cvec lu_solve(CMat A, cvec b) {
    const int n = A.n;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(A(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) throw NumericError("lu_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const cx f = A(i, k) / A(k, k);
            A(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        cx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
        b[i] = s / A(i, i);
    }
    return b;
}

CMat invert(const CMat& A) {
    const int n = A.n;
    CMat inv(n);
    for (int col = 0; col < n; ++col) {
        cvec e(n, cx(0.0));
        e[col] = 1.0;
        cvec x = lu_solve(A, std::move(e));
        for (int i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

static double norm_1(const CMat& A) {
    double best = 0.0;
    for (int j = 0; j < A.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < A.n; ++i) s += std::abs(A(i, j));
        best = std::max(best, s);
    }
    return best;
}

double cond_1(const CMat& A, const CMat& Ainv) {
    return norm_1(A) * norm_1(Ainv);
}

double det(RMat A) {
    const int n = A.n;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(A(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            d = -d;
        }
        d *= A(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return d;
}

RMat adjugate(const RMat& A) {
    const int n = A.n;
    RMat adj(n);
    if (n == 1) {
        adj(0, 0) = 1.0;
        return adj;
    }
    RMat minor(n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int mi = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                int mj = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(mi, mj) = A(r, c);
                    ++mj;
                }
                ++mi;
            }
            const double cof = (((i + j) & 1) ? -1.0 : 1.0) * det(minor);
            adj(j, i) = cof;  // transpose of the cofactor matrix
        }
    return adj;
}

rvec char_poly(const RMat& A) {
    const int n = A.n;
    rvec c(std::size_t(n) + 1, 0.0);
    c[n] = 1.0;
    RMat M(n);  // starts at zero
    for (int k = 1; k <= n; ++k) {
        // M <- A*M + c[n-k+1]*I
        RMat AM = A.mul(M);
        if (k > 1)
            for (int i = 0; i < n; ++i) AM(i, i) += c[n - k + 1];
        else
            AM = A;
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += AM(i, i);
        c[n - k] = -tr / double(k);
        M = AM;
    }
    return c;
}

cvec poly_roots(const rvec& coeffs) {
    const int deg = int(coeffs.size()) - 1;
    if (deg <= 0) return {};
    if (deg == 1) return {cx(-coeffs[0] / coeffs[1])};

    // scale estimate for starting circle
    double radius = 0.0;
    for (int i = 0; i < deg; ++i)
        radius = std::max(radius, std::pow(std::abs(coeffs[i]), 1.0 / double(deg - i)));
    radius = std::max(radius, 1e-6) * 1.2;

    auto eval = [&](cx z) {
        cx p = coeffs[deg];
        for (int i = deg - 1; i >= 0; --i) p = p * z + coeffs[i];
        return p;
    };
    auto eval_d = [&](cx z) {
        cx p = coeffs[deg] * double(deg);
        for (int i = deg - 1; i >= 1; --i) p = p * z + coeffs[i] * double(i);
        return p;
    };

    cvec roots(deg);
    const cx seed = std::polar(1.0, 0.9);  // irrational-ish angle avoids symmetry locks
    cx w = std::polar(radius, 0.35);
    for (int i = 0; i < deg; ++i) {
        roots[i] = w;
        w *= seed;
    }
    for (int it = 0; it < 600; ++it) {
        double delta = 0.0;
        for (int i = 0; i < deg; ++i) {
            cx denom = coeffs[deg];
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            if (denom == cx(0.0)) denom = 1e-300;
            const cx step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = std::max(delta, std::abs(step));
        }
        if (delta < 1e-15 * radius) break;
    }
    // Newton polish
    for (int i = 0; i < deg; ++i) {
        for (int it = 0; it < 4; ++it) {
            const cx d = eval_d(roots[i]);
            if (std::abs(d) == 0.0) break;
            roots[i] -= eval(roots[i]) / d;
        }
    }
    return roots;
}

std::vector<cvec> null_space(CMat A, int dim, double tol) {
    const int n = A.n;
    std::vector<int> col_of(n);
    for (int i = 0; i < n; ++i) col_of[i] = i;

    int rank = 0;
    std::vector<int> pivot_col;
    for (int k = 0; k < n; ++k) {
        // full pivoting
        int pr = -1, pc = -1;
        double best = tol;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                const double v = std::abs(A(i, j));
                if (v > best) { best = v; pr = i; pc = j; }
            }
        if (pr < 0) break;
        if (pr != k)
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(pr, j));
        if (pc != k) {
            for (int i = 0; i < n; ++i) std::swap(A(i, k), A(i, pc));
            std::swap(col_of[k], col_of[pc]);
        }
        for (int i = k + 1; i < n; ++i) {
            const cx f = A(i, k) / A(k, k);
            A(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
        pivot_col.push_back(k);
        ++rank;
    }

    const int free_count = n - rank;
    if (free_count < dim)
        throw NumericError("null_space: requested dimension exceeds numerical null space");

    std::vector<cvec> basis;
    for (int f = 0; f < dim; ++f) {
        const int free_idx = rank + f;  // permuted column index of the free variable
        cvec xp(n, cx(0.0));            // solution in permuted coordinates
        xp[free_idx] = 1.0;
        for (int i = rank - 1; i >= 0; --i) {
            cx s = 0.0;
            for (int j = i + 1; j < n; ++j) s += A(i, j) * xp[j];
            xp[i] = -s / A(i, i);
        }
        cvec x(n, cx(0.0));
        for (int j = 0; j < n; ++j) x[col_of[j]] = xp[j];
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace gwtail
