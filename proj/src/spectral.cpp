#include "gwtail/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace gwtail {

namespace {

double norm2(const rvec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const rvec& a, const rvec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

PerronData perron_data(const RMat& E) {
    const int n = E.n;
    if (n < 1) throw ValidationError("perron_data: empty matrix");
    double scale = 0.0;
    for (double v : E.a) {
        if (v <= 0.0)
            throw ValidationError("condition (B) violated: expectation matrix has a nonpositive entry");
        scale = std::max(scale, v);
    }

    PerronData out;
    if (n == 1) {
        out.value = E(0, 0);
        out.left = {1.0};
        out.right = {1.0};
        if (out.value <= 1.0)
            throw ValidationError("perron_data: Perron eigenvalue <= 1 (subcritical or critical input)");
        return out;
    }

    rvec b(n, 1.0), a(n, 1.0);
    RMat Et(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Et(i, j) = E(j, i);

    double lambda = scale;
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
        rvec bn = E.mul(b);
        rvec an = Et.mul(a);
        const double nb = norm2(bn), na = norm2(an);
        for (int i = 0; i < n; ++i) { bn[i] /= nb; an[i] /= na; }
        double db = 0.0, da = 0.0;
        for (int i = 0; i < n; ++i) {
            db = std::max(db, std::abs(bn[i] - b[i]));
            da = std::max(da, std::abs(an[i] - a[i]));
        }
        b = std::move(bn);
        a = std::move(an);
        if (db < 1e-14 && da < 1e-14) { converged = true; break; }
    }
    if (!converged)
        throw NumericError("perron_data: power iteration failed to converge in 1e4 iterations");
    // two-sided Rayleigh quotient
    lambda = dot(a, E.mul(b)) / dot(a, b);
    if (lambda <= 1.0)
        throw ValidationError("perron_data: Perron eigenvalue <= 1 (subcritical or critical input)");

    // Scale convention via the adjugate of (lambda I - E).
    RMat S(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = (i == j ? lambda : 0.0) - E(i, j);
    RMat adj = adjugate(S);
    rvec bv(n), av(n);
    for (int i = 0; i < n; ++i) {
        bv[i] = adj(i, n - 1);
        av[i] = adj(0, i);
    }
    int imax = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(bv[i]) > std::abs(bv[imax])) imax = i;
    if (bv[imax] < 0.0)
        for (int i = 0; i < n; ++i) { bv[i] = -bv[i]; av[i] = -av[i]; }
    for (int i = 0; i < n; ++i)
        if (bv[i] <= 0.0 || av[i] <= 0.0)
            throw NumericError("perron_data: eigenvector entries not strictly positive");
    const double s = dot(av, bv);
    for (int i = 0; i < n; ++i) av[i] /= s;

    out.value = lambda;
    out.left = std::move(av);
    out.right = std::move(bv);
    return out;
}

namespace {

void phase_normalize(cvec& v) {
    double nrm = 0.0;
    for (const cx& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    for (cx& x : v) x /= nrm;
    double vmax = 0.0;
    for (const cx& x : v) vmax = std::max(vmax, std::abs(x));
    for (const cx& x : v) {
        if (std::abs(x) > 1e-10 * vmax) {
            const cx phase = std::conj(x) / std::abs(x);
            for (cx& y : v) y *= phase;
            break;
        }
    }
    // real eigenvectors of real matrices: scrub roundoff imaginaries
    double im = 0.0;
    for (const cx& x : v) im = std::max(im, std::abs(x.imag()));
    if (im < 1e-12)
        for (cx& x : v) x = cx(x.real(), 0.0);
}

}  // namespace

EigenDecomposition m_eigendecomposition(const RMat& M) {
    const int n = M.n;
    double scale = 0.0;
    for (double v : M.a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw NumericError("m_eigendecomposition: zero matrix");

    cvec roots;
    if (n == 1) {
        roots = {cx(M(0, 0))};
    } else if (n == 2) {
        const double tr = M(0, 0) + M(1, 1);
        const double dt = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
        const double disc = tr * tr - 4.0 * dt;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            double r1 = (tr >= 0.0) ? (tr + sq) / 2.0 : (tr - sq) / 2.0;
            double r2 = (r1 != 0.0) ? dt / r1 : (tr - sq) / 2.0;
            roots = {cx(r1), cx(r2)};
        } else {
            const double im = std::sqrt(-disc) / 2.0;
            roots = {cx(tr / 2.0, im), cx(tr / 2.0, -im)};
        }
    } else {
        roots = poly_roots(char_poly(M));
    }

    // scrub tiny imaginary parts, then enforce exact conjugate pairing
    for (cx& r : roots)
        if (std::abs(r.imag()) < 1e-11 * scale) r = cx(r.real(), 0.0);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i] || roots[i].imag() <= 0.0) continue;
        std::size_t best = SIZE_MAX;
        double bestd = 1e300;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (j == i || used[j] || roots[j].imag() >= 0.0) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < bestd) { bestd = d; best = j; }
        }
        if (best == SIZE_MAX || bestd > 1e-8 * scale)
            throw NumericError("m_eigendecomposition: unpaired complex eigenvalue of a real matrix");
        const cx avg = (roots[i] + std::conj(roots[best])) / 2.0;
        roots[i] = avg;
        roots[best] = std::conj(avg);
        used[i] = used[best] = true;
    }

    // ascending modulus; conjugate pairs adjacent with +Im first
    std::sort(roots.begin(), roots.end(), [](const cx& x, const cx& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax < ay;
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() > y.imag();
    });

    for (const cx& r : roots)
        if (std::abs(r) < 1e-14 * scale)
            throw NumericError("condition (D) failure: eigenvalue of M numerically zero");

    // eigenvectors per multiplicity cluster
    CMat C(n);
    const double tol = 1e-10 * scale;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && std::abs(roots[j + 1] - roots[i]) <= tol) ++j;
        // cluster [i..j] of (numerically) equal eigenvalues
        int mult = j - i + 1;
        CMat A = M.to_complex();
        for (int d = 0; d < n; ++d) A(d, d) -= roots[i];
        std::vector<cvec> basis;
        try {
            basis = null_space(A, mult, tol);
        } catch (const NumericError&) {
            throw NumericError("condition (D) failure: M is defective (deficient eigenspace)");
        }
        for (int k = 0; k < mult; ++k) {
            phase_normalize(basis[k]);
            for (int d = 0; d < n; ++d) C(d, i + k) = basis[k][d];
        }
        i = j + 1;
    }

    // conjugate involution; copy conj columns for exact symmetry
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    for (int k = 0; k < n; ++k) {
        if (roots[k].imag() > 0.0 && k + 1 < n && roots[k + 1] == std::conj(roots[k])) {
            perm[k] = k + 1;
            perm[k + 1] = k;
            for (int d = 0; d < n; ++d) C(d, k + 1) = std::conj(C(d, k));
        }
    }

    EigenDecomposition out;
    out.mu = std::move(roots);
    out.c = C;
    out.c_inverse = invert(C);
    out.cond_c = cond_1(out.c, out.c_inverse);
    out.conj_perm = std::move(perm);
    if (out.cond_c > 1e8)
        throw NumericError("condition (D) failure: eigenvector matrix condition number above 1e8");

    // reconstruction residual
    CMat R(n);
    for (int r = 0; r < n; ++r)
        for (int c2 = 0; c2 < n; ++c2) {
            cx s = 0.0;
            for (int k = 0; k < n; ++k) s += out.c(r, k) * out.mu[k] * out.c_inverse(k, c2);
            R(r, c2) = s - M(r, c2);
        }
    double resid = 0.0;
    for (const cx& v : R.a) resid = std::max(resid, std::abs(v));
    if (resid > 1e-10 * std::max(1.0, scale))
        throw NumericError("m_eigendecomposition: reconstruction residual above 1e-10");
    return out;
}

SpectralData spectral_analyze(const PgfModel& model) {
    SpectralData sd;
    sd.mean_matrix = model.jacobian(rvec(model.types(), 1.0));
    PerronData pd = perron_data(sd.mean_matrix);
    sd.perron = pd.value;
    sd.left_vec = std::move(pd.left);
    sd.right_vec = std::move(pd.right);

    sd.m_matrix = model.jacobian(rvec(model.types(), 0.0));
    EigenDecomposition ed = m_eigendecomposition(sd.m_matrix);
    sd.mu = std::move(ed.mu);
    sd.c_matrix = std::move(ed.c);
    sd.c_inverse = std::move(ed.c_inverse);
    sd.cond_c = ed.cond_c;
    sd.conj_perm = std::move(ed.conj_perm);

    const double lnE = std::log(sd.perron);
    sd.nu.resize(sd.mu.size());
    for (std::size_t i = 0; i < sd.mu.size(); ++i) {
        sd.nu[i] = -std::log(sd.mu[i]) / lnE;
        if (sd.nu[i].real() <= 0.0)
            throw NumericError("spectral_analyze: Re nu <= 0 (|mu| >= 1?)");
    }
    return sd;
}

ConditionReport check_conditions(const PgfModel& model, std::optional<double> angle) {
    ConditionReport rep;

    // (A): structural validity was established at load; the analyticity
    // margin is the user's claim and is recorded, not verified.
    rep.a.pass = true;
    rep.a.detail = "Schroeder P(0)=0, normalization, nonlinearity hold; margin " +
                   std::to_string(model.margin()) + " recorded (not verified)";

    RMat E = model.jacobian(rvec(model.types(), 1.0));
    double min_entry = E.a.empty() ? 0.0 : E.a[0];
    for (double v : E.a) min_entry = std::min(min_entry, v);
    if (min_entry <= 0.0) {
        rep.b.pass = false;
        rep.b.detail = "expectation matrix has a nonpositive entry (min " +
                       std::to_string(min_entry) + ")";
    } else {
        try {
            PerronData pd = perron_data(E);
            rep.b.pass = true;
            rep.b.detail = "all entries positive; Perron eigenvalue " + std::to_string(pd.value);
            rep.perron = pd.value;
            rep.left_vec = pd.left;
            rep.right_vec = pd.right;
        } catch (const std::exception& e) {
            rep.b.pass = false;
            rep.b.detail = e.what();
        }
    }

    if (angle) {
        rep.angle_estimate = *angle;
        rep.c.pass = *angle > 1.5707963267948966;
        rep.c.detail = "critical angle estimate " + std::to_string(*angle) +
                       (rep.c.pass ? " > pi/2" : " <= pi/2");
    } else {
        rep.c.pass = false;
        rep.c.detail = "estimate from julia module required";
    }

    try {
        RMat M = model.jacobian(rvec(model.types(), 0.0));
        EigenDecomposition ed = m_eigendecomposition(M);
        rep.mu = ed.mu;
        rep.cond_c = ed.cond_c;
        const double mu1 = std::abs(ed.mu.front());
        const double muN = std::abs(ed.mu.back());
        rep.d_margin = mu1 - muN * muN;
        rep.d.pass = muN * muN > 0.0 && muN * muN < mu1;
        rep.d.detail = "|mu_N|^2 = " + std::to_string(muN * muN) +
                       (rep.d.pass ? " < " : " >= ") + "|mu_1| = " + std::to_string(mu1) +
                       "; cond(C) = " + std::to_string(ed.cond_c);
    } catch (const std::exception& e) {
        rep.d.pass = false;
        rep.d.detail = e.what();
    }
    return rep;
}

}  // namespace gwtail
