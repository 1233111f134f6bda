#include "gwtail/schroder.hpp"

#include <algorithm>
#include <cmath>

namespace gwtail {

PhiEvaluator::PhiEvaluator(const PgfModel& model, const SpectralData& spectral,
                           int default_iterations, int rational_series_degree)
    : model_(&model), spectral_(&spectral), default_iterations_(default_iterations) {
    at_zero_ = expansion_at_zero(model, rational_series_degree);
}

cvec PhiEvaluator::eval(const cvec& z, int iterations) const {
    const int n = model_->types();
    cvec u = spectral_->c_inverse.mul(z);
    cvec w = z;
    double min_norm = inf_norm(w);
    bool contracted = min_norm < 1.0;

    for (int t = 0; t < iterations; ++t) {
        const cvec q = remainder_at_zero(*model_, at_zero_, w);
        const cvec cq = spectral_->c_inverse.mul(q);
        double max_corr = 0.0;
        for (int i = 0; i < n; ++i) {
            const cx factor = std::exp(-double(t + 1) * std::log(spectral_->mu[i]));
            const cx corr = cq[i] * factor;
            u[i] += corr;
            max_corr = std::max(max_corr, std::abs(corr));
        }
        if (max_corr > 1e8 * (1.0 + inf_norm(u)))
            throw NumericError("phi_eval: correction blow-up; condition (D) margin too small "
                               "for the requested iteration count");
        if (max_corr == 0.0) break;  // further steps contribute exact zeros
        w = model_->eval(w);
        const double nw = inf_norm(w);
        if (!std::isfinite(nw) || nw > 1e6)
            throw NumericError("phi_eval: iterates fail to contract (z outside J0)");
        min_norm = std::min(min_norm, nw);
        if (nw < 1.0) contracted = true;
        if (!contracted && t > 200)
            throw NumericError("phi_eval: iterates fail to contract (z outside J0)");
    }
    return spectral_->c_matrix.mul(u);
}

double TaylorTable::max_scaled_magnitude() const {
    double m = 0.0;
    for (const cx& v : scaled) m = std::max(m, std::abs(v));
    return m;
}

cx TaylorTable::psi(int id, int component) const {
    return scaled[std::size_t(id) * types + component] * std::pow(r, -set.degree(id));
}

namespace {

struct Pattern {
    std::vector<int> factors;        // type index per factor, degree >= 2 of them
    std::vector<std::vector<cx>> partial;  // partial[l]: series of first l+2 factors
};

// degree-d bucket of the product A*B accumulated into `out`
void convolve_bucket(const MultiIndexSet& set, const std::vector<cx>& A,
                     const std::vector<cx>& B, int d, int min_deg_a, int min_deg_b,
                     std::vector<cx>& out) {
    for (int da = min_deg_a; da <= d - min_deg_b; ++da) {
        const int db = d - da;
        for (int ia = set.degree_begin(da); ia < set.degree_end(da); ++ia) {
            const cx av = A[ia];
            if (av == cx(0.0)) continue;
            for (int ib = set.degree_begin(db); ib < set.degree_end(db); ++ib) {
                const cx bv = B[ib];
                if (bv == cx(0.0)) continue;
                out[set.sum_id(ia, ib)] += av * bv;
            }
        }
    }
}

TaylorTable build_table(const PgfModel& model, const SpectralData& spectral, int m_max,
                        double r) {
    const int n = model.types();
    TaylorTable table{MultiIndexSet(n, m_max), n, m_max, r, {}};
    const MultiIndexSet& set = table.set;
    table.scaled.assign(std::size_t(set.size()) * n, cx(0.0));

    // degree 1: psi_{e_j} = r * (column j of C)
    for (int j = 0; j < n; ++j) {
        const int id = set.unit_id(j);
        for (int i = 0; i < n; ++i)
            table.scaled[std::size_t(id) * n + i] = r * spectral.c_matrix(i, j);
    }

    // component series of Psi (scaled), one per type
    std::vector<std::vector<cx>> psi_series(n, std::vector<cx>(set.size(), cx(0.0)));
    auto sync_degree = [&](int d) {
        for (int id = set.degree_begin(d); id < set.degree_end(d); ++id)
            for (int i = 0; i < n; ++i)
                psi_series[i][id] = table.scaled[std::size_t(id) * n + i];
    };
    sync_degree(1);

    // offspring patterns of total degree >= 2, shared across types
    LocalExpansion at_zero = expansion_at_zero(model);
    std::vector<Pattern> patterns;
    std::vector<std::vector<std::pair<int, double>>> type_terms(n);  // (pattern idx, coeff)
    for (int i = 0; i < n; ++i) {
        const PolyMap& q1 = at_zero.higher[i];
        for (std::size_t t = 0; t < q1.coefs.size(); ++t) {
            const auto& k = q1.exps[t];
            int found = -1;
            for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
                std::vector<int> cnt(n, 0);
                for (int f : patterns[pi].factors) ++cnt[f];
                if (cnt == k) { found = int(pi); break; }
            }
            if (found < 0) {
                Pattern p;
                for (int j = 0; j < n; ++j)
                    for (int e = 0; e < k[j]; ++e) p.factors.push_back(j);
                p.partial.assign(p.factors.size() - 1,
                                 std::vector<cx>(set.size(), cx(0.0)));
                found = int(patterns.size());
                patterns.push_back(std::move(p));
            }
            type_terms[i].emplace_back(found, q1.coefs[t]);
        }
    }

    const CMat Mc = spectral.m_matrix.to_complex();
    for (int d = 2; d <= m_max; ++d) {
        // extend every partial product chain by its degree-d bucket
        for (Pattern& p : patterns) {
            for (std::size_t l = 0; l < p.partial.size(); ++l) {
                const std::vector<cx>& left =
                    (l == 0) ? psi_series[p.factors[0]] : p.partial[l - 1];
                const int min_left = int(l) + 1;  // product of l+1 unit-degree factors
                convolve_bucket(set, left, psi_series[p.factors[l + 1]], d, min_left, 1,
                                p.partial[l]);
            }
        }
        // solve (mu^m I - M) psi_m = [z^m] Q1(Psi) for every |m| = d
        for (int id = set.degree_begin(d); id < set.degree_end(d); ++id) {
            cvec rhs(n, cx(0.0));
            for (int i = 0; i < n; ++i)
                for (const auto& [pi, c] : type_terms[i])
                    rhs[i] += c * patterns[pi].partial.back()[id];

            cx mu_m = 1.0;
            for (int j = 0; j < n; ++j)
                for (int e = 0; e < set.entries(id)[j]; ++e) mu_m *= spectral.mu[j];
            for (int i = 0; i < n; ++i)
                if (std::abs(mu_m - spectral.mu[i]) < 1e-12 * std::abs(spectral.mu[i]))
                    throw NumericError("psi_coefficients: resonance |mu^m - mu_i| < 1e-12 |mu_i|");

            CMat A(n);
            for (int i2 = 0; i2 < n; ++i2) {
                for (int j2 = 0; j2 < n; ++j2) A(i2, j2) = -Mc(i2, j2);
                A(i2, i2) += mu_m;
            }
            cvec psi = lu_solve(std::move(A), std::move(rhs));
            for (int i = 0; i < n; ++i) table.scaled[std::size_t(id) * n + i] = psi[i];
        }
        sync_degree(d);
    }

    // structural conjugate symmetry when mu carries complex pairs
    bool nontrivial = false;
    for (int i = 0; i < n; ++i) nontrivial |= spectral.conj_perm[i] != i;
    if (nontrivial) {
        for (int id = 0; id < set.size(); ++id) {
            const int pid = set.permuted_id(id, spectral.conj_perm);
            if (pid > id)
                for (int i = 0; i < n; ++i)
                    table.scaled[std::size_t(pid) * n + i] =
                        std::conj(table.scaled[std::size_t(id) * n + i]);
        }
    }
    return table;
}

}  // namespace

TaylorTable psi_coefficients(const PgfModel& model, const SpectralData& spectral, int m_max,
                             double r) {
    if (model.is_rational())
        throw ValidationError("psi_coefficients: rational models are evaluation-only");
    if (m_max < 1) throw ValidationError("psi_coefficients: m_max must be >= 1");
    const double mu1 = std::abs(spectral.mu.front());
    const double muN = std::abs(spectral.mu.back());
    if (!(muN * muN > 0.0 && muN * muN < mu1))
        throw ValidationError("psi_coefficients: condition (D) violated");

    if (r > 0.0) return build_table(model, spectral, m_max, r);
    double rr = 0.5;
    for (int attempt = 0; attempt < 40; ++attempt) {
        TaylorTable t = build_table(model, spectral, m_max, rr);
        if (t.max_scaled_magnitude() < 1e6) return t;
        rr /= 2.0;
    }
    throw NumericError("psi_coefficients: no scale r stabilizes the table");
}

cvec psi_eval_truncated(const TaylorTable& table, const cvec& z) {
    const MultiIndexSet& set = table.set;
    const int n = table.types;
    // powers of z_j / r
    std::vector<cvec> pows(n, cvec(std::size_t(table.m_max) + 1, cx(1.0)));
    for (int j = 0; j < n; ++j) {
        const cx base = z[j] / table.r;
        for (int e = 1; e <= table.m_max; ++e) pows[j][e] = pows[j][e - 1] * base;
    }
    cvec out(n, cx(0.0));
    for (int d = 1; d <= table.m_max; ++d)
        for (int id = set.degree_begin(d); id < set.degree_end(d); ++id) {
            cx mono = 1.0;
            for (int j = 0; j < n; ++j) {
                const int e = set.entries(id)[j];
                if (e) mono *= pows[j][e];
            }
            if (mono == cx(0.0)) continue;
            for (int i = 0; i < n; ++i)
                out[i] += mono * table.scaled[std::size_t(id) * n + i];
        }
    return out;
}

}  // namespace gwtail
