#pragma once

// Perron-Frobenius data of the expectation matrix and the eigendecomposition
// of the linearization at 0, plus the structured condition report.

#include <optional>
#include <string>

#include "gwtail/linalg.hpp"
#include "gwtail/model.hpp"
#include "gwtail/types.hpp"

namespace gwtail {

struct PerronData {
    double value = 0.0;  // spectral radius E > 1
    rvec left;           // a, scaled so a.b = 1
    rvec right;          // b, scaled by the adjugate convention
};

struct SpectralData {
    RMat mean_matrix;    // E
    double perron = 0.0;
    rvec left_vec;       // a
    rvec right_vec;      // b
    RMat m_matrix;       // M
    cvec mu;             // ascending modulus, conjugate pairs adjacent
    CMat c_matrix;       // M = C diag(mu) C^{-1}
    CMat c_inverse;
    cvec nu;             // -log(mu_i) / log(E)
    double cond_c = 0.0;
    std::vector<int> conj_perm;  // involution pairing conjugate eigenvalues

    double log_perron() const { return std::log(perron); }
    int size() const { return int(mu.size()); }
};

// Power iteration (tolerance 1e-14, <= 1e4 iterations) with two-sided
// Rayleigh refinement; a/b scale fixed by the adjugate of (E I - E_matrix):
// b = last column, a = first row rescaled so a.b = 1. This reproduces the
// closed forms used by the worked two-type family and gives a = b = 1 for
// the scalar case.
PerronData perron_data(const RMat& mean_matrix);

struct EigenDecomposition {
    cvec mu;
    CMat c;
    CMat c_inverse;
    double cond_c = 0.0;
    std::vector<int> conj_perm;
};

// Closed forms for N <= 2, characteristic-polynomial roots (Durand-Kerner)
// plus null-space extraction for N >= 3. Columns are unit-norm with the
// first significant entry rotated to the positive real axis; eigenvalues
// ascend in modulus with conjugate pairs adjacent (positive imaginary part
// first).
EigenDecomposition m_eigendecomposition(const RMat& m_matrix);

// Full spectral pipeline for a validated model.
SpectralData spectral_analyze(const PgfModel& model);

struct ConditionCheck {
    bool pass = false;
    std::string detail;
};

struct ConditionReport {
    ConditionCheck a, b, c, d;
    double perron = 0.0;
    rvec left_vec, right_vec;
    cvec mu;
    double d_margin = 0.0;   // |mu_1| - |mu_N|^2
    double cond_c = 0.0;
    std::optional<double> angle_estimate;
};

// Structured pass/fail per condition. (C) needs an angle estimate from the
// Julia-set module; without one it is reported as "estimate required".
ConditionReport check_conditions(const PgfModel& model,
                                 std::optional<double> angle_estimate = std::nullopt);

}  // namespace gwtail
