#pragma once

// The multidimensional Schroeder function Phi (additive recurrence, tracked
// in the eigenbasis of M) and the Taylor coefficients psi_m of the inverse
// series Psi(z) = Phi^{-1}(C z), computed degree by degree from the
// functional equation Psi(diag(mu) z) = P(Psi(z)).

#include "gwtail/model.hpp"
#include "gwtail/multi_index.hpp"
#include "gwtail/spectral.hpp"
#include "gwtail/types.hpp"

namespace gwtail {

class PhiEvaluator {
public:
    PhiEvaluator(const PgfModel& model, const SpectralData& spectral,
                 int default_iterations = 250, int rational_series_degree = 24);

    // Phi_T(z); requires the P-iterates of z to contract into the unit ball.
    cvec eval(const cvec& z) const { return eval(z, default_iterations_); }
    cvec eval(const cvec& z, int iterations) const;

    const SpectralData& spectral() const { return *spectral_; }

private:
    const PgfModel* model_;
    const SpectralData* spectral_;
    int default_iterations_;
    LocalExpansion at_zero_;
};

// Scaled Taylor coefficients r^{|m|} psi_m, indexed by the enumerated set of
// multi-indices with total degree <= m_max.
struct TaylorTable {
    MultiIndexSet set;
    int types = 0;
    int m_max = 0;
    double r = 0.0;
    std::vector<cx> scaled;  // [id * types + component]

    const cx* coeff(int id) const { return &scaled[std::size_t(id) * types]; }
    double max_scaled_magnitude() const;
    // psi_m (unscaled) for one component; use only for small degrees.
    cx psi(int id, int component) const;
};

// Degree-by-degree recursion: (mu^m I - M) psi_m = [z^m] Q1(Psi_{<|m|}).
// r = 0 picks the scale automatically: start at 0.5 and halve until the
// largest scaled entry is below 1e6.
TaylorTable psi_coefficients(const PgfModel& model, const SpectralData& spectral,
                             int m_max, double r = 0.0);

// Truncated series sum, ascending by degree; z in the eigen coordinates.
cvec psi_eval_truncated(const TaylorTable& table, const cvec& z);

}  // namespace gwtail
