#pragma once

// Evaluation of the Poincare-type function Pi(z) = lim P^t(1 - z E^{-t} b)
// on (and near) the right half-plane.
//
// The naive composition starts from 1 - (tiny) and dies in binary64; instead
// we compose the conjugated maps backwards,
//     w <- E^{-1} E_matrix w - E^t P1(E^{-t-1} w),   t = T-1 .. 0,
// starting from w = z b, and return 1 - w. Each correction term is
// O(E^{-t}) so the recursion is well conditioned.

#include "gwtail/model.hpp"
#include "gwtail/spectral.hpp"
#include "gwtail/types.hpp"

namespace gwtail {

class PoincareEvaluator {
public:
    struct Options {
        int iterations = 64;        // T
        double core_radius = 10.0;  // |z| beyond this lifts through P(Pi(z/E^k))
        int rational_series_degree = 24;
        double sector_margin = 0.0;         // allow Re z < 0 inside |arg z| < angle-margin
        std::optional<double> angle_estimate;  // enables the sector guard
    };

    PoincareEvaluator(const PgfModel& model, const SpectralData& spectral,
                      Options opts = {});

    // Pi(z b) by backward composition. Re z >= 0 unless an angle estimate
    // admits part of the left half-plane.
    cvec eval(cx z) const;

    // Analytic continuation through the functional equation:
    // P applied k times to eval(z / E^k).
    cvec eval_lifted(cx z, int lifts) const;

    // eval with automatic lifting for |z| > core_radius.
    cvec eval_auto(cx z) const;

    // Elementwise eval_auto, parallel over points, bitwise equal to the
    // sequential loop. Failures carry the point index.
    std::vector<cvec> grid(const std::vector<cx>& points) const;

    int iterations() const { return opts_.iterations; }
    const SpectralData& spectral() const { return *spectral_; }
    const PgfModel& model() const { return *model_; }

private:
    cvec eval_core(cx z) const;

    const PgfModel* model_;
    const SpectralData* spectral_;
    Options opts_;
    LocalExpansion at_one_;
    rvec pow_E_;  // E^t, t = 0..T
};

}  // namespace gwtail
