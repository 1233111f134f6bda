#include "gwtail/poincare.hpp"

#include <cmath>

#include "gwtail/numerics.hpp"

namespace gwtail {

PoincareEvaluator::PoincareEvaluator(const PgfModel& model, const SpectralData& spectral,
                                     Options opts)
    : model_(&model), spectral_(&spectral), opts_(opts) {
    if (opts_.iterations < 1)
        throw ValidationError("poincare: iteration count must be >= 1");
    at_one_ = expansion_at_one(model, opts_.rational_series_degree);
    pow_E_.resize(std::size_t(opts_.iterations) + 1);
    pow_E_[0] = 1.0;
    for (int t = 1; t <= opts_.iterations; ++t)
        pow_E_[t] = pow_E_[t - 1] * spectral.perron;
}

cvec PoincareEvaluator::eval_core(cx z) const {
    const int n = model_->types();
    const double E = spectral_->perron;

    if (z.real() < 0.0) {
        bool allowed = false;
        if (opts_.angle_estimate) {
            const double limit = *opts_.angle_estimate - opts_.sector_margin;
            allowed = std::abs(std::arg(z)) < limit;
        }
        if (!allowed)
            throw NumericError("pi_eval: Re z < 0 outside the guarded sector");
    }

    cvec w(n);
    for (int i = 0; i < n; ++i) w[i] = z * spectral_->right_vec[i];

    cvec y(n), corr(n);
    for (int t = opts_.iterations - 1; t >= 0; --t) {
        const double Et = pow_E_[t];
        const double Einv = 1.0 / (Et * E);
        for (int i = 0; i < n; ++i) y[i] = w[i] * Einv;
        corr = remainder_at_one(*model_, at_one_, y);
        cvec ew(n);
        for (int i = 0; i < n; ++i)
            ew[i] = kahan_dot(spectral_->mean_matrix.row(i), w) / E - Et * corr[i];
        w = std::move(ew);
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag()))
                throw NumericError("pi_eval: overflow/NaN during iteration (z outside convergence region)");
    }
    cvec out(n);
    for (int i = 0; i < n; ++i) out[i] = 1.0 - w[i];
    return out;
}

cvec PoincareEvaluator::eval(cx z) const { return eval_core(z); }

cvec PoincareEvaluator::eval_lifted(cx z, int lifts) const {
    if (lifts < 0) throw ValidationError("pi_extend_large: lift count must be >= 0");
    const double E = spectral_->perron;
    cx zc = z;
    for (int k = 0; k < lifts; ++k) zc /= E;
    cvec w = eval_core(zc);
    for (int k = 0; k < lifts; ++k) w = model_->eval(w);
    return w;
}

cvec PoincareEvaluator::eval_auto(cx z) const {
    const double az = std::abs(z);
    if (az <= opts_.core_radius) return eval_core(z);
    const int k = int(std::ceil(std::log(az / opts_.core_radius) / spectral_->log_perron()));
    return eval_lifted(z, k);
}

std::vector<cvec> PoincareEvaluator::grid(const std::vector<cx>& points) const {
    std::vector<cvec> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            out[i] = eval_auto(points[i]);
        } catch (const std::exception& e) {
            throw NumericError("pi_grid: point #" + std::to_string(i) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace gwtail
