#include "gwtail/special.hpp"

#include <cmath>
#include <numbers>

namespace gwtail {

namespace {

constexpr double kG = 607.0 / 128.0;

// Godfrey's Lanczos coefficients for g = 607/128, n = 15.
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

const double kLogSqrt2Pi = 0.91893853320467274178;

cx log_gamma_core(cx z) {
    // valid for Re z >= 0.5
    const cx zm1 = z - 1.0;
    cx sum = kLanczos[0];
    for (int k = 1; k < 15; ++k) sum += kLanczos[k] / (zm1 + double(k));
    const cx t = zm1 + kG + 0.5;
    return kLogSqrt2Pi + (zm1 + 0.5) * std::log(t) - t + std::log(sum);
}

// log(sin(w)) stable for large |Im w|; branch is irrelevant to callers.
cx log_sin(cx w) {
    const double im = w.imag();
    const cx i(0.0, 1.0);
    if (im > 20.0) {
        // sin w ~ e^{-iw} * i/2
        return -i * w + std::log(cx(0.0, 0.5));
    }
    if (im < -20.0) {
        return i * w + std::log(cx(0.0, -0.5));
    }
    return std::log(std::sin(w));
}

}  // namespace

cx log_gamma(cx z) {
    if (z.real() >= 0.5) return log_gamma_core(z);
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    const double pi = std::numbers::pi;
    return std::log(pi) - log_sin(pi * z) - log_gamma_core(1.0 - z);
}

RGamma rgamma_checked(cx z) {
    RGamma out;
    if (z.real() < 0.5 && std::abs(z.imag()) < 1e-12) {
        const double r = std::round(z.real());
        if (r <= 0.0 && std::abs(z.real() - r) < 1e-12) {
            out.pole = true;
            return out;
        }
    }
    out.log_gamma_value = log_gamma(z);
    return out;
}

}  // namespace gwtail
