#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwtail {

using cx = std::complex<double>;
using cvec = std::vector<cx>;
using rvec = std::vector<double>;

// Thrown when an input model or configuration violates a documented
// precondition; maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a computation leaves its reliable regime (overflow, failed
// contraction, resonance, ...); maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double inf_norm(const cvec& v) {
    double m = 0.0;
    for (const cx& x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double inf_norm(const rvec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace gwtail
