#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "gwtail/types.hpp"

namespace gwtail {

// Pairwise (cascade) summation with a fixed recursion pattern. Used for all
// long reductions so results do not depend on thread count or chunking.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline cx pairwise_sum(std::span<const cx> v) {
    if (v.size() <= 8) {
        cx s = 0.0;
        for (const cx& x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Kahan-compensated dot product of a real matrix row with a complex vector.
inline cx kahan_dot(std::span<const double> row, std::span<const cx> v) {
    cx sum = 0.0, comp = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const cx term = row[j] * v[j] - comp;
        const cx t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return sum;
}

// Static-partition parallel loop over [0, n). Each index is processed exactly
// once by exactly one thread; outputs written per-index stay deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned max_threads = 0) {
    unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (n < 2 * hw || hw == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(hw);
    std::exception_ptr error;
    std::mutex error_mu;
    const std::size_t chunk = (n + hw - 1) / hw;
    for (unsigned t = 0; t < hw; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n); my /= double(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace gwtail
