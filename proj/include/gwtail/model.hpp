#pragma once

// The offspring law: a vector of N probability generating functions given by
// finite coefficient tables, optionally with a rational (num/den) form for
// evaluation-only models.

#include <optional>
#include <string>
#include <vector>

#include "gwtail/linalg.hpp"
#include "gwtail/multi_index.hpp"
#include "gwtail/types.hpp"

namespace gwtail {

// Sparse multivariate polynomial with real coefficients.
struct PolyMap {
    int n = 0;
    int maxe = 0;
    std::vector<std::vector<int>> exps;
    rvec coefs;

    void add_term(const std::vector<int>& k, double c);
    cx eval(const cvec& z) const;
    double eval_real(const rvec& z) const;
    // d/dz_j at z, by term differentiation (exact).
    cx partial(int j, const cvec& z) const;
    bool empty() const { return coefs.empty(); }
};

struct RationalForm {
    PolyMap num;
    PolyMap den;
};

struct TypeLaw {
    PolyMap terms;                         // offspring probabilities p_i(k)
    std::optional<RationalForm> rational;  // evaluation-only closed form
};

class PgfModel {
public:
    // Builds and validates a polynomial (or mixed rational) model.
    static PgfModel create(int n, std::vector<TypeLaw> laws, double margin);
    // Test-harness escape hatch: no validation at all.
    static PgfModel unchecked(int n, std::vector<TypeLaw> laws, double margin);

    int types() const { return n_; }
    double margin() const { return margin_; }
    bool is_rational() const { return rational_; }
    const std::vector<TypeLaw>& laws() const { return laws_; }
    const std::string& hash() const { return hash_; }
    void set_hash(std::string h) { hash_ = std::move(h); }

    // P(z). Rational components use num/den; a denominator within 1e-14 of
    // zero raises NumericError.
    cvec eval(const cvec& z) const;
    // Same, but reports failure instead of throwing (escape-time loops).
    bool eval_noexcept(const cvec& z, cvec& out) const;

    // Jacobian dP_i/dz_j at an arbitrary real point (exact for both forms).
    RMat jacobian(const rvec& at) const;

private:
    void validate();

    int n_ = 0;
    double margin_ = 0.5;
    bool rational_ = false;
    std::vector<TypeLaw> laws_;
    std::string hash_;
};

// Local Taylor data of P at z=1 (in y, z = 1-y) or at z=0.
//   at one :  P(1-y) = 1 - E y + P1(y)
//   at zero:  P(y)   = M y + Q1(y)
// The remainder starts at total degree 2. For rational models the remainder
// is a truncated series valid near the expansion point; callers switch to
// direct evaluation for large arguments.
struct LocalExpansion {
    RMat linear;                     // E or M
    std::vector<PolyMap> higher;     // per-type remainder in y
    bool truncated = false;          // rational model: series remainder
    int truncation_degree = 0;

    // Evaluates the remainder for one type. For truncated expansions with
    // |y|_inf above `series_guard`, falls back to `direct` (supplied by the
    // caller as exact P-based evaluation).
    static constexpr double kSeriesGuard = 0.1;
};

LocalExpansion expansion_at_one(const PgfModel& model, int series_degree = 24);
LocalExpansion expansion_at_zero(const PgfModel& model, int series_degree = 24);

// P1(y) / Q1(y) evaluated for every type, choosing series or direct
// evaluation per the expansion's validity region.
cvec remainder_at_one(const PgfModel& model, const LocalExpansion& exp, const cvec& y);
cvec remainder_at_zero(const PgfModel& model, const LocalExpansion& exp, const cvec& y);

PgfModel load_model(const std::string& path);
PgfModel parse_model_json(const std::string& text);

// FNV-1a 64-bit over raw bytes, hex-encoded; provenance id for output files.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace gwtail
