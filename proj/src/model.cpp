#include "gwtail/model.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace gwtail {

namespace {

// Dense truncated multivariate series over an enumerated index set.
struct Series {
    const MultiIndexSet* set;
    rvec c;

    explicit Series(const MultiIndexSet& s) : set(&s), c(s.size(), 0.0) {}
};

Series to_series(const PolyMap& p, const MultiIndexSet& set) {
    Series s(set);
    for (std::size_t t = 0; t < p.coefs.size(); ++t) {
        const int id = set.find(p.exps[t]);
        if (id >= 0) s.c[id] += p.coefs[t];
        // terms above the cap are dropped: callers only use the series
        // inside its validity guard where those contribute O(|y|^{cap+1})
    }
    return s;
}

// q = num / den as truncated series; den constant term must be nonzero.
Series divide_series(const Series& num, const PolyMap& den, const MultiIndexSet& set) {
    // constant coefficient of den
    double d0 = 0.0;
    std::vector<std::pair<int, double>> den_terms;  // id != 0 only
    for (std::size_t t = 0; t < den.coefs.size(); ++t) {
        const int id = set.find(den.exps[t]);
        if (id < 0) continue;
        if (id == 0)
            d0 += den.coefs[t];
        else
            den_terms.emplace_back(id, den.coefs[t]);
    }
    if (std::abs(d0) < 1e-14)
        throw ValidationError("rational form: denominator vanishes at the expansion point");
    Series q(set);
    for (int id = 0; id < set.size(); ++id) {
        double acc = num.c[id];
        for (const auto& [did, dc] : den_terms) {
            // a = id - did componentwise, if representable
            std::vector<int> diff(set.components());
            bool ok = true;
            for (int j = 0; j < set.components(); ++j) {
                diff[j] = set.entries(id)[j] - set.entries(did)[j];
                if (diff[j] < 0) { ok = false; break; }
            }
            if (!ok) continue;
            const int aid = set.find(diff);
            acc -= dc * q.c[aid];
        }
        q.c[id] = acc / d0;
    }
    return q;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// Expands p(1-y) as a polynomial in y (exact binomial arithmetic).
PolyMap shift_to_one(const PolyMap& p) {
    const int n = p.n;
    std::unordered_map<std::uint64_t, double> acc;
    std::unordered_map<std::uint64_t, std::vector<int>> reps;
    std::vector<int> a(n, 0);
    for (std::size_t t = 0; t < p.coefs.size(); ++t) {
        const std::vector<int>& k = p.exps[t];
        // iterate all a <= k componentwise
        std::fill(a.begin(), a.end(), 0);
        while (true) {
            double c = p.coefs[t];
            int deg_a = 0;
            for (int j = 0; j < n; ++j) {
                c *= binom(k[j], a[j]);
                deg_a += a[j];
            }
            if (deg_a & 1) c = -c;
            const std::uint64_t key = MultiIndexSet::pack(a);
            acc[key] += c;
            reps.emplace(key, a);
            int j = 0;
            while (j < n && a[j] == k[j]) a[j++] = 0;
            if (j == n) break;
            ++a[j];
        }
    }
    PolyMap out;
    out.n = n;
    for (const auto& [key, c] : acc) {
        if (c == 0.0) continue;
        out.add_term(reps.at(key), c);
    }
    return out;
}

}  // namespace

void PolyMap::add_term(const std::vector<int>& k, double c) {
    n = int(k.size());
    exps.push_back(k);
    coefs.push_back(c);
    for (int e : k) maxe = std::max(maxe, e);
}

// Cached per-component power tables; the table is rebuilt per call but the
// buffer is reused, so evaluation allocates nothing in steady state.
cx PolyMap::eval(const cvec& z) const {
    thread_local std::vector<cx> pow_buf;
    pow_buf.assign(std::size_t(n) * (maxe + 1), cx(1.0));
    for (int j = 0; j < n; ++j)
        for (int e = 1; e <= maxe; ++e)
            pow_buf[std::size_t(j) * (maxe + 1) + e] = pow_buf[std::size_t(j) * (maxe + 1) + e - 1] * z[j];
    cx sum = 0.0, comp = 0.0;
    for (std::size_t t = 0; t < coefs.size(); ++t) {
        cx mono = coefs[t];
        for (int j = 0; j < n; ++j) {
            const int e = exps[t][j];
            if (e) mono *= pow_buf[std::size_t(j) * (maxe + 1) + e];
        }
        const cx term = mono - comp;
        const cx tt = sum + term;
        comp = (tt - sum) - term;
        sum = tt;
    }
    return sum;
}

double PolyMap::eval_real(const rvec& z) const {
    cvec zz(z.begin(), z.end());
    return eval(zz).real();
}

cx PolyMap::partial(int j, const cvec& z) const {
    cx sum = 0.0;
    for (std::size_t t = 0; t < coefs.size(); ++t) {
        const int e = exps[t][j];
        if (e == 0) continue;
        cx mono = coefs[t] * double(e);
        for (int l = 0; l < n; ++l) {
            int p = exps[t][l] - (l == j ? 1 : 0);
            for (int i = 0; i < p; ++i) mono *= z[l];
        }
        sum += mono;
    }
    return sum;
}

PgfModel PgfModel::create(int n, std::vector<TypeLaw> laws, double margin) {
    PgfModel m = unchecked(n, std::move(laws), margin);
    m.validate();
    return m;
}

PgfModel PgfModel::unchecked(int n, std::vector<TypeLaw> laws, double margin) {
    PgfModel m;
    m.n_ = n;
    m.margin_ = margin;
    m.laws_ = std::move(laws);
    for (const auto& law : m.laws_)
        if (law.rational) m.rational_ = true;
    return m;
}

void PgfModel::validate() {
    if (n_ < 1 || n_ > MultiIndexSet::kMaxComponents)
        throw ValidationError("model: N out of supported range [1,8]");
    if (int(laws_.size()) != n_)
        throw ValidationError("model: types array length does not match N");
    if (!(margin_ > 0.0))
        throw ValidationError("condition (A) violated: analyticity margin must be positive");

    for (int i = 0; i < n_; ++i) {
        TypeLaw& law = laws_[i];
        if (law.terms.empty() && !law.rational)
            throw ValidationError("model: type " + std::to_string(i + 1) +
                                  " has neither terms nor rational form");
        if (!law.terms.empty()) {
            std::unordered_set<std::uint64_t> seen;
            double sum = 0.0;
            std::size_t largest = 0;
            bool nonlinear = false;
            for (std::size_t t = 0; t < law.terms.coefs.size(); ++t) {
                const auto& k = law.terms.exps[t];
                const double p = law.terms.coefs[t];
                if (int(k.size()) != n_)
                    throw ValidationError("model: exponent vector length mismatch");
                int deg = 0;
                for (int e : k) {
                    if (e < 0) throw ValidationError("model: negative exponent");
                    deg += e;
                }
                if (!seen.insert(MultiIndexSet::pack(k)).second)
                    throw ValidationError("model: duplicate exponent vector in type " +
                                          std::to_string(i + 1));
                if (deg == 0 && p != 0.0)
                    throw ValidationError("Schroeder condition violated: p_" +
                                          std::to_string(i + 1) + "(0) = " + std::to_string(p) +
                                          " must be 0");
                if (p < 0.0)
                    throw ValidationError("model: negative probability in type " +
                                          std::to_string(i + 1));
                if (p >= 1.0)
                    throw ValidationError("condition p_i(k) < 1 violated in type " +
                                          std::to_string(i + 1));
                if (deg >= 2) nonlinear = true;
                sum += p;
                if (p > law.terms.coefs[largest]) largest = t;
            }
            const double residual = 1.0 - sum;
            if (std::abs(residual) > 1e-12)
                throw ValidationError("normalization violated: type " + std::to_string(i + 1) +
                                      " probabilities sum to " + std::to_string(sum));
            law.terms.coefs[largest] += residual;  // repair rounded decimals
            if (!nonlinear && !law.rational)
                throw ValidationError("non-linearity condition violated: P_" +
                                      std::to_string(i + 1) + " is linear");
        }
        if (law.rational) {
            // Schroeder: P_i(0) = 0 requires num(0) = 0 and den(0) != 0.
            cvec zero(n_, cx(0.0));
            if (std::abs(law.rational->num.eval(zero)) > 1e-14)
                throw ValidationError("Schroeder condition violated: rational numerator of type " +
                                      std::to_string(i + 1) + " has a constant term");
            if (std::abs(law.rational->den.eval(zero)) < 1e-12)
                throw ValidationError("rational form: denominator of type " +
                                      std::to_string(i + 1) + " vanishes at 0");
            // P_i(1) = 1
            cvec ones(n_, cx(1.0));
            const cx nv = law.rational->num.eval(ones);
            const cx dv = law.rational->den.eval(ones);
            if (std::abs(dv) < 1e-12 || std::abs(nv / dv - 1.0) > 1e-10)
                throw ValidationError("normalization violated: rational P_" +
                                      std::to_string(i + 1) + "(1) != 1");
            // Sampled nonvanishing check of den on the closed unit polydisc.
            for (int s = 0; s < 256; ++s) {
                cvec z(n_);
                for (int j = 0; j < n_; ++j) {
                    const double phi = 2.0 * 3.14159265358979323846 *
                                       std::fmod(0.6180339887498949 * (s * n_ + j + 1), 1.0);
                    const double rad = (s & 1) ? 1.0 : double(s % 97) / 96.0;
                    z[j] = std::polar(rad, phi);
                }
                if (std::abs(law.rational->den.eval(z)) < 1e-9)
                    throw ValidationError("rational form: denominator of type " +
                                          std::to_string(i + 1) +
                                          " is numerically zero inside the unit polydisc");
            }
        }
    }
}

cvec PgfModel::eval(const cvec& z) const {
    cvec out(n_);
    for (int i = 0; i < n_; ++i) {
        const TypeLaw& law = laws_[i];
        if (law.rational) {
            const cx dv = law.rational->den.eval(z);
            if (std::abs(dv) < 1e-14)
                throw NumericError("eval_pgf: rational denominator within 1e-14 of zero");
            out[i] = law.rational->num.eval(z) / dv;
        } else {
            out[i] = law.terms.eval(z);
        }
    }
    return out;
}

bool PgfModel::eval_noexcept(const cvec& z, cvec& out) const {
    out.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const TypeLaw& law = laws_[i];
        if (law.rational) {
            const cx dv = law.rational->den.eval(z);
            if (std::abs(dv) < 1e-14) return false;
            out[i] = law.rational->num.eval(z) / dv;
        } else {
            out[i] = law.terms.eval(z);
        }
    }
    return true;
}

RMat PgfModel::jacobian(const rvec& at) const {
    cvec z(at.begin(), at.end());
    RMat jac(n_);
    for (int i = 0; i < n_; ++i) {
        const TypeLaw& law = laws_[i];
        for (int j = 0; j < n_; ++j) {
            if (law.rational) {
                const cx nv = law.rational->num.eval(z);
                const cx dv = law.rational->den.eval(z);
                const cx np = law.rational->num.partial(j, z);
                const cx dp = law.rational->den.partial(j, z);
                jac(i, j) = ((np * dv - nv * dp) / (dv * dv)).real();
            } else {
                jac(i, j) = law.terms.partial(j, z).real();
            }
        }
    }
    return jac;
}

namespace {

LocalExpansion build_expansion(const PgfModel& model, bool at_one, int series_degree) {
    const int n = model.types();
    LocalExpansion exp;
    exp.linear = RMat(n);
    exp.higher.resize(n);
    for (auto& h : exp.higher) h.n = n;

    const bool need_series = model.is_rational();
    std::optional<MultiIndexSet> set;
    if (need_series) {
        if (series_degree < 2 || series_degree > MultiIndexSet::kMaxDegree)
            throw ValidationError("rational expansion requested beyond supported truncation degree");
        set.emplace(n, series_degree);
        exp.truncated = true;
        exp.truncation_degree = series_degree;
    }

    for (int i = 0; i < n; ++i) {
        const TypeLaw& law = model.laws()[i];
        if (!law.rational) {
            // Polynomial path is exact.
            if (at_one) {
                PolyMap shifted = shift_to_one(law.terms);
                for (std::size_t t = 0; t < shifted.coefs.size(); ++t) {
                    const auto& k = shifted.exps[t];
                    int deg = 0;
                    for (int e : k) deg += e;
                    if (deg == 0) {
                        if (std::abs(shifted.coefs[t] - 1.0) > 1e-12)
                            throw NumericError("expansion_at_one: constant term differs from 1");
                    } else if (deg == 1) {
                        for (int j = 0; j < n; ++j)
                            if (k[j] == 1) exp.linear(i, j) = -shifted.coefs[t];
                    } else {
                        exp.higher[i].add_term(k, shifted.coefs[t]);
                    }
                }
            } else {
                for (std::size_t t = 0; t < law.terms.coefs.size(); ++t) {
                    const auto& k = law.terms.exps[t];
                    int deg = 0;
                    for (int e : k) deg += e;
                    if (deg == 1) {
                        for (int j = 0; j < n; ++j)
                            if (k[j] == 1) exp.linear(i, j) = law.terms.coefs[t];
                    } else if (deg >= 2) {
                        exp.higher[i].add_term(k, law.terms.coefs[t]);
                    }
                }
            }
            continue;
        }
        // Rational path: truncated series division around the point.
        PolyMap num = law.rational->num;
        PolyMap den = law.rational->den;
        if (at_one) {
            num = shift_to_one(num);
            den = shift_to_one(den);
        }
        Series ns = to_series(num, *set);
        Series q = divide_series(ns, den, *set);
        const double expected_const = at_one ? 1.0 : 0.0;
        if (std::abs(q.c[0] - expected_const) > 1e-10)
            throw NumericError("rational expansion: constant term check failed");
        for (int id = 1; id < set->size(); ++id) {
            const int deg = set->degree(id);
            const double c = q.c[id];
            if (deg == 1) {
                for (int j = 0; j < n; ++j)
                    if (set->entries(id)[j] == 1)
                        exp.linear(i, j) = at_one ? -c : c;
            } else if (c != 0.0) {
                exp.higher[i].add_term(set->entries(id), c);
            }
        }
    }
    return exp;
}

}  // namespace

LocalExpansion expansion_at_one(const PgfModel& model, int series_degree) {
    return build_expansion(model, true, series_degree);
}

LocalExpansion expansion_at_zero(const PgfModel& model, int series_degree) {
    return build_expansion(model, false, series_degree);
}

cvec remainder_at_one(const PgfModel& model, const LocalExpansion& exp, const cvec& y) {
    const int n = model.types();
    if (exp.truncated && inf_norm(y) > LocalExpansion::kSeriesGuard) {
        // P1(y) = P(1-y) - 1 + E y ; safe here because the result is O(1)
        cvec z(n);
        for (int i = 0; i < n; ++i) z[i] = 1.0 - y[i];
        cvec pv = model.eval(z);
        cvec out(n);
        for (int i = 0; i < n; ++i) {
            cx ey = 0.0;
            for (int j = 0; j < n; ++j) ey += exp.linear(i, j) * y[j];
            out[i] = pv[i] - 1.0 + ey;
        }
        return out;
    }
    cvec out(n);
    for (int i = 0; i < n; ++i) out[i] = exp.higher[i].eval(y);
    return out;
}

cvec remainder_at_zero(const PgfModel& model, const LocalExpansion& exp, const cvec& y) {
    const int n = model.types();
    if (exp.truncated && inf_norm(y) > LocalExpansion::kSeriesGuard) {
        cvec pv = model.eval(y);
        cvec out(n);
        for (int i = 0; i < n; ++i) {
            cx my = 0.0;
            for (int j = 0; j < n; ++j) my += exp.linear(i, j) * y[j];
            out[i] = pv[i] - my;
        }
        return out;
    }
    cvec out(n);
    for (int i = 0; i < n; ++i) out[i] = exp.higher[i].eval(y);
    return out;
}

namespace {

double parse_coef(const nlohmann::json& v, const char* what) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        std::size_t pos = 0;
        double d = 0.0;
        try {
            d = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ValidationError(std::string("model: cannot parse ") + what + " '" + s + "'");
        }
        if (pos != s.size())
            throw ValidationError(std::string("model: trailing junk in ") + what + " '" + s + "'");
        return d;
    }
    if (v.is_number()) return v.get<double>();
    throw ValidationError(std::string("model: ") + what + " must be a decimal string or number");
}

PolyMap parse_poly(const nlohmann::json& arr, int n, const char* coef_key) {
    PolyMap p;
    p.n = n;
    for (const auto& term : arr) {
        if (!term.contains("k") || !term["k"].is_array())
            throw ValidationError("model: term missing exponent vector 'k'");
        std::vector<int> k = term["k"].get<std::vector<int>>();
        if (int(k.size()) != n)
            throw ValidationError("model: exponent vector length differs from N");
        if (!term.contains(coef_key))
            throw ValidationError(std::string("model: term missing coefficient '") + coef_key + "'");
        p.add_term(k, parse_coef(term[coef_key], coef_key));
    }
    return p;
}

}  // namespace

PgfModel parse_model_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model: JSON parse error: ") + e.what());
    }
    if (!j.contains("N") || !j["N"].is_number_integer())
        throw ValidationError("model: missing integer field 'N'");
    const int n = j["N"].get<int>();
    const double margin = j.value("margin", 0.5);
    if (!j.contains("types") || !j["types"].is_array())
        throw ValidationError("model: missing 'types' array");

    std::vector<TypeLaw> laws;
    for (const auto& tj : j["types"]) {
        TypeLaw law;
        law.terms.n = n;
        if (tj.contains("terms")) law.terms = parse_poly(tj["terms"], n, "p");
        if (tj.contains("rational")) {
            const auto& rj = tj["rational"];
            if (!rj.contains("num") || !rj.contains("den"))
                throw ValidationError("model: rational form needs 'num' and 'den'");
            RationalForm rf;
            rf.num = parse_poly(rj["num"], n, "c");
            rf.den = parse_poly(rj["den"], n, "c");
            law.rational = std::move(rf);
        }
        laws.push_back(std::move(law));
    }
    PgfModel model = PgfModel::create(n, std::move(laws), margin);
    model.set_hash(fnv1a_hex(text));
    return model;
}

PgfModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("model: cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str());
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace gwtail
