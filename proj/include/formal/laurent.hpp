#pragma once

#include <algorithm>
#include <climits>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace formal {

// Absolute precision of a series that is known exactly (a Laurent polynomial).
constexpr int kExact = 1 << 28;
// Default number of t-adic digits kept when an exact series has to be truncated.
constexpr int kDefaultDigits = 24;
// Inversions and solves refuse to produce fewer relative digits than this.
constexpr int kPrecisionFloor = 4;

inline int prec_add(int a, int b) {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
}

// Truncated Laurent series sum_k c_k t^k. Coefficients are known for every
// exponent below prec(); beyond that nothing is known. The zero series carries
// only its precision.
class Laurent {
public:
    Laurent() = default;

    static Laurent zero(int prec = kExact) {
        Laurent z;
        z.prec_ = prec;
        z.start_ = prec;
        return z;
    }
    static Laurent constant(const Scalar& c, int prec = kExact) { return monomial(c, 0, prec); }
    static Laurent monomial(const Scalar& c, int k, int prec = kExact) {
        return Laurent(k, std::vector<Scalar>{c}, prec);
    }

    Laurent(int start, std::vector<Scalar> coeffs, int prec = kExact)
        : start_(start), c_(std::move(coeffs)), prec_(prec) {
        normalize();
    }

    bool is_zero() const { return c_.empty(); }
    bool exact() const { return prec_ >= kExact; }
    int prec() const { return prec_; }
    // Valuation; for a zero-to-precision series this is its precision.
    int order() const { return c_.empty() ? prec_ : start_; }
    int rel_prec() const { return prec_ >= kExact ? kExact : prec_ - order(); }
    // Highest exponent carrying a stored coefficient (order()-1 when zero).
    int top() const { return start_ + static_cast<int>(c_.size()) - 1; }
    const std::vector<Scalar>& coeffs() const { return c_; }
    const Scalar& lead() const { return c_.front(); }

    Scalar coeff(int k) const {
        if (k >= prec_ && prec_ < kExact) {
            Error e(Errc::InsufficientPrecision, "coefficient of t^" + std::to_string(k) + " is beyond precision " +
                                                     std::to_string(prec_));
            e.needed = k + 1;
            throw e;
        }
        if (c_.empty() || k < start_ || k > top()) return Scalar();
        return c_[k - start_];
    }
    bool known(int k) const { return k < prec_; }

    Laurent truncated(int prec) const {
        if (prec >= prec_) return *this;
        Laurent r = *this;
        r.prec_ = prec;
        r.normalize();
        return r;
    }

    Laurent operator-() const {
        Laurent r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Laurent operator+(const Laurent& a, const Laurent& b) { return combine(a, b, false); }
    friend Laurent operator-(const Laurent& a, const Laurent& b) { return combine(a, b, true); }
    Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
    Laurent& operator-=(const Laurent& o) { return *this = *this - o; }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        int p = std::min(prec_add(a.order(), b.prec_), prec_add(b.order(), a.prec_));
        if (a.is_zero() || b.is_zero()) return zero(p);
        int s = a.start_ + b.start_;
        int len = static_cast<int>(a.c_.size() + b.c_.size()) - 1;
        if (p < kExact) len = std::min(len, p - s);
        if (len <= 0) return zero(p);
        std::vector<Scalar> out(len);
        for (size_t i = 0; i < a.c_.size() && static_cast<int>(i) < len; ++i) {
            if (a.c_[i].is_zero()) continue;
            for (size_t j = 0; j < b.c_.size() && static_cast<int>(i + j) < len; ++j) {
                if (b.c_[j].is_zero()) continue;
                out[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Laurent(s, std::move(out), p);
    }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

    friend Laurent operator*(const Scalar& s, const Laurent& a) {
        if (s.is_zero()) return zero(a.prec_);
        Laurent r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }

    // Multiply by t^k.
    Laurent shift(int k) const {
        Laurent r = *this;
        if (r.prec_ < kExact) r.prec_ += k;
        r.start_ = r.c_.empty() ? r.prec_ : r.start_ + k;
        return r;
    }

    // Inverse; an exact input is expanded to `digits` relative digits.
    Laurent inv(int digits = kDefaultDigits) const {
        if (c_.empty()) fail(Errc::ZeroLeading, "inverse of a series that is zero to precision");
        int v = start_;
        if (exact() && c_.size() == 1) return monomial(c_[0].inv(), -v);
        int rel = exact() ? digits : prec_ - v;
        if (rel < kPrecisionFloor) {
            Error e(Errc::InsufficientPrecision,
                    "inverse would keep only " + std::to_string(rel) + " digits");
            e.needed = v + kPrecisionFloor;
            throw e;
        }
        std::vector<Scalar> b(rel);
        Scalar c0inv = c_[0].inv();
        b[0] = c0inv;
        for (int k = 1; k < rel; ++k) {
            Scalar acc;
            int lim = std::min<int>(k, static_cast<int>(c_.size()) - 1);
            for (int j = 1; j <= lim; ++j)
                if (!c_[j].is_zero()) acc += c_[j] * b[k - j];
            b[k] = -(acc * c0inv);
        }
        return Laurent(-v, std::move(b), -v + rel);
    }

    // t d/dt
    Laurent tau() const {
        Laurent r = *this;
        for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] *= Scalar(start_ + static_cast<int>(i));
        r.normalize();
        return r;
    }

    // d/dt
    Laurent deriv() const { return tau().shift(-1); }

    // Agreement on every exponent known to both.
    bool same_to_precision(const Laurent& o) const {
        int p = std::min(prec_, o.prec_);
        int lo = std::min(order(), o.order());
        int hi = std::max(top(), o.top());
        if (p < kExact) hi = std::min(hi, p - 1);
        for (int k = lo; k <= hi; ++k)
            if (coeff(k) != o.coeff(k)) return false;
        return true;
    }
    friend bool operator==(const Laurent& a, const Laurent& b) {
        return a.prec_ == b.prec_ && a.same_to_precision(b);
    }

    std::string str() const {
        if (c_.empty()) return prec_ >= kExact ? "0" : "O(t^" + std::to_string(prec_) + ")";
        std::string s;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            s += "(" + c_[i].str() + ")t^" + std::to_string(start_ + static_cast<int>(i));
        }
        if (prec_ < kExact) s += " + O(t^" + std::to_string(prec_) + ")";
        return s;
    }

private:
    static Laurent combine(const Laurent& a, const Laurent& b, bool sub) {
        int p = std::min(a.prec_, b.prec_);
        if (a.is_zero() && b.is_zero()) return zero(p);
        if (b.is_zero()) return a.truncated(p);
        if (a.is_zero()) return sub ? (-b).truncated(p) : b.truncated(p);
        int s = std::min(a.start_, b.start_);
        int e = std::max(a.top(), b.top());
        if (p < kExact) e = std::min(e, p - 1);
        if (e < s) return zero(p);
        std::vector<Scalar> out(e - s + 1);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            int k = a.start_ + static_cast<int>(i);
            if (k > e) break;
            out[k - s] = a.c_[i];
        }
        for (size_t i = 0; i < b.c_.size(); ++i) {
            int k = b.start_ + static_cast<int>(i);
            if (k > e) break;
            if (sub)
                out[k - s] -= b.c_[i];
            else
                out[k - s] += b.c_[i];
        }
        return Laurent(s, std::move(out), p);
    }

    void normalize() {
        if (prec_ < kExact) {
            int keep = prec_ - start_;
            if (keep <= 0)
                c_.clear();
            else if (static_cast<int>(c_.size()) > keep)
                c_.resize(keep);
        }
        size_t lead = 0;
        while (lead < c_.size() && c_[lead].is_zero()) ++lead;
        if (lead == c_.size()) {
            c_.clear();
            start_ = prec_;
            return;
        }
        if (lead) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
            start_ += static_cast<int>(lead);
        }
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    int start_ = kExact;
    std::vector<Scalar> c_;
    int prec_ = kExact;
};

// A one-form f dt with f a nonzero Laurent series; ord = order(f).
class OneForm {
public:
    OneForm() : f_(Laurent::monomial(Scalar(1), -1)) {}
    explicit OneForm(Laurent f) : f_(std::move(f)) {
        if (f_.is_zero()) fail(Errc::ZeroLeading, "one-form coefficient is zero");
    }
    static OneForm dt_over_t() { return OneForm(); }
    // dt / t^l
    static OneForm dt_over_tl(int l) { return OneForm(Laurent::monomial(Scalar(1), -l)); }

    const Laurent& coefficient() const { return f_; }
    int ord() const { return f_.order(); }
    bool is_dt_over_t() const { return f_.exact() && f_.coeffs().size() == 1 && f_.order() == -1 && f_.lead() == Scalar(1); }

private:
    Laurent f_;
};

// Res(a nu): the t^{-1} coefficient of a*f.
inline Scalar residue(const Laurent& a, const OneForm& nu) { return (a * nu.coefficient()).coeff(-1); }

} // namespace formal
