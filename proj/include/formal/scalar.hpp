#pragma once

#include <gmpxx.h>

#include <cctype>
#include <functional>
#include <string>
#include <tuple>

#include "error.hpp"

namespace formal {

// Exact base field. Q(i) elements keep an imaginary part; over Q it stays zero.
enum class Field { Q, QI };

inline const char* field_name(Field f) { return f == Field::Q ? "Q" : "Q(i)"; }

class Scalar {
public:
    Scalar() = default;
    Scalar(long v) : re_(v) {}
    Scalar(int v) : re_(v) {}
    Scalar(const mpq_class& re) : re_(re) {}
    Scalar(const mpq_class& re, const mpq_class& im) : re_(re), im_(im) {}
    static Scalar frac(long p, long q) {
        mpq_class r(p, q);
        r.canonicalize();
        return Scalar(r);
    }
    static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }
    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool in(Field f) const { return f == Field::QI || is_real(); }

    Scalar conj() const { return Scalar(re_, -im_); }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    Scalar& operator+=(const Scalar& o) {
        re_ += o.re_;
        if (sgn(o.im_) != 0) im_ += o.im_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re_ -= o.re_;
        if (sgn(o.im_) != 0) im_ -= o.im_;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        if (is_real() && o.is_real()) {
            re_ *= o.re_;
            return *this;
        }
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        im_ = m;
        return *this;
    }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) fail(Errc::ZeroLeading, "division by zero scalar");
        if (o.is_real()) {
            re_ /= o.re_;
            if (!is_real()) im_ /= o.re_;
            return *this;
        }
        mpq_class d = o.norm();
        Scalar c = o.conj();
        *this *= c;
        re_ /= d;
        im_ /= d;
        return *this;
    }
    Scalar inv() const { return Scalar(1) / *this; }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    Scalar operator-() const { return Scalar(-re_, -im_); }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Fixed total order used only for deterministic tie-breaking.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        auto key = [](const Scalar& s) {
            return std::make_tuple(mpq_class(s.re_.get_num()), mpq_class(s.re_.get_den()),
                                   mpq_class(s.im_.get_num()), mpq_class(s.im_.get_den()));
        };
        return key(a) < key(b);
    }

    bool is_integer() const { return is_real() && re_.get_den() == 1; }

    Scalar pow(long k) const {
        Scalar base = k < 0 ? inv() : *this, out(1);
        unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
        while (e) {
            if (e & 1) out *= base;
            base *= base;
            e >>= 1;
        }
        return out;
    }

    // "p/q" or "p/q+r/s*i"; integers print without a denominator.
    std::string str() const {
        if (is_real()) return re_.get_str();
        std::string s = re_.get_str();
        std::string m = im_.get_str();
        if (m[0] != '-') m = "+" + m;
        return s + m + "*i";
    }

    static Scalar parse(const std::string& text) {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) fail(Errc::Parse, "empty scalar");
        auto rational = [&](const std::string& part) {
            if (part.empty() || part == "+") return mpq_class(1);
            if (part == "-") return mpq_class(-1);
            std::string p = part[0] == '+' ? part.substr(1) : part;
            for (char c : p)
                if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-'))
                    fail(Errc::Parse, "bad rational '" + part + "'");
            mpq_class q;
            if (q.set_str(p, 10) != 0) fail(Errc::Parse, "bad rational '" + part + "'");
            if (q.get_den() == 0) fail(Errc::Parse, "zero denominator in '" + part + "'");
            q.canonicalize();
            return q;
        };
        if (s.back() != 'i') return Scalar(rational(s));
        std::string body = s.substr(0, s.size() - 1);
        if (!body.empty() && body.back() == '*') body.pop_back();
        // split at the last sign that is not the leading character
        size_t cut = std::string::npos;
        for (size_t k = body.size(); k-- > 1;)
            if (body[k] == '+' || body[k] == '-') {
                cut = k;
                break;
            }
        if (cut == std::string::npos) return Scalar(mpq_class(0), rational(body));
        return Scalar(rational(body.substr(0, cut)), rational(body.substr(cut)));
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

inline std::string to_string(const Scalar& s) { return s.str(); }

} // namespace formal
