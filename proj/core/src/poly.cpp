#include "hipdyn/poly.hpp"

#include <algorithm>
#include <cmath>

namespace hipdyn {

CPoly::CPoly(Complex c0) {
    if (c0 != Complex{}) c_.push_back(c0);
}

CPoly::CPoly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }

void CPoly::trim() {
    while (!c_.empty() && c_.back() == Complex{}) c_.pop_back();
}

Complex CPoly::eval(double t) const {
    Complex acc{};
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * t + c_[k];
    return acc;
}

CPoly CPoly::derivative() const {
    if (c_.size() <= 1) return CPoly{};
    std::vector<Complex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return CPoly(std::move(d));
}

CPoly CPoly::conjugated() const {
    std::vector<Complex> d(c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) d[k] = std::conj(c_[k]);
    return CPoly(std::move(d));
}

CPoly& CPoly::operator+=(const CPoly& rhs) {
    if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), Complex{});
    for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] += rhs.c_[k];
    trim();
    return *this;
}

CPoly& CPoly::operator-=(const CPoly& rhs) {
    if (rhs.c_.size() > c_.size()) c_.resize(rhs.c_.size(), Complex{});
    for (std::size_t k = 0; k < rhs.c_.size(); ++k) c_[k] -= rhs.c_[k];
    trim();
    return *this;
}

CPoly& CPoly::operator*=(Complex s) {
    if (s == Complex{}) {
        c_.clear();
        return *this;
    }
    for (Complex& v : c_) v *= s;
    trim();
    return *this;
}

CPoly operator+(const CPoly& a, const CPoly& b) {
    CPoly r = a;
    r += b;
    return r;
}

CPoly operator-(const CPoly& a, const CPoly& b) {
    CPoly r = a;
    r -= b;
    return r;
}

CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.is_zero() || b.is_zero()) return CPoly{};
    const auto& ca = a.coefficients();
    const auto& cb = b.coefficients();
    std::vector<Complex> r(ca.size() + cb.size() - 1, Complex{});
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i] == Complex{}) continue;
        for (std::size_t j = 0; j < cb.size(); ++j) r[i + j] += ca[i] * cb[j];
    }
    return CPoly(std::move(r));
}

CPoly operator*(Complex s, const CPoly& a) {
    CPoly r = a;
    r *= s;
    return r;
}

CPoly compose(const CPoly& p, const CPoly& q) {
    CPoly acc{};
    const auto& cp = p.coefficients();
    for (std::size_t k = cp.size(); k-- > 0;) {
        acc = acc * q;
        acc += CPoly(cp[k]);
    }
    return acc;
}

double max_coeff_dist(const CPoly& a, const CPoly& b) {
    const std::size_t n = std::max(a.coefficients().size(), b.coefficients().size());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        d = std::max(d, std::abs(a.coefficient(k) - b.coefficient(k)));
    return d;
}

} // namespace hipdyn
