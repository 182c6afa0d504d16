#include "aniso/cpoly.hpp"

#include <algorithm>

namespace ag {

CPoly CPoly::monomial(int k, cplx v) {
    CPoly p;
    p.c.assign(k + 1, 0.0);
    p.c[k] = v;
    return p;
}

int CPoly::degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
        if (c[k] != cplx(0)) return k;
    return -1;
}

void CPoly::trim() { c.resize(std::max(0, degree() + 1)); }

cplx CPoly::operator()(cplx t) const {
    cplx r = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) r = r * t + c[k];
    return r;
}

CPoly CPoly::derivative() const {
    CPoly r;
    for (size_t k = 1; k < c.size(); ++k) r.c.push_back(c[k] * double(k));
    return r;
}

CPoly CPoly::shifted(cplx a) const {
    // repeated synthetic division keeps the shift exact for a = 0
    CPoly r(*this);
    int n = static_cast<int>(r.c.size());
    for (int i = 0; i < n; ++i)
        for (int k = n - 2; k >= i; --k) r.c[k] += a * r.c[k + 1];
    return r;
}

CPoly CPoly::scaled_arg(cplx a) const {
    CPoly r(*this);
    cplx p = 1;
    for (auto& v : r.c) {
        v *= p;
        p *= a;
    }
    return r;
}

CPoly CPoly::conj() const {
    CPoly r(*this);
    for (auto& v : r.c) v = std::conj(v);
    return r;
}

CPoly& CPoly::operator+=(const CPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), 0.0);
    for (size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
    return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), 0.0);
    for (size_t k = 0; k < o.c.size(); ++k) c[k] -= o.c[k];
    return *this;
}

CPoly& CPoly::operator*=(cplx v) {
    for (auto& x : c) x *= v;
    return *this;
}

CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.c.empty() || b.c.empty()) return CPoly();
    CPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

}  // namespace ag
