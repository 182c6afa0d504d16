#pragma once

#include <vector>

#include "aniso/common.hpp"

namespace ag {

// Univariate complex polynomial, c[k] multiplies t^k.
struct CPoly {
    std::vector<cplx> c;

    CPoly() = default;
    CPoly(std::initializer_list<cplx> l) : c(l) {}
    explicit CPoly(std::vector<cplx> v) : c(std::move(v)) {}
    static CPoly constant(cplx v) { return CPoly({v}); }
    static CPoly monomial(int k, cplx v = 1.0);

    int degree() const;
    bool is_zero() const { return degree() < 0; }
    cplx operator()(cplx t) const;
    cplx at(int k) const { return k < static_cast<int>(c.size()) ? c[k] : cplx(0); }

    CPoly derivative() const;
    CPoly shifted(cplx a) const;           // p(t + a)
    CPoly scaled_arg(cplx a) const;        // p(a t)
    CPoly composed_linear(cplx a, cplx b) const { return shifted(b).scaled_arg(a); }  // p(a t + b)
    CPoly conj() const;
    CPoly reflected() const { return scaled_arg(-1.0); }
    void trim();

    CPoly& operator+=(const CPoly& o);
    CPoly& operator-=(const CPoly& o);
    CPoly& operator*=(cplx v);
    friend CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
    friend CPoly operator-(CPoly a, const CPoly& b) { return a -= b; }
    friend CPoly operator*(CPoly a, cplx v) { return a *= v; }
    friend CPoly operator*(const CPoly& a, const CPoly& b);
};

}  // namespace ag
