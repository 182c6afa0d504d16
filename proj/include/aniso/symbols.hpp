#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aniso/common.hpp"
#include "aniso/geometry.hpp"

namespace ag {

// Polynomial in (x, xi) with complex coefficients; key = exponents of x then xi.
class Poly {
public:
    using Key = std::vector<int>;

    explicit Poly(int dim = 1) : d_(dim) {}
    static Poly constant(int dim, cplx c);
    static Poly monomial(const std::vector<int>& ax, const std::vector<int>& axi, cplx c = 1.0);
    // d = 1 shorthand: c x^p xi^q
    static Poly term(int p, int q, cplx c = 1.0) { return monomial({p}, {q}, c); }

    int dim() const { return d_; }
    const std::map<Key, cplx>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const;
    cplx coeff(const std::vector<int>& ax, const std::vector<int>& axi) const;

    void add(const std::vector<int>& ax, const std::vector<int>& axi, cplx c);
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(cplx c);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, cplx c) { return a *= c; }
    friend Poly operator*(const Poly& a, const Poly& b);
    bool approx_equal(const Poly& o, double tol = 0) const;

    Poly derivative(const std::vector<int>& alpha, const std::vector<int>& beta) const;
    Poly conj() const;
    Poly swap_variables() const;  // b(x, xi) = a(xi, x)

    cplx eval(std::span<const double> x, std::span<const double> xi) const;
    cplx eval(const PhasePoint& z) const { return eval(z.x, z.xi); }
    cplx eval1(double x, double xi) const;

    std::string to_json() const;
    static Poly from_json(const std::string& text);

private:
    void prune();
    int d_;
    std::map<Key, cplx> c_;
};

struct DerivOptions {
    double h0 = 1e-4;
    int max_order = 4;
};

class Symbol {
public:
    using Fn = std::function<cplx(std::span<const double>, std::span<const double>)>;

    static Symbol polynomial(Poly p, double m, double s);
    static Symbol callable(int dim, Fn f, double m, double s, DerivOptions opt = {});
    static Symbol callable1(std::function<cplx(double, double)> f, double m, double s, DerivOptions opt = {});

    bool is_polynomial() const { return static_cast<bool>(poly_); }
    const Poly& poly() const;
    int dim() const { return dim_; }
    double order() const { return m_; }
    double s() const { return s_; }
    const DerivOptions& deriv_options() const { return opt_; }
    Symbol with_class(double m, double s) const;
    Symbol with_deriv_options(DerivOptions opt) const;

    cplx operator()(const PhasePoint& z) const { return eval(z.x, z.xi); }
    cplx eval(std::span<const double> x, std::span<const double> xi) const;
    cplx eval1(double x, double xi) const;

    cplx derivative(const std::vector<int>& alpha, const std::vector<int>& beta, const PhasePoint& z) const;
    cplx derivative1(int a, int b, double x, double xi) const;

private:
    int dim_ = 1;
    double m_ = 0, s_ = 1;
    DerivOptions opt_;
    std::shared_ptr<const Poly> poly_;
    std::shared_ptr<const Fn> fn_;
};

// Phase-space sampling for seminorm sweeps: rays over sphere directions x geometric lambda.
struct SymbolSampling {
    int n_dirs = 64;
    double lambda_min = 0.125;
    double lambda_max = 64.0;
    int n_lambda = 16;
    bool include_origin = true;
    unsigned seed = 7;  // direction draw for dim > 1

    SymbolSampling refined() const;
    std::vector<PhasePoint> points(int dim, double s) const;
    std::string describe() const;
};

struct SeminormEntry {
    std::vector<int> alpha, beta;
    double value = 0;
    bool finite = true;
    PhasePoint where;  // location of the sup, or of the first non-finite value
};

struct SeminormReport {
    int j = 0;
    double m = 0, s = 1;
    std::vector<SeminormEntry> entries;
    std::string grid;

    double max_value() const;
    bool all_finite() const;
    const SeminormEntry* find(const std::vector<int>& alpha, const std::vector<int>& beta) const;
};

SeminormReport seminorm_estimate(const Symbol& a, double m, double s, int j, const SymbolSampling& grid);

// coarse: refined directions over the original lambda range; refined: the extended range.
// bounded iff every weighted sup stays finite and grows by at most 1 + tol under the extension.
struct MembershipVerdict {
    bool bounded = false;
    double worst_ratio = 0;  // max refined / coarse over entries
    SeminormReport coarse, refined;
};

MembershipVerdict check_membership(const Symbol& a, double m, double s, int j, const SymbolSampling& grid,
                                   double tol = 0.05);

std::pair<double, double> isotropic_embedding(double m, double s);

// smooth step: 0 for t <= 0, 1 for t >= 1
double smooth_step(double t);

Symbol make_cutoff(const PhasePoint& z0, double epsilon, double r, double s);

struct CharSetOptions {
    int sphere_res = 360;
    double eps_probe = 0.01;
    int cap_samples = 5;
    double R_probe = 10.0;
    double lambda_max = 1e4;
    int n_lambda = 12;
    double rel_threshold = 0.02;
    double stability_tol = 0.05;
};

struct CharSetEstimate {
    double s = 1, m1 = 0;
    std::vector<double> angles;  // degrees, d = 1
    std::vector<bool> characteristic;
    std::vector<double> C;       // min |a| / lambda^m1 over the probe
    std::vector<double> R;       // smallest probe lambda used
    std::vector<double> deriv_bound;
    double threshold = 0;

    std::vector<double> characteristic_angles() const;
    std::string to_json() const;
};

CharSetEstimate char_set_poly(const Symbol& a, double s, double m1, const CharSetOptions& opt = {});

struct AsymptoticTerm {
    Symbol a;
    double m;
};

struct AsymptoticSum {
    Symbol a;
    std::vector<double> t;
    std::vector<bool> passed;
    bool ok() const;
};

AsymptoticSum asymptotic_sum(const std::vector<AsymptoticTerm>& terms, double s,
                             const SymbolSampling& grid = {}, double t_cap = 1099511627776.0);

}  // namespace ag
