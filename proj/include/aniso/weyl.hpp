#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "aniso/common.hpp"
#include "aniso/symbols.hpp"
#include "aniso/tfa.hpp"

namespace ag {

// x_j = -T + j dx, xi_l = (l - n/2) pi / T for l in [0, n)
struct GridSpec {
    double T = 16;
    int n = 256;

    GridSpec() = default;
    GridSpec(double T_, int n_);
    double dx() const { return 2 * T / n; }
    double x(int j) const { return -T + j * dx(); }
    double X(int h) const { return -T + h * dx() / 2; }  // half-spacing grid, h in [0, 2n)
    double xi(int l) const { return (l - n / 2) * kPi / T; }
    double xi_max() const { return kPi / dx(); }
    int margin() const { return n / 8; }
};

struct OperatorMatrix {
    Eigen::MatrixXcd M;
    double t = 0.5;
    GridSpec grid;
    bool truncation_warning = false;

    std::vector<cplx> apply(const std::vector<cplx>& f) const;
    OperatorMatrix adjoint() const;
    void write_binary(const std::string& path) const;
    void write_json(const std::string& path) const;
};

// a(X_h, xi_l) on the half-spacing position grid, row-major in h
struct SymbolGrid {
    GridSpec grid;
    std::vector<cplx> v;
    bool boundary_warning = false;

    SymbolGrid() = default;
    explicit SymbolGrid(const GridSpec& g) : grid(g), v(size_t(2) * g.n * g.n) {}
    cplx& at(int h, int l) { return v[size_t(h) * grid.n + l]; }
    cplx at(int h, int l) const { return v[size_t(h) * grid.n + l]; }
    static SymbolGrid sample(const Symbol& a, const GridSpec& g);
};

OperatorMatrix quantize(const Symbol& a, double t, const GridSpec& g);
// t in {0, 1/2, 1}
OperatorMatrix quantize(const SymbolGrid& a, double t);

SymbolGrid quantization_shift(const SymbolGrid& a, double from_t, double to_t);
Poly quantization_shift(const Poly& a, double from_t, double to_t);

// Weyl product a # b truncated at |alpha + beta| <= order; order < 0 means exact
Poly weyl_product_expansion(const Poly& a, const Poly& b, int order = -1);

// W(g, f) on the half-spacing grid; (a^w f, g) = sum a conj(W) / (2n)
struct WignerTable {
    GridSpec grid;
    std::vector<cplx> W;
    cplx at(int h, int l) const { return W[size_t(h) * grid.n + l]; }
    double max_imag() const;
};

WignerTable wigner(const std::vector<cplx>& f, const std::vector<cplx>& g, const GridSpec& grid);
cplx weyl_apply_via_wigner(const Symbol& a, const std::vector<cplx>& f, const std::vector<cplx>& g,
                           const GridSpec& grid);
cplx pairing(const OperatorMatrix& A, const std::vector<cplx>& f, const std::vector<cplx>& g);

// interior-restricted comparisons
std::vector<cplx> sample_on(const GridSpec& g, const std::function<cplx(double)>& f);
std::vector<cplx> hermite_vector(int k, const GridSpec& g);
double interior_rel_error(const std::vector<cplx>& a, const std::vector<cplx>& ref, const GridSpec& g);
double interior_abs_error(const std::vector<cplx>& a, const std::vector<cplx>& ref, const GridSpec& g);
// max over Hermite test vectors h_0..h_5 of the interior relative error of A h vs B h
double operator_interior_error(const OperatorMatrix& A, const OperatorMatrix& B);

struct ParametrixResult {
    double s = 1, m1 = 0;
    std::vector<Symbol> terms;      // b_0 .. b_J
    Symbol b;                       // sum of terms
    std::vector<Symbol> residuals;  // r_j = (b_0 + ... + b_j) # a - chi
    SymbolGrid sample(const GridSpec& g) const { return SymbolGrid::sample(b, g); }
};

ParametrixResult parametrix(const Symbol& a, const Symbol& chi, double s, double m1, int J = 2,
                            double floor = 1e-12);

// callable b # polynomial a via the terminating expansion
Symbol weyl_product_callable(const Symbol& b, const Poly& a, double order);

// least-squares slope of log|r| along the s-ray through z0
double ray_decay_slope(const Symbol& r, const PhasePoint& z0, double s, double lambda_min, double lambda_max,
                       int points = 12);

// Weyl operator applied to a uniformly sampled signal without forming the matrix;
// kernel offsets are restricted to |j - k| < n/2 (no periodic wrap) and the symbol is
// tapered to zero between band and band + 0.1 times the Nyquist frequency (band >= 1: off)
Signal apply_weyl_sampled(const Symbol& a, const Signal& u, double band = 0.8);

}  // namespace ag
