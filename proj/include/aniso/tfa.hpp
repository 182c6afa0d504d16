#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aniso/common.hpp"
#include "aniso/cpoly.hpp"
#include "aniso/geometry.hpp"
#include "aniso/symbols.hpp"

namespace ag {

// phi(y) = P(y) exp(-g y^2 / 2), Re g > 0
class Window {
public:
    Window() : Window(gaussian()) {}
    Window(CPoly P, cplx g, std::string name = "custom");

    static Window gaussian();
    static Window hermite(int k);
    static Window from_name(const std::string& name);

    const CPoly& P() const { return P_; }
    cplx g() const { return g_; }
    const std::string& name() const { return name_; }

    cplx operator()(double y) const;
    double l2_norm() const;
    double support_radius(double rel = 1e-18) const;

    Window reflected() const;
    Window conjugated() const;
    Window fourier() const;          // F phi
    Window inverse_fourier() const;  // F^{-1} phi
    Window dilated(double a) const;  // |a|^{1/2} phi(a y)
    Window chirped(double B) const;  // exp(-i B y^2 / 2) phi
    Window scaled(cplx c) const;

private:
    CPoly P_;
    cplx g_;
    std::string name_;
};

// Uniform 1-D grid t_k = t0 + k dt
struct Signal {
    double t0 = 0, dt = 1;
    std::vector<cplx> v;

    size_t size() const { return v.size(); }
    double t(size_t k) const { return t0 + k * dt; }
    double t_end() const { return t0 + (v.empty() ? 0 : (v.size() - 1) * dt); }
    double norm() const;

    // comment lines are written as '# ...' before the header
    void write_csv(const std::string& path, const std::string& comment = "") const;
    static Signal read_csv(const std::string& path);
    void write_binary(const std::string& path) const;
    static Signal read_binary(const std::string& path);
};

// value of log V (complex log) and whether the evaluator could honor the point
struct StftSample {
    cplx logv{-std::numeric_limits<double>::infinity(), 0};
    bool valid = true;
    bool floored = false;
    double floor_log = -std::numeric_limits<double>::infinity();
};

struct QuadratureSpec {
    double phase_cap = kPi / 4;
    long panel_cap = 1L << 20;
    double window_tail = 1e-18;
    double floor_rel = 1e-14;
};

class Distribution;
using DistPtr = std::shared_ptr<const Distribution>;

class Distribution : public std::enable_shared_from_this<Distribution> {
public:
    virtual ~Distribution() = default;
    virtual std::string kind() const = 0;

    // closed-form log V_phi u(x, xi); nullopt when no closed form applies
    virtual std::optional<cplx> log_stft(const Window& w, double x, double xi) const = 0;

    virtual bool pointwise() const { return false; }
    virtual cplx value(double y) const;
    // bound on |d/dy arg u| over [a, b], used for panel sizing
    virtual double phase_rate(double a, double b) const { (void)a; (void)b; return 0; }

    // metaplectic and Heisenberg actions; defaults wrap generically
    virtual DistPtr translated(double a) const;
    virtual DistPtr modulated(double eta) const;
    virtual DistPtr dilated(double A) const;
    virtual DistPtr chirp_multiplied(double B) const;
    virtual DistPtr fourier() const;
    virtual DistPtr reflected() const;
    virtual DistPtr conjugated() const;
    virtual DistPtr scaled(cplx c) const;

    DistPtr self() const { return shared_from_this(); }
};

// u(y) = Q(y) exp(E(y))
class ExpPoly : public Distribution {
public:
    ExpPoly(CPoly Q, CPoly E);
    const CPoly& Q() const { return Q_; }
    const CPoly& E() const { return E_; }

    std::string kind() const override { return "exp_poly"; }
    std::optional<cplx> log_stft(const Window& w, double x, double xi) const override;
    bool pointwise() const override { return true; }
    cplx value(double y) const override;
    double phase_rate(double a, double b) const override;

    DistPtr translated(double a) const override;
    DistPtr modulated(double eta) const override;
    DistPtr dilated(double A) const override;
    DistPtr chirp_multiplied(double B) const override;
    DistPtr fourier() const override;
    DistPtr reflected() const override;
    DistPtr conjugated() const override;
    DistPtr scaled(cplx c) const override;

    // polynomial times this, and D = -i d/dy applied
    std::shared_ptr<const ExpPoly> times_poly(const CPoly& p) const;
    std::shared_ptr<const ExpPoly> derivative_D() const;

private:
    CPoly Q_, E_;
};

// u = sum_k c_k D^k delta_{x0}
class DeltaComb : public Distribution {
public:
    DeltaComb(double x0, std::vector<cplx> c);
    double x0() const { return x0_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    std::string kind() const override { return "delta"; }
    std::optional<cplx> log_stft(const Window& w, double x, double xi) const override;

    DistPtr translated(double a) const override;
    DistPtr dilated(double A) const override;
    DistPtr fourier() const override;
    DistPtr reflected() const override;
    DistPtr conjugated() const override;
    DistPtr scaled(cplx c) const override;

private:
    double x0_;
    std::vector<cplx> c_;
};

// u = F v
class FourierImage : public Distribution {
public:
    explicit FourierImage(DistPtr inner) : inner_(std::move(inner)) {}
    const DistPtr& inner() const { return inner_; }
    std::string kind() const override { return "fourier(" + inner_->kind() + ")"; }
    std::optional<cplx> log_stft(const Window& w, double x, double xi) const override;
    DistPtr fourier() const override;

private:
    DistPtr inner_;
};

// Ai(y) = F[(2 pi)^{-1/2} exp(-i eta^3 / 3)](y)
class AiryDist : public FourierImage {
public:
    AiryDist();
    std::string kind() const override { return "airy"; }
    bool pointwise() const override { return true; }
    cplx value(double y) const override;
    double phase_rate(double a, double b) const override;
};

class ZeroDist : public Distribution {
public:
    std::string kind() const override { return "zero"; }
    std::optional<cplx> log_stft(const Window&, double, double) const override {
        return cplx(-std::numeric_limits<double>::infinity(), 0);
    }
    bool pointwise() const override { return true; }
    cplx value(double) const override { return 0; }
};

// generic Heisenberg / metaplectic wrapper
class Transformed : public Distribution {
public:
    enum class Op { Translate, Modulate, Dilate, Chirp, Reflect, Conj, Scale };
    Transformed(DistPtr inner, Op op, double p, cplx c = 1.0);
    std::string kind() const override;
    std::optional<cplx> log_stft(const Window& w, double x, double xi) const override;
    bool pointwise() const override { return inner_->pointwise(); }
    cplx value(double y) const override;
    double phase_rate(double a, double b) const override;

private:
    DistPtr inner_;
    Op op_;
    double p_;
    cplx c_;
};

class SampledDist : public Distribution {
public:
    explicit SampledDist(Signal s);
    const Signal& signal() const { return sig_; }
    std::string kind() const override { return "sampled"; }
    std::optional<cplx> log_stft(const Window&, double, double) const override { return std::nullopt; }

private:
    Signal sig_;
};

enum class StftMethod { Auto, ClosedForm, Quadrature, Sampled };

class StftEvaluator {
public:
    StftEvaluator(DistPtr u, Window w = Window::gaussian(), StftMethod m = StftMethod::Auto, QuadratureSpec q = {});

    StftSample log_eval(double x, double xi) const;
    cplx eval(double x, double xi) const;
    cplx operator()(const PhasePoint& z) const;
    bool valid(double x, double xi) const;

    StftMethod method() const { return method_; }
    bool capped() const { return method_ != StftMethod::ClosedForm; }
    const DistPtr& distribution() const { return u_; }
    const Window& window() const { return w_; }
    double max_valid_xi() const;
    double x_limit() const;  // sampled path: |x - center| bound

    StftEvaluator with_window(const Window& w) const { return StftEvaluator(u_, w, requested_, q_); }

private:
    StftSample quadrature(double x, double xi) const;
    StftSample sampled(double x, double xi) const;

    DistPtr u_;
    Window w_;
    StftMethod requested_, method_;
    QuadratureSpec q_;
    double wsupport_;
};

// Sampled STFT on the full signal grid: rows = window positions (every hop samples),
// columns = frequencies l * 2 pi / (n dt), l in [-n/2, n/2).
struct StftGrid {
    int hop = 1;
    Signal sig;  // carries the time grid
    std::vector<std::vector<cplx>> V;
    double xi(int col) const;
    double x(int row) const { return sig.t0 + row * hop * sig.dt; }
};

StftGrid stft_grid(const Signal& u, const Window& w, int hop = 1);
Signal invert(const StftGrid& V, const Window& w);
double stft_energy(const StftGrid& V);

Signal sample(const DistPtr& u, double t0, double dt, size_t n);

// multiply by a smooth taper falling from 1 to 0 over the outer frac of each half of the grid
Signal edge_tapered(const Signal& u, double frac);

enum class MetaplecticKind { Fourier, Dilate, ChirpMul };
DistPtr metaplectic(const DistPtr& u, MetaplecticKind kind, double param = 0);

// a^w(x, D) applied exactly to an exp-poly distribution (d = 1)
DistPtr weyl_apply_symbolic(const Poly& a, const DistPtr& u);

// ground truth as a finite set of unit-sphere directions (d = 1)
struct GroundTruth {
    double s = 1;
    std::vector<double> angles;  // degrees
    bool exact = true;           // false: only estimate subset-of truth is asserted
    std::string note;
    bool contains(double angle_deg, double tol_deg) const;
};

struct Oracle {
    std::string name;
    std::string params_json;
    DistPtr u;
    std::function<GroundTruth(double)> truth;
};

Oracle generate_oracle(const std::string& kind, const std::string& params_json = "{}");
std::vector<std::string> oracle_catalog();

}  // namespace ag
