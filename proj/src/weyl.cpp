#include "aniso/weyl.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>

#include "aniso/parallel.hpp"
#include "json.hpp"

namespace ag {

namespace {

const cplx I(0, 1);

bool is_lattice_t(double t) { return t == 0.0 || t == 0.5 || t == 1.0; }

// half-grid row used by K_jk for t in {0, 1/2, 1}
int half_index(double t, int j, int k) {
    if (t == 0.0) return 2 * j;
    if (t == 1.0) return 2 * k;
    return j + k;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

// FFTW wrapper for repeated 1-D transforms of one length
class Fft {
public:
    Fft(int n, int sign) : n_(n) {
        buf_ = fftw_alloc_complex(n);
        plan_ = fftw_plan_dft_1d(n, buf_, buf_, sign, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    // in-place on an fftw_alloc'd buffer of the same length
    void run(fftw_complex* data) const { fftw_execute_dft(plan_, data, data); }
    void run(std::vector<cplx>& v) const {
        auto* p = reinterpret_cast<fftw_complex*>(v.data());
        if (reinterpret_cast<uintptr_t>(p) % 16 == 0) {
            fftw_execute_dft(plan_, p, p);
        } else {
            std::copy(v.begin(), v.end(), reinterpret_cast<cplx*>(buf_));
            fftw_execute(plan_);
            std::copy(reinterpret_cast<cplx*>(buf_), reinterpret_cast<cplx*>(buf_) + n_, v.begin());
        }
    }

private:
    int n_;
    fftw_complex* buf_;
    fftw_plan plan_;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

// row transform a(h, l) -> a~(h, r) = (1/n) sum_l a(h, l) exp(2 pi i r (l - n/2) / n)
void symbol_to_kernel_row(std::vector<cplx>& row, const Fft& backward) {
    int n = static_cast<int>(row.size());
    backward.run(row);
    for (int r = 0; r < n; ++r) row[r] *= ((r & 1) ? -1.0 : 1.0) / n;
}

void kernel_to_symbol_row(std::vector<cplx>& row, const Fft& forward) {
    int n = static_cast<int>(row.size());
    for (int r = 0; r < n; ++r) row[r] *= (r & 1) ? -1.0 : 1.0;
    forward.run(row);
}

void enumerate_indices(int dim, int maxsum, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(dim, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == dim) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[i] = v;
            rec(i + 1, left - v);
        }
        cur[i] = 0;
    };
    rec(0, maxsum);
}

double factorial_multi(const std::vector<int>& a) {
    double r = 1;
    for (int v : a)
        for (int i = 2; i <= v; ++i) r *= i;
    return r;
}

int abs_multi(const std::vector<int>& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

}  // namespace

GridSpec::GridSpec(double T_, int n_) : T(T_), n(n_) {
    if (!(T > 0) || !std::isfinite(T)) throw DomainError("grid: T must be positive");
    if (n < 8 || (n & (n - 1)) != 0) throw DomainError("grid: n must be a power of two >= 8");
}

// ---------------------------------------------------------------- matrices

std::vector<cplx> OperatorMatrix::apply(const std::vector<cplx>& f) const {
    if (static_cast<int>(f.size()) != M.cols()) throw DomainError("operator: size mismatch");
    Eigen::Map<const Eigen::VectorXcd> v(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXcd r = M * v;
    return std::vector<cplx>(r.data(), r.data() + r.size());
}

OperatorMatrix OperatorMatrix::adjoint() const {
    OperatorMatrix o = *this;
    o.M = M.adjoint();
    o.t = 1 - t;
    return o;
}

void OperatorMatrix::write_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    uint64_t n = static_cast<uint64_t>(M.rows());
    os.write("AGM1", 4);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&t), sizeof t);
    os.write(reinterpret_cast<const char*>(&grid.T), sizeof grid.T);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            cplx v = M(i, j);
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

void OperatorMatrix::write_json(const std::string& path) const {
    nlohmann::ordered_json j;
    j["schema"] = "aniso-gabor/1";
    j["t"] = t;
    j["T"] = grid.T;
    j["n"] = grid.n;
    j["truncation_warning"] = truncation_warning;
    auto& d = j["data"] = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) d.push_back({M(r, c).real(), M(r, c).imag()});
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump() << '\n';
}

SymbolGrid SymbolGrid::sample(const Symbol& a, const GridSpec& g) {
    if (a.dim() != 1) throw DomainError("symbol grid: d = 1 only");
    SymbolGrid s(g);
    parallel_for(static_cast<size_t>(2 * g.n), [&](size_t h) {
        for (int l = 0; l < g.n; ++l) s.at(static_cast<int>(h), l) = a.eval1(g.X(static_cast<int>(h)), g.xi(l));
    });
    return s;
}

static bool growth_warning(const SymbolGrid& a) {
    const int n = a.grid.n;
    double edge = 0, centre = 0;
    for (int h = 0; h < 2 * n; ++h) {
        for (int l = 0; l < n; ++l)
            if (!std::isfinite(std::abs(a.at(h, l)))) return true;
        edge = std::max(edge, std::abs(a.at(h, 0)));
        centre = std::max(centre, std::abs(a.at(h, n / 2)));
    }
    return edge > 1e8 * std::max(1.0, centre);
}

OperatorMatrix quantize(const SymbolGrid& a, double t) {
    if (!is_lattice_t(t)) throw DomainError("quantize(grid): t must be 0, 1/2 or 1");
    const GridSpec& g = a.grid;
    const int n = g.n;
    OperatorMatrix out;
    out.t = t;
    out.grid = g;
    out.truncation_warning = growth_warning(a);
    out.M.resize(n, n);
    std::vector<std::vector<cplx>> kern(2 * n);
    std::unique_ptr<Fft> bw;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        bw = std::make_unique<Fft>(n, FFTW_BACKWARD);
    }
    parallel_for(static_cast<size_t>(2 * n), [&](size_t h) {
        if (t != 0.5 && (h & 1)) return;
        std::vector<cplx> row(a.v.begin() + h * n, a.v.begin() + (h + 1) * n);
        symbol_to_kernel_row(row, *bw);
        kern[h] = std::move(row);
    });
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out.M(j, k) = kern[half_index(t, j, k)][mod(j - k, n)];
    return out;
}

OperatorMatrix quantize(const Symbol& a, double t, const GridSpec& g) {
    if (a.dim() != 1) throw DomainError("quantize: d = 1 only");
    if (is_lattice_t(t)) return quantize(SymbolGrid::sample(a, g), t);
    const int n = g.n;
    if (n > 512) throw DomainError("quantize: generic t limited to n <= 512");
    OperatorMatrix out;
    out.t = t;
    out.grid = g;
    out.M.resize(n, n);
    std::vector<cplx> tw(n);
    for (int q = 0; q < n; ++q) tw[q] = std::exp(2.0 * kPi * I * double(q) / double(n));
    parallel_for(static_cast<size_t>(n), [&](size_t jj) {
        int j = static_cast<int>(jj);
        for (int k = 0; k < n; ++k) {
            double z = (1 - t) * g.x(j) + t * g.x(k);
            cplx acc = 0;
            for (int l = 0; l < n; ++l) acc += tw[mod((j - k) * (l - n / 2), n)] * a.eval1(z, g.xi(l));
            out.M(j, k) = acc / double(n);
            if (!std::isfinite(std::abs(acc))) out.truncation_warning = true;
        }
    });
    return out;
}

// ---------------------------------------------------------------- shifts

SymbolGrid quantization_shift(const SymbolGrid& a, double from_t, double to_t) {
    if (from_t == to_t) return a;
    const GridSpec& g = a.grid;
    const int n = g.n, H = 2 * n;
    Fft bw(n, FFTW_BACKWARD), fw(n, FFTW_FORWARD), hf(H, FFTW_FORWARD), hb(H, FFTW_BACKWARD);
    std::vector<cplx> K(a.v);
    for (int h = 0; h < H; ++h) {
        std::vector<cplx> row(K.begin() + size_t(h) * n, K.begin() + size_t(h + 1) * n);
        symbol_to_kernel_row(row, bw);
        std::copy(row.begin(), row.end(), K.begin() + size_t(h) * n);
    }
    // a~_to(X, r) = a~_from(X + (to - from) r dx, r), band-limited shift along X
    const double dX = g.dx() / 2;
    std::vector<cplx> col(H);
    for (int r = 0; r < n; ++r) {
        int rs = r < n / 2 ? r : r - n;
        double delta = (to_t - from_t) * rs * g.dx();
        if (delta == 0) continue;
        for (int h = 0; h < H; ++h) col[h] = K[size_t(h) * n + r];
        hf.run(col);
        for (int k = 0; k < H; ++k) {
            int ks = k < H / 2 ? k : k - H;
            double eta = 2 * kPi * ks / (H * dX);
            cplx m = std::exp(I * eta * delta);
            if (k == H / 2) m = std::cos(eta * delta);
            col[k] *= m / double(H);
        }
        hb.run(col);
        for (int h = 0; h < H; ++h) K[size_t(h) * n + r] = col[h];
    }
    SymbolGrid out(g);
    double edge = 0, total = 0;
    for (int h = 0; h < H; ++h) {
        std::vector<cplx> row(K.begin() + size_t(h) * n, K.begin() + size_t(h + 1) * n);
        kernel_to_symbol_row(row, fw);
        std::copy(row.begin(), row.end(), out.v.begin() + size_t(h) * n);
        for (auto& v : row) {
            total += std::norm(v);
            if (h < H / 8 || h >= H - H / 8) edge += std::norm(v);
        }
    }
    out.boundary_warning = a.boundary_warning || (total > 0 && edge > 0.5 * total);
    return out;
}

Poly quantization_shift(const Poly& a, double from_t, double to_t) {
    // exp(i (from - to) <D_x, D_xi>) with <D_x, D_xi> = -sum d_x d_xi
    const int d = a.dim();
    const cplx c = I * (from_t - to_t);
    Poly out = a, term = a;
    for (int k = 1; !term.is_zero(); ++k) {
        Poly next(d);
        for (int i = 0; i < d; ++i) {
            std::vector<int> e(d, 0);
            e[i] = 1;
            next -= term.derivative(e, e);
        }
        term = next * (c / double(k));
        out += term;
        if (k > 4 * (a.degree() + 1)) break;
    }
    return out;
}

// ---------------------------------------------------------------- product

Poly weyl_product_expansion(const Poly& a, const Poly& b, int order) {
    if (a.dim() != b.dim()) throw DomainError("weyl product: dimension mismatch");
    const int d = a.dim();
    int J = a.degree() + b.degree();
    if (order >= 0) J = std::min(J, order);
    std::vector<std::vector<int>> idx;
    enumerate_indices(d, std::max(J, 0), idx);
    Poly out(d);
    for (auto& al : idx)
        for (auto& be : idx) {
            int na = abs_multi(al), nb = abs_multi(be);
            if (na + nb > J) continue;
            Poly da = a.derivative(be, al), db = b.derivative(al, be);
            if (da.is_zero() || db.is_zero()) continue;
            // (-1)^|beta| D_x^beta d_xi^alpha a * D_x^alpha d_xi^beta b / (alpha! beta! 2^|alpha+beta|)
            cplx c = std::pow(-1.0, nb) * std::pow(-I, na + nb) /
                     (factorial_multi(al) * factorial_multi(be) * std::exp2(na + nb));
            out += (da * db) * c;
        }
    return out;
}

Symbol weyl_product_callable(const Symbol& b, const Poly& a, double order) {
    struct Term {
        std::vector<int> bx, bxi;
        Poly da;
        cplx c;
    };
    std::vector<Term> terms;
    const int d = a.dim();
    std::vector<std::vector<int>> idx;
    enumerate_indices(d, std::max(a.degree(), 0), idx);
    for (auto& al : idx)
        for (auto& be : idx) {
            Poly da = a.derivative(al, be);
            if (da.is_zero()) continue;
            int na = abs_multi(al), nb = abs_multi(be);
            cplx c = std::pow(-1.0, nb) * std::pow(-I, na + nb) /
                     (factorial_multi(al) * factorial_multi(be) * std::exp2(na + nb));
            terms.push_back({be, al, da, c});
        }
    auto f = [b, terms](std::span<const double> x, std::span<const double> xi) {
        PhasePoint z(std::vector<double>(x.begin(), x.end()), std::vector<double>(xi.begin(), xi.end()));
        cplx acc = 0;
        for (auto& t : terms) {
            cplx av = t.da.eval(x, xi);
            if (av == cplx(0)) continue;
            acc += t.c * b.derivative(t.bx, t.bxi, z) * av;
        }
        return acc;
    };
    return Symbol::callable(d, f, order, b.s(), b.deriv_options());
}

// ---------------------------------------------------------------- Wigner

double WignerTable::max_imag() const {
    double m = 0;
    for (auto& v : W) m = std::max(m, std::fabs(v.imag()));
    return m;
}

WignerTable wigner(const std::vector<cplx>& f, const std::vector<cplx>& g, const GridSpec& grid) {
    const int n = grid.n;
    if (static_cast<int>(f.size()) != n || static_cast<int>(g.size()) != n)
        throw DomainError("wigner: signals must match the grid");
    WignerTable T;
    T.grid = grid;
    T.W.assign(size_t(2) * n * n, 0.0);
    Fft fw(n, FFTW_FORWARD);
    const double c = 2 * grid.dx();
    for (int h = 0; h < 2 * n - 1; ++h) {
        std::vector<cplx> H(n, 0.0);
        int j0 = std::max(0, h - (n - 1)), j1 = std::min(n - 1, h);
        for (int j = j0; j <= j1; ++j) {
            int k = h - j;
            H[mod(j - k, n)] += g[j] * std::conj(f[k]);
        }
        for (int r = 0; r < n; ++r) H[r] *= ((r & 1) ? -1.0 : 1.0) * c;
        fw.run(H);
        std::copy(H.begin(), H.end(), T.W.begin() + size_t(h) * n);
    }
    return T;
}

cplx weyl_apply_via_wigner(const Symbol& a, const std::vector<cplx>& f, const std::vector<cplx>& g,
                           const GridSpec& grid) {
    WignerTable W = wigner(f, g, grid);
    SymbolGrid A = SymbolGrid::sample(a, grid);
    cplx acc = 0;
    for (size_t i = 0; i < W.W.size(); ++i) acc += A.v[i] * std::conj(W.W[i]);
    return acc / double(2 * grid.n);
}

cplx pairing(const OperatorMatrix& A, const std::vector<cplx>& f, const std::vector<cplx>& g) {
    auto Af = A.apply(f);
    cplx acc = 0;
    for (size_t j = 0; j < Af.size(); ++j) acc += Af[j] * std::conj(g[j]);
    return acc * A.grid.dx();
}

// ---------------------------------------------------------------- comparisons

std::vector<cplx> sample_on(const GridSpec& g, const std::function<cplx(double)>& f) {
    std::vector<cplx> v(g.n);
    for (int j = 0; j < g.n; ++j) v[j] = f(g.x(j));
    return v;
}

std::vector<cplx> hermite_vector(int k, const GridSpec& g) {
    Window h = Window::hermite(k);
    return sample_on(g, [&](double x) { return h(x); });
}

double interior_abs_error(const std::vector<cplx>& a, const std::vector<cplx>& ref, const GridSpec& g) {
    double m = 0;
    for (int j = g.margin(); j < g.n - g.margin(); ++j) m = std::max(m, std::abs(a[j] - ref[j]));
    return m;
}

double interior_rel_error(const std::vector<cplx>& a, const std::vector<cplx>& ref, const GridSpec& g) {
    double num = 0, den = 0;
    for (int j = g.margin(); j < g.n - g.margin(); ++j) {
        num += std::norm(a[j] - ref[j]);
        den += std::norm(ref[j]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double operator_interior_error(const OperatorMatrix& A, const OperatorMatrix& B) {
    double worst = 0;
    for (int k = 0; k <= 5; ++k) {
        auto h = hermite_vector(k, A.grid);
        worst = std::max(worst, interior_rel_error(A.apply(h), B.apply(h), A.grid));
    }
    return worst;
}

// ---------------------------------------------------------------- parametrix

static Symbol divide_by(const Symbol& num, const Poly& a, double floor, double m, double s, DerivOptions opt) {
    auto f = [num, a, floor](std::span<const double> x, std::span<const double> xi) -> cplx {
        cplx v = num.eval(x, xi);
        if (v == cplx(0)) return 0;
        cplx av = a.eval(x, xi);
        if (std::abs(av) < floor) throw SingularSymbol("parametrix: |a| below floor on the cutoff support");
        return v / av;
    };
    return Symbol::callable(a.dim(), f, m, s, opt);
}

static Symbol sum_symbols(const std::vector<Symbol>& parts, double m, double s, DerivOptions opt) {
    auto f = [parts](std::span<const double> x, std::span<const double> xi) {
        cplx acc = 0;
        for (auto& p : parts) acc += p.eval(x, xi);
        return acc;
    };
    return Symbol::callable(parts.front().dim(), f, m, s, opt);
}

ParametrixResult parametrix(const Symbol& a, const Symbol& chi, double s, double m1, int J, double floor) {
    if (!a.is_polynomial()) throw DomainError("parametrix: polynomial symbol required");
    if (J < 0) throw DomainError("parametrix: J must be nonnegative");
    const Poly& P = a.poly();
    DerivOptions opt{1e-2, 4};
    ParametrixResult out;
    out.s = s;
    out.m1 = m1;
    Symbol chi_d = chi.with_deriv_options(opt);
    out.terms.push_back(divide_by(chi_d, P, floor, -m1, s, opt));
    for (int j = 0;; ++j) {
        Symbol B = sum_symbols(out.terms, -m1, s, opt);
        Symbol prod = weyl_product_callable(B, P, 0.0);
        double rorder = -(1 + s) * (j + 1);
        auto rf = [prod, chi_d](std::span<const double> x, std::span<const double> xi) {
            return prod.eval(x, xi) - chi_d.eval(x, xi);
        };
        out.residuals.push_back(Symbol::callable(P.dim(), rf, rorder, s, opt));
        if (j == J) {
            out.b = B;
            break;
        }
        Symbol neg = Symbol::callable(P.dim(), [r = out.residuals.back()](std::span<const double> x, std::span<const double> xi) {
            return -r.eval(x, xi);
        }, rorder, s, opt);
        out.terms.push_back(divide_by(neg, P, floor, rorder - m1, s, opt));
    }
    return out;
}

double ray_decay_slope(const Symbol& r, const PhasePoint& z0, double s, double lambda_min, double lambda_max,
                       int points) {
    if (points < 2 || !(lambda_max > lambda_min) || !(lambda_min > 0)) throw DomainError("ray slope: bad range");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < points; ++i) {
        double lam = lambda_min * std::pow(lambda_max / lambda_min, double(i) / (points - 1));
        double v = std::abs(r(ray(z0, lam, s)));
        if (!(v > 0) || !std::isfinite(v)) continue;
        double X = std::log(lam), Y = std::log(v);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        ++cnt;
    }
    if (cnt < 2) return -std::numeric_limits<double>::infinity();
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

// ---------------------------------------------------------------- sampled apply

Signal apply_weyl_sampled(const Symbol& a, const Signal& u, double band) {
    const int n = static_cast<int>(u.v.size());
    if (n < 8 || (n & (n - 1)) != 0) throw DomainError("apply_weyl_sampled: length must be a power of two");
    const double dt = u.dt;
    unsigned blocks = std::max(1u, thread_count());
    std::vector<std::vector<cplx>> acc(blocks, std::vector<cplx>(n, 0.0));
    std::unique_ptr<Fft> bw;
    {
        std::lock_guard<std::mutex> lk(plan_mutex());
        bw = std::make_unique<Fft>(n, FFTW_BACKWARD);
    }
    const int H = 2 * n - 1;
    // smooth frequency taper: 1 below band * Nyquist, 0 above (band + 0.1) * Nyquist
    const double nyq = kPi / dt;
    std::vector<double> taper(n);
    for (int l = 0; l < n; ++l) {
        double xi = std::fabs((l - n / 2) * 2 * kPi / (n * dt));
        taper[l] = band >= 1 ? 1.0 : smooth_step(((band + 0.1) * nyq - xi) / (0.1 * nyq));
    }
    parallel_for(blocks, [&](size_t b) {
        fftw_complex* raw = fftw_alloc_complex(n);
        cplx* row = reinterpret_cast<cplx*>(raw);
        auto& out = acc[b];
        for (int m = static_cast<int>(b); m < H; m += static_cast<int>(blocks)) {
            double X = u.t0 + m * dt / 2;
            for (int l = 0; l < n; ++l)
                row[l] = taper[l] == 0 ? cplx(0) : taper[l] * a.eval1(X, (l - n / 2) * 2 * kPi / (n * dt));
            bw->run(raw);
            for (int r = 0; r < n; ++r) row[r] *= ((r & 1) ? -1.0 : 1.0) / n;
            // non-periodic: only offsets |j - k| < n/2 are represented by the row
            int j0 = std::max(0, m - (n - 1)), j1 = std::min(n - 1, m);
            for (int j = j0; j <= j1; ++j) {
                int k = m - j;
                if (2 * std::abs(j - k) >= n) continue;
                out[j] += row[mod(j - k, n)] * u.v[k];
            }
        }
        fftw_free(raw);
    });
    Signal r = u;
    for (int j = 0; j < n; ++j) {
        cplx s = 0;
        for (auto& v : acc) s += v[j];
        r.v[j] = s;
    }
    return r;
}

}  // namespace ag
