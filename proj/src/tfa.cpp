#include "aniso/tfa.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "aniso/airy.hpp"
#include "aniso/quadrature.hpp"
#include "json.hpp"

namespace ag {

namespace {

const cplx I(0, 1);
const double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2 * kPi);

double double_factorial_odd(int j) {  // (2j - 1)!!
    double r = 1;
    for (int i = 1; i <= j; ++i) r *= 2 * i - 1;
    return r;
}

cplx safe_log(cplx v) {
    if (v == cplx(0)) return {kNegInf, 0};
    return std::log(v);
}

// log int R(t) exp(a2 t^2 + a1 t + a0) dt, Re(-a2) >= 0, a2 != 0
cplx log_gauss_integral(const CPoly& R, cplx a2, cplx a1, cplx a0) {
    cplx A = -a2;
    cplx mu = a1 / (2.0 * A);
    CPoly rho = R.shifted(mu);
    cplx sum = 0, inv = 1.0 / (2.0 * A), p = 1;
    for (int j = 0; 2 * j < static_cast<int>(rho.c.size()); ++j) {
        sum += rho.c[2 * j] * double_factorial_odd(j) * p;
        p *= inv;
    }
    return a0 + a1 * a1 / (4.0 * A) + 0.5 * std::log(kPi / A) + safe_log(sum);
}

// log int R(t) exp(i c3 t^3 + a2 t^2 + a1 t + a0) dt via the Airy function
cplx log_airy_integral(const CPoly& R, double c3, cplx a2, cplx a1, cplx a0) {
    double alpha = std::cbrt(1.0 / (3.0 * c3));
    cplx beta = I * a2 / (3.0 * c3);
    cplx e1 = 3.0 * I * c3 * alpha * beta * beta + 2.0 * a2 * alpha * beta + a1 * alpha;
    cplx e0 = I * c3 * beta * beta * beta + a2 * beta * beta + a1 * beta + a0;
    cplx w = -I * e1;
    CPoly sigma = R.composed_linear(alpha, beta);
    AiryLog L = airy_log(w);
    // Ai^{(k)} = p_k(w) Ai + q_k(w) Ai'
    CPoly p = CPoly::constant(1.0), q;
    cplx sum = 0, ik = 1;
    for (int k = 0; k < static_cast<int>(sigma.c.size()); ++k) {
        sum += sigma.c[k] * ik * (p(w) * L.ai + q(w) * L.aip);
        CPoly np = p.derivative() + CPoly({0.0, 1.0}) * q;
        CPoly nq = p + q.derivative();
        p = np;
        q = nq;
        ik *= -I;
    }
    return e0 + std::log(2 * kPi * std::fabs(alpha)) + L.scale + safe_log(sum);
}

}  // namespace

// ---------------------------------------------------------------- Window

Window::Window(CPoly P, cplx g, std::string name) : P_(std::move(P)), g_(g), name_(std::move(name)) {
    if (!(g_.real() > 0)) throw DomainError("window: Re g must be positive");
    P_.trim();
    if (P_.is_zero()) throw DomainError("window: zero window");
}

Window Window::gaussian() { return Window(CPoly::constant(std::pow(kPi, -0.25)), 1.0, "gaussian"); }

Window Window::hermite(int k) {
    if (k < 0) throw DomainError("hermite: negative order");
    CPoly h0 = CPoly::constant(1.0), h1({0.0, 2.0});
    CPoly hk = k == 0 ? h0 : h1;
    for (int n = 1; n < k; ++n) {
        CPoly next = CPoly({0.0, 2.0}) * h1 - h0 * (2.0 * n);
        h0 = h1;
        h1 = next;
        hk = next;
    }
    double norm = std::pow(2.0, k) * std::tgamma(k + 1.0) * std::sqrt(kPi);
    return Window(hk * (1.0 / std::sqrt(norm)), 1.0, "hermite_" + std::to_string(k));
}

Window Window::from_name(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name.rfind("hermite_", 0) == 0) return hermite(std::stoi(name.substr(8)));
    throw CatalogError("unknown window: " + name);
}

cplx Window::operator()(double y) const { return P_(y) * std::exp(-g_ * y * y * 0.5); }

double Window::l2_norm() const {
    CPoly R = P_ * P_.conj();
    double a = g_.real(), sum = 0;
    for (int j = 0; 2 * j < static_cast<int>(R.c.size()); ++j)
        sum += R.c[2 * j].real() * std::tgamma(j + 0.5) / std::pow(a, j + 0.5);
    return std::sqrt(sum);
}

double Window::support_radius(double rel) const {
    double peak = 0, last = 0;
    for (double t = 0; t <= 80; t += 0.125) {
        double v = std::max(std::abs((*this)(t)), std::abs((*this)(-t)));
        peak = std::max(peak, v);
        if (v > rel * peak) last = t;
    }
    return last + 0.5;
}

Window Window::reflected() const { return Window(P_.reflected(), g_, name_); }
Window Window::conjugated() const { return Window(P_.conj(), std::conj(g_), name_); }

static CPoly gauss_derivative_transform(const CPoly& P, cplx g, cplx unit) {
    // sum_k p_k (unit d/d eta)^k exp(-eta^2 / (2 g)) = H(eta) exp(...)
    CPoly Hk = CPoly::constant(1.0), out;
    cplx uk = 1;
    for (size_t k = 0; k < P.c.size(); ++k) {
        out += Hk * (P.c[k] * uk);
        Hk = Hk.derivative() - CPoly({0.0, 1.0 / g}) * Hk;
        uk *= unit;
    }
    return out * (1.0 / std::sqrt(g));
}

Window Window::fourier() const { return Window(gauss_derivative_transform(P_, g_, I), 1.0 / g_, name_ + "^"); }
Window Window::inverse_fourier() const {
    return Window(gauss_derivative_transform(P_, g_, -I), 1.0 / g_, name_ + "v");
}

Window Window::dilated(double a) const {
    if (a == 0) throw DomainError("window: zero dilation");
    return Window(P_.scaled_arg(a) * std::sqrt(std::fabs(a)), g_ * a * a, name_);
}

Window Window::chirped(double B) const { return Window(P_, g_ + I * B, name_); }
Window Window::scaled(cplx c) const { return Window(P_ * c, g_, name_); }

// ---------------------------------------------------------------- Signal

double Signal::norm() const {
    double r = 0;
    for (auto& c : v) r += std::norm(c);
    return std::sqrt(r * dt);
}

void Signal::write_csv(const std::string& path, const std::string& comment) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(17);
    if (!comment.empty()) {
        std::istringstream cs(comment);
        for (std::string line; std::getline(cs, line);) os << "# " << line << '\n';
    }
    os << "t,re,im\n";
    for (size_t k = 0; k < v.size(); ++k) os << t(k) << ',' << v[k].real() << ',' << v[k].imag() << '\n';
}

Signal Signal::read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::vector<double> ts;
    Signal s;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t, re, im = 0;
        if (!(ls >> t >> re)) throw DomainError("signal csv: malformed line: " + line);
        ls >> im;
        ts.push_back(t);
        s.v.emplace_back(re, im);
    }
    if (ts.size() < 2) throw DomainError("signal csv: need at least two samples");
    s.t0 = ts.front();
    s.dt = (ts.back() - ts.front()) / (ts.size() - 1);
    for (size_t k = 1; k < ts.size(); ++k)
        if (std::fabs(ts[k] - ts[k - 1] - s.dt) > 1e-6 * std::fabs(s.dt))
            throw DomainError("signal csv: grid is not uniform");
    return s;
}

void Signal::write_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    const char magic[4] = {'A', 'G', 'S', '1'};
    uint64_t n = v.size();
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&t0), sizeof t0);
    os.write(reinterpret_cast<const char*>(&dt), sizeof dt);
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
}

Signal Signal::read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    char magic[4];
    uint64_t n = 0;
    Signal s;
    is.read(magic, 4);
    if (std::memcmp(magic, "AGS1", 4) != 0) throw DomainError("signal binary: bad magic");
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&s.t0), sizeof s.t0);
    is.read(reinterpret_cast<char*>(&s.dt), sizeof s.dt);
    s.v.resize(n);
    is.read(reinterpret_cast<char*>(s.v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
    if (!is) throw DomainError("signal binary: truncated file");
    return s;
}

// ---------------------------------------------------------------- Distribution defaults

cplx Distribution::value(double) const { throw DomainError(kind() + " has no pointwise values"); }

DistPtr Distribution::translated(double a) const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Translate, a);
}
DistPtr Distribution::modulated(double eta) const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Modulate, eta);
}
DistPtr Distribution::dilated(double A) const {
    if (A == 0) throw DomainError("dilation: A must be nonzero");
    return std::make_shared<Transformed>(self(), Transformed::Op::Dilate, A);
}
DistPtr Distribution::chirp_multiplied(double B) const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Chirp, B);
}
DistPtr Distribution::fourier() const { return std::make_shared<FourierImage>(self()); }
DistPtr Distribution::reflected() const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Reflect, 0.0);
}
DistPtr Distribution::conjugated() const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Conj, 0.0);
}
DistPtr Distribution::scaled(cplx c) const {
    return std::make_shared<Transformed>(self(), Transformed::Op::Scale, 0.0, c);
}

// ---------------------------------------------------------------- ExpPoly

ExpPoly::ExpPoly(CPoly Q, CPoly E) : Q_(std::move(Q)), E_(std::move(E)) {
    Q_.trim();
    E_.trim();
    int d = E_.degree();
    if (d >= 1 && E_.c[d].real() > 0) throw DomainError("exp_poly: exponent grows, not tempered");
    if (d >= 3 && E_.c[d].real() != 0 && d % 2 == 1)
        throw DomainError("exp_poly: odd-degree exponent with real leading part");
}

cplx ExpPoly::value(double y) const {
    if (Q_.is_zero()) return 0;
    return Q_(y) * std::exp(E_(y));
}

double ExpPoly::phase_rate(double a, double b) const {
    double M = std::max(std::fabs(a), std::fabs(b)), r = 0, p = 1;
    for (size_t k = 1; k < E_.c.size(); ++k) {
        r += k * std::fabs(E_.c[k].imag()) * p;
        p *= M;
    }
    return r;
}

std::optional<cplx> ExpPoly::log_stft(const Window& w, double x, double xi) const {
    if (Q_.is_zero()) return cplx(kNegInf, 0);
    int d = E_.degree();
    cplx gb = std::conj(w.g());
    if (d <= 2) {
        // window coordinates t = y - x keep the linear-in-x parts exact
        CPoly Qs = Q_.shifted(x), Es = E_.shifted(x);
        CPoly R = Qs * w.P().conj();
        cplx a2 = Es.at(2) - 0.5 * gb, a1 = Es.at(1) - I * xi, a0 = Es.at(0) - I * xi * x;
        return log_gauss_integral(R, a2, a1, a0) - kLogSqrt2Pi;
    }
    if (d == 3 && E_.c[3].real() == 0) {
        double c3 = E_.c[3].imag();
        CPoly R = Q_ * w.P().conj().shifted(-x);
        cplx a2 = E_.at(2) - 0.5 * gb, a1 = E_.at(1) + gb * x - I * xi, a0 = E_.at(0) - 0.5 * gb * x * x;
        return log_airy_integral(R, c3, a2, a1, a0) - kLogSqrt2Pi;
    }
    return std::nullopt;
}

DistPtr ExpPoly::translated(double a) const { return std::make_shared<ExpPoly>(Q_.shifted(-a), E_.shifted(-a)); }
DistPtr ExpPoly::modulated(double eta) const { return std::make_shared<ExpPoly>(Q_, E_ + CPoly({0.0, I * eta})); }
DistPtr ExpPoly::dilated(double A) const {
    if (A == 0) throw DomainError("dilation: A must be nonzero");
    return std::make_shared<ExpPoly>(Q_.scaled_arg(A) * std::sqrt(std::fabs(A)), E_.scaled_arg(A));
}
DistPtr ExpPoly::chirp_multiplied(double B) const {
    return std::make_shared<ExpPoly>(Q_, E_ + CPoly({0.0, 0.0, 0.5 * I * B}));
}
DistPtr ExpPoly::reflected() const { return std::make_shared<ExpPoly>(Q_.reflected(), E_.reflected()); }
DistPtr ExpPoly::conjugated() const { return std::make_shared<ExpPoly>(Q_.conj(), E_.conj()); }
DistPtr ExpPoly::scaled(cplx c) const { return std::make_shared<ExpPoly>(Q_ * c, E_); }

DistPtr ExpPoly::fourier() const {
    int d = E_.degree();
    if (Q_.is_zero()) return std::make_shared<ZeroDist>();
    if (d <= 1) {
        // F[y^k e^{i eta0 y}] = (2 pi)^{1/2} (-1)^k D^k delta_{eta0}
        if (E_.at(1).real() != 0) return Distribution::fourier();
        double eta0 = E_.at(1).imag();
        cplx pre = std::exp(E_.at(0)) * std::sqrt(2 * kPi);
        std::vector<cplx> c(Q_.c.size());
        for (size_t k = 0; k < c.size(); ++k) c[k] = pre * Q_.c[k] * ((k & 1) ? -1.0 : 1.0);
        return std::make_shared<DeltaComb>(eta0, c);
    }
    if (d == 2) {
        cplx A = -E_.c[2], E1 = E_.at(1), E0 = E_.at(0);
        // mu(eta) = m0 + m1 eta, Q(mu + t) moments in t
        CPoly mu({E1 / (2.0 * A), -I / (2.0 * A)});
        CPoly out, mupow = CPoly::constant(1.0);
        std::vector<CPoly> pw = {mupow};
        for (size_t k = 1; k < Q_.c.size(); ++k) pw.push_back(pw.back() * mu);
        for (size_t k = 0; k < Q_.c.size(); ++k) {
            double binom = 1;
            for (int i = 0; i <= static_cast<int>(k); ++i) {
                if (i > 0) binom = binom * (k - i + 1) / i;
                if (i % 2) continue;
                int j = i / 2;
                cplx m = binom * double_factorial_odd(j) * std::pow(1.0 / (2.0 * A), j);
                out += pw[k - i] * (Q_.c[k] * m);
            }
        }
        cplx pre = std::sqrt(kPi / A) / std::sqrt(2 * kPi);
        CPoly En({E0 + E1 * E1 / (4.0 * A), -I * E1 / (2.0 * A), -1.0 / (4.0 * A)});
        return std::make_shared<ExpPoly>(out * pre, En);
    }
    return Distribution::fourier();
}

std::shared_ptr<const ExpPoly> ExpPoly::times_poly(const CPoly& p) const {
    return std::make_shared<ExpPoly>(Q_ * p, E_);
}

std::shared_ptr<const ExpPoly> ExpPoly::derivative_D() const {
    return std::make_shared<ExpPoly>((Q_.derivative() + Q_ * E_.derivative()) * (-I), E_);
}

// ---------------------------------------------------------------- DeltaComb

DeltaComb::DeltaComb(double x0, std::vector<cplx> c) : x0_(x0), c_(std::move(c)) {
    while (!c_.empty() && c_.back() == cplx(0)) c_.pop_back();
}

std::optional<cplx> DeltaComb::log_stft(const Window& w, double x, double xi) const {
    if (c_.empty()) return cplx(kNegInf, 0);
    double X = x - x0_;
    cplx g = w.g();
    // phi^{(j)} = P_j exp(-g y^2/2), P_{j+1} = P_j' - g y P_j
    int K = static_cast<int>(c_.size());
    std::vector<CPoly> Pj = {w.P()};
    for (int j = 1; j < K; ++j) Pj.push_back(Pj.back().derivative() - CPoly({0.0, g}) * Pj.back());
    cplx S = 0;
    for (int k = 0; k < K; ++k) {
        if (c_[k] == cplx(0)) continue;
        double binom = 1;
        cplx inner = 0;
        for (int b = 0; b <= k; ++b) {
            if (b > 0) binom = binom * (k - b + 1) / b;
            int j = k - b;
            cplx Dj = std::pow(-I, j) * Pj[j](-X);  // (D^j phi)(-X) without the Gaussian
            inner += binom * std::pow(xi, b) * std::conj(Dj);
        }
        S += c_[k] * inner;
    }
    return -I * xi * x0_ - kLogSqrt2Pi - 0.5 * std::conj(g) * X * X + safe_log(S);
}

DistPtr DeltaComb::translated(double a) const { return std::make_shared<DeltaComb>(x0_ + a, c_); }

DistPtr DeltaComb::dilated(double A) const {
    if (A == 0) throw DomainError("dilation: A must be nonzero");
    std::vector<cplx> c(c_);
    for (size_t k = 0; k < c.size(); ++k) c[k] *= std::pow(std::fabs(A), -0.5) * std::pow(A, -double(k));
    return std::make_shared<DeltaComb>(x0_ / A, c);
}

DistPtr DeltaComb::fourier() const {
    std::vector<cplx> q(c_);
    for (auto& v : q) v /= std::sqrt(2 * kPi);
    return std::make_shared<ExpPoly>(CPoly(q), CPoly({0.0, -I * x0_}));
}

DistPtr DeltaComb::reflected() const {
    std::vector<cplx> c(c_);
    for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return std::make_shared<DeltaComb>(-x0_, c);
}

DistPtr DeltaComb::conjugated() const {
    std::vector<cplx> c(c_);
    for (size_t k = 0; k < c.size(); ++k) c[k] = std::conj(c[k]) * ((k & 1) ? -1.0 : 1.0);
    return std::make_shared<DeltaComb>(x0_, c);
}

DistPtr DeltaComb::scaled(cplx a) const {
    std::vector<cplx> c(c_);
    for (auto& v : c) v *= a;
    return std::make_shared<DeltaComb>(x0_, c);
}

// ---------------------------------------------------------------- FourierImage, Airy

std::optional<cplx> FourierImage::log_stft(const Window& w, double x, double xi) const {
    auto v = inner_->log_stft(w.inverse_fourier(), -xi, x);
    if (!v) return std::nullopt;
    return *v - I * x * xi;
}

DistPtr FourierImage::fourier() const { return inner_->reflected(); }

AiryDist::AiryDist()
    : FourierImage(std::make_shared<ExpPoly>(CPoly::constant(1.0 / std::sqrt(2 * kPi)),
                                             CPoly({0.0, 0.0, 0.0, -I / 3.0}))) {}

cplx AiryDist::value(double y) const { return airy_ai_real(y); }

double AiryDist::phase_rate(double a, double b) const {
    return std::sqrt(std::max(0.0, -std::min(a, b))) + 1.0;
}

// ---------------------------------------------------------------- Transformed

Transformed::Transformed(DistPtr inner, Op op, double p, cplx c) : inner_(std::move(inner)), op_(op), p_(p), c_(c) {
    if (op_ == Op::Dilate && p_ == 0) throw DomainError("dilation: A must be nonzero");
}

std::string Transformed::kind() const {
    static const char* names[] = {"translate", "modulate", "dilate", "chirp", "reflect", "conj", "scale"};
    return std::string(names[static_cast<int>(op_)]) + "(" + inner_->kind() + ")";
}

std::optional<cplx> Transformed::log_stft(const Window& w, double x, double xi) const {
    std::optional<cplx> v;
    switch (op_) {
        case Op::Translate:
            v = inner_->log_stft(w, x - p_, xi);
            if (v) *v -= I * p_ * xi;
            return v;
        case Op::Modulate: return inner_->log_stft(w, x, xi - p_);
        case Op::Dilate: return inner_->log_stft(w.dilated(1.0 / p_), p_ * x, xi / p_);
        case Op::Chirp:
            v = inner_->log_stft(w.chirped(p_), x, xi - p_ * x);
            if (v) *v -= 0.5 * I * p_ * x * x;
            return v;
        case Op::Reflect: return inner_->log_stft(w.reflected(), -x, -xi);
        case Op::Conj:
            v = inner_->log_stft(w.conjugated(), x, -xi);
            if (v) *v = std::conj(*v);
            return v;
        case Op::Scale:
            v = inner_->log_stft(w, x, xi);
            if (v) *v += safe_log(c_);
            return v;
    }
    return std::nullopt;
}

cplx Transformed::value(double y) const {
    switch (op_) {
        case Op::Translate: return inner_->value(y - p_);
        case Op::Modulate: return std::exp(I * p_ * y) * inner_->value(y);
        case Op::Dilate: return std::sqrt(std::fabs(p_)) * inner_->value(p_ * y);
        case Op::Chirp: return std::exp(0.5 * I * p_ * y * y) * inner_->value(y);
        case Op::Reflect: return inner_->value(-y);
        case Op::Conj: return std::conj(inner_->value(y));
        case Op::Scale: return c_ * inner_->value(y);
    }
    return 0;
}

double Transformed::phase_rate(double a, double b) const {
    switch (op_) {
        case Op::Translate: return inner_->phase_rate(a - p_, b - p_);
        case Op::Modulate: return inner_->phase_rate(a, b) + std::fabs(p_);
        case Op::Dilate: {
            double u = p_ * a, v = p_ * b;
            return std::fabs(p_) * inner_->phase_rate(std::min(u, v), std::max(u, v));
        }
        case Op::Chirp: return inner_->phase_rate(a, b) + std::fabs(p_) * std::max(std::fabs(a), std::fabs(b));
        case Op::Reflect: return inner_->phase_rate(-b, -a);
        default: return inner_->phase_rate(a, b);
    }
}

SampledDist::SampledDist(Signal s) : sig_(std::move(s)) {
    if (sig_.v.size() < 8) throw DomainError("sampled: need at least 8 samples");
    if (!(sig_.dt > 0)) throw DomainError("sampled: dt must be positive");
}

// ---------------------------------------------------------------- evaluator

StftEvaluator::StftEvaluator(DistPtr u, Window w, StftMethod m, QuadratureSpec q)
    : u_(std::move(u)), w_(std::move(w)), requested_(m), method_(m), q_(q) {
    if (!u_) throw DomainError("stft: null distribution");
    wsupport_ = w_.support_radius(q_.window_tail);
    bool sampled = dynamic_cast<const SampledDist*>(u_.get()) != nullptr;
    bool closed = u_->log_stft(w_, 0.3, 0.7).has_value();
    if (m == StftMethod::Auto) {
        method_ = sampled ? StftMethod::Sampled : closed ? StftMethod::ClosedForm : StftMethod::Quadrature;
    }
    if (method_ == StftMethod::Sampled && !sampled) throw DomainError("stft: sampled method needs a sampled signal");
    if (method_ == StftMethod::ClosedForm && !closed) throw DomainError("stft: no closed form for " + u_->kind());
    if (method_ == StftMethod::Quadrature && !u_->pointwise())
        throw DomainError("stft: quadrature needs pointwise values for " + u_->kind());
}

double StftEvaluator::max_valid_xi() const {
    if (method_ == StftMethod::ClosedForm) return std::numeric_limits<double>::infinity();
    if (method_ == StftMethod::Sampled) {
        auto* s = static_cast<const SampledDist*>(u_.get());
        return 0.8 * kPi / s->signal().dt;
    }
    return q_.panel_cap * q_.phase_cap / (2 * wsupport_);
}

double StftEvaluator::x_limit() const {
    if (method_ != StftMethod::Sampled) return std::numeric_limits<double>::infinity();
    auto* s = static_cast<const SampledDist*>(u_.get());
    return 0.5 * (s->signal().t_end() - s->signal().t0) - wsupport_;
}

bool StftEvaluator::valid(double x, double xi) const {
    if (method_ == StftMethod::ClosedForm) return true;
    if (method_ == StftMethod::Sampled) {
        auto* s = static_cast<const SampledDist*>(u_.get());
        const Signal& g = s->signal();
        return x - wsupport_ >= g.t0 && x + wsupport_ <= g.t_end() && std::fabs(xi) <= max_valid_xi();
    }
    double rate = u_->phase_rate(x - wsupport_, x + wsupport_) + std::fabs(xi) +
                  std::fabs(w_.g().imag()) * wsupport_ + 1.0;
    return rate * 2 * wsupport_ / q_.phase_cap <= q_.panel_cap;
}

StftSample StftEvaluator::quadrature(double x, double xi) const {
    StftSample out;
    const Window& w = w_;
    auto f = [&](double y) { return u_->value(y) * std::conj(w(y - x)) * std::exp(-I * xi * y); };
    double gi = std::fabs(w.g().imag()), pd = w.P().degree() + 1;
    auto rate = [&](double a, double b) {
        return u_->phase_rate(a, b) + std::fabs(xi) + gi * std::max(std::fabs(a - x), std::fabs(b - x)) + pd;
    };
    PanelResult r = integrate_panels(f, x - wsupport_, x + wsupport_, rate, q_.phase_cap, q_.panel_cap);
    if (r.capped) {
        out.valid = false;
        return out;
    }
    double floor = q_.floor_rel * r.abs_sum / std::sqrt(2 * kPi);
    out.floor_log = floor > 0 ? std::log(floor) : kNegInf;
    cplx v = r.value / std::sqrt(2 * kPi);
    out.logv = safe_log(v);
    if (std::abs(v) <= floor) {
        out.floored = true;
        out.logv = cplx(out.floor_log, 0);
    }
    return out;
}

StftSample StftEvaluator::sampled(double x, double xi) const {
    StftSample out;
    if (!valid(x, xi)) {
        out.valid = false;
        return out;
    }
    auto* s = static_cast<const SampledDist*>(u_.get());
    const Signal& g = s->signal();
    long k0 = static_cast<long>(std::ceil((x - wsupport_ - g.t0) / g.dt));
    long k1 = static_cast<long>(std::floor((x + wsupport_ - g.t0) / g.dt));
    k0 = std::max(0L, k0);
    k1 = std::min(static_cast<long>(g.v.size()) - 1, k1);
    const cplx gb = std::conj(w_.g());
    const CPoly Pb = w_.P().conj();
    double t = g.t(k0) - x;
    // exp(-gb t^2/2) and exp(-i xi y) advanced by multiplicative recurrences
    cplx gauss = std::exp(-0.5 * gb * t * t);
    cplx gstep = std::exp(-gb * (t * g.dt + 0.5 * g.dt * g.dt));
    const cplx gstep2 = std::exp(-gb * g.dt * g.dt);
    cplx ph = std::exp(-I * xi * g.t(k0));
    const cplx phstep = std::exp(-I * xi * g.dt);
    cplx acc = 0;
    double mag = 0;
    for (long k = k0; k <= k1; ++k) {
        double tk = g.t(k) - x;
        cplx wv = Pb(tk) * gauss;
        cplx term = g.v[k] * wv;
        acc += term * ph;
        mag += std::abs(term);
        gauss *= gstep;
        gstep *= gstep2;
        ph *= phstep;
        if ((k - k0) % 256 == 255) {  // re-anchor the recurrences
            double tn = g.t(k + 1) - x;
            gauss = std::exp(-0.5 * gb * tn * tn);
            gstep = std::exp(-gb * (tn * g.dt + 0.5 * g.dt * g.dt));
            ph = std::exp(-I * xi * g.t(k + 1));
        }
    }
    const double c = g.dt / std::sqrt(2 * kPi);
    cplx v = acc * c;
    double floor = q_.floor_rel * mag * c;
    out.floor_log = floor > 0 ? std::log(floor) : kNegInf;
    out.logv = safe_log(v);
    if (std::abs(v) <= floor) {
        out.floored = true;
        out.logv = cplx(out.floor_log, 0);
    }
    return out;
}

StftSample StftEvaluator::log_eval(double x, double xi) const {
    switch (method_) {
        case StftMethod::ClosedForm: {
            StftSample s;
            s.logv = *u_->log_stft(w_, x, xi);
            return s;
        }
        case StftMethod::Sampled: return sampled(x, xi);
        default:
            if (!valid(x, xi)) {
                StftSample s;
                s.valid = false;
                return s;
            }
            return quadrature(x, xi);
    }
}

cplx StftEvaluator::eval(double x, double xi) const {
    StftSample s = log_eval(x, xi);
    if (!s.valid) {
        std::ostringstream os;
        os << "stft: point (" << x << ", " << xi << ") outside the evaluator budget";
        throw CappedEvaluation(os.str(), max_valid_xi());
    }
    if (s.logv.real() == kNegInf) return 0;
    return std::exp(s.logv);
}

cplx StftEvaluator::operator()(const PhasePoint& z) const {
    if (z.dim() != 1) throw DomainError("stft: d = 1 only");
    return eval(z.x[0], z.xi[0]);
}

// ---------------------------------------------------------------- STFT grid

double StftGrid::xi(int col) const {
    int n = static_cast<int>(sig.v.size());
    return (col - n / 2) * 2 * kPi / (n * sig.dt);
}

StftGrid stft_grid(const Signal& u, const Window& w, int hop) {
    if (hop < 1) throw DomainError("stft_grid: hop must be positive");
    int n = static_cast<int>(u.v.size());
    if (n < 8) throw DomainError("stft_grid: signal too short");
    StftGrid G;
    G.hop = hop;
    G.sig = u;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    const double c = u.dt / std::sqrt(2 * kPi);
    for (int j = 0; j * hop < n; ++j) {
        double x = G.x(j);
        for (int k = 0; k < n; ++k) {
            cplx b = u.v[k] * std::conj(w(u.t(k) - x));
            buf[k][0] = b.real();
            buf[k][1] = b.imag();
        }
        fftw_execute(plan);
        std::vector<cplx> row(n);
        for (int col = 0; col < n; ++col) {
            int l = col - n / 2;
            int idx = ((l % n) + n) % n;
            double xil = G.xi(col);
            row[col] = c * cplx(buf[idx][0], buf[idx][1]) * std::exp(-I * xil * u.t0);
        }
        G.V.push_back(std::move(row));
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return G;
}

Signal invert(const StftGrid& G, const Window& w) {
    if (std::fabs(w.l2_norm() - 1) > 1e-10) throw DomainError("invert: window must have unit L2 norm");
    const Signal& u = G.sig;
    int n = static_cast<int>(u.v.size());
    std::vector<cplx> num(n, 0.0);
    std::vector<double> den(n, 0.0);
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    const double c = std::sqrt(2 * kPi) / (n * u.dt);
    for (size_t j = 0; j < G.V.size(); ++j) {
        for (int col = 0; col < n; ++col) {
            int l = col - n / 2;
            int idx = ((l % n) + n) % n;
            cplx v = G.V[j][col] * std::exp(I * G.xi(col) * u.t0);
            buf[idx][0] = v.real();
            buf[idx][1] = v.imag();
        }
        fftw_execute(plan);
        double x = G.x(static_cast<int>(j));
        for (int k = 0; k < n; ++k) {
            cplx b = c * cplx(buf[k][0], buf[k][1]);
            cplx wv = w(u.t(k) - x);
            num[k] += b * wv;
            den[k] += std::norm(wv);
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    Signal out = u;
    for (int k = 0; k < n; ++k) out.v[k] = den[k] > 0 ? num[k] / den[k] : cplx(0);
    return out;
}

double stft_energy(const StftGrid& G) {
    int n = static_cast<int>(G.sig.v.size());
    double dxi = 2 * kPi / (n * G.sig.dt), e = 0;
    for (auto& row : G.V)
        for (auto& v : row) e += std::norm(v);
    return e * G.hop * G.sig.dt * dxi;
}

Signal sample(const DistPtr& u, double t0, double dt, size_t n) {
    if (!u->pointwise()) throw DomainError("sample: " + u->kind() + " has no pointwise values");
    Signal s;
    s.t0 = t0;
    s.dt = dt;
    s.v.resize(n);
    for (size_t k = 0; k < n; ++k) s.v[k] = u->value(s.t(k));
    return s;
}

Signal edge_tapered(const Signal& u, double frac) {
    if (!(frac >= 0 && frac <= 0.5)) throw DomainError("edge_tapered: frac must lie in [0, 1/2]");
    Signal out = u;
    if (frac == 0 || u.size() < 2) return out;
    double c = 0.5 * (u.t0 + u.t_end()), half = 0.5 * (u.t_end() - u.t0);
    for (size_t k = 0; k < out.size(); ++k)
        out.v[k] *= smooth_step((half - std::fabs(u.t(k) - c)) / (frac * half));
    return out;
}

DistPtr metaplectic(const DistPtr& u, MetaplecticKind kind, double param) {
    switch (kind) {
        case MetaplecticKind::Fourier: return u->fourier();
        case MetaplecticKind::Dilate:
            if (param == 0 || !std::isfinite(param)) throw DomainError("metaplectic: singular dilation");
            return u->dilated(param);
        case MetaplecticKind::ChirpMul: return u->chirp_multiplied(param);
    }
    throw DomainError("metaplectic: unknown kind");
}

DistPtr weyl_apply_symbolic(const Poly& a, const DistPtr& u) {
    if (a.dim() != 1) throw DomainError("weyl_apply_symbolic: d = 1 only");
    if (dynamic_cast<const ZeroDist*>(u.get())) return u;
    auto ep = std::dynamic_pointer_cast<const ExpPoly>(u);
    if (!ep) throw DomainError("weyl_apply_symbolic: exp-poly distribution required");
    CPoly total;
    for (auto& [k, c] : a.terms()) {
        int j = k[0], q = k[1];
        double binom = 1;
        for (int r = 0; r <= j; ++r) {
            if (r > 0) binom = binom * (j - r + 1) / r;
            // 2^{-j} C(j, r) x^r D^q x^{j-r}
            auto v = ep->times_poly(CPoly::monomial(j - r));
            for (int i = 0; i < q; ++i) v = v->derivative_D();
            v = v->times_poly(CPoly::monomial(r));
            total += v->Q() * (c * binom * std::exp2(-j));
        }
    }
    total.trim();
    if (total.is_zero()) return std::make_shared<ZeroDist>();
    return std::make_shared<ExpPoly>(total, ep->E());
}

// ---------------------------------------------------------------- oracles

bool GroundTruth::contains(double angle, double tol) const {
    return std::any_of(angles.begin(), angles.end(), [&](double a) { return angle_diff(a, angle) <= tol; });
}

static double sphere_angle(double x, double xi, double s) {
    double px, pxi;
    project1(x, xi, s, px, pxi);
    return direction_angle(px, pxi);
}

static GroundTruth chirp_truth(const std::vector<double>& phi, double s) {
    int m = static_cast<int>(phi.size()) - 1;
    bool even = true, odd = true;
    for (int k = 1; k <= m; ++k) {
        if (phi[k] == 0) continue;
        if (k % 2) even = false; else odd = false;
    }
    GroundTruth t;
    t.s = s;
    double cm = phi[m];
    if (std::fabs(s - (m - 1)) < 1e-12) {
        t.angles = {sphere_angle(1, m * cm, s), sphere_angle(-1, m * cm * ((m - 1) % 2 ? -1 : 1), s)};
        t.exact = even || odd;
        t.note = "graph of the principal gradient";
    } else if (s > m - 1) {
        t.angles = {0, 180};
        t.exact = even || odd;
        t.note = "(R\\0) x {0}";
    } else {
        t.angles = {90, 270};
        t.exact = even;
        t.note = "{0} x (R\\0)";
    }
    return t;
}

std::vector<std::string> oracle_catalog() {
    return {"delta", "monomial", "x", "one", "plane_wave", "gaussian", "hermite", "chirp2", "chirp3", "poly_chirp", "airy"};
}

Oracle generate_oracle(const std::string& kind, const std::string& params_json) {
    nlohmann::json p;
    try {
        p = params_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(params_json);
    } catch (const std::exception& e) {
        throw CatalogError(std::string("oracle params: ") + e.what());
    }
    if (!p.is_object()) throw CatalogError("oracle params must be a JSON object");
    Oracle o;
    o.name = kind;
    o.params_json = p.dump();
    auto fixed = [](std::vector<double> angles, std::string note, bool exact = true) {
        return [angles, note, exact](double s) {
            GroundTruth t;
            t.s = s;
            t.angles = angles;
            t.note = note;
            t.exact = exact;
            return t;
        };
    };
    if (kind == "delta") {
        int alpha = p.value("alpha", 0);
        if (alpha < 0) throw CatalogError("delta: alpha must be nonnegative");
        std::vector<cplx> c(alpha + 1, 0.0);
        c[alpha] = 1.0;
        o.u = std::make_shared<DeltaComb>(p.value("x0", 0.0), c);
        o.truth = fixed({90, 270}, "{0} x (R\\0)");
    } else if (kind == "monomial" || kind == "x") {
        int alpha = kind == "x" ? 1 : p.value("alpha", 1);
        if (alpha < 0) throw CatalogError("monomial: alpha must be nonnegative");
        o.u = std::make_shared<ExpPoly>(CPoly::monomial(alpha), CPoly());
        o.truth = fixed({0, 180}, "(R\\0) x {0}");
    } else if (kind == "plane_wave" || kind == "one") {
        double xi0 = kind == "one" ? 0.0 : p.value("xi0", 0.0);
        o.u = std::make_shared<ExpPoly>(CPoly::constant(1.0), CPoly({0.0, I * xi0}));
        o.truth = fixed({0, 180}, "(R\\0) x {0}");
    } else if (kind == "gaussian") {
        o.u = std::make_shared<ExpPoly>(CPoly::constant(std::pow(kPi, -0.25)), CPoly({0.0, 0.0, -0.5}));
        o.truth = fixed({}, "empty");
    } else if (kind == "hermite") {
        int k = p.value("k", 1);
        o.u = std::make_shared<ExpPoly>(Window::hermite(k).P(), CPoly({0.0, 0.0, -0.5}));
        o.truth = fixed({}, "empty");
    } else if (kind == "chirp2" || kind == "chirp3" || kind == "poly_chirp") {
        std::vector<double> phi;
        if (kind == "chirp2") phi = {0, 0, p.value("c", 1.0)};
        else if (kind == "chirp3") phi = {0, 0, 0, p.value("c", 1.0)};
        else {
            if (!p.contains("coeffs")) throw CatalogError("poly_chirp: coeffs required");
            phi = p["coeffs"].get<std::vector<double>>();
        }
        while (!phi.empty() && phi.back() == 0) phi.pop_back();
        if (phi.size() < 3) throw CatalogError("poly_chirp: phase degree must be at least 2");
        std::vector<cplx> e(phi.size());
        for (size_t k = 0; k < phi.size(); ++k) e[k] = I * phi[k];
        o.u = std::make_shared<ExpPoly>(CPoly::constant(1.0), CPoly(e));
        o.truth = [phi](double s) { return chirp_truth(phi, s); };
    } else if (kind == "airy") {
        o.u = std::make_shared<AiryDist>();
        o.truth = [](double s) {
            GroundTruth t;
            t.s = s;
            if (std::fabs(s - 0.5) < 1e-12) {
                t.angles = {sphere_angle(-1, 1, s), sphere_angle(-1, -1, s)};
                t.note = "{(-x^2, x)}";
            } else if (std::fabs(s - 1) < 1e-12) {
                t.angles = {180};
                t.note = "{(x, 0): x < 0}";
            } else if (s < 0.5) {
                t.angles = {90, 270};
                t.note = "{0} x (R\\0)";
            } else {
                t.angles = {0, 180};
                t.exact = false;
                t.note = "inside (R\\0) x {0}";
            }
            return t;
        };
    } else {
        throw CatalogError("unknown oracle: " + kind);
    }
    return o;
}

}  // namespace ag
