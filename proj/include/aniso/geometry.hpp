#pragma once

#include <vector>

#include "aniso/common.hpp"

namespace ag {

struct PhasePoint {
    std::vector<double> x, xi;

    PhasePoint() = default;
    PhasePoint(std::vector<double> x_, std::vector<double> xi_);
    static PhasePoint d1(double x, double xi) { return PhasePoint({x}, {xi}); }

    int dim() const { return static_cast<int>(x.size()); }
    double norm() const;
    double norm_x() const;
    double norm_xi() const;
    bool is_zero() const { return norm() == 0.0; }
};

struct GeometryConfig {
    double lambda_tol = 1e-12;
    double tilde_span = 10.0;  // log-lambda half width for the tilde search
    int tilde_iters = 200;
};

double kappa(double t);
double mu_weight(const PhasePoint& z, double s);
double mu_weight(double ax, double axi, double s);

// lambda for |x| = a, |xi| = b
double solve_lambda(double a, double b, double s, double tol = 1e-12);
double solve_lambda(const PhasePoint& z, double s, double tol = 1e-12);

PhasePoint project(const PhasePoint& z, double s, double tol = 1e-12);
void project1(double x, double xi, double s, double& px, double& pxi);
PhasePoint ray(const PhasePoint& z, double lambda, double s);

struct SConicNbhd {
    enum class Kind { Projection, Tilde };
    PhasePoint center;
    double epsilon;
    double s;
    Kind kind = Kind::Projection;

    SConicNbhd(PhasePoint c, double eps, double s_, Kind k = Kind::Projection);
};

bool contains(const SConicNbhd& nb, const PhasePoint& z, const GeometryConfig& cfg = {});

// distance from z0 to the closest point of the s-ray through z
double ray_distance(const PhasePoint& z0, const PhasePoint& z, double s, const GeometryConfig& cfg = {});

// d = 1 helpers on the unit circle, angles in degrees
double direction_angle(double x, double xi);
void angle_point(double deg, double& x, double& xi);
double angle_diff(double a_deg, double b_deg);

}  // namespace ag
