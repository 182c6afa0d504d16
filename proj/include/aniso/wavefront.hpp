#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aniso/tfa.hpp"

namespace ag {

struct EstimatorConfig {
    double n_thresh = 5.0;
    double r_max = 1.0;
    double cap_radius = 0.05;  // chord length on the unit circle
    int cap_coarse = 9;
    int cap_refine_iters = 40;
    double lambda_min = 4.0;
    double lambda_max = 0.0;  // 0: automatic
    int lambda_points = 24;
    int sphere_res = 360;
    // closed-form paths: lambda_max = min(x_reach, xi_reach^{1/s})
    double x_reach = 1e6;
    double xi_reach = 1e8;
    double fit_tail = 0.5;           // fraction of the log-lambda range (upper end) used by the fit
    double lambda_search_cap = 1e6;     // upper end of the validity search on capped paths
};

enum class DirClass { Singular, Regular, Inconclusive };
std::string to_string(DirClass c);

struct DecayProfile {
    double angle = 0;  // degrees
    double s = 1;
    double cap_half_angle = 0;  // degrees
    std::vector<double> lambda;
    std::vector<double> log_sup;  // log sup_cap |V|
    std::vector<bool> valid, floored;
    double lambda_max_valid = 0;
    double slope = 0;
    double residual = 0;
    int fit_points = 0;
    DirClass cls = DirClass::Inconclusive;
};

DecayProfile decay_profile(const StftEvaluator& e, double angle_deg, double s, const EstimatorConfig& cfg = {});

struct WaveFrontEstimate {
    double s = 1;
    EstimatorConfig cfg;
    std::vector<DecayProfile> dirs;

    std::vector<double> singular_angles() const;
    int count(DirClass c) const;
    std::string to_json(const std::string& config_json = "") const;
    std::string decay_csv() const;
};

WaveFrontEstimate estimate_wavefront(const StftEvaluator& e, double s, const EstimatorConfig& cfg = {});

// singular directions plus bookkeeping, either from an estimate or a ground truth
struct DirSet {
    double s = 1;
    std::vector<double> angles;
    int inconclusive = 0;
    bool exact = true;  // ground truth sets that only bound the estimate from above are inexact

    static DirSet from(const WaveFrontEstimate& e);
    static DirSet from(const GroundTruth& t);
    static DirSet from_json(const std::string& text);
};

enum class CompareMode { Subset, Equal };

struct CompareReport {
    bool passed = false;
    CompareMode mode = CompareMode::Equal;
    double tol = 5;
    std::vector<double> unmatched_a;  // singular in a, nothing in b within tol
    std::vector<double> unmatched_b;  // only checked for Equal
    int excluded_a = 0, excluded_b = 0;
    std::string summary() const;
    std::string to_json() const;
};

// a subset-of b, or a equal-to b within tol degrees
CompareReport compare(const DirSet& a, const DirSet& b, CompareMode mode, double tol_deg = 5.0);

// image of a direction set under a linear map of phase space, reprojected with s_out
DirSet map_directions(const DirSet& a, const std::function<void(double&, double&)>& f, double s_out);

struct InvarianceCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct InvarianceOptions {
    double translate = 3.0;
    double modulate = 2.0;
    double dilate = 1.25;
    double chirp = 1.0;
    double tol = 5.0;
};

std::vector<InvarianceCheck> invariance_suite(const DistPtr& u, double s, const EstimatorConfig& cfg = {},
                                              const InvarianceOptions& opt = {});

}  // namespace ag
