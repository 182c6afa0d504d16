#pragma once

#include <array>
#include <functional>

#include "aniso/common.hpp"

namespace ag {

struct GaussLegendre16 {
    std::array<double, 16> x, w;  // on [-1, 1]
};
const GaussLegendre16& gl16();

struct PanelResult {
    cplx value = 0;
    double abs_sum = 0;  // integral of |f|, sets the rounding floor
    long panels = 0;
    bool capped = false;
};

// Adaptive GL16 panels; a panel is split until rate(a, b) * (b - a) <= phase_cap,
// where rate bounds the phase derivative of f on [a, b].
PanelResult integrate_panels(const std::function<cplx(double)>& f, double a, double b,
                             const std::function<double(double, double)>& rate, double phase_cap,
                             long panel_cap);

}  // namespace ag
