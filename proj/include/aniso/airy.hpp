#pragma once

#include "aniso/common.hpp"

namespace ag {

// Ai(z) = exp(scale) * ai, Ai'(z) = exp(scale) * aip
struct AiryLog {
    cplx scale;
    cplx ai, aip;
};

AiryLog airy_log(cplx z);
cplx airy_ai(cplx z);
cplx airy_aip(cplx z);

// Real argument: contour quadrature for |x| < 8, asymptotic form beyond.
double airy_ai_real(double x);

}  // namespace ag
