#pragma once

#include <array>

#include "logschro/quadrature.hpp"
#include "logschro/special_functions.hpp"

namespace logschro {

using Point = std::array<double, 3>;  // only the first N entries are read

double norm(const Point& x, int N);

struct DensityQuery {
    OperatorParams params;
    Point x{};
    double t = 1.0;
};

// Which route produced a density value.
enum class DensityRoute { Gaussian, Cauchy, Series, Fourier, Origin };

struct DensityValue {
    double value = 0.0;
    DensityRoute route = DensityRoute::Gaussian;
    bool floored = false;  // value fell below 1e-300 and was flushed to zero
};

// p_s(x, t): transition density with Fourier transform (2pi)^{-N/2} e^{-t|xi|^{2s}}.
DensityValue density_ex(const DensityQuery& q, const QuadratureSpec& quad);
double density(const DensityQuery& q, const QuadratureSpec& quad);
// Radial form p_s(r, t), r = |x|.
double density_radial(const OperatorParams& params, double r, double t, const QuadratureSpec& quad);
// t^{-N/2s} p_s(t^{-1/2s} x, 1).
double density_scaled(const DensityQuery& q);
double density_scaled(const DensityQuery& q, const QuadratureSpec& quad);

// Fourier inversion only, no closed forms or series; used to cross-check the other routes.
double density_fourier(const OperatorParams& params, double r, double t, const QuadratureSpec& quad);
// p_s(0, 1) in closed form.
double density_at_origin(const OperatorParams& params);

// p_s(y,t) / (C_Ns min(t |y|^{-N-2s}, t^{-N/2s})); requires s < 1.
double comparability_check(const OperatorParams& params, double t, double y);

}  // namespace logschro
