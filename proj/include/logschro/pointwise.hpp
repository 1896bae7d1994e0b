#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logschro/kernel.hpp"
#include "logschro/stable_density.hpp"

namespace logschro {

struct CallableFunction {
    std::function<double(const Point&)> f;  // must be safe to call concurrently
    double support_radius = std::numeric_limits<double>::infinity();
    Point center{};  // support is the ball B(center, support_radius)
    std::optional<double> holder_exponent;

    double operator()(const Point& x) const { return f(x); }
    bool compact() const { return std::isfinite(support_radius); }
};

// Raised when the local regularity probe finds a second difference that does not go to zero.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PointwiseValue {
    double value = 0.0;
    double inner_remainder = 0.0;  // modelled contribution of |y| < kKernelSurrogateRadius
    double probe_exponent = 0.0;   // fitted decay rate of the spherical second difference at 0
};

// (1/2) \int (2u(x) - u(x+y) - u(x-y)) K_s(y) dy by radial shells
PointwiseValue apply_pointwise_ex(const CallableFunction& u, const Point& x, const KernelTable& kernel);
double apply_pointwise(const CallableFunction& u, const Point& x, const OperatorParams& params,
                       const QuadratureSpec& quad);

// \int (phi(x)-phi(y)) (psi(x)-psi(y)) K_s(x-y) dy
double carre_du_champ(const CallableFunction& phi, const CallableFunction& psi, const Point& x,
                      const KernelTable& kernel);

struct WeightedL1Norm {
    double value = 0.0;
    bool diverged = false;
};

// \int |u(y)| (1+|y|)^{-N-2s} dy
WeightedL1Norm weighted_norm(const CallableFunction& u, const OperatorParams& params, const QuadratureSpec& quad);

struct DecayBound {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // |op(phi)(x)| (1+|x|)^{N+2s}, one per sample radius
};

// Samples x = center + r e_1; every r must be at least 4 * support_radius.
DecayBound decay_bound_check(const CallableFunction& phi, const OperatorParams& params,
                             const std::vector<double>& sample_radii, const QuadratureSpec& quad);

// |op(phi psi) - phi op(psi) - psi op(phi) + \int (phi(x)-phi(y))(psi(x)-psi(y)) K dy| at x
double product_rule_residual(const CallableFunction& phi, const CallableFunction& psi, const Point& x,
                             const OperatorParams& params, const QuadratureSpec& quad);

}  // namespace logschro
