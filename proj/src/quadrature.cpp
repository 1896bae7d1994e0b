#include "logschro/quadrature.hpp"

namespace logschro {

void QuadratureSpec::validate() const {
    if (!(tol > 0.0 && tol <= 1e-2)) throw std::invalid_argument("quadrature tol must lie in (0, 1e-2]");
    if (max_subdiv < 8) throw std::invalid_argument("quadrature max_subdiv must be at least 8");
    if (abs_tol < 0.0) throw std::invalid_argument("quadrature abs_tol must be nonnegative");
}

}  // namespace logschro
