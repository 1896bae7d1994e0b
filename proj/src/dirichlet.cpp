#include "logschro/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace logschro {

namespace {

// autocorrelation of the unit hat on [-1,1]: the centred cubic B-spline
double spline(double t) {
    t = std::fabs(t);
    if (t <= 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
    if (t <= 2.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
    return 0.0;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

}  // namespace

void Mesh1D::validate() const {
    if (!(a < b)) throw std::invalid_argument("mesh: need a < b");
    if (n < 4) throw std::invalid_argument("mesh: need at least 4 interior nodes");
}

double hat_form(const KernelTable& kernel, double h, int m) {
    m = std::abs(m);
    // b = h^2 \int_0^inf K(h t) [2c(m) - c(m+t) - c(m-t)] dt; the bracket is constant once t >= m+2
    const double cm = spline(m);
    auto f = [&](double t) {
        const double br = 2.0 * cm - spline(m + t) - spline(m - t);
        return br == 0.0 ? 0.0 : kernel(h * t) * br;
    };
    const QuadratureSpec& q = kernel.quad();
    double acc = 0.0;
    const int lo = std::max(0, m - 2);
    for (int k = lo; k < m + 2; ++k) acc += integrate(f, k, k + 1.0, q, "hat_form");
    acc *= h * h;
    // constant bracket 2c(m) on [m+2, inf): h^2 2c(m) \int_{m+2}^inf K(ht) dt = h c(m) mass_beyond((m+2)h)
    if (cm > 0.0) acc += h * cm * kernel.mass_beyond((m + 2) * h);
    return acc;
}

FemSystem assemble(const Mesh1D& mesh, const OperatorParams& params, const QuadratureSpec& quad) {
    mesh.validate();
    params.validate();
    if (params.N != 1) throw std::invalid_argument("assemble: only intervals (N = 1) are supported");
    const auto table = shared_kernel_table(params, quad);
    const int n = mesh.n;
    const double h = mesh.h();
    std::vector<double> col(n);
    for (int m = 0; m < n; ++m) {
        try {
            col[m] = hat_form(*table, h, m);
        } catch (const QuadratureError& e) {
            throw QuadratureError("assemble: entry (0, " + std::to_string(m) + "): " + e.what(), e.value(),
                                  e.estimate());
        }
    }
    FemSystem sys{mesh, params, Eigen::MatrixXd(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys.stiffness(i, j) = col[std::abs(i - j)];
    for (int i = 0; i < n; ++i) {
        sys.mass(i, i) = 2.0 * h / 3.0;
        if (i + 1 < n) sys.mass(i, i + 1) = sys.mass(i + 1, i) = h / 6.0;
    }
    return sys;
}

std::vector<double> solve_poisson(const FemSystem& sys, const std::vector<double>& f) {
    if (static_cast<int>(f.size()) != sys.mesh.n) throw std::invalid_argument("solve_poisson: f has the wrong size");
    const Eigen::VectorXd rhs = sys.mass * to_vec(f);
    Eigen::LLT<Eigen::MatrixXd> llt(sys.stiffness);
    if (llt.info() != Eigen::Success) throw SingularSystemError("solve_poisson: stiffness is not positive definite");
    const Eigen::VectorXd u = llt.solve(rhs);
    const double res = (sys.stiffness * u - rhs).norm();
    if (res > 1e-10 * std::max(rhs.norm(), 1e-300) && rhs.norm() > 0.0)
        throw SingularSystemError("solve_poisson: residual " + std::to_string(res) + " too large");
    return {u.data(), u.data() + u.size()};
}

Spectrum solve_eigs(const FemSystem& sys, int k) {
    const int n = sys.mesh.n;
    if (k < 1 || k > n) throw std::invalid_argument("solve_eigs: need 1 <= k <= n");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.stiffness, sys.mass);
    if (es.info() != Eigen::Success) throw std::runtime_error("solve_eigs: eigensolver did not converge");
    Spectrum out;
    out.eigenvectors = es.eigenvectors().leftCols(k);
    for (int j = 0; j < k; ++j) {
        const double lam = es.eigenvalues()(j);
        out.eigenvalues.push_back(lam);
        // fix the sign so the largest-magnitude entry is positive
        Eigen::Index idx;
        out.eigenvectors.col(j).cwiseAbs().maxCoeff(&idx);
        if (out.eigenvectors(idx, j) < 0.0) out.eigenvectors.col(j) *= -1.0;
        const Eigen::VectorXd v = out.eigenvectors.col(j);
        out.max_residual = std::max(out.max_residual, (sys.stiffness * v - lam * (sys.mass * v)).norm());
    }
    return out;
}

MaximumPrincipleReport maximum_principle_suite(const FemSystem& sys, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = sys.mesh.n;
    Eigen::LLT<Eigen::MatrixXd> llt(sys.stiffness);
    if (llt.info() != Eigen::Success) throw SingularSystemError("maximum principle: stiffness is not positive definite");
    MaximumPrincipleReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.min_scaled_min = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        if (t % 2 == 0) {
            for (int i = 0; i < n; ++i) f(i) = unif(rng);
        } else {
            const int spikes = 1 + static_cast<int>(unif(rng) * 3);
            for (int j = 0; j < spikes; ++j) f(std::min(n - 1, static_cast<int>(unif(rng) * n))) += 1.0 + unif(rng);
        }
        const Eigen::VectorXd u = llt.solve(sys.mass * f);
        const double mn = u.minCoeff();
        rep.min_value = std::min(rep.min_value, mn);
        rep.min_scaled_min = std::min(rep.min_scaled_min, mn / u.maxCoeff());
        if (!(mn > 0.0)) ++rep.failures;
        ++rep.trials;
    }
    return rep;
}

DomainMonotonicity domain_monotonicity_check(const OperatorParams& params, const Mesh1D& outer, const Mesh1D& inner,
                                             const QuadratureSpec& quad) {
    if (inner.a < outer.a || inner.b > outer.b)
        throw std::invalid_argument("domain_monotonicity_check: inner interval must lie inside the outer one");
    DomainMonotonicity out;
    out.lambda_outer = solve_eigs(assemble(outer, params, quad), 1).eigenvalues[0];
    out.lambda_inner = solve_eigs(assemble(inner, params, quad), 1).eigenvalues[0];
    Mesh1D coarse = inner;
    coarse.n = std::max(4, (inner.n + 1) / 2 - 1);
    out.slack = std::fabs(solve_eigs(assemble(coarse, params, quad), 1).eigenvalues[0] - out.lambda_inner);
    out.holds = out.lambda_inner >= out.lambda_outer - out.slack;
    return out;
}

double eigenfunction_linf_ratio(const Spectrum& spectrum, const FemSystem& sys, int k) {
    if (k < 1 || k > static_cast<int>(spectrum.eigenvalues.size()))
        throw std::invalid_argument("eigenfunction_linf_ratio: k out of range");
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd v = spectrum.eigenvectors.col(j);
        // hats attain their sup at nodes
        worst = std::max(worst, v.cwiseAbs().maxCoeff() / std::sqrt(v.dot(sys.mass * v)));
    }
    return worst;
}

double fem_energy(const FemSystem& sys, const std::vector<double>& u) {
    const Eigen::VectorXd v = to_vec(u);
    return v.dot(sys.stiffness * v);
}

double fem_l2_norm(const FemSystem& sys, const std::vector<double>& u) {
    const Eigen::VectorXd v = to_vec(u);
    return std::sqrt(v.dot(sys.mass * v));
}

}  // namespace logschro
