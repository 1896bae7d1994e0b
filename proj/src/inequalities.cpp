#include "logschro/inequalities.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

constexpr double g4x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double g4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
constexpr double g8x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                           0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double g8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                           0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct Node {
    double r, w;
};

// r in (0, L]: cells of width delta, the first one graded toward 0 where K ~ 1/r and D ~ r^2
std::vector<Node> r_rule(double L, double delta) {
    std::vector<Node> out;
    auto cell = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int j = 0; j < 8; ++j) out.push_back({c + h * g8x[j], h * g8w[j]});
    };
    const double first = std::min(delta, L);
    double hi = first;
    for (int j = 0; j < 45; ++j, hi *= 0.5) cell(0.5 * hi, hi);
    for (double lo = first; lo < L * (1.0 - 1e-12); lo += delta) cell(lo, std::min(lo + delta, L));
    return out;
}

// merged cut points of x -> u(x) and x -> u(x + r) inside [lo, hi]
std::vector<double> x_cuts(const std::vector<double>& breaks, double r, double lo, double hi) {
    std::vector<double> p;
    p.reserve(2 * breaks.size() + 2);
    p.push_back(lo);
    p.push_back(hi);
    for (double b : breaks) {
        if (b > lo && b < hi) p.push_back(b);
        if (b - r > lo && b - r < hi) p.push_back(b - r);
    }
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

template <class F>
double gauss4(const std::vector<double>& cuts, F&& f) {
    double acc = 0.0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double c = 0.5 * (cuts[k] + cuts[k + 1]), h = 0.5 * (cuts[k + 1] - cuts[k]);
        if (h <= 0.0) continue;
        for (int j = 0; j < 4; ++j) acc += h * g4w[j] * f(c + h * g4x[j]);
    }
    return acc;
}

void check_breaks(const std::vector<double>& b, const char* who) {
    if (b.size() < 2) throw std::invalid_argument(std::string(who) + ": need at least two breaks");
    for (size_t i = 1; i < b.size(); ++i)
        if (!(b[i] > b[i - 1])) throw std::invalid_argument(std::string(who) + ": breaks must increase strictly");
}

// hats on the closed mesh: nodes 0..n+1; returns the two (node, weight) pairs at x, or none outside
int hats_at(const Mesh1D& m, double x, int* idx, double* val) {
    const double h = m.h();
    const double t = (x - m.a) / h;
    if (t < 0.0 || t > m.n + 1.0) return 0;
    int c = std::min(static_cast<int>(t), m.n);
    const double f = t - c;
    idx[0] = c;
    val[0] = 1.0 - f;
    idx[1] = c + 1;
    val[1] = f;
    return 2;
}

}  // namespace

FormValue quadratic_form_direct(const PiecewiseFunction& u, const OperatorParams& params, FormDomain domain,
                                const QuadratureSpec& quad) {
    params.validate();
    if (params.N != 1) throw std::invalid_argument("quadratic_form_direct: N = 1 only");
    check_breaks(u.breaks, "quadratic_form_direct");
    const auto table = shared_kernel_table(params, quad);
    const double lo = u.breaks.front(), hi = u.breaks.back(), L = hi - lo;
    auto g = [&](double x) { return (x < lo || x > hi) ? 0.0 : u.f(x); };
    const double delta = L / static_cast<double>(u.breaks.size() - 1);

    double acc = 0.0;
    for (const Node& n : r_rule(L, delta)) {
        const double r = n.r;
        const std::vector<double> cuts =
            domain == FormDomain::Whole ? x_cuts(u.breaks, r, lo - r, hi) : x_cuts(u.breaks, r, lo, hi - r);
        const double D = gauss4(cuts, [&](double x) {
            const double d = g(x + r) - g(x);
            return d * d;
        });
        acc += n.w * (*table)(r) * D;
    }
    if (domain == FormDomain::Whole) {
        // beyond L the supports of u and u(. + r) are disjoint: D = 2 |u|^2
        const double l2 = gauss4(u.breaks, [&](double x) { return g(x) * g(x); });
        acc += l2 * table->mass_beyond(L);
    }
    return {acc, 2.0 * acc};
}

PiecewiseFunction nodal_function(const Mesh1D& mesh, const std::vector<double>& values) {
    mesh.validate();
    const int n = mesh.n;
    std::vector<double> v;
    if (static_cast<int>(values.size()) == n) {
        v.assign(n + 2, 0.0);
        std::copy(values.begin(), values.end(), v.begin() + 1);
    } else if (static_cast<int>(values.size()) == n + 2) {
        v = values;
    } else {
        throw std::invalid_argument("nodal_function: need n or n + 2 values");
    }
    PiecewiseFunction out;
    for (int k = 0; k <= n + 1; ++k) out.breaks.push_back(k == n + 1 ? mesh.b : mesh.a + k * mesh.h());
    out.f = [mesh, v](double x) {
        int idx[2];
        double val[2];
        if (!hats_at(mesh, x, idx, val)) return 0.0;
        return val[0] * v[idx[0]] + (idx[1] <= mesh.n + 1 ? val[1] * v[idx[1]] : 0.0);
    };
    return out;
}

Eigen::MatrixXd form_matrix_direct(const Mesh1D& mesh, const OperatorParams& params, FormDomain domain,
                                   const QuadratureSpec& quad) {
    mesh.validate();
    params.validate();
    if (params.N != 1) throw std::invalid_argument("form_matrix_direct: N = 1 only");
    const auto table = shared_kernel_table(params, quad);
    const int n = mesh.n;
    const double h = mesh.h(), L = mesh.b - mesh.a;
    const bool whole = domain == FormDomain::Whole;
    // whole: interior hats 1..n map to 0..n-1; regional: all nodes
    const int dim = whole ? n : n + 2;
    const int shift = whole ? 1 : 0;
    std::vector<double> nodes;
    for (int k = 0; k <= n + 1; ++k) nodes.push_back(k == n + 1 ? mesh.b : mesh.a + k * h);

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (const Node& rn : r_rule(L, h)) {
        const double r = rn.r;
        const double wk = rn.w * (*table)(r);
        const std::vector<double> cuts =
            whole ? x_cuts(nodes, r, mesh.a - r, mesh.b) : x_cuts(nodes, r, mesh.a, mesh.b - r);
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double c = 0.5 * (cuts[k] + cuts[k + 1]), hw = 0.5 * (cuts[k + 1] - cuts[k]);
            if (hw <= 0.0) continue;
            for (int j = 0; j < 4; ++j) {
                const double x = c + hw * g4x[j];
                int ia[4];
                double va[4];
                int m = 0;
                int idx[2];
                double val[2];
                if (hats_at(mesh, x + r, idx, val))
                    for (int q = 0; q < 2; ++q) ia[m] = idx[q] - shift, va[m++] = val[q];
                if (hats_at(mesh, x, idx, val))
                    for (int q = 0; q < 2; ++q) ia[m] = idx[q] - shift, va[m++] = -val[q];
                const double w = wk * hw * g4w[j];
                for (int p = 0; p < m; ++p) {
                    if (ia[p] < 0 || ia[p] >= dim || va[p] == 0.0) continue;
                    for (int q = 0; q < m; ++q) {
                        if (ia[q] < 0 || ia[q] >= dim) continue;
                        B(ia[p], ia[q]) += w * va[p] * va[q];
                    }
                }
            }
        }
    }
    if (whole) {
        const double tail = table->mass_beyond(L);
        for (int i = 0; i < n; ++i) {
            B(i, i) += tail * 2.0 * h / 3.0;
            if (i + 1 < n) {
                B(i, i + 1) += tail * h / 6.0;
                B(i + 1, i) += tail * h / 6.0;
            }
        }
    }
    return B;
}

Eigen::MatrixXd regional_mass(const Mesh1D& mesh) {
    mesh.validate();
    const int dim = mesh.n + 2;
    const double h = mesh.h();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        M(i, i) = (i == 0 || i == dim - 1) ? h / 3.0 : 2.0 * h / 3.0;
        if (i + 1 < dim) M(i, i + 1) = M(i + 1, i) = h / 6.0;
    }
    return M;
}

double poincare_xi(const OperatorParams& params, double volume, double R) {
    const int N = params.N;
    const double ball = std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
    const double theta = std::pow(2.0 * kPi, -N) * std::pow(R, N) * volume * ball;
    if (!(R > 0.0) || theta >= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 / (std::log1p(std::pow(R, 2.0 * params.s)) * (1.0 - theta));
}

PoincareConstant poincare_constant(const OperatorParams& params, double volume) {
    params.validate();
    if (!(volume > 0.0)) throw std::invalid_argument("poincare_constant: volume must be positive");
    const int N = params.N;
    const double ball = std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
    PoincareConstant out;
    out.R_max = 2.0 * kPi * std::pow(volume * ball, -1.0 / N);
    // Xi blows up at both ends; minimize in log R
    auto f = [&](double v) { return std::log(poincare_xi(params, volume, out.R_max * std::exp(v))); };
    const auto [v, fv] = boost::math::tools::brent_find_minima(f, -40.0, -1e-14, 30);
    out.R_star = out.R_max * std::exp(v);
    out.C_statement = std::exp(fv);
    // Plancherel with the unitary transform gives |u|^2 (1 - theta) <= b_s / log(1+R^{2s}) = gagliardo / (2 log(...)),
    // a factor 4 below the displayed Xi
    out.C_derived = 0.25 * out.C_statement;
    out.C = std::max(out.C_statement, out.C_derived);
    return out;
}

double verify_poincare(double gagliardo, double l2_squared, double C) { return C * gagliardo - l2_squared; }

double verify_poincare(const FemSystem& sys, const std::vector<double>& u, double C) {
    return verify_poincare(2.0 * fem_energy(sys, u), std::pow(fem_l2_norm(sys, u), 2), C);
}

double strip_poincare_weight(const OperatorParams& params, double a, double x1) {
    params.validate();
    if (!(a > 0.0)) throw std::invalid_argument("strip_poincare_weight: a must be positive");
    if (!(std::fabs(x1) < a)) throw std::domain_error("strip_poincare_weight: need |x1| < a");
    const int N = params.N;
    const double s = params.s;
    const double c = std::pow(kPi, 0.5 * (N - 1)) * std::tgamma(0.5 + s) / (2.0 * s * std::tgamma(0.5 * N + s));
    return c * (std::pow(a + x1, -2.0 * s) + std::pow(a - x1, -2.0 * s));
}

namespace {

double ent_term(double v) {
    const double a = std::fabs(v);
    return a < 1e-150 ? 0.0 : a * a * std::log(a * a);
}

}  // namespace

double entropy(const GridFunction& u) {
    u.validate();
    double acc = 0.0;
    for (double v : u.values) acc += ent_term(v);
    return acc * u.spec.cell_volume();
}

double entropy(const std::function<double(double)>& u, const QuadratureSpec& quad) {
    return require(quad_line([&](double x) { return ent_term(u(x)); }, 0.0, quad), "entropy");
}

double log_sobolev_deficit(const GridFunction& u, const OperatorParams& params) {
    double n2 = 0.0;
    for (double v : u.values) n2 += v * v;
    n2 *= u.spec.cell_volume();
    if (!(n2 > 0.0)) throw std::invalid_argument("log_sobolev_deficit: u = 0");
    const double B = constants(params).B_N;
    const double b = quadratic_form_spectral(u, params, Boundary::Whole);
    return B * n2 + n2 * std::log(n2) + params.N / (2.0 * params.s) * b - entropy(u);
}

double log_energy(const std::function<double(double)>& u, const QuadratureSpec& quad) {
    // u is taken to be concentrated near the origin, so u(x) and u(x + r) peak at 0 and -r
    auto line = [&](auto&& f, double r, const QuadratureSpec& q, const char* what) {
        const double lo = -std::max(r, 1.0), hi = std::max(0.0, 1.0 - r);
        double acc = integrate(f, lo, hi, q, what);
        acc += integrate_inf(f, hi, q, what);
        acc += integrate_inf([&](double x) { return f(2.0 * lo - x); }, lo, q, what);
        return acc;
    };
    auto sq = [&](double x) { return u(x) * u(x); };
    const double n2 = line(sq, 0.0, quad, "log_energy: norm");
    QuadratureSpec inner = quad;
    inner.abs_tol = std::max(quad.abs_tol, 1e-3 * quad.tol * n2);
    auto D = [&](double r) {
        return line(
            [&](double x) {
                const double d = u(x + r) - u(x);
                return d * d;
            },
            r, inner, "log_energy: increment");
    };
    auto A = [&](double r) {
        return line([&](double x) { return u(x) * u(x + r); }, r, inner, "log_energy: autocorrelation");
    };
    QuadratureSpec outer = quad;
    outer.abs_tol = std::max(quad.abs_tol, quad.tol * n2);
    const double near = integrate([&](double r) { return r > 0.0 ? D(r) / r : 0.0; }, 0.0, 1.0, outer, "log_energy");
    const double far = integrate_inf([&](double r) { return A(r) / r; }, 1.0, outer, "log_energy");
    return 0.5 * near - far - kEulerGamma * n2;
}

BecknerTerms beckner_deficit(const std::function<double(double)>& u, const QuadratureSpec& quad) {
    const double n2 = require(quad_line([&](double x) { return u(x) * u(x); }, 0.0, quad), "beckner: norm");
    if (!(n2 > 0.0)) throw std::invalid_argument("beckner_deficit: u = 0");
    BecknerTerms t;
    t.lhs = entropy(u, quad);
    t.rhs = log_energy(u, quad) + constants({1, 0.5}).B_N * n2 + n2 * std::log(n2);
    t.deficit = t.rhs - t.lhs;
    return t;
}

LatticeReport lattice_check(const Mesh1D& mesh, const std::vector<double>& interior, const OperatorParams& params,
                            const QuadratureSpec& quad) {
    const PiecewiseFunction u = nodal_function(mesh, interior);
    // sign changes inside a cell are kinks of |u| and u+-
    std::vector<double> breaks = u.breaks;
    std::vector<double> v(mesh.n + 2, 0.0);
    std::copy(interior.begin(), interior.end(), v.begin() + 1);
    for (int k = 0; k <= mesh.n; ++k)
        if (v[k] * v[k + 1] < 0.0) breaks.push_back(u.breaks[k] + mesh.h() * v[k] / (v[k] - v[k + 1]));
    std::sort(breaks.begin(), breaks.end());
    auto form = [&](std::function<double(double)> f) {
        return quadratic_form_direct({std::move(f), breaks}, params, FormDomain::Whole, quad).gagliardo;
    };
    LatticeReport rep;
    rep.g_u = form(u.f);
    rep.g_abs = form([&](double x) { return std::fabs(u.f(x)); });
    rep.g_plus = form([&](double x) { return std::max(u.f(x), 0.0); });
    rep.g_minus = form([&](double x) { return std::max(-u.f(x), 0.0); });
    return rep;
}

double wirtinger_gap(const Mesh1D& mesh, const OperatorParams& params, const QuadratureSpec& quad) {
    const Eigen::MatrixXd B = form_matrix_direct(mesh, params, FormDomain::Regional, quad);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, regional_mass(mesh), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("wirtinger_gap: eigensolver did not converge");
    // the lowest mode is the constant, annihilated by the regional form
    return es.eigenvalues()(1);
}

}  // namespace logschro
