#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "degenera/cutoff.hpp"
#include "degenera/geometry.hpp"
#include "degenera/weights.hpp"

namespace degenera {

/// A field together with its declared candidate derivatives (classical or
/// D_v^alpha); the identity checkers verify the candidates, never build them.
struct ScalarField {
    std::function<double(const Point&)> evaluator;
    std::map<MultiIndex, std::function<double(const Point&)>> declared_derivatives;
    std::vector<Point> singular_points;

    double operator()(const Point& p) const { return evaluator(p); }
    double derivative(const MultiIndex& a, const Point& p) const;
    bool has_derivative(const MultiIndex& a) const {
        return a.order() == 0 || declared_derivatives.count(a) > 0;
    }

    static ScalarField zero(int d);
    static ScalarField constant(double c, int d);
};

/// Tensor-product exponential bump exp(-1/(1-t^2)) scaled to a cell patch.
struct BumpFunction {
    Point center{0, 0};
    Point radius{1, 1};
    int dimension = 1;

    double value(const Point& p) const;
    double derivative(const MultiIndex& a, const Point& p) const;
};

struct TestFunctionBattery {
    std::vector<BumpFunction> functions;
    int dimension = 1;
    int max_order = 2;
};

/// Bumps at every cell center, three nested scales, clipped to the interior.
TestFunctionBattery build_battery(const Mesh& mesh, const Domain& domain, int max_order,
                                  const std::vector<double>& scales = {3.0, 6.0, 12.0});

struct PerTestFunction {
    int index = 0;
    double lhs = 0, rhs = 0, residual = 0, scale = 0, relative = 0;
};

struct ResidualReport {
    double residual = 0;  // |LHS - RHS| at the worst test function
    double scale = 0;     // integrand magnitude there
    double relative = 0;  // max over the battery of residual/scale
    std::vector<PerTestFunction> per_test_function;
};

struct MarginReport {
    std::string kind;
    double lhs = 0, rhs = 0, constant_used = 0;
    double margin = 0; // constant_used * rhs - lhs
    bool holds = false;
};

// -- norms ------------------------------------------------------------------

/// ||f w||_{L^p}; runs a three-level refinement probe when f carries declared
/// singular points and throws DivergenceError if it keeps growing.
double weighted_norm(const ScalarField& f, const WeightFunction& w, double p, const Mesh& mesh,
                     const QuadratureRule& rule);

/// Same, with an arbitrary weight evaluator (used for family weights).
double weighted_norm_fn(const ScalarField& f, const std::function<double(const Point&)>& w,
                        double p, const Mesh& mesh, const QuadratureRule& rule);

/// (sum_{|alpha|<=m} ||D_v^alpha f||^p_{L^p_{w_alpha}})^{1/p} over a family.
double sobolev_norm(const ScalarField& f, const WeightFamily& family, double p, const Mesh& mesh,
                    const QuadratureRule& rule);

// -- identity residuals -------------------------------------------------------

/// d^alpha(v^k phi) expanded by the Leibniz rule from analytic v- and
/// phi-derivatives (never finite differences).
double weighted_test_derivative(const WeightFunction& v, int k, const BumpFunction& phi,
                                const MultiIndex& alpha, const Point& p);

/// Residual of int f d^alpha(v^{|alpha|+1} phi) = (-1)^|alpha| int v^{|alpha|+1} phi g
/// over the battery; g is the candidate weak derivative.
ResidualReport weak_derivative_residual(const ScalarField& f, const ScalarField& g_candidate,
                                        const WeightFunction& v, const MultiIndex& alpha,
                                        const TestFunctionBattery& battery, const Mesh& mesh,
                                        const QuadratureRule& rule);

/// Residual of the product formula D^alpha(v^{m+1} f) = sum_beta C(alpha,beta)
/// D_v^beta f d^{alpha-beta} v^{m+1}, tested weakly with plain test functions.
ResidualReport leibniz_residual(const ScalarField& f, const WeightFunction& v, int m,
                                const MultiIndex& alpha, const TestFunctionBattery& battery,
                                const Mesh& mesh, const QuadratureRule& rule);

/// Multiplier a = a_tilde * v^power for the integration-by-parts check.
struct MultiplierField {
    ScalarField a_tilde;
    int power = 3;
};

/// Residual of int h D^alpha(a f) = - int a f D_v^alpha h with the product
/// formula D^alpha(a f) = f d^alpha a + a D_v^alpha f; |alpha| = 1.
ResidualReport ibp_residual(const ScalarField& h, const ScalarField& f, const MultiplierField& a,
                            const WeightFunction& v, const MultiIndex& alpha, const Mesh& mesh,
                            const QuadratureRule& rule);

// -- traces -------------------------------------------------------------------

enum class TraceMode { tr1, tr2 };

struct TraceReport {
    std::vector<int> boundary_nodes;
    std::vector<double> values; // f (tr1) or v^2 f (tr2) at boundary nodes
    double norm = 0.0;          // L^p(boundary)
};

/// Boundary values by nodal evaluation, with the limit along boundary-adjacent
/// nodes at points where the field itself is singular.
TraceReport trace_eval(const ScalarField& f, const WeightFunction& v, TraceMode mode,
                       const Mesh& mesh, double p = 2.0);

// -- inequalities ---------------------------------------------------------------

enum class InequalityKind { hardy, kebiche_73, oned_72, poincare_cor };

struct RadialField {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

struct InequalityParams {
    double sigma = 0.0;             // (7.1) constant; <= 0 means compute the minimal one
    std::optional<double> C_Omega;  // poincare_cor constant override
    double R = 1.0;                 // radial domain radius
    int quadrature_cells = 128;
};

/// Radial route (d >= 2, p = 2): hardy, kebiche_73, poincare_cor on radial
/// fields vanishing at r = R, reduced through integrate_radial.
MarginReport inequality_check(InequalityKind kind, const WeightFunction& v, const RadialField& f,
                              double p, int d, const InequalityParams& params);

/// 1D route: oned_72 and poincare_cor on fields vanishing at the interval ends.
MarginReport inequality_check_1d(InequalityKind kind, const WeightFunction& v,
                                 const ScalarField& f, double p, const Domain& domain,
                                 const Mesh& mesh, const QuadratureRule& rule,
                                 const InequalityParams& params);

/// Interval/diameter Poincare constant C_P used to compose poincare_cor's C_Omega.
double poincare_domain_constant(const Domain& domain, double p);

} // namespace degenera
