#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "degenera/calculus.hpp"
#include "degenera/geometry.hpp"
#include "degenera/linalg.hpp"
#include "degenera/weights.hpp"

namespace degenera {

/// P1 space on interior nodes only: every basis function vanishes on the
/// boundary, so the discrete space sits inside the null-trace space.
struct FESpace {
    Mesh mesh;
    std::vector<int> dof_of_node; // -1 on boundary nodes
    std::vector<int> node_of_dof;

    int dofs() const { return static_cast<int>(node_of_dof.size()); }
    static FESpace build(Mesh mesh);
};

/// Scalar coefficient: exact constant or a spatial field.  Constants keep
/// infima exact; sampled fields get the 0.99 safety factor.
struct CoeffField {
    bool is_const = true;
    double c = 0.0;
    std::function<double(const Point&)> fn;

    CoeffField() = default;
    CoeffField(double v) : is_const(true), c(v) {}
    static CoeffField field(std::function<double(const Point&)> f) {
        CoeffField cf;
        cf.is_const = false;
        cf.fn = std::move(f);
        return cf;
    }
    double operator()(const Point& p) const { return is_const ? c : fn(p); }
};

/// Coefficients in the degenerate form a_ij = a~_ij v^4, b_i = b~_i v^3,
/// c = c~ v^2, with load h(g) = int k g.
struct CoefficientSet {
    int d = 1;
    std::vector<CoeffField> a_tilde;     // row-major d x d
    std::vector<CoeffField> b_tilde;     // d entries
    std::vector<CoeffField> b_tilde_div; // declared partials d(b~_i)/dx_i
    CoeffField c_tilde{0.0};
    ScalarField k;
    WeightFunction v;
    std::array<int, 3> weight_exponents{4, 3, 2};
    bool a_symmetric_declared = true;
    std::optional<double> k_radial_exponent; // k = k_coef |x|^e when set
    double k_coef = 1.0;

    bool b_is_zero() const;
    double a_eff(int i, int j, const Point& p, double v4) const;

    /// a~ = I, b~ = 0, c~ = 1 with v = |x|^{2m} and k = |x|^{2m-beta}:
    /// the degenerate power-weight boundary-value instance.
    static CoefficientSet radial_power_instance(int d, int m, double beta);
    /// a~ = I, b~ = 0, c~ = 1 with arbitrary v (manufactured runs).
    static CoefficientSet identity_helmholtz(int d, WeightFunction v,
                                             std::function<double(const Point&)> load);
};

struct AssembledSystem {
    CsrMatrix matrix;
    std::vector<double> load;
    bool symmetric = false;
};

AssembledSystem assemble(const CoefficientSet& coeffs, const FESpace& space,
                         const QuadratureRule& rule);

/// v^4-weighted stiffness S and v^2-weighted mass Q0: x'(S+Q0)x is the squared
/// X^1-norm of the FE function (m = 1, s = |.|).
struct NormMatrices {
    CsrMatrix stiffness; // int v^4 grad phi . grad psi
    CsrMatrix mass_w;    // int v^2 phi psi
    CsrMatrix mass_v4;   // int v^4 phi psi (Poincare eigenproblem)
};
NormMatrices assemble_norm_matrices(const FESpace& space, const WeightFunction& v,
                                    const QuadratureRule& rule);

enum class CoercivityCase { case1, case2, case3a, case3b, none };

struct CoercivityReport {
    CoercivityCase which = CoercivityCase::none;
    double mu = 0, sigma = 0, gamma = 0;
    std::string detail;

    const char* case_name() const;
};

CoercivityReport coercivity_check(const CoefficientSet& coeffs, const Domain& domain,
                                  std::optional<double> C_Omega = std::nullopt);

enum class SolveMethod { cg, bicgstab, dense_lu };

struct SolveReport {
    std::vector<double> coefficients;
    int iterations = 0;
    double residual_norm = 0.0; // ||Mx-b|| / ||b||
    double energy_norm = 0.0;   // ||f_h||_{X^1}
    double h_bound = 0.0;       // ||k||_{L^2_{v^-1}} upper bound for |h|
    double gamma = 0.0;
    bool bound_checked = false;
    bool bound_ok = false; // energy <= 1.05 h_bound / gamma
};

SolveReport solve(const AssembledSystem& system, const FESpace& space,
                  const CoefficientSet& coeffs, SolveMethod method, double tol, int max_iter,
                  std::optional<double> gamma = std::nullopt);

/// Default method rule: direct below 2000 dofs, else cg when symmetric,
/// bicgstab otherwise.
SolveMethod default_method(const AssembledSystem& system);

/// Discrete constant of ||v^2 f|| <= C ||v^2 grad f||: 1/sqrt(lambda_min) of
/// the (v^4 stiffness, v^4 mass) pencil by inverse power iteration.
double estimate_poincare(const FESpace& space, const WeightFunction& v,
                         const QuadratureRule& rule);

/// The four hypotheses of the non-local-integrability proposition.
struct NonintegrabilityReport {
    bool a_ok = false, b_ok = false, c_ok = false, k_ok = false;
    bool k_sign_ok = false, k_l2_ok = false, k_nonloc_ok = false; // sub-flags of (4)
    bool holds = false;                  // all four
    bool conclusion_nonintegrable = false; // = holds: solution not locally integrable
    std::string detail;
};

NonintegrabilityReport nonintegrability_check(const CoefficientSet& coeffs, const Domain& domain);

struct StudyLevel {
    int rings = 0, sectors = 0;
    double grading = 3.0;
};

struct StudyRow {
    int level = 0, rings = 0, dofs = 0;
    double mass = 0, mass_ratio = 0, energy = 0, energy_rel_change = 0, gamma = 0;
    std::string case_name;
    bool bound_ok = false;
};

struct StudyTable {
    std::vector<StudyRow> rows;
    bool has_verdict = false;
    bool mass_growth_ok = false;
    bool energy_stable_ok = false;
    bool bound_ok = false;
    bool aborted = false;
    double growth_threshold = 1.3;
    double stability_threshold = 0.05;
    double bound_slack = 1.05;
    double h_bound = 0.0;
};

/// Solve on a ladder of graded disk meshes and record the local mass
/// int_{|x|<K} |f_h| (which must blow up) against the energy (which must not).
StudyTable divergence_study(const CoefficientSet& coeffs, const std::vector<StudyLevel>& levels,
                            double K_radius, double growth_threshold = 1.3,
                            double stability_threshold = 0.05);

} // namespace degenera
