#include "degenera/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "degenera/jet.hpp"

namespace degenera {

// ---------------------------------------------------------------------------
// ScalarField

double ScalarField::derivative(const MultiIndex& a, const Point& p) const {
    if (a.order() == 0) return evaluator(p);
    auto it = declared_derivatives.find(a);
    if (it == declared_derivatives.end())
        throw std::invalid_argument("ScalarField: no declared derivative for " + a.str());
    return it->second(p);
}

ScalarField ScalarField::zero(int d) { return constant(0.0, d); }

ScalarField ScalarField::constant(double c, int d) {
    ScalarField f;
    f.evaluator = [c](const Point&) { return c; };
    for (int i = 0; i < d; ++i)
        f.declared_derivatives[MultiIndex::unit(d, i)] = [](const Point&) { return 0.0; };
    return f;
}

// ---------------------------------------------------------------------------
// bumps

namespace {

// k-th derivative of exp(-1/(1-t^2)); flat to double precision outside
// |t| < 1 - 1e-8.
double bump_1d_derivative(int k, double t) {
    if (std::abs(t) >= 1.0 - 1e-8) return 0.0;
    Jet jt = Jet::variable(t, k);
    Jet w = Jet::constant(1.0, k) - jt * jt;
    Jet b = exp(-1.0 * reciprocal(w));
    return b.derivative(k);
}

} // namespace

double BumpFunction::value(const Point& p) const {
    double r = 1.0;
    for (int i = 0; i < dimension; ++i) {
        double t = (p[i] - center[i]) / radius[i];
        if (std::abs(t) >= 1.0 - 1e-8) return 0.0;
        r *= bump_1d_derivative(0, t);
    }
    return r;
}

double BumpFunction::derivative(const MultiIndex& a, const Point& p) const {
    double r = 1.0;
    for (int i = 0; i < dimension; ++i) {
        double t = (p[i] - center[i]) / radius[i];
        r *= bump_1d_derivative(a[i], t) / std::pow(radius[i], a[i]);
        if (r == 0.0) return 0.0;
    }
    return r;
}

TestFunctionBattery build_battery(const Mesh& mesh, const Domain& domain, int max_order,
                                  const std::vector<double>& scales) {
    TestFunctionBattery bat;
    bat.dimension = mesh.dimension;
    bat.max_order = max_order;

    // 2D supports must stay inside the polygonal mesh, which sits strictly
    // inside the ideal disk; measure the clearance against boundary edges
    std::vector<std::array<Point, 2>> boundary_edges;
    if (mesh.dimension == 2) {
        std::set<std::pair<int, int>> seen;
        for (const Cell& c : mesh.cells)
            for (int e = 0; e < 3; ++e) {
                int u = c.v[e], w = c.v[(e + 1) % 3];
                if (!mesh.boundary[u] || !mesh.boundary[w]) continue;
                if (seen.insert(std::minmax(u, w)).second)
                    boundary_edges.push_back({mesh.nodes[u], mesh.nodes[w]});
            }
    }
    auto segment_distance = [](const Point& p, const Point& a, const Point& b) {
        double vx = b[0] - a[0], vy = b[1] - a[1];
        double t = ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / (vx * vx + vy * vy);
        t = std::clamp(t, 0.0, 1.0);
        return std::hypot(p[0] - (a[0] + t * vx), p[1] - (a[1] + t * vy));
    };

    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        Point ctr = mesh.cell_center(static_cast<int>(c));
        double h = mesh.cell_diameter(static_cast<int>(c));
        double clearance;
        if (domain.kind == Domain::Kind::interval) {
            clearance = std::min(ctr[0] - domain.a, domain.b - ctr[0]);
        } else if (mesh.dimension == 2 && !boundary_edges.empty()) {
            clearance = std::numeric_limits<double>::infinity();
            for (const auto& e : boundary_edges)
                clearance = std::min(clearance, segment_distance(ctr, e[0], e[1]));
        } else {
            clearance = std::min(std::min(ctr[0] - domain.a, domain.b - ctr[0]),
                                 std::min(ctr[1] - domain.a, domain.b - ctr[1]));
        }
        for (double s : scales) {
            // tensor supports are squares: the corner sits sqrt(2) r out
            double cap = mesh.dimension == 2 ? 0.95 * clearance / std::sqrt(2.0)
                                             : 0.95 * clearance;
            double r = std::min(0.5 * s * h, cap);
            if (r <= 0.0) continue;
            BumpFunction b;
            b.center = ctr;
            b.radius = {r, r};
            b.dimension = mesh.dimension;
            bat.functions.push_back(b);
        }
    }
    return bat;
}

// ---------------------------------------------------------------------------
// norms

namespace {

std::vector<Point> weight_zero_points(const WeightFunction& v) {
    std::vector<Point> out;
    if (v.dimension > 2) return out;
    for (const auto& z : v.zero_set.as_points(v.dimension)) {
        Point p{z[0], v.dimension > 1 ? z[1] : 0.0};
        out.push_back(p);
    }
    return out;
}

double lp_integral(const std::function<double(const Point&)>& integrand, const Mesh& mesh,
                   const QuadratureRule& rule, const std::vector<Point>& sing,
                   bool probe_divergence) {
    if (!probe_divergence) return integrate(integrand, mesh, rule, sing);
    double v1, v2, v3;
    try {
        v1 = integrate(integrand, mesh, rule, sing);
        v2 = integrate(integrand, refine_uniform(mesh, 2), rule, sing);
        v3 = integrate(integrand, refine_uniform(mesh, 4), rule, sing);
    } catch (const SingularEvaluationError& e) {
        throw DivergenceError(std::string("weighted_norm: ") + e.what());
    }
    if (!std::isfinite(v3) ||
        (std::abs(v2) > 1.1 * std::abs(v1) && std::abs(v3) > 1.1 * std::abs(v2)))
        throw DivergenceError("weighted_norm: integral grows under refinement (norm infinite)");
    return v3;
}

} // namespace

double weighted_norm_fn(const ScalarField& f, const std::function<double(const Point&)>& w,
                        double p, const Mesh& mesh, const QuadratureRule& rule) {
    if (p < 1.0) throw std::invalid_argument("weighted_norm: p >= 1 required");
    auto integrand = [&](const Point& x) { return std::pow(std::abs(f(x) * w(x)), p); };
    double val =
        lp_integral(integrand, mesh, rule, f.singular_points, !f.singular_points.empty());
    return std::pow(val, 1.0 / p);
}

double weighted_norm(const ScalarField& f, const WeightFunction& w, double p, const Mesh& mesh,
                     const QuadratureRule& rule) {
    if (p < 1.0) throw std::invalid_argument("weighted_norm: p >= 1 required");
    auto integrand = [&](const Point& x) { return std::pow(std::abs(f(x) * w.value(x)), p); };
    std::vector<Point> sing = f.singular_points;
    for (const Point& z : weight_zero_points(w)) sing.push_back(z);
    double val = lp_integral(integrand, mesh, rule, sing, !f.singular_points.empty());
    return std::pow(val, 1.0 / p);
}

double sobolev_norm(const ScalarField& f, const WeightFamily& family, double p, const Mesh& mesh,
                    const QuadratureRule& rule) {
    const int d = family.base_v.dimension;
    const int m = family.shape.max_order;
    std::vector<double> contribs;
    for (const auto& a : enumerate_pi_m(d, m)) {
        if (!f.has_derivative(a))
            throw std::invalid_argument("sobolev_norm: missing declared derivative for " +
                                        a.str());
        ScalarField da;
        da.evaluator = [&f, a](const Point& x) { return f.derivative(a, x); };
        da.singular_points = f.singular_points;
        auto w = [&family, a](const Point& x) { return family.weight_value(a, x); };
        double nrm = weighted_norm_fn(da, w, p, mesh, rule);
        contribs.push_back(std::pow(nrm, p));
    }
    return std::pow(pairwise_sum(contribs), 1.0 / p);
}

// ---------------------------------------------------------------------------
// identity residuals

namespace {

// d^beta(v^k) by the recursive product rule over v's analytic derivatives.
double weight_power_derivative_impl(const WeightFunction& v, int k, const MultiIndex& beta,
                                    const Point& p) {
    if (k == 0) return beta.order() == 0 ? 1.0 : 0.0;
    if (beta.order() == 0) return std::pow(v.value(p), k);
    int i = 0;
    while (beta[i] == 0) ++i;
    MultiIndex gamma = beta.minus(MultiIndex::unit(beta.dim(), i));
    double s = 0.0;
    for (const auto& delta : enumerate_below(gamma)) {
        double c = multi_binomial(gamma, delta);
        double left = weight_power_derivative_impl(v, k - 1, delta, p);
        if (left == 0.0) continue;
        MultiIndex rest = gamma.minus(delta).plus(MultiIndex::unit(beta.dim(), i));
        s += c * left * v.derivative(rest, p);
    }
    return k * s;
}

// tensor-product patch over [cx-r, cx+r] x [cy-r, cy+r], 2 n^2 triangles
Mesh square_patch(const Point& c, double r, int n) {
    Mesh m;
    m.dimension = 2;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.nodes.push_back({c[0] - r + 2.0 * r * i / n, c[1] - r + 2.0 * r * j / n});
    m.boundary.assign(m.nodes.size(), false);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.cells.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}});
            m.cells.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}});
        }
    return m;
}

ResidualReport battery_residual(const TestFunctionBattery& battery,
                                const std::function<double(const BumpFunction&, const Point&)>& lhs,
                                const std::function<double(const BumpFunction&, const Point&)>& rhs,
                                const Mesh& mesh, const QuadratureRule& rule,
                                const std::vector<Point>& sing) {
    ResidualReport rep;
    // Every integrand carries a factor of phi or its derivatives, so the
    // integral over the bump's own support is exact; a dedicated sub-mesh
    // there keeps the quadrature resolution independent of the cell the bump
    // happens to sit on.
    for (std::size_t i = 0; i < battery.functions.size(); ++i) {
        const BumpFunction& phi = battery.functions[i];
        Mesh local;
        if (mesh.dimension == 1) {
            local = build_interval_mesh(phi.center[0] - phi.radius[0],
                                        phi.center[0] + phi.radius[0], 96);
        } else {
            local = square_patch(phi.center, phi.radius[0], 16);
        }
        const Mesh& dom = local;
        PerTestFunction r;
        r.index = static_cast<int>(i);
        r.lhs = integrate([&](const Point& x) { return lhs(phi, x); }, dom, rule, sing);
        r.rhs = integrate([&](const Point& x) { return rhs(phi, x); }, dom, rule, sing);
        double sl =
            integrate([&](const Point& x) { return std::abs(lhs(phi, x)); }, dom, rule, sing);
        double sr =
            integrate([&](const Point& x) { return std::abs(rhs(phi, x)); }, dom, rule, sing);
        r.residual = std::abs(r.lhs - r.rhs);
        r.scale = sl + sr;
        rep.per_test_function.push_back(r);
    }
    double global_scale = 0.0;
    for (const auto& r : rep.per_test_function) global_scale = std::max(global_scale, r.scale);
    for (auto& r : rep.per_test_function) {
        r.relative = r.residual / std::max({r.scale, 1e-12 * global_scale, 1e-300});
        if (r.relative >= rep.relative) {
            rep.relative = r.relative;
            rep.residual = r.residual;
            rep.scale = r.scale;
        }
    }
    return rep;
}

} // namespace

double weighted_test_derivative(const WeightFunction& v, int k, const BumpFunction& phi,
                                const MultiIndex& alpha, const Point& p) {
    double s = 0.0;
    for (const auto& beta : enumerate_below(alpha)) {
        double c = multi_binomial(alpha, beta);
        double dphi = phi.derivative(alpha.minus(beta), p);
        if (dphi == 0.0) continue;
        s += c * weight_power_derivative_impl(v, k, beta, p) * dphi;
    }
    return s;
}

ResidualReport weak_derivative_residual(const ScalarField& f, const ScalarField& g_candidate,
                                        const WeightFunction& v, const MultiIndex& alpha,
                                        const TestFunctionBattery& battery, const Mesh& mesh,
                                        const QuadratureRule& rule) {
    if (alpha.order() < 1)
        throw std::invalid_argument("weak_derivative_residual: |alpha| >= 1 required");
    const int k = alpha.order() + 1;
    const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
    std::vector<Point> sing = f.singular_points;
    for (const Point& z : g_candidate.singular_points) sing.push_back(z);
    for (const Point& z : weight_zero_points(v)) sing.push_back(z);

    auto lhs = [&](const BumpFunction& phi, const Point& x) {
        double d = weighted_test_derivative(v, k, phi, alpha, x);
        return d == 0.0 ? 0.0 : f(x) * d;
    };
    auto rhs = [&](const BumpFunction& phi, const Point& x) {
        double pv = phi.value(x);
        return pv == 0.0 ? 0.0 : sign * std::pow(v.value(x), k) * pv * g_candidate(x);
    };
    return battery_residual(battery, lhs, rhs, mesh, rule, sing);
}

ResidualReport leibniz_residual(const ScalarField& f, const WeightFunction& v, int m,
                                const MultiIndex& alpha, const TestFunctionBattery& battery,
                                const Mesh& mesh, const QuadratureRule& rule) {
    if (alpha.order() > m)
        throw std::invalid_argument("leibniz_residual: |alpha| <= m required");
    const int k = m + 1;
    const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
    for (const auto& beta : enumerate_below(alpha))
        if (!f.has_derivative(beta))
            throw std::invalid_argument("leibniz_residual: missing D_v^beta f for " + beta.str());
    std::vector<Point> sing = f.singular_points;
    for (const Point& z : weight_zero_points(v)) sing.push_back(z);

    auto lhs = [&](const BumpFunction& phi, const Point& x) {
        double d = phi.derivative(alpha, x);
        return d == 0.0 ? 0.0 : std::pow(v.value(x), k) * f(x) * d;
    };
    auto rhs = [&](const BumpFunction& phi, const Point& x) {
        double pv = phi.value(x);
        if (pv == 0.0) return 0.0;
        double s = 0.0;
        for (const auto& beta : enumerate_below(alpha)) {
            double c = multi_binomial(alpha, beta);
            double dv = weight_power_derivative_impl(v, k, alpha.minus(beta), x);
            if (dv == 0.0) continue;
            s += c * f.derivative(beta, x) * dv;
        }
        return sign * s * pv;
    };
    return battery_residual(battery, lhs, rhs, mesh, rule, sing);
}

ResidualReport ibp_residual(const ScalarField& h, const ScalarField& f, const MultiplierField& a,
                            const WeightFunction& v, const MultiIndex& alpha, const Mesh& mesh,
                            const QuadratureRule& rule) {
    if (alpha.order() != 1) throw std::invalid_argument("ibp_residual: |alpha| = 1 required");
    if (a.power < 3)
        throw HypothesisError("ibp multiplier: a = a~ v^n needs n >= 3 (got n = " +
                              std::to_string(a.power) + ")");
    if (!a.a_tilde.has_derivative(alpha))
        throw HypothesisError("ibp multiplier: a~ must be C^1 (declared derivative missing)");
    // a~ and grad a~ bounded, v bounded: sample at mesh nodes
    for (const Point& nd : mesh.nodes) {
        bool near_sing = false;
        for (const Point& s : a.a_tilde.singular_points)
            if (std::hypot(nd[0] - s[0], nd[1] - s[1]) < 1e-12) near_sing = true;
        if (near_sing) continue;
        if (!std::isfinite(a.a_tilde(nd)) || !std::isfinite(a.a_tilde.derivative(alpha, nd)) ||
            !std::isfinite(v.value(nd)))
            throw HypothesisError("ibp multiplier: a~ (or v) unbounded on the mesh");
    }
    if (v.kind == WeightFunction::Kind::radial_power && v.exponent < 0)
        throw HypothesisError("ibp: v must be bounded on the domain");

    std::vector<Point> sing = f.singular_points;
    for (const Point& z : h.singular_points) sing.push_back(z);
    for (const Point& z : weight_zero_points(v)) sing.push_back(z);

    auto a_val = [&](const Point& x) {
        return a.a_tilde(x) * weight_power_derivative_impl(v, a.power, MultiIndex::zero(v.dimension), x);
    };
    auto da_val = [&](const Point& x) {
        return a.a_tilde.derivative(alpha, x) * std::pow(v.value(x), a.power) +
               a.a_tilde(x) * weight_power_derivative_impl(v, a.power, alpha, x);
    };
    auto lhs = [&](const Point& x) {
        return h(x) * (f(x) * da_val(x) + a_val(x) * f.derivative(alpha, x));
    };
    auto rhs = [&](const Point& x) { return -a_val(x) * f(x) * h.derivative(alpha, x); };

    ResidualReport rep;
    PerTestFunction r;
    r.index = 0;
    Mesh fine = refine_uniform(mesh, 4);
    r.lhs = integrate(lhs, fine, rule, sing);
    r.rhs = integrate(rhs, fine, rule, sing);
    double sl = integrate([&](const Point& x) { return std::abs(lhs(x)); }, fine, rule, sing);
    double sr = integrate([&](const Point& x) { return std::abs(rhs(x)); }, fine, rule, sing);
    r.residual = std::abs(r.lhs - r.rhs);
    r.scale = sl + sr;
    r.relative = r.residual / std::max(r.scale, 1e-300);
    rep.per_test_function.push_back(r);
    rep.residual = r.residual;
    rep.scale = r.scale;
    rep.relative = r.relative;
    return rep;
}

// ---------------------------------------------------------------------------
// traces

namespace {

double nodal_or_limit(const std::function<double(const Point&)>& g, const Mesh& mesh, int node,
                      const std::vector<Point>& singular) {
    const Point& p = mesh.nodes[node];
    bool singular_here = false;
    for (const Point& s : singular)
        if (std::hypot(p[0] - s[0], p[1] - s[1]) < 1e-12) singular_here = true;
    double val = singular_here ? std::numeric_limits<double>::quiet_NaN() : g(p);
    if (std::isfinite(val)) return val;

    // limit along boundary-adjacent nodes: linear extrapolation from the two
    // nearest interior nodes
    std::vector<std::pair<double, int>> cand;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        if (static_cast<int>(i) == node || mesh.boundary[i]) continue;
        const Point& q = mesh.nodes[i];
        cand.push_back({std::hypot(q[0] - p[0], q[1] - p[1]), static_cast<int>(i)});
    }
    std::sort(cand.begin(), cand.end());
    if (cand.size() < 2) throw SingularEvaluationError("trace_eval: no interior nodes for limit");
    const Point& q1 = mesh.nodes[cand[0].second];
    const Point& q2 = mesh.nodes[cand[1].second];
    double g1 = g(q1), g2 = g(q2);
    double d01 = cand[0].first;
    double d12 = std::hypot(q1[0] - q2[0], q1[1] - q2[1]);
    return g1 + (g1 - g2) * d01 / d12;
}

} // namespace

TraceReport trace_eval(const ScalarField& f, const WeightFunction& v, TraceMode mode,
                       const Mesh& mesh, double p) {
    // hypothesis gates: (2.9) for tr1, C_b^1 for tr2
    if (mode == TraceMode::tr1) {
        HypothesisParams prm;
        SamplePlan plan;
        if (mesh.dimension == 1) {
            double a = mesh.nodes.front()[0], b = mesh.nodes.back()[0];
            double wa = mesh.nodes[1][0] - a;
            double wb = b - mesh.nodes[mesh.nodes.size() - 2][0];
            prm.domain = Domain::interval(a, b);
            prm.compact_interval = {a + wa, b - wb};
        } else {
            double R = 0.0, inner = 0.0;
            for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
                double r = std::hypot(mesh.nodes[i][0], mesh.nodes[i][1]);
                if (mesh.boundary[i])
                    R = std::max(R, r);
                else
                    inner = std::max(inner, r);
            }
            prm.domain = Domain::disk(R);
            prm.compact_radius = inner;
        }
        HypothesisReport rep = hypothesis_check(HypothesisKind::floor_29, v, prm, plan);
        if (!rep.holds)
            throw HypothesisError(
                "trace tr1: (2.9) fails (|v| > delta off a compact set): v vanishes toward the "
                "boundary");
    } else {
        if (!v.gradient_bounded())
            throw HypothesisError("trace tr2: v must be C_b^1 (bounded gradient)");
    }

    auto g = [&](const Point& x) {
        double fv = f(x);
        if (mode == TraceMode::tr1) return fv;
        double vv = v.value(x);
        return vv * vv * fv;
    };

    TraceReport rep;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        if (mesh.boundary[i]) rep.boundary_nodes.push_back(static_cast<int>(i));
    for (int node : rep.boundary_nodes)
        rep.values.push_back(nodal_or_limit(g, mesh, node, f.singular_points));

    if (mesh.dimension == 1) {
        double s = 0.0;
        for (double val : rep.values) s += std::pow(std::abs(val), p);
        rep.norm = std::pow(s, 1.0 / p);
    } else {
        // boundary polygon edges with P1 interpolation of the nodal values
        std::map<int, double> val_of;
        for (std::size_t i = 0; i < rep.boundary_nodes.size(); ++i)
            val_of[rep.boundary_nodes[i]] = rep.values[i];
        QuadratureRule rule = QuadratureRule::gauss(5);
        std::set<std::pair<int, int>> edges;
        for (const Cell& c : mesh.cells)
            for (int e = 0; e < 3; ++e) {
                int u = c.v[e], w = c.v[(e + 1) % 3];
                if (!mesh.boundary[u] || !mesh.boundary[w]) continue;
                edges.insert(std::minmax(u, w));
            }
        std::vector<double> contribs;
        for (const auto& [u, w] : edges) {
            const Point& pu = mesh.nodes[u];
            const Point& pw = mesh.nodes[w];
            double len = std::hypot(pw[0] - pu[0], pw[1] - pu[1]);
            double s = 0.0;
            for (int q = 0; q < rule.gauss_points; ++q) {
                double t = rule.pts1d[q];
                double gv = (1.0 - t) * val_of[u] + t * val_of[w];
                s += rule.wts1d[q] * std::pow(std::abs(gv), p);
            }
            contribs.push_back(s * len);
        }
        rep.norm = std::pow(pairwise_sum(contribs), 1.0 / p);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// inequalities

double poincare_domain_constant(const Domain& domain, double p) {
    if (domain.kind == Domain::Kind::interval)
        return p == 2.0 ? (domain.b - domain.a) / M_PI : (domain.b - domain.a);
    return domain.diameter();
}

namespace {

MarginReport finish_margin(const std::string& kind, double lhs, double rhs, double constant) {
    MarginReport rep;
    rep.kind = kind;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.constant_used = constant;
    rep.margin = constant * rhs - lhs;
    double scale = std::max(std::abs(lhs), std::abs(constant * rhs));
    rep.holds = rep.margin >= -1e-8 * scale;
    return rep;
}

double radial_lp(const std::function<double(double)>& profile, double p, int d, double R,
                 const QuadratureRule& rule) {
    auto integrand = [&](double r) { return std::pow(std::abs(profile(r)), p); };
    RadialIntegral ri = integrate_radial(integrand, d, R, rule, 96);
    if (ri.diverged) throw DivergenceError("inequality_check: radial norm diverges");
    return std::pow(ri.value, 1.0 / p);
}

} // namespace

MarginReport inequality_check(InequalityKind kind, const WeightFunction& v, const RadialField& f,
                              double p, int d, const InequalityParams& params) {
    QuadratureRule rule = QuadratureRule::gauss(5);
    const double R = params.R;

    if (kind == InequalityKind::hardy) {
        if (!(d > p)) throw HypothesisError("hardy: d > p required");
        double lhs = radial_lp([&](double r) { return f.value(r) / r; }, p, d, R, rule);
        double rhs = radial_lp(f.derivative, p, d, R, rule);
        return finish_margin("hardy", lhs, rhs, p / (d - p));
    }

    if (v.kind != WeightFunction::Kind::radial_power)
        throw std::invalid_argument("inequality_check (radial): v must be a radial power");
    if (p != 2.0)
        throw std::invalid_argument("inequality_check (radial): p = 2 only for d >= 2 checks");
    const double beta = v.exponent;
    double sigma = params.sigma > 0.0 ? params.sigma : beta * std::pow(double(d), (2.0 - p) / 2.0);
    double sigma_min = beta * std::pow(double(d), (2.0 - p) / 2.0);
    if (sigma < sigma_min * (1.0 - 1e-12))
        throw HypothesisError("(7.1) fails: supplied sigma below |grad v| |x| / |v| supremum");
    double window = 2.0 * sigma * p / (d - p);
    if (!(d > p) || !(window > 0.0) || !(window < 1.0))
        throw HypothesisError("(7.2) fails: 2 sigma p / (d - p) = " + std::to_string(window) +
                              " not in (0,1)");
    auto vpow = [&](double r, double e) { return std::pow(r, e); };
    double rhs = radial_lp([&](double r) { return vpow(r, 2 * beta) * f.derivative(r); }, p, d, R,
                           rule);

    if (kind == InequalityKind::kebiche_73) {
        double lhs = radial_lp(
            [&](double r) { return 2.0 * beta * vpow(r, 2 * beta - 1) * f.value(r); }, p, d, R,
            rule);
        double constant = 2.0 * sigma * p / (d - p - 2.0 * sigma * p);
        return finish_margin("kebiche_73", lhs, rhs, constant);
    }
    if (kind == InequalityKind::poincare_cor) {
        double lhs =
            radial_lp([&](double r) { return vpow(r, 2 * beta) * f.value(r); }, p, d, R, rule);
        double constant = params.C_Omega
                              ? *params.C_Omega
                              : poincare_domain_constant(Domain::disk(R), p) *
                                    (1.0 + 2.0 * sigma * p / (d - p - 2.0 * sigma * p));
        return finish_margin("poincare_cor", lhs, rhs, constant);
    }
    throw std::invalid_argument("inequality_check: oned_72 uses the 1D route");
}

MarginReport inequality_check_1d(InequalityKind kind, const WeightFunction& v,
                                 const ScalarField& f, double p, const Domain& domain,
                                 const Mesh& mesh, const QuadratureRule& rule,
                                 const InequalityParams& params) {
    if (kind != InequalityKind::oned_72 && kind != InequalityKind::poincare_cor)
        throw std::invalid_argument("inequality_check_1d: oned_72 or poincare_cor only");
    MultiIndex e1 = MultiIndex::unit(1, 0);
    double sigma = params.sigma;
    {
        HypothesisParams prm;
        prm.domain = domain;
        prm.p = p;
        prm.sigma = sigma;
        prm.d = 1;
        SamplePlan plan;
        HypothesisReport grad = hypothesis_check(HypothesisKind::gradient_71, v, prm, plan);
        if (sigma > 0.0 && !grad.holds)
            throw HypothesisError("(7.1) fails: supplied sigma below the gradient supremum");
        if (sigma <= 0.0) sigma = 1.01 * grad.constant;
    }
    double window = 2.0 * sigma * p / (p - 1.0);
    if (!(p > 1.0) || !(window > 0.0) || !(window < 1.0))
        throw HypothesisError("(7.2) fails: 2 sigma p / (p - 1) = " + std::to_string(window) +
                              " not in (0,1)");

    auto vsq_prime = [&](const Point& x) {
        return 2.0 * v.value(x) * v.derivative(e1, x);
    };
    ScalarField lhs_field;
    lhs_field.evaluator = [&, vsq_prime](const Point& x) { return f(x) * vsq_prime(x); };
    lhs_field.singular_points = f.singular_points;
    ScalarField rhs_field;
    rhs_field.evaluator = [&](const Point& x) {
        double vv = v.value(x);
        return vv * vv * f.derivative(e1, x);
    };
    rhs_field.singular_points = f.singular_points;
    auto unit = [](const Point&) { return 1.0; };

    double rhs = weighted_norm_fn(rhs_field, unit, p, mesh, rule);
    if (kind == InequalityKind::oned_72) {
        double lhs = weighted_norm_fn(lhs_field, unit, p, mesh, rule);
        double constant = 2.0 * sigma * p / (p - 1.0 - 2.0 * sigma * p);
        return finish_margin("oned_72", lhs, rhs, constant);
    }
    ScalarField vvf;
    vvf.evaluator = [&](const Point& x) {
        double vv = v.value(x);
        return vv * vv * f(x);
    };
    vvf.singular_points = f.singular_points;
    double lhs = weighted_norm_fn(vvf, unit, p, mesh, rule);
    double constant = params.C_Omega
                          ? *params.C_Omega
                          : poincare_domain_constant(domain, p) *
                                (1.0 + 2.0 * sigma * p / (p - 1.0 - 2.0 * sigma * p));
    return finish_margin("poincare_cor", lhs, rhs, constant);
}

} // namespace degenera
