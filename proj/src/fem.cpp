#include "degenera/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "degenera/parallel.hpp"

namespace degenera {

namespace {

double ipow(double b, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// P1 basis values and gradients on one cell
struct LocalBasis {
    int nverts = 2;
    std::array<int, 3> nodes{-1, -1, -1};
    std::array<Point, 3> grad{}; // constant per cell
    double values(const Mesh& mesh, int cell, const Point& x, std::array<double, 3>& phi) const;
};

LocalBasis local_basis(const Mesh& mesh, int cell) {
    LocalBasis lb;
    const Cell& cl = mesh.cells[cell];
    lb.nodes = cl.v;
    if (mesh.dimension == 1) {
        lb.nverts = 2;
        double h = mesh.nodes[cl.v[1]][0] - mesh.nodes[cl.v[0]][0];
        lb.grad[0] = {-1.0 / h, 0.0};
        lb.grad[1] = {1.0 / h, 0.0};
    } else {
        lb.nverts = 3;
        const Point& p0 = mesh.nodes[cl.v[0]];
        const Point& p1 = mesh.nodes[cl.v[1]];
        const Point& p2 = mesh.nodes[cl.v[2]];
        double twoA = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        lb.grad[0] = {(p1[1] - p2[1]) / twoA, (p2[0] - p1[0]) / twoA};
        lb.grad[1] = {(p2[1] - p0[1]) / twoA, (p0[0] - p2[0]) / twoA};
        lb.grad[2] = {(p0[1] - p1[1]) / twoA, (p1[0] - p0[0]) / twoA};
    }
    return lb;
}

double LocalBasis::values(const Mesh& mesh, int cell, const Point& x,
                          std::array<double, 3>& phi) const {
    const Cell& cl = mesh.cells[cell];
    if (mesh.dimension == 1) {
        double xa = mesh.nodes[cl.v[0]][0], xb = mesh.nodes[cl.v[1]][0];
        double t = (x[0] - xa) / (xb - xa);
        phi = {1.0 - t, t, 0.0};
        return 1.0;
    }
    const Point& p0 = mesh.nodes[cl.v[0]];
    const Point& p1 = mesh.nodes[cl.v[1]];
    const Point& p2 = mesh.nodes[cl.v[2]];
    double twoA = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    double l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / twoA;
    double l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / twoA;
    phi = {1.0 - l1 - l2, l1, l2};
    return 1.0;
}

std::vector<Point> v_singular_points(const WeightFunction& v) {
    std::vector<Point> out;
    if (v.dimension > 2) return out;
    for (const auto& z : v.zero_set.as_points(v.dimension))
        out.push_back({z[0], v.dimension > 1 ? z[1] : 0.0});
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// FESpace

FESpace FESpace::build(Mesh mesh) {
    FESpace sp;
    sp.mesh = std::move(mesh);
    sp.dof_of_node.assign(sp.mesh.nodes.size(), -1);
    for (std::size_t i = 0; i < sp.mesh.nodes.size(); ++i) {
        if (!sp.mesh.boundary[i]) {
            sp.dof_of_node[i] = static_cast<int>(sp.node_of_dof.size());
            sp.node_of_dof.push_back(static_cast<int>(i));
        }
    }
    return sp;
}

// ---------------------------------------------------------------------------
// CoefficientSet

bool CoefficientSet::b_is_zero() const {
    for (const auto& b : b_tilde)
        if (!b.is_const || b.c != 0.0) return false;
    return true;
}

double CoefficientSet::a_eff(int i, int j, const Point& p, double v4) const {
    return a_tilde[static_cast<std::size_t>(i) * d + j](p) * v4;
}

CoefficientSet CoefficientSet::radial_power_instance(int d, int m, double beta) {
    if (m < 1) throw std::invalid_argument("radial_power_instance: m >= 1 required");
    CoefficientSet cs;
    cs.d = d;
    cs.v = WeightFunction::radial_power(2.0 * m, d, 2);
    cs.a_tilde.assign(static_cast<std::size_t>(d) * d, CoeffField(0.0));
    for (int i = 0; i < d; ++i) cs.a_tilde[static_cast<std::size_t>(i) * d + i] = CoeffField(1.0);
    cs.b_tilde.assign(d, CoeffField(0.0));
    cs.b_tilde_div.assign(d, CoeffField(0.0));
    cs.c_tilde = CoeffField(1.0);
    cs.a_symmetric_declared = true;
    double e = 2.0 * m - beta;
    cs.k_radial_exponent = e;
    cs.k_coef = 1.0;
    cs.k.evaluator = [e](const Point& p) { return std::pow(std::hypot(p[0], p[1]), e); };
    if (e < 0) cs.k.singular_points.push_back({0.0, 0.0});
    return cs;
}

CoefficientSet CoefficientSet::identity_helmholtz(int d, WeightFunction v,
                                                  std::function<double(const Point&)> load) {
    CoefficientSet cs;
    cs.d = d;
    cs.v = std::move(v);
    cs.a_tilde.assign(static_cast<std::size_t>(d) * d, CoeffField(0.0));
    for (int i = 0; i < d; ++i) cs.a_tilde[static_cast<std::size_t>(i) * d + i] = CoeffField(1.0);
    cs.b_tilde.assign(d, CoeffField(0.0));
    cs.b_tilde_div.assign(d, CoeffField(0.0));
    cs.c_tilde = CoeffField(1.0);
    cs.a_symmetric_declared = true;
    cs.k.evaluator = std::move(load);
    return cs;
}

// ---------------------------------------------------------------------------
// assembly

AssembledSystem assemble(const CoefficientSet& coeffs, const FESpace& space,
                         const QuadratureRule& rule) {
    const Mesh& mesh = space.mesh;
    const int d = mesh.dimension;
    if (coeffs.d != d) throw std::invalid_argument("assemble: coefficient dimension mismatch");
    std::vector<Point> sing = v_singular_points(coeffs.v);
    for (const Point& s : coeffs.k.singular_points) sing.push_back(s);

    const auto we = coeffs.weight_exponents;
    const bool drift = !coeffs.b_is_zero();

    // per-chunk buffers merged in ascending cell order keep the result
    // bit-identical for any thread count
    const int threads = configured_threads();
    std::vector<std::vector<Triplet>> chunk_trip(threads);
    std::vector<std::vector<double>> chunk_load(threads);
    std::vector<std::string> chunk_error(threads);

    parallel_chunks(mesh.cells.size(), threads, [&](int chunk, std::size_t b, std::size_t e) {
        std::vector<Triplet>& trip = chunk_trip[chunk];
        std::vector<double>& load = chunk_load[chunk];
        load.assign(space.dofs(), 0.0);
        try {
        for (std::size_t c = b; c < e; ++c) {
            LocalBasis lb = local_basis(mesh, static_cast<int>(c));
            const int nv = lb.nverts;
            double local[3][3] = {{0}};
            double local_load[3] = {0};
            for (const WeightedPoint& qp :
                 cell_quadrature(mesh, static_cast<int>(c), rule, sing)) {
                std::array<double, 3> phi;
                lb.values(mesh, static_cast<int>(c), qp.x, phi);
                double vv = coeffs.v.value(qp.x);
                double v4 = ipow(vv, we[0]);
                double v3 = ipow(vv, we[1]);
                double v2 = ipow(vv, we[2]);
                double aeff[2][2];
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) aeff[i][j] = coeffs.a_eff(i, j, qp.x, v4);
                double beff[2] = {0, 0};
                if (drift)
                    for (int i = 0; i < d; ++i) beff[i] = coeffs.b_tilde[i](qp.x) * v3;
                double ceff = coeffs.c_tilde(qp.x) * v2;
                double kval = coeffs.k(qp.x);
                for (int r = 0; r < nv; ++r) {
                    for (int cc = 0; cc < nv; ++cc) {
                        double s = 0.0;
                        for (int i = 0; i < d; ++i)
                            for (int j = 0; j < d; ++j)
                                s += aeff[i][j] * lb.grad[cc][i] * lb.grad[r][j];
                        if (drift)
                            for (int i = 0; i < d; ++i) s += phi[r] * beff[i] * lb.grad[cc][i];
                        s += ceff * phi[cc] * phi[r];
                        local[r][cc] += qp.w * s;
                    }
                    local_load[r] += qp.w * kval * phi[r];
                }
            }
            for (int r = 0; r < nv; ++r) {
                int dr = space.dof_of_node[lb.nodes[r]];
                if (dr < 0) continue;
                if (!std::isfinite(local_load[r])) {
                    chunk_error[chunk] = "assemble: non-finite load entry in cell " +
                                         std::to_string(c);
                    return;
                }
                load[dr] += local_load[r];
                for (int cc = 0; cc < nv; ++cc) {
                    int dc = space.dof_of_node[lb.nodes[cc]];
                    if (dc < 0) continue;
                    if (!std::isfinite(local[r][cc])) {
                        chunk_error[chunk] = "assemble: non-finite matrix entry in cell " +
                                             std::to_string(c);
                        return;
                    }
                    trip.push_back({dr, dc, local[r][cc]});
                }
            }
        }
        } catch (const std::exception& ex) {
            chunk_error[chunk] = ex.what();
        }
    });
    for (const std::string& err : chunk_error)
        if (!err.empty()) throw SingularEvaluationError(err);

    std::vector<Triplet> trip;
    std::vector<double> load(space.dofs(), 0.0);
    for (int t = 0; t < threads; ++t) {
        trip.insert(trip.end(), chunk_trip[t].begin(), chunk_trip[t].end());
        if (!chunk_load[t].empty())
            for (int i = 0; i < space.dofs(); ++i) load[i] += chunk_load[t][i];
    }
    AssembledSystem sys;
    sys.matrix = CsrMatrix::from_triplets(space.dofs(), std::move(trip));
    sys.load = std::move(load);
    bool sym_entries = true;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const CoeffField& ij = coeffs.a_tilde[static_cast<std::size_t>(i) * d + j];
            const CoeffField& ji = coeffs.a_tilde[static_cast<std::size_t>(j) * d + i];
            if (ij.is_const && ji.is_const && ij.c != ji.c) sym_entries = false;
        }
    sys.symmetric = coeffs.b_is_zero() && coeffs.a_symmetric_declared && sym_entries;
    return sys;
}

NormMatrices assemble_norm_matrices(const FESpace& space, const WeightFunction& v,
                                    const QuadratureRule& rule) {
    const Mesh& mesh = space.mesh;
    const int d = mesh.dimension;
    std::vector<Point> sing = v_singular_points(v);
    std::vector<Triplet> ts, tq, tq4;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        LocalBasis lb = local_basis(mesh, static_cast<int>(c));
        const int nv = lb.nverts;
        double ls[3][3] = {{0}}, lq[3][3] = {{0}}, lq4[3][3] = {{0}};
        for (const WeightedPoint& qp : cell_quadrature(mesh, static_cast<int>(c), rule, sing)) {
            std::array<double, 3> phi;
            lb.values(mesh, static_cast<int>(c), qp.x, phi);
            double vv = v.value(qp.x);
            double v4 = ipow(vv, 4), v2 = ipow(vv, 2);
            for (int r = 0; r < nv; ++r)
                for (int cc = 0; cc < nv; ++cc) {
                    double gg = 0.0;
                    for (int i = 0; i < d; ++i) gg += lb.grad[cc][i] * lb.grad[r][i];
                    ls[r][cc] += qp.w * v4 * gg;
                    lq[r][cc] += qp.w * v2 * phi[cc] * phi[r];
                    lq4[r][cc] += qp.w * v4 * phi[cc] * phi[r];
                }
        }
        for (int r = 0; r < nv; ++r) {
            int dr = space.dof_of_node[lb.nodes[r]];
            if (dr < 0) continue;
            for (int cc = 0; cc < nv; ++cc) {
                int dc = space.dof_of_node[lb.nodes[cc]];
                if (dc < 0) continue;
                ts.push_back({dr, dc, ls[r][cc]});
                tq.push_back({dr, dc, lq[r][cc]});
                tq4.push_back({dr, dc, lq4[r][cc]});
            }
        }
    }
    NormMatrices nm;
    nm.stiffness = CsrMatrix::from_triplets(space.dofs(), std::move(ts));
    nm.mass_w = CsrMatrix::from_triplets(space.dofs(), std::move(tq));
    nm.mass_v4 = CsrMatrix::from_triplets(space.dofs(), std::move(tq4));
    return nm;
}

// ---------------------------------------------------------------------------
// coercivity

const char* CoercivityReport::case_name() const {
    switch (which) {
    case CoercivityCase::case1: return "case1";
    case CoercivityCase::case2: return "case2";
    case CoercivityCase::case3a: return "case3a";
    case CoercivityCase::case3b: return "case3b";
    case CoercivityCase::none: return "none";
    }
    return "?";
}

namespace {

// smallest eigenvalue of a symmetric d x d matrix by cyclic Jacobi rotations
double symmetric_min_eig(std::vector<double> m, int d) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) off += std::abs(m[i * d + j]);
        if (off < 1e-15) break;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                double apq = m[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                double theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double cth = 1.0 / std::sqrt(t * t + 1.0), sth = t * cth;
                for (int k = 0; k < d; ++k) {
                    double mkp = m[k * d + p], mkq = m[k * d + q];
                    m[k * d + p] = cth * mkp - sth * mkq;
                    m[k * d + q] = sth * mkp + cth * mkq;
                }
                for (int k = 0; k < d; ++k) {
                    double mpk = m[p * d + k], mqk = m[q * d + k];
                    m[p * d + k] = cth * mpk - sth * mqk;
                    m[q * d + k] = sth * mpk + cth * mqk;
                }
            }
    }
    double lmin = m[0];
    for (int i = 1; i < d; ++i) lmin = std::min(lmin, m[i * d + i]);
    return lmin;
}

bool all_const(const std::vector<CoeffField>& v) {
    for (const auto& c : v)
        if (!c.is_const) return false;
    return true;
}

} // namespace

CoercivityReport coercivity_check(const CoefficientSet& coeffs, const Domain& domain,
                                  std::optional<double> C_Omega) {
    CoercivityReport rep;
    const int d = coeffs.d;
    SampleGrid grid = make_sample_grid(domain, coeffs.v, 4096);

    // mu: essential infimum of the smallest eigenvalue of a~ (exact when constant)
    if (all_const(coeffs.a_tilde)) {
        std::vector<double> m(static_cast<std::size_t>(d) * d);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = coeffs.a_tilde[i].c;
        rep.mu = symmetric_min_eig(std::move(m), d);
    } else {
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& pt : grid.points) {
            Point p{pt[0], d > 1 ? pt[1] : 0.0};
            std::vector<double> m(static_cast<std::size_t>(d) * d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    m[static_cast<std::size_t>(i) * d + j] = coeffs.a_tilde[i * d + j](p);
            inf = std::min(inf, symmetric_min_eig(std::move(m), d));
        }
        rep.mu = inf > 0 ? 0.99 * inf : inf;
    }
    // sigma: essential infimum of c~
    if (coeffs.c_tilde.is_const) {
        rep.sigma = coeffs.c_tilde.c;
    } else {
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& pt : grid.points) {
            Point p{pt[0], d > 1 ? pt[1] : 0.0};
            inf = std::min(inf, coeffs.c_tilde(p));
        }
        rep.sigma = inf > 0 ? 0.99 * inf : inf;
    }

    auto sup_field = [&](const CoeffField& f) {
        if (f.is_const) return std::abs(f.c);
        double sup = 0.0;
        for (const auto& pt : grid.points) {
            Point p{pt[0], d > 1 ? pt[1] : 0.0};
            sup = std::max(sup, std::abs(f(p)));
        }
        return 1.01 * sup;
    };

    // case 1: sqrt(d) ||v^-3 b|| < 2 sqrt(mu sigma)
    double bnorm = 0.0;
    for (const auto& b : coeffs.b_tilde) bnorm = std::max(bnorm, sup_field(b));
    if (rep.mu > 0 && rep.sigma > 0 && std::sqrt(double(d)) * bnorm < 2.0 * std::sqrt(rep.mu * rep.sigma)) {
        double lo = 0.0, hi = std::min(rep.mu, rep.sigma);
        auto pred = [&](double g) {
            return std::sqrt(double(d)) * bnorm < 2.0 * std::sqrt((rep.mu - g) * (rep.sigma - g));
        };
        while (hi - lo > 1e-6) {
            double mid = 0.5 * (lo + hi);
            (pred(mid) ? lo : hi) = mid;
        }
        rep.which = CoercivityCase::case1;
        rep.gamma = lo;
        rep.detail = "sqrt(d)||b~|| < 2 sqrt(mu sigma); gamma by bisection";
        return rep;
    }

    // div b on the grid (needs declared b~ partials)
    MultiIndex e[2] = {MultiIndex::unit(d, 0), d > 1 ? MultiIndex::unit(d, 1) : MultiIndex::unit(d, 0)};
    const int eb = coeffs.weight_exponents[1];
    auto div_b = [&](const std::vector<double>& pt) {
        Point p{pt[0], d > 1 ? pt[1] : 0.0};
        std::span<const double> x(pt.data(), pt.size());
        double vv = coeffs.v.value(x);
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            double dvi = coeffs.v.derivative(e[i], x);
            s += coeffs.b_tilde_div[i](p) * ipow(vv, eb) +
                 eb * coeffs.b_tilde[i](p) * ipow(vv, eb - 1) * dvi;
        }
        return s;
    };
    bool have_div = coeffs.b_tilde_div.size() == static_cast<std::size_t>(d);

    if (have_div && rep.sigma > 0) { // case 3a: div(b) <= 0 a.e.
        double supdiv = -std::numeric_limits<double>::infinity();
        for (const auto& pt : grid.points) supdiv = std::max(supdiv, div_b(pt));
        if (supdiv <= 1e-14) {
            rep.which = CoercivityCase::case3a;
            rep.gamma = std::min(rep.mu, rep.sigma);
            rep.detail = "div(b) <= 0 a.e.; gamma = min(mu, sigma)";
            return rep;
        }
    }
    if (have_div) { // case 3b: (c - div(b)/2) v^-2 >= sigma' > 0
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& pt : grid.points) {
            Point p{pt[0], d > 1 ? pt[1] : 0.0};
            std::span<const double> x(pt.data(), pt.size());
            double vv = coeffs.v.value(x);
            if (std::abs(vv) < 1e-300) continue;
            double val = coeffs.c_tilde(p) - 0.5 * div_b(pt) / ipow(vv, 2);
            inf = std::min(inf, val);
        }
        double sigma3 = inf > 0 ? 0.99 * inf : inf;
        if (sigma3 > 0 && rep.mu > 0) {
            rep.which = CoercivityCase::case3b;
            rep.sigma = sigma3;
            rep.gamma = std::min(rep.mu, sigma3);
            rep.detail = "(c - div(b)/2) v^-2 >= sigma > 0; gamma = min(mu, sigma)";
            return rep;
        }
    }
    if (C_Omega && rep.sigma > 0) { // case 2: 0 < mu - C_Omega sqrt(d) ||v^-4 b||
        double sup = 0.0;
        bool unbounded = false;
        for (const auto& z : coeffs.v.zero_set.as_points(d)) {
            Point p{z[0], d > 1 ? z[1] : 0.0};
            for (const auto& b : coeffs.b_tilde)
                if (std::abs(b(p)) > 0) unbounded = true;
        }
        for (const auto& pt : grid.points) {
            Point p{pt[0], d > 1 ? pt[1] : 0.0};
            std::span<const double> x(pt.data(), pt.size());
            double vv = coeffs.v.value(x);
            if (std::abs(vv) < 1e-300) continue;
            for (const auto& b : coeffs.b_tilde)
                sup = std::max(sup, std::abs(b(p) / vv));
        }
        sup *= 1.01;
        double margin = rep.mu - *C_Omega * std::sqrt(double(d)) * sup;
        if (!unbounded && margin > 0) {
            rep.which = CoercivityCase::case2;
            rep.gamma = std::min(margin, rep.sigma);
            rep.detail = "0 < mu - C_Omega sqrt(d) ||v^-4 b||; gamma = min(that, sigma)";
            return rep;
        }
    }
    rep.which = CoercivityCase::none;
    rep.gamma = 0.0;
    rep.detail = "no coercivity case applies";
    return rep;
}

// ---------------------------------------------------------------------------
// solve

SolveMethod default_method(const AssembledSystem& system) {
    if (system.matrix.size() < 2000) return SolveMethod::dense_lu;
    return system.symmetric ? SolveMethod::cg : SolveMethod::bicgstab;
}

SolveReport solve(const AssembledSystem& system, const FESpace& space,
                  const CoefficientSet& coeffs, SolveMethod method, double tol, int max_iter,
                  std::optional<double> gamma) {
    SolveReport rep;
    const CsrMatrix& M = system.matrix;
    const std::vector<double>& b = system.load;

    switch (method) {
    case SolveMethod::cg: {
        if (!system.symmetric)
            throw std::invalid_argument("solve: cg requires a symmetric system");
        IterResult r = cg_solve(M, b, tol, max_iter);
        if (!r.converged)
            throw NonConvergenceError("solve: cg did not reach tolerance in " +
                                      std::to_string(max_iter) + " iterations");
        rep.coefficients = std::move(r.x);
        rep.iterations = r.iterations;
        break;
    }
    case SolveMethod::bicgstab: {
        IterResult r = bicgstab_solve(M, b, tol, max_iter);
        if (!r.converged)
            throw NonConvergenceError("solve: bicgstab did not reach tolerance in " +
                                      std::to_string(max_iter) + " iterations");
        rep.coefficients = std::move(r.x);
        rep.iterations = r.iterations;
        break;
    }
    case SolveMethod::dense_lu: {
        DenseSolver ds(M, system.symmetric);
        rep.coefficients = ds.solve(b);
        rep.iterations = 0;
        break;
    }
    }

    std::vector<double> Mx = M.multiply(rep.coefficients);
    double bn = norm2_vec(b);
    std::vector<double> r(Mx.size());
    for (std::size_t i = 0; i < Mx.size(); ++i) r[i] = Mx[i] - b[i];
    rep.residual_norm = bn > 0 ? norm2_vec(r) / bn : norm2_vec(r);

    QuadratureRule rule = QuadratureRule::gauss(5);
    NormMatrices nm = assemble_norm_matrices(space, coeffs.v, rule);
    std::vector<double> Sx = nm.stiffness.multiply(rep.coefficients);
    std::vector<double> Qx = nm.mass_w.multiply(rep.coefficients);
    rep.energy_norm =
        std::sqrt(dot(rep.coefficients, Sx) + dot(rep.coefficients, Qx));

    // |h| <= ||k||_{L^2_{v^-1}} by Cauchy-Schwarz against ||v g|| <= ||g||_X
    std::vector<Point> sing = v_singular_points(coeffs.v);
    for (const Point& s : coeffs.k.singular_points) sing.push_back(s);
    try {
        double kk = integrate(
            [&](const Point& x) {
                double vv = coeffs.v.value(x);
                double q = coeffs.k(x) / vv;
                return q * q;
            },
            space.mesh, rule, sing);
        rep.h_bound = std::sqrt(kk);
    } catch (const SingularEvaluationError&) {
        rep.h_bound = std::numeric_limits<double>::infinity();
    }
    if (gamma && *gamma > 0 && std::isfinite(rep.h_bound)) {
        rep.gamma = *gamma;
        rep.bound_checked = true;
        rep.bound_ok = rep.energy_norm <= 1.05 * rep.h_bound / *gamma;
    }
    return rep;
}

double estimate_poincare(const FESpace& space, const WeightFunction& v,
                         const QuadratureRule& rule) {
    NormMatrices nm = assemble_norm_matrices(space, v, rule);
    EigenResult er = smallest_generalized_eigen(nm.stiffness, nm.mass_v4, 1e-8, 2000);
    if (!er.converged)
        throw NonConvergenceError("estimate_poincare: inverse power iteration stagnated");
    return 1.0 / std::sqrt(er.lambda);
}

// ---------------------------------------------------------------------------
// nonintegrability

NonintegrabilityReport nonintegrability_check(const CoefficientSet& coeffs,
                                              const Domain& domain) {
    NonintegrabilityReport rep;
    if (coeffs.v.kind != WeightFunction::Kind::radial_power || !coeffs.k_radial_exponent ||
        !all_const(coeffs.a_tilde) || !all_const(coeffs.b_tilde) || !coeffs.c_tilde.is_const ||
        coeffs.weight_exponents != std::array<int, 3>{4, 3, 2})
        throw std::invalid_argument(
            "nonintegrability_check: coefficients must be in the v^{4,3,2} radial-power form");

    const int d = coeffs.d;
    const double bv = coeffs.v.exponent;
    const double e = *coeffs.k_radial_exponent;
    const double kap = coeffs.k_coef;
    const double R = domain.kind == Domain::Kind::disk ? domain.radius : 1.0;
    QuadratureRule rule = QuadratureRule::gauss(5);

    rep.a_ok = true; // a = a~ v^4 with constant a~: (1) holds structurally
    rep.b_ok = true; // b = b~ v^3 with constant b~: (2) holds structurally
    rep.c_ok = true; // c = c~ v^2 with constant c~: (3) holds structurally

    rep.k_sign_ok = kap >= 0.0;

    // (4a) k in L^2_{v^-1}: integrand r^{2(e-bv)+d-1} near 0
    bool l2_arith = 2.0 * (e - bv) + (d - 1) > -1.0;
    RadialIntegral l2_oracle = integrate_radial(
        [&](double r) { return std::pow(kap * std::pow(r, e - bv), 2); }, d, R, rule, 64);
    rep.k_l2_ok = l2_arith;

    // (4b) k v^-2 not locally integrable: integrand r^{e-2bv+d-1} near 0
    bool nonloc_arith = e - 2.0 * bv + (d - 1) <= -1.0;
    RadialIntegral nonloc_oracle = integrate_radial(
        [&](double r) { return std::abs(kap) * std::pow(r, e - 2.0 * bv); }, d, 0.25 * R, rule,
        64);
    rep.k_nonloc_ok = nonloc_arith;

    rep.k_ok = rep.k_sign_ok && rep.k_l2_ok && rep.k_nonloc_ok;
    rep.holds = rep.a_ok && rep.b_ok && rep.c_ok && rep.k_ok;
    rep.conclusion_nonintegrable = rep.holds;

    std::ostringstream det;
    det << "k=|x|^" << e << " vs v=|x|^" << bv << ": L2_{v^-1} arithmetic "
        << (l2_arith ? "finite" : "infinite") << " (oracle "
        << (l2_oracle.diverged ? "diverged" : "converged") << "); k v^-2 arithmetic "
        << (nonloc_arith ? "divergent" : "locally integrable") << " (oracle "
        << (nonloc_oracle.diverged ? "diverged" : "converged") << ")";
    rep.detail = det.str();
    return rep;
}

// ---------------------------------------------------------------------------
// divergence study

StudyTable divergence_study(const CoefficientSet& coeffs, const std::vector<StudyLevel>& levels,
                            double K_radius, double growth_threshold,
                            double stability_threshold) {
    StudyTable table;
    table.growth_threshold = growth_threshold;
    table.stability_threshold = stability_threshold;
    Domain dom = Domain::disk(1.0);

    CoercivityReport co = coercivity_check(coeffs, dom);
    if (co.which == CoercivityCase::none)
        throw HypothesisError("divergence_study: no coercivity case applies");
    // blow-up hypotheses only make sense for the radial power-weight form; smooth
    // control runs (non-radial data) skip them
    if (coeffs.k_radial_exponent) {
        NonintegrabilityReport ni = nonintegrability_check(coeffs, dom);
        if (!ni.holds)
            throw HypothesisError("divergence_study: nonintegrability hypotheses fail: " +
                                  ni.detail);
    }

    QuadratureRule rule = QuadratureRule::gauss(5);
    double prev_mass = 0.0, prev_energy = 0.0;
    for (std::size_t lvl = 0; lvl < levels.size(); ++lvl) {
        const StudyLevel& L = levels[lvl];
        Mesh mesh = build_disk_mesh(1.0, L.rings, L.sectors, L.grading);
        FESpace space = FESpace::build(std::move(mesh));
        AssembledSystem sys = assemble(coeffs, space, rule);
        SolveReport sol;
        try {
            sol = solve(sys, space, coeffs, default_method(sys), 1e-10,
                        20 * std::max(1000, sys.matrix.size()), co.gamma);
        } catch (const NonConvergenceError&) {
            table.aborted = true;
            break;
        }
        table.h_bound = sol.h_bound;

        // nodal values, boundary nodes pinned to zero
        std::vector<double> u(space.mesh.nodes.size(), 0.0);
        for (int dof = 0; dof < space.dofs(); ++dof)
            u[space.node_of_dof[dof]] = sol.coefficients[dof];
        std::vector<Point> sing = v_singular_points(coeffs.v);
        std::vector<double> per_cell(space.mesh.cells.size(), 0.0);
        for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
            LocalBasis lb = local_basis(space.mesh, static_cast<int>(c));
            double acc = 0.0;
            for (const WeightedPoint& qp :
                 cell_quadrature(space.mesh, static_cast<int>(c), rule, sing)) {
                if (std::hypot(qp.x[0], qp.x[1]) >= K_radius) continue;
                std::array<double, 3> phi;
                lb.values(space.mesh, static_cast<int>(c), qp.x, phi);
                double fh = 0.0;
                for (int k = 0; k < lb.nverts; ++k) fh += u[lb.nodes[k]] * phi[k];
                acc += qp.w * std::abs(fh);
            }
            per_cell[c] = acc;
        }
        double mass = pairwise_sum(per_cell);

        StudyRow row;
        row.level = static_cast<int>(lvl) + 1;
        row.rings = L.rings;
        row.dofs = space.dofs();
        row.mass = mass;
        row.mass_ratio = lvl > 0 ? mass / prev_mass : std::numeric_limits<double>::quiet_NaN();
        row.energy = sol.energy_norm;
        row.energy_rel_change = lvl > 0
                                    ? std::abs(sol.energy_norm - prev_energy) / prev_energy
                                    : std::numeric_limits<double>::quiet_NaN();
        row.gamma = co.gamma;
        row.case_name = co.case_name();
        row.bound_ok = sol.bound_ok;
        table.rows.push_back(row);
        prev_mass = mass;
        prev_energy = sol.energy_norm;
    }

    if (!table.aborted && table.rows.size() >= 3) {
        table.has_verdict = true;
        table.mass_growth_ok = true;
        for (std::size_t i = 1; i < table.rows.size(); ++i)
            if (!(table.rows[i].mass_ratio >= table.growth_threshold))
                table.mass_growth_ok = false;
        table.energy_stable_ok =
            table.rows.back().energy_rel_change <= table.stability_threshold;
        table.bound_ok = true;
        for (const StudyRow& r : table.rows)
            if (!r.bound_ok) table.bound_ok = false;
    }
    return table;
}

} // namespace degenera
