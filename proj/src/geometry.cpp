#include "degenera/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace degenera {

double pairwise_sum(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::size_t n = v.size();
    while (n > 1) {
        std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) {
            v[half] = v[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return v[0];
}

// ---------------------------------------------------------------------------
// Domain

Domain Domain::interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Domain::interval: a < b required");
    Domain d;
    d.kind = Kind::interval;
    d.a = a;
    d.b = b;
    return d;
}

Domain Domain::disk(double radius) {
    if (!(radius > 0)) throw std::invalid_argument("Domain::disk: radius > 0 required");
    Domain d;
    d.kind = Kind::disk;
    d.radius = radius;
    return d;
}

Domain Domain::square(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Domain::square: a < b required");
    Domain d;
    d.kind = Kind::square;
    d.a = a;
    d.b = b;
    return d;
}

double Domain::diameter() const {
    switch (kind) {
    case Kind::interval: return b - a;
    case Kind::disk: return 2.0 * radius;
    case Kind::square: return (b - a) * std::sqrt(2.0);
    }
    return 0.0;
}

double Domain::measure() const {
    switch (kind) {
    case Kind::interval: return b - a;
    case Kind::disk: return M_PI * radius * radius;
    case Kind::square: return (b - a) * (b - a);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Mesh

double Mesh::cell_measure(int c) const {
    const Cell& cl = cells[c];
    if (dimension == 1) return nodes[cl.v[1]][0] - nodes[cl.v[0]][0];
    const Point& p0 = nodes[cl.v[0]];
    const Point& p1 = nodes[cl.v[1]];
    const Point& p2 = nodes[cl.v[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double Mesh::total_measure() const {
    std::vector<double> m(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) m[c] = cell_measure(static_cast<int>(c));
    return pairwise_sum(m);
}

Point Mesh::cell_center(int c) const {
    const Cell& cl = cells[c];
    if (dimension == 1) {
        return {0.5 * (nodes[cl.v[0]][0] + nodes[cl.v[1]][0]), 0.0};
    }
    Point r{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        r[0] += nodes[cl.v[k]][0] / 3.0;
        r[1] += nodes[cl.v[k]][1] / 3.0;
    }
    return r;
}

double Mesh::cell_diameter(int c) const {
    const Cell& cl = cells[c];
    if (dimension == 1) return cell_measure(c);
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Point& a = nodes[cl.v[i]];
            const Point& b = nodes[cl.v[j]];
            d = std::max(d, std::hypot(a[0] - b[0], a[1] - b[1]));
        }
    return d;
}

void Mesh::dump(std::ostream& os) const {
    char buf[128];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "node %zu %.17g %.17g %d\n", i, nodes[i][0], nodes[i][1],
                      boundary[i] ? 1 : 0);
        os << buf;
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::snprintf(buf, sizeof buf, "cell %zu %d %d %d\n", c, cells[c].v[0], cells[c].v[1],
                      cells[c].v[2]);
        os << buf;
    }
}

Mesh build_interval_mesh(double a, double b, int cells, double grading_exponent, double center,
                         bool center_given) {
    if (cells < 1) throw std::invalid_argument("build_interval_mesh: cells >= 1 required");
    if (!(a < b)) throw std::invalid_argument("build_interval_mesh: a < b required");
    if (grading_exponent < 1.0)
        throw std::invalid_argument("build_interval_mesh: grading exponent >= 1 required");
    const double q = grading_exponent;
    if (!center_given) center = a;
    if (q > 1.0 && (center < a || center > b))
        throw std::invalid_argument("build_interval_mesh: grading center outside [a,b]");

    std::vector<double> xs;
    if (q == 1.0) {
        for (int i = 0; i <= cells; ++i) xs.push_back(a + (b - a) * i / cells);
    } else if (center <= a) {
        for (int i = 0; i <= cells; ++i)
            xs.push_back(a + (b - a) * std::pow(double(i) / cells, q));
    } else if (center >= b) {
        for (int i = 0; i <= cells; ++i)
            xs.push_back(b - (b - a) * std::pow(double(cells - i) / cells, q));
    } else {
        int nl = static_cast<int>(std::lround(cells * (center - a) / (b - a)));
        nl = std::max(1, std::min(cells - 1, nl));
        int nr = cells - nl;
        for (int i = nl; i >= 1; --i)
            xs.push_back(center - (center - a) * std::pow(double(i) / nl, q));
        xs.push_back(center);
        for (int i = 1; i <= nr; ++i)
            xs.push_back(center + (b - center) * std::pow(double(i) / nr, q));
    }

    Mesh m;
    m.dimension = 1;
    m.grading_exponent = q;
    m.grading_center = {center, 0.0};
    for (double x : xs) m.nodes.push_back({x, 0.0});
    m.boundary.assign(m.nodes.size(), false);
    m.boundary.front() = true;
    m.boundary.back() = true;
    for (int i = 0; i + 1 <= cells; ++i) {
        Cell c;
        c.v = {i, i + 1, -1};
        m.cells.push_back(c);
    }
    return m;
}

Mesh build_disk_mesh(double radius, int rings, int sectors, double grading_exponent) {
    if (!(radius > 0)) throw std::invalid_argument("build_disk_mesh: radius > 0 required");
    if (rings < 1) throw std::invalid_argument("build_disk_mesh: rings >= 1 required");
    if (sectors < 3) throw std::invalid_argument("build_disk_mesh: sectors >= 3 required");
    if (grading_exponent < 1.0)
        throw std::invalid_argument("build_disk_mesh: grading exponent >= 1 required");

    Mesh m;
    m.dimension = 2;
    m.grading_exponent = grading_exponent;
    m.grading_center = {0.0, 0.0};
    m.nodes.push_back({0.0, 0.0});
    auto node_id = [&](int ring, int j) { return 1 + (ring - 1) * sectors + (j % sectors); };
    for (int k = 1; k <= rings; ++k) {
        double r = radius * std::pow(double(k) / rings, grading_exponent);
        for (int j = 0; j < sectors; ++j) {
            double th = 2.0 * M_PI * j / sectors;
            m.nodes.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    m.boundary.assign(m.nodes.size(), false);
    for (int j = 0; j < sectors; ++j) m.boundary[node_id(rings, j)] = true;

    for (int j = 0; j < sectors; ++j) {
        Cell c;
        c.v = {0, node_id(1, j), node_id(1, j + 1)};
        m.cells.push_back(c);
    }
    for (int k = 2; k <= rings; ++k) {
        for (int j = 0; j < sectors; ++j) {
            Cell c1, c2;
            c1.v = {node_id(k - 1, j), node_id(k, j), node_id(k, j + 1)};
            c2.v = {node_id(k - 1, j), node_id(k, j + 1), node_id(k - 1, j + 1)};
            m.cells.push_back(c1);
            m.cells.push_back(c2);
        }
    }
    return m;
}

Mesh refine_uniform(const Mesh& mesh, int factor) {
    if (factor < 1) throw std::invalid_argument("refine_uniform: factor >= 1 required");
    if (factor == 1) return mesh;
    if (mesh.dimension == 1) {
        Mesh m;
        m.dimension = 1;
        m.grading_exponent = mesh.grading_exponent;
        m.grading_center = mesh.grading_center;
        for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
            double xa = mesh.nodes[mesh.cells[c].v[0]][0];
            double xb = mesh.nodes[mesh.cells[c].v[1]][0];
            for (int i = 0; i < factor; ++i) m.nodes.push_back({xa + (xb - xa) * i / factor, 0.0});
        }
        m.nodes.push_back(mesh.nodes.back());
        m.boundary.assign(m.nodes.size(), false);
        m.boundary.front() = true;
        m.boundary.back() = true;
        for (std::size_t i = 0; i + 1 < m.nodes.size(); ++i) {
            Cell c;
            c.v = {static_cast<int>(i), static_cast<int>(i + 1), -1};
            m.cells.push_back(c);
        }
        return m;
    }
    // 2D: repeated midpoint subdivision, factor must be a power of two
    if ((factor & (factor - 1)) != 0)
        throw std::invalid_argument("refine_uniform: 2D factor must be a power of two");
    Mesh cur = mesh;
    for (int f = factor; f > 1; f /= 2) {
        Mesh next;
        next.dimension = 2;
        next.grading_exponent = cur.grading_exponent;
        next.grading_center = cur.grading_center;
        next.nodes = cur.nodes;
        next.boundary = cur.boundary;
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int u, int v) {
            auto key = std::minmax(u, v);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Point p{0.5 * (cur.nodes[u][0] + cur.nodes[v][0]),
                    0.5 * (cur.nodes[u][1] + cur.nodes[v][1])};
            int id = static_cast<int>(next.nodes.size());
            next.nodes.push_back(p);
            next.boundary.push_back(cur.boundary[u] && cur.boundary[v]);
            midpoint.emplace(key, id);
            return id;
        };
        for (const Cell& c : cur.cells) {
            int a = c.v[0], b = c.v[1], d = c.v[2];
            int ab = mid(a, b), bd = mid(b, d), ad = mid(a, d);
            next.cells.push_back({{a, ab, ad}});
            next.cells.push_back({{ab, b, bd}});
            next.cells.push_back({{ad, bd, d}});
            next.cells.push_back({{ab, bd, ad}});
        }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Quadrature

// Eigenvalues of a symmetric tridiagonal matrix plus the first component of
// each normalized eigenvector (implicit QL with Wilkinson shifts).
static void tridiag_eigen(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 1e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tridiag_eigen: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? r : -r));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    // sort ascending, carrying z along
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        std::swap(d[i], d[k]);
        std::swap(z[i], z[k]);
    }
}

QuadratureRule QuadratureRule::gauss(int g) {
    if (g < 1 || g > 20) throw std::invalid_argument("QuadratureRule: 1 <= g <= 20");
    QuadratureRule rule;
    rule.gauss_points = g;

    // Gauss-Legendre on [-1,1]: zero diagonal, e_k = k/sqrt(4k^2-1)
    {
        std::vector<double> d(g, 0.0), e(g, 0.0), z(g, 0.0);
        for (int k = 1; k < g; ++k) e[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
        z[0] = 1.0;
        tridiag_eigen(d, e, z);
        for (int i = 0; i < g; ++i) {
            rule.pts1d.push_back(0.5 * (d[i] + 1.0));
            rule.wts1d.push_back(2.0 * z[i] * z[i] * 0.5);
        }
    }
    // Gauss-Jacobi with weight (1+x) on [-1,1], mapped to weight t on [0,1]
    {
        std::vector<double> d(g, 0.0), e(g, 0.0), z(g, 0.0);
        for (int k = 0; k < g; ++k) d[k] = 1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
        for (int k = 1; k < g; ++k) e[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
        z[0] = 1.0;
        tridiag_eigen(d, e, z);
        for (int i = 0; i < g; ++i) {
            rule.jac_pts.push_back(0.5 * (d[i] + 1.0));
            rule.jac_wts.push_back(2.0 * z[i] * z[i] * 0.25);
        }
    }
    return rule;
}

// ---------------------------------------------------------------------------
// integrate

namespace {

struct Seg {
    double a, b;
};

// Geometric panels of [a,b] accumulating toward the end `toward`.
void push_graded_segments(double a, double b, double toward, int levels, std::vector<Seg>& out) {
    double h = b - a;
    if (toward <= a) {
        for (int j = 0; j < levels; ++j)
            out.push_back({a + h * std::ldexp(1.0, -(j + 1)), a + h * std::ldexp(1.0, -j)});
        out.push_back({a, a + h * std::ldexp(1.0, -levels)});
    } else {
        for (int j = 0; j < levels; ++j)
            out.push_back({b - h * std::ldexp(1.0, -j), b - h * std::ldexp(1.0, -(j + 1))});
        out.push_back({b - h * std::ldexp(1.0, -levels), b});
    }
}

void emit_segment(double a, double b, const QuadratureRule& rule, std::vector<WeightedPoint>& out) {
    for (int i = 0; i < rule.gauss_points; ++i)
        out.push_back({{a + rule.pts1d[i] * (b - a), 0.0}, rule.wts1d[i] * (b - a)});
}

void emit_triangle(const Point& p0, const Point& p1, const Point& p2, const QuadratureRule& rule,
                   std::vector<WeightedPoint>& out) {
    double jx1 = p1[0] - p0[0], jy1 = p1[1] - p0[1];
    double jx2 = p2[0] - p0[0], jy2 = p2[1] - p0[1];
    double detj = std::abs(jx1 * jy2 - jx2 * jy1);
    const int g = rule.gauss_points;
    for (int i = 0; i < g; ++i) {
        double u = rule.jac_pts[i];
        for (int j = 0; j < g; ++j) {
            double v = rule.pts1d[j];
            double xr = u * (1.0 - v), yr = u * v;
            out.push_back({{p0[0] + xr * jx1 + yr * jx2, p0[1] + xr * jy1 + yr * jy2},
                           rule.jac_wts[i] * rule.wts1d[j] * detj});
        }
    }
}

} // namespace

std::vector<WeightedPoint> cell_quadrature(const Mesh& mesh, int cell, const QuadratureRule& rule,
                                           const std::vector<Point>& singular_points) {
    std::vector<Point> sing = singular_points;
    if (mesh.grading_exponent > 1.0) sing.push_back(mesh.grading_center);
    const Cell& cl = mesh.cells[cell];
    const int L = rule.singular_split_levels;
    std::vector<WeightedPoint> out;

    if (mesh.dimension == 1) {
        double xa = mesh.nodes[cl.v[0]][0];
        double xb = mesh.nodes[cl.v[1]][0];
        double tol = 1e-12 * (std::abs(xa) + std::abs(xb) + (xb - xa));
        for (const Point& s : sing) {
            double sx = s[0];
            if (sx < xa - tol || sx > xb + tol) continue;
            std::vector<Seg> segs;
            if (sx <= xa + tol) {
                push_graded_segments(xa, xb, xa, L, segs);
            } else if (sx >= xb - tol) {
                push_graded_segments(xa, xb, xb, L, segs);
            } else {
                push_graded_segments(xa, sx, sx, L, segs);
                push_graded_segments(sx, xb, sx, L, segs);
            }
            for (const Seg& sg : segs) emit_segment(sg.a, sg.b, rule, out);
            return out;
        }
        emit_segment(xa, xb, rule, out);
        return out;
    }

    const Point& p0 = mesh.nodes[cl.v[0]];
    const Point& p1 = mesh.nodes[cl.v[1]];
    const Point& p2 = mesh.nodes[cl.v[2]];
    double diam = mesh.cell_diameter(cell);
    int apex = -1;
    for (const Point& s : sing) {
        for (int k = 0; k < 3; ++k) {
            const Point& pv = mesh.nodes[cl.v[k]];
            if (std::hypot(pv[0] - s[0], pv[1] - s[1]) <= 1e-12 * (diam + 1.0)) {
                apex = k;
                break;
            }
        }
        if (apex >= 0) break;
    }
    if (apex < 0) {
        emit_triangle(p0, p1, p2, rule, out);
        return out;
    }
    Point pp[3] = {p0, p1, p2};
    std::swap(pp[0], pp[apex]);
    const Point P = pp[0], A = pp[1], B = pp[2];
    auto lerp = [&](const Point& q, double lam) {
        return Point{P[0] + lam * (q[0] - P[0]), P[1] + lam * (q[1] - P[1])};
    };
    for (int j = 0; j < L; ++j) {
        double lo = std::ldexp(1.0, -(j + 1)), hi = std::ldexp(1.0, -j);
        Point Ai = lerp(A, lo), Ao = lerp(A, hi), Bo = lerp(B, hi), Bi = lerp(B, lo);
        emit_triangle(Ai, Ao, Bo, rule, out);
        emit_triangle(Ai, Bo, Bi, rule, out);
    }
    double eps = std::ldexp(1.0, -L);
    emit_triangle(P, lerp(A, eps), lerp(B, eps), rule, out);
    return out;
}

double integrate(const std::function<double(const Point&)>& field, const Mesh& mesh,
                 const QuadratureRule& rule, const std::vector<Point>& singular_points) {
    std::vector<double> per_cell(mesh.cells.size(), 0.0);
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        double acc = 0.0;
        for (const WeightedPoint& qp :
             cell_quadrature(mesh, static_cast<int>(c), rule, singular_points)) {
            double v = field(qp.x);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "integrate: non-finite field value at (" << qp.x[0] << "," << qp.x[1]
                    << ") in cell " << c;
                throw SingularEvaluationError(msg.str());
            }
            acc += qp.w * v;
        }
        per_cell[c] = acc;
    }
    return pairwise_sum(per_cell);
}

// ---------------------------------------------------------------------------
// radial reduction

double sphere_surface(int d) {
    if (d < 1) throw std::invalid_argument("sphere_surface: d >= 1 required");
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

RadialIntegral integrate_radial(const std::function<double(double)>& profile, int d, double R,
                                const QuadratureRule& rule, int cells_hint) {
    if (d < 1) throw std::invalid_argument("integrate_radial: d >= 1 required");
    if (!(R > 0)) throw std::invalid_argument("integrate_radial: R > 0 required");
    auto integrand = [&](const Point& p) {
        double r = p[0];
        return profile(r) * std::pow(r, d - 1);
    };
    auto level_value = [&](int n, bool& finite) {
        Mesh m = build_interval_mesh(0.0, R, n, 3.0, 0.0, true);
        try {
            finite = true;
            return integrate(integrand, m, rule);
        } catch (const SingularEvaluationError&) {
            finite = false;
            return 0.0;
        }
    };
    RadialIntegral out;
    bool f1 = false, f2 = false, f3 = false;
    double v1 = level_value(cells_hint, f1);
    double v2 = level_value(2 * cells_hint, f2);
    double v3 = level_value(4 * cells_hint, f3);
    double surf = sphere_surface(d);
    if (!f1 || !f2 || !f3 || !std::isfinite(v1) || !std::isfinite(v2) || !std::isfinite(v3)) {
        out.diverged = true;
        out.value = surf * (f3 ? v3 : (f2 ? v2 : v1));
        return out;
    }
    if (std::abs(v2) > 1.1 * std::abs(v1) && std::abs(v3) > 1.1 * std::abs(v2)) out.diverged = true;
    out.value = surf * v3;
    return out;
}

} // namespace degenera
