#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "degenera/errors.hpp"

namespace degenera {

using Point = std::array<double, 2>;

inline double norm2(const Point& p) { return p[0] * p[0] + p[1] * p[1]; }

/// Deterministic pairwise reduction; consumes the scratch vector.
double pairwise_sum(std::vector<double>& v);

struct Domain {
    enum class Kind { interval, disk, square };
    Kind kind = Kind::interval;
    double a = 0.0, b = 1.0; // interval bounds / square side
    double radius = 1.0;     // disk

    int dimension() const { return kind == Kind::interval ? 1 : 2; }
    double diameter() const;
    double measure() const;

    static Domain interval(double a, double b);
    static Domain disk(double radius);
    static Domain square(double a, double b);
};

/// 1D cells are index pairs, 2D cells are positively oriented triangles.
struct Cell {
    std::array<int, 3> v{-1, -1, -1};
};

struct Mesh {
    int dimension = 1;
    std::vector<Point> nodes;
    std::vector<Cell> cells;
    std::vector<bool> boundary; // per node
    double grading_exponent = 1.0;
    Point grading_center{0.0, 0.0};

    double cell_measure(int c) const;
    double total_measure() const;
    Point cell_center(int c) const;
    double cell_diameter(int c) const;
    void dump(std::ostream& os) const;
};

/// Nodes accumulate toward `center` like (i/N)^q; q = 1 is uniform.
Mesh build_interval_mesh(double a, double b, int cells, double grading_exponent = 1.0,
                         double center = 0.0, bool center_given = false);

/// Polar-structured mesh: triangle fan at the origin, split quads elsewhere,
/// ring radii R*(k/rings)^q.  Boundary nodes are the outermost ring.
Mesh build_disk_mesh(double radius, int rings, int sectors, double grading_exponent = 1.0);

/// Split every cell into `factor` (1D) or factor^2 (2D, power of two) children.
Mesh refine_uniform(const Mesh& mesh, int factor);

struct QuadratureRule {
    int gauss_points = 5;           // exact for polynomials of degree <= 2g-1
    int singular_split_levels = 16; // geometric panels toward a declared singular point

    std::vector<double> pts1d, wts1d;    // Gauss-Legendre on [0,1]
    std::vector<double> jac_pts, jac_wts; // Gauss-Jacobi, weight t on [0,1]

    static QuadratureRule gauss(int g);
};

struct WeightedPoint {
    Point x;
    double w;
};

/// Quadrature points of one cell.  Cells whose closure touches a singular
/// point are subdivided geometrically toward it.
std::vector<WeightedPoint> cell_quadrature(const Mesh& mesh, int cell, const QuadratureRule& rule,
                                           const std::vector<Point>& singular_points);

/// Composite quadrature with cell-index-ascending pairwise reduction.  The
/// mesh grading center is treated as singular whenever q > 1.
double integrate(const std::function<double(const Point&)>& field, const Mesh& mesh,
                 const QuadratureRule& rule, const std::vector<Point>& singular_points = {});

struct RadialIntegral {
    double value = 0.0;
    bool diverged = false;
};

double sphere_surface(int d); // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)

/// surface(S^{d-1}) * int_0^R g(r) r^{d-1} dr on a graded radial mesh, with a
/// three-level refinement probe that flags non-integrable endpoints.
RadialIntegral integrate_radial(const std::function<double(double)>& profile, int d, double R,
                                const QuadratureRule& rule, int cells_hint = 64);

} // namespace degenera
