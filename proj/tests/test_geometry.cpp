#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degenera/geometry.hpp"

using namespace degenera;

namespace {

double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("gauss rule integrates polynomials of degree 2g-1 exactly") {
    for (int g : {1, 2, 3, 5, 8}) {
        QuadratureRule rule = QuadratureRule::gauss(g);
        for (int i = 0; i < g; ++i) {
            CHECK(rule.wts1d[i] > 0.0);
            CHECK(rule.jac_wts[i] > 0.0);
        }
        for (int k = 0; k <= 2 * g - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < g; ++i) s += rule.wts1d[i] * std::pow(rule.pts1d[i], k);
            CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-12));
        }
        // Jacobi rule absorbs the weight t: sum w f(t) ~ int_0^1 t f(t) dt
        for (int k = 0; k <= 2 * g - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < g; ++i) s += rule.jac_wts[i] * std::pow(rule.jac_pts[i], k);
            CHECK(s == doctest::Approx(1.0 / (k + 2)).epsilon(1e-12));
        }
    }
}

TEST_CASE("reference-triangle rule moments") {
    QuadratureRule rule = QuadratureRule::gauss(5);
    Mesh tri;
    tri.dimension = 2;
    tri.nodes = {{0, 0}, {1, 0}, {0, 1}};
    tri.boundary = {true, true, true};
    tri.cells.push_back({{0, 1, 2}});
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b) {
            double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
            double got = integrate(
                [&](const Point& p) { return std::pow(p[0], a) * std::pow(p[1], b); }, tri, rule);
            CHECK(got == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("interval mesh: uniform nodes") {
    Mesh m = build_interval_mesh(0.0, 1.0, 4);
    REQUIRE(m.nodes.size() == 5);
    for (int i = 0; i <= 4; ++i) CHECK(m.nodes[i][0] == doctest::Approx(0.25 * i));
    CHECK(m.total_measure() == doctest::Approx(1.0));
}

TEST_CASE("interval mesh: graded toward center") {
    Mesh m = build_interval_mesh(-1.0, 1.0, 8, 2.0, 0.0, true);
    REQUIRE(m.nodes.size() == 9);
    // symmetric, smallest cells adjacent to 0
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        CHECK(m.nodes[i][0] == doctest::Approx(-m.nodes[m.nodes.size() - 1 - i][0]));
    double prev = 1e9;
    for (int c = 0; c < 4; ++c) { // left half: cells shrink toward 0
        double w = m.cell_measure(c);
        CHECK(w < prev);
        prev = w;
    }
    CHECK(m.cell_measure(3) < m.cell_measure(0));
    CHECK_THROWS_AS(build_interval_mesh(0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_interval_mesh(0, 1, 4, 2.0, 3.0, true), std::invalid_argument);
}

TEST_CASE("disk mesh: cell counts and polygon area") {
    Mesh m = build_disk_mesh(1.0, 2, 4);
    CHECK(m.cells.size() == 12); // 4 fan + 8 ring
    // inscribed polygon area (S/2) R^2 sin(2 pi / S) = 2 for S = 4
    CHECK(m.total_measure() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(build_disk_mesh(1.0, 2, 2), std::invalid_argument);

    double prev = 0.0;
    for (int s : {8, 16, 32, 64}) {
        double area = build_disk_mesh(1.0, 2, s).total_measure();
        CHECK(area > prev);
        prev = area;
    }
    double a256 = build_disk_mesh(1.0, 4, 256).total_measure();
    CHECK(std::abs(a256 - M_PI) < 1e-3);
}

TEST_CASE("disk mesh: positive orientation and boundary markers") {
    Mesh m = build_disk_mesh(1.0, 3, 7, 2.0);
    for (std::size_t c = 0; c < m.cells.size(); ++c) CHECK(m.cell_measure(c) > 0.0);
    int nb = 0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        if (m.boundary[i]) {
            ++nb;
            CHECK(std::hypot(m.nodes[i][0], m.nodes[i][1]) == doctest::Approx(1.0));
        }
    CHECK(nb == 7);
}

TEST_CASE("integrate: polynomial exactness and smooth convergence") {
    QuadratureRule rule = QuadratureRule::gauss(5);
    Mesh m = build_interval_mesh(0.0, 1.0, 3);
    double got = integrate([](const Point& p) { return p[0] * p[0]; }, m, rule);
    CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // order-2g convergence for smooth integrands (g = 2 keeps errors visible)
    QuadratureRule g2 = QuadratureRule::gauss(2);
    auto f = [](const Point& p) { return std::cos(3.0 * p[0]); };
    double exact = std::sin(3.0) / 3.0;
    double e1 = std::abs(integrate(f, build_interval_mesh(0, 1, 2), g2) - exact);
    double e2 = std::abs(integrate(f, build_interval_mesh(0, 1, 4), g2) - exact);
    double e3 = std::abs(integrate(f, build_interval_mesh(0, 1, 8), g2) - exact);
    CHECK(e1 / e2 > 8.0);  // ~2^4
    CHECK(e2 / e3 > 8.0);
}

TEST_CASE("integrate: graded mesh handles x^{-1/2}") {
    QuadratureRule rule = QuadratureRule::gauss(5);
    Mesh m = build_interval_mesh(0.0, 1.0, 64, 3.0, 0.0, true);
    double got = integrate([](const Point& p) { return 1.0 / std::sqrt(p[0]); }, m, rule);
    CHECK(std::abs(got - 2.0) < 1e-4);
}

TEST_CASE("integrate: non-finite value raises a singular-evaluation error") {
    QuadratureRule rule = QuadratureRule::gauss(3);
    Mesh m = build_interval_mesh(0.0, 1.0, 4);
    CHECK_THROWS_AS(integrate([](const Point&) { return std::nan(""); }, m, rule),
                    SingularEvaluationError);
}

TEST_CASE("integrate_radial: closed forms and divergence flag") {
    QuadratureRule rule = QuadratureRule::gauss(5);
    RadialIntegral ball = integrate_radial([](double) { return 1.0; }, 3, 1.0, rule);
    CHECK_FALSE(ball.diverged);
    CHECK(ball.value == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));

    RadialIntegral inv = integrate_radial([](double r) { return 1.0 / r; }, 3, 1.0, rule);
    CHECK_FALSE(inv.diverged);
    CHECK(inv.value == doctest::Approx(2.0 * M_PI).epsilon(1e-10));

    RadialIntegral div = integrate_radial(
        [](double r) { return std::pow(r, -2.5); }, 2, 1.0, rule);
    CHECK(div.diverged);

    RadialIntegral conv = integrate_radial(
        [](double r) { return std::pow(r, -0.5); }, 1, 1.0, rule);
    CHECK_FALSE(conv.diverged);
    CHECK(conv.value == doctest::Approx(4.0).epsilon(1e-5)); // |S^0| = 2 times int = 2
}

TEST_CASE("integrate_radial matches the 2D disk quadrature") {
    QuadratureRule rule = QuadratureRule::gauss(5);
    Mesh disk = build_disk_mesh(1.0, 32, 128);
    double over_disk = integrate([](const Point& p) { return p[0] * p[0] + p[1] * p[1]; }, disk,
                                 rule);
    RadialIntegral radial = integrate_radial([](double r) { return r * r; }, 2, 1.0, rule);
    double polygon_deficit = 1.0 - disk.total_measure() / M_PI;
    CHECK(std::abs(over_disk - radial.value) / radial.value < 3.0 * polygon_deficit + 1e-6);
}

TEST_CASE("mesh dump lists nodes and cells") {
    Mesh m = build_interval_mesh(0.0, 1.0, 2);
    std::ostringstream os;
    m.dump(os);
    std::string s = os.str();
    CHECK(s.find("node 0 0 ") != std::string::npos);
    CHECK(s.find("cell 1 1 2") != std::string::npos);
}

TEST_CASE("refine_uniform splits cells and preserves measure") {
    Mesh m = build_interval_mesh(0.0, 1.0, 5, 3.0, 0.0, true);
    Mesh r = refine_uniform(m, 4);
    CHECK(r.cells.size() == 20);
    CHECK(r.total_measure() == doctest::Approx(1.0).epsilon(1e-12));

    Mesh d = build_disk_mesh(1.0, 2, 6);
    Mesh rd = refine_uniform(d, 2);
    CHECK(rd.cells.size() == 4 * d.cells.size());
    CHECK(rd.total_measure() == doctest::Approx(d.total_measure()).epsilon(1e-12));
}

} // TEST_SUITE
