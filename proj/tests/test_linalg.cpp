#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degenera/linalg.hpp"
#include "degenera/rng.hpp"

using namespace degenera;

namespace {

// 1D Laplacian stiffness (Dirichlet), h = 1/(n+1)
CsrMatrix laplacian(int n) {
    std::vector<Triplet> t;
    double h = 1.0 / (n + 1);
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0 / h});
        if (i > 0) t.push_back({i, i - 1, -1.0 / h});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0 / h});
    }
    return CsrMatrix::from_triplets(n, std::move(t));
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("csr assembly sums duplicates and keeps entries addressable") {
    std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}, {0, 0, 0.5}};
    CsrMatrix m = CsrMatrix::from_triplets(2, std::move(t));
    CHECK(m.entry(0, 0) == doctest::Approx(1.5));
    CHECK(m.entry(0, 1) == doctest::Approx(2.0));
    CHECK(m.entry(1, 0) == 0.0);
    CHECK(m.max_abs() == doctest::Approx(3.0));
    CHECK(m.max_asymmetry() == doctest::Approx(2.0));
    std::ostringstream os;
    m.write_coo(os);
    CHECK(os.str() == "0 0 1.5\n0 1 2\n1 1 3\n");
}

TEST_CASE("cg solves an SPD system to tolerance") {
    int n = 120;
    CsrMatrix A = laplacian(n);
    CounterRng rng(1);
    std::vector<double> x_true(n);
    for (double& v : x_true) v = rng.uniform(-1.0, 1.0);
    std::vector<double> b = A.multiply(x_true);
    IterResult r = cg_solve(A, b, 1e-12, 2000);
    REQUIRE(r.converged);
    CHECK(r.rel_residual <= 1e-12);
    for (int i = 0; i < n; i += 17) CHECK(r.x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));

    IterResult z = cg_solve(A, std::vector<double>(n, 0.0), 1e-12, 10);
    CHECK(z.converged);
    for (double v : z.x) CHECK(v == 0.0);
}

TEST_CASE("bicgstab solves an unsymmetric system") {
    int n = 80;
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 4.0});
        if (i > 0) t.push_back({i, i - 1, -1.3});
        if (i + 1 < n) t.push_back({i, i + 1, -0.7});
    }
    CsrMatrix A = CsrMatrix::from_triplets(n, std::move(t));
    CounterRng rng(2);
    std::vector<double> x_true(n);
    for (double& v : x_true) v = rng.uniform(-1.0, 1.0);
    std::vector<double> b = A.multiply(x_true);
    IterResult r = bicgstab_solve(A, b, 1e-12, 2000);
    REQUIRE(r.converged);
    for (int i = 0; i < n; i += 13) CHECK(r.x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));
}

TEST_CASE("dense solver: cholesky path and LU fallback agree with iterative") {
    int n = 60;
    CsrMatrix A = laplacian(n);
    CounterRng rng(3);
    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);

    DenseSolver chol(A, true);
    std::vector<double> x1 = chol.solve(b);
    DenseSolver lu(A, false);
    std::vector<double> x2 = lu.solve(b);
    IterResult it = cg_solve(A, b, 1e-13, 4000);
    REQUIRE(it.converged);
    for (int i = 0; i < n; i += 7) {
        CHECK(x1[i] == doctest::Approx(it.x[i]).epsilon(1e-9));
        CHECK(x2[i] == doctest::Approx(it.x[i]).epsilon(1e-9));
    }
}

TEST_CASE("dense solver copes with badly scaled SPD systems") {
    // graded diagonal scaling mimics the degenerate-weight systems
    int n = 40;
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        double s = std::pow(10.0, -double(i) / 4.0);
        t.push_back({i, i, 2.0 * s});
        if (i > 0) t.push_back({i, i - 1, -0.9 * std::pow(10.0, -double(i - 0.5) / 4.0)});
        if (i + 1 < n) t.push_back({i, i + 1, -0.9 * std::pow(10.0, -double(i + 0.5) / 4.0)});
    }
    CsrMatrix A = CsrMatrix::from_triplets(n, std::move(t));
    std::vector<double> x_true(n, 1.0);
    std::vector<double> b = A.multiply(x_true);
    DenseSolver ds(A, true);
    std::vector<double> x = ds.solve(b);
    std::vector<double> r = A.multiply(x);
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (r[i] - b[i]) * (r[i] - b[i]);
        den += b[i] * b[i];
    }
    CHECK(std::sqrt(num / den) < 1e-12);
}

TEST_CASE("inverse power iteration finds the smallest generalized eigenvalue") {
    // S = 1D stiffness, Q = 1D lumped mass: lambda_min -> pi^2 as n grows
    int n = 199; // h = 1/200
    double h = 1.0 / (n + 1);
    CsrMatrix S = laplacian(n);
    std::vector<Triplet> tq;
    for (int i = 0; i < n; ++i) {
        tq.push_back({i, i, 4.0 * h / 6.0});
        if (i > 0) tq.push_back({i, i - 1, h / 6.0});
        if (i + 1 < n) tq.push_back({i, i + 1, h / 6.0});
    }
    CsrMatrix Q = CsrMatrix::from_triplets(n, std::move(tq));
    EigenResult er = smallest_generalized_eigen(S, Q, 1e-10, 500);
    REQUIRE(er.converged);
    CHECK(er.lambda == doctest::Approx(M_PI * M_PI).epsilon(1e-4));
}

} // TEST_SUITE
