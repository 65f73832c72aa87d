#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "degenera/cutoff.hpp"
#include "degenera/rng.hpp"

using namespace degenera;

namespace {

double chi0(const CutoffFamily& fam, double x) {
    std::vector<double> p{x};
    return chi_eval(fam, std::span<const double>(p.data(), 1), MultiIndex::zero(1));
}

// nested central differences of chi_n itself (independent of the chain rule)
double fd_chi(const CutoffFamily& fam, double x, int order, double h) {
    if (order == 0) return chi0(fam, x);
    return (fd_chi(fam, x + h, order - 1, h) - fd_chi(fam, x - h, order - 1, h)) / (2.0 * h);
}

} // namespace

TEST_SUITE("cutoff") {

TEST_CASE("transition profile: support, range, midpoint symmetry") {
    TransitionProfile eta = build_transition(4);
    CHECK(eta.eta(0.3) == 0.0);
    CHECK(eta.eta(0.0) == 0.0);
    CHECK(eta.eta(1.5) == 1.0);
    CHECK(eta.eta(-2.0) == 1.0);
    double mid = eta.eta(0.75);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    CHECK(mid == doctest::Approx(0.5)); // G(1/2) = 1/2
    // G(u) + G(1-u) = 1 translates to eta(t) + eta(3/2 - t) = 1 on (1/2, 1)
    for (double t : {0.6, 0.7, 0.85, 0.97})
        CHECK(eta.eta(t) + eta.eta(1.5 - t) == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {-0.9, -0.3, 0.2, 0.66, 1.2})
        CHECK((eta.eta(t) >= 0.0 && eta.eta(t) <= 1.0));
}

TEST_CASE("transition profile: derivatives match finite differences") {
    TransitionProfile eta = build_transition(4);
    CounterRng rng(3);
    for (int i = 0; i < 20; ++i) {
        double t = rng.uniform(0.55, 0.95);
        double fd1 = (eta.eta(t + 1e-6) - eta.eta(t - 1e-6)) / 2e-6;
        CHECK(eta.eta_derivative(1, t) == doctest::Approx(fd1).epsilon(1e-6));
        double fd2 = (eta.eta(t + 1e-4) - 2.0 * eta.eta(t) + eta.eta(t - 1e-4)) / 1e-8;
        CHECK(eta.eta_derivative(2, t) == doctest::Approx(fd2).epsilon(1e-5));
    }
    // eta is even, so its first derivative is odd
    CHECK(eta.eta_derivative(1, -0.75) == doctest::Approx(-eta.eta_derivative(1, 0.75)));
    CHECK(eta.derivative_sup[0] == doctest::Approx(1.0));
    CHECK(eta.derivative_sup[1] > 2.0);
    CHECK(eta.derivative_sup[2] > eta.derivative_sup[1]);
}

TEST_CASE("multiset partitions: counts") {
    CHECK(multiindex_partitions(MultiIndex({1, 1})).size() == 2);
    CHECK(multiindex_partitions(MultiIndex({2, 0})).size() == 2);
    CHECK(multiindex_partitions(MultiIndex({1, 1, 1})).size() == 5); // Bell number B_3
    CHECK(multiindex_partitions(MultiIndex({3})).size() == 3);       // integer partitions of 3
    CHECK(multiindex_partitions(MultiIndex({4})).size() == 5);       // integer partitions of 4
    CHECK(multiindex_partitions(MultiIndex({2, 1})).size() == 4);
    CHECK_THROWS_AS(multiindex_partitions(MultiIndex({0, 0})), std::invalid_argument);
}

TEST_CASE("partitions decompose the index multiset exactly") {
    MultiIndex beta({2, 1});
    for (const auto& part : multiindex_partitions(beta)) {
        std::vector<int> merged;
        for (const auto& b : part.blocks) merged.insert(merged.end(), b.begin(), b.end());
        std::sort(merged.begin(), merged.end());
        CHECK(merged == std::vector<int>{0, 0, 1});
    }
}

TEST_CASE("chain rule special case d=1, alpha=2: partition structure") {
    auto parts = multiindex_partitions(MultiIndex({2}));
    // exactly one single-block partition {0,0} and one two-block {0},{0}
    REQUIRE(parts.size() == 2);
    int one_block = 0, two_block = 0;
    for (const auto& p : parts) {
        if (p.blocks.size() == 1) {
            ++one_block;
            CHECK(p.blocks[0] == std::vector<int>{0, 0});
        }
        if (p.blocks.size() == 2) {
            ++two_block;
            CHECK(p.blocks[0] == std::vector<int>{0});
            CHECK(p.blocks[1] == std::vector<int>{0});
        }
    }
    CHECK(one_block == 1);
    CHECK(two_block == 1);
}

TEST_CASE("chi_eval: plateau values for v = x, n = 2") {
    CutoffFamily fam;
    fam.profile = build_transition(2);
    fam.v = WeightFunction::radial_power(1.0, 1, 2);
    fam.n = 2;
    CHECK(chi0(fam, 0.6) == 1.0); // |v| > 1/n
    CHECK(chi0(fam, 0.2) == 0.0); // |v| <= 1/(2n)
    CHECK(chi0(fam, -0.6) == 1.0);
    double mid = chi0(fam, 0.35);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
}

TEST_CASE("chi_eval: first derivative matches a finite-difference oracle") {
    CutoffFamily fam;
    fam.profile = build_transition(2);
    fam.v = WeightFunction::radial_power(1.0, 1, 2);
    fam.n = 2;
    std::vector<double> p{0.35};
    double got = chi_eval(fam, std::span<const double>(p.data(), 1), MultiIndex({1}));
    double fd = fd_chi(fam, 0.35, 1, 1e-5);
    CHECK(got == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("chi_eval: exact zeros off the transition annulus, all orders") {
    CutoffFamily fam;
    fam.profile = build_transition(3);
    fam.v = WeightFunction::radial_power(2.0, 1, 3);
    fam.n = 4;
    // |v| = x^2: transition where 1/8 < x^2 < 1/4, i.e. 0.3536 < |x| < 0.5
    for (double x : {0.1, 0.25, 0.34}) { // inside M_{2n}
        std::vector<double> p{x};
        std::span<const double> xs(p.data(), 1);
        CHECK(chi_eval(fam, xs, MultiIndex::zero(1)) == 0.0);
        CHECK(chi_eval(fam, xs, MultiIndex({1})) == 0.0);
        CHECK(chi_eval(fam, xs, MultiIndex({2})) == 0.0);
    }
    for (double x : {0.51, 0.7, 0.95}) { // in M_n^c
        std::vector<double> p{x};
        std::span<const double> xs(p.data(), 1);
        CHECK(chi_eval(fam, xs, MultiIndex::zero(1)) == 1.0);
        CHECK(chi_eval(fam, xs, MultiIndex({1})) == 0.0);
        CHECK(chi_eval(fam, xs, MultiIndex({2})) == 0.0);
    }
    std::vector<double> q{0.4};
    CHECK_THROWS_AS(chi_eval(fam, std::span<const double>(q.data(), 1), MultiIndex({4})),
                    std::invalid_argument);
}

TEST_CASE("chi_eval: Faa di Bruno vs nested finite differences, orders <= 2") {
    CounterRng rng(11);
    for (int which = 0; which < 2; ++which) {
        CutoffFamily fam;
        fam.profile = build_transition(3);
        fam.v = which == 0 ? WeightFunction::radial_power(1.0, 1, 3)
                           : WeightFunction::radial_power(2.0, 1, 3);
        fam.n = 3;
        double lo = which == 0 ? 1.0 / 6.0 : std::sqrt(1.0 / 6.0);
        double hi = which == 0 ? 1.0 / 3.0 : std::sqrt(1.0 / 3.0);
        // natural scales of the derivatives; the comparison is relative to them
        double scale1 = fam.n * fam.profile.derivative_sup[1];
        double scale2 = fam.n * fam.n * fam.profile.derivative_sup[2] * 4.0;
        for (int i = 0; i < 50; ++i) {
            double x = rng.uniform(lo * 1.02, hi * 0.98) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            std::vector<double> p{x};
            std::span<const double> xs(p.data(), 1);
            double d1 = chi_eval(fam, xs, MultiIndex({1}));
            double fd1 = fd_chi(fam, x, 1, 1e-6);
            CHECK(std::abs(d1 - fd1) <= 1e-5 * (std::abs(fd1) + scale1));
            double d2 = chi_eval(fam, xs, MultiIndex({2}));
            double fd2 = fd_chi(fam, x, 2, 3e-5);
            CHECK(std::abs(d2 - fd2) <= 1e-5 * (std::abs(fd2) + scale2));
        }
    }
}

TEST_CASE("chi_eval: 2D mixed derivative matches nested differences") {
    CutoffFamily fam;
    fam.profile = build_transition(3);
    fam.v = WeightFunction::radial_power(2.0, 2, 3);
    fam.n = 3;
    auto chi2d = [&](double x, double y) {
        std::vector<double> p{x, y};
        return chi_eval(fam, std::span<const double>(p.data(), 2), MultiIndex::zero(2));
    };
    // 1/6 < r^2 < 1/3 here
    double x = 0.38, y = 0.31;
    std::vector<double> p{x, y};
    double got = chi_eval(fam, std::span<const double>(p.data(), 2), MultiIndex({1, 1}));
    double h = 1e-5;
    double fd = (chi2d(x + h, y + h) - chi2d(x + h, y - h) - chi2d(x - h, y + h) +
                 chi2d(x - h, y - h)) /
                (4.0 * h * h);
    CHECK(got == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("chi_eval: closed-form second derivative in 1D") {
    // chi_n'' = eta''(n v) n^2 (v')^2 + eta'(n v) n v''
    CutoffFamily fam;
    fam.profile = build_transition(2);
    fam.v = WeightFunction::radial_power(2.0, 1, 2);
    fam.n = 5;
    int checked = 0;
    for (double x : {0.34, 0.36, 0.40, -0.35, -0.42}) {
        std::vector<double> p{x};
        std::span<const double> xs(p.data(), 1);
        double vv = fam.v.value(xs);
        if (!(std::abs(vv) > 0.1 && std::abs(vv) < 0.2)) continue;
        double v1 = fam.v.derivative(MultiIndex({1}), xs);
        double v2 = fam.v.derivative(MultiIndex({2}), xs);
        double n = fam.n;
        double closed = fam.profile.eta_derivative(2, n * vv) * n * n * v1 * v1 +
                        fam.profile.eta_derivative(1, n * vv) * n * v2;
        CHECK(chi_eval(fam, xs, MultiIndex({2})) == doctest::Approx(closed).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked >= 3);
}

TEST_CASE("chi range stays in [0,1] at sampled points") {
    CutoffFamily fam;
    fam.profile = build_transition(2);
    fam.v = WeightFunction::radial_power(1.0, 1, 2);
    CounterRng rng(5);
    for (int n : {2, 8, 32}) {
        fam.n = n;
        for (int i = 0; i < 200; ++i) {
            double val = chi0(fam, rng.uniform(-1.0, 1.0));
            CHECK(val >= 0.0);
            CHECK(val <= 1.0);
        }
    }
}

TEST_CASE("growth fit: v = x gives exponents |sigma| within the stated bands") {
    WeightFunction v = WeightFunction::radial_power(1.0, 1, 2);
    ShapeMap s = ShapeMap::absolute(1, 2);
    Domain dom = Domain::interval(-1.0, 1.0);
    std::vector<int> ns{4, 8, 16, 32, 64};

    GrowthFit f1 = chi_growth_fit(v, s, MultiIndex({1}), ns, dom);
    REQUIRE(f1.fitted);
    CHECK(std::abs(f1.fitted_exponent - 1.0) <= 0.1);

    GrowthFit f2 = chi_growth_fit(v, s, MultiIndex({2}), ns, dom);
    REQUIRE(f2.fitted);
    CHECK(std::abs(f2.fitted_exponent - 2.0) <= 0.15);

    // growth law: sup / n^{|sigma|} constant within 5 percent across the list
    for (std::size_t i = 0; i < f1.used_n.size(); ++i) {
        double c0 = f1.sup_values[0] / f1.used_n[0];
        double ci = f1.sup_values[i] / f1.used_n[i];
        CHECK(std::abs(ci - c0) / c0 < 0.05);
    }
    CHECK_THROWS_AS(chi_growth_fit(v, s, MultiIndex({1}), {4, 8}, dom), std::invalid_argument);
}

TEST_CASE("growth fit: v == 1 has empty annuli and no fit") {
    WeightFunction v = WeightFunction::one(1);
    ShapeMap s = ShapeMap::absolute(1, 1);
    GrowthFit f =
        chi_growth_fit(v, s, MultiIndex({1}), {4, 8, 16, 32}, Domain::interval(-1.0, 1.0));
    CHECK_FALSE(f.fitted);
    CHECK(f.skipped_n.size() == 4);
}

} // TEST_SUITE
