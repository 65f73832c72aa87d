#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degenera/geometry.hpp"
#include "degenera/multi_index.hpp"

namespace degenera {

/// Map s on multi-indices assigning the weight exponents s(alpha)+1.
/// Valid maps satisfy s(alpha) <= |alpha| and s(alpha-beta)+s(beta) <= s(alpha).
struct ShapeMap {
    enum class Kind { abs, table };
    Kind kind = Kind::abs;
    int dimension = 1;
    int max_order = 0;
    std::map<MultiIndex, double> table;

    double operator()(const MultiIndex& a) const;

    static ShapeMap absolute(int d, int m);
    static ShapeMap from_table(int d, int m, std::map<MultiIndex, double> t);
};

/// Declared (not discovered) zero set of a weight function.
struct ZeroSet {
    enum class Kind { none, origin, points };
    Kind kind = Kind::none;
    std::vector<std::vector<double>> points; // explicit list, d-dimensional

    std::vector<std::vector<double>> as_points(int d) const;
};

/// Weight function v with analytic partial derivatives up to derivative_order.
struct WeightFunction {
    enum class Kind { radial_power, one, affine_trig, grid_sampled };
    Kind kind = Kind::one;
    int dimension = 1;
    int derivative_order = 0;
    double exponent = 0.0;               // radial_power: v = |x|^exponent
    double trig_a = 0, trig_b = 0, trig_c = 0; // affine_trig: v = a + b sin(c x)
    std::vector<double> grid_x, grid_v;  // grid_sampled (1D piecewise linear)
    ZeroSet zero_set;

    double value(std::span<const double> x) const;
    double derivative(const MultiIndex& a, std::span<const double> x) const;

    double value(const Point& p) const { return value(std::span<const double>(p.data(), dimension)); }
    double derivative(const MultiIndex& a, const Point& p) const {
        return derivative(a, std::span<const double>(p.data(), dimension));
    }

    /// sup of |grad v| stays finite on bounded sets (the C_b^1 side condition).
    bool gradient_bounded() const;

    std::string kind_name() const;

    static WeightFunction radial_power(double beta, int d, int m);
    static WeightFunction one(int d);
    static WeightFunction affine_trig(double a, double b, double c, int m);
    static WeightFunction grid_sampled(std::vector<double> x, std::vector<double> v);
};

/// Family V = {w_alpha}: by default w_alpha = |v|^{s(alpha)+1}; individual
/// entries may be overridden by independent weight functions.
struct WeightFamily {
    WeightFunction base_v;
    ShapeMap shape;
    double p = 2.0;
    std::map<MultiIndex, WeightFunction> custom;

    double weight_value(const MultiIndex& a, std::span<const double> x) const;
    double weight_value(const MultiIndex& a, const Point& pt) const {
        return weight_value(a, std::span<const double>(pt.data(), base_v.dimension));
    }
    bool is_standard() const { return custom.empty(); }

    static WeightFamily standard(WeightFunction v, ShapeMap s, double p);
};

struct Witness {
    bool populated = false;
    std::vector<double> location;
    MultiIndex alpha, beta;
    double lhs = 0, rhs = 0;
    std::string condition;
};

struct HypothesisReport {
    std::string kind;
    bool holds = false;
    Witness witness;
    double constant = 0.0; // C_K, C, delta, sigma, or the (7.2) window value
    std::vector<int> skipped_n; // annulus checks with no sample points
};

enum class HypothesisKind { domination_42, annulus_54, floor_29, gradient_71, window_72 };

struct HypothesisParams {
    Domain domain = Domain::interval(0.0, 1.0);
    std::optional<std::pair<double, double>> compact_interval; // K for 1D domains
    std::optional<double> compact_radius;                      // K for disk domains
    bool K_empty = false;
    std::vector<int> n_list;
    std::optional<ShapeMap> shape;
    std::optional<WeightFamily> family; // domination_42
    double sigma = 0.0;                 // gradient_71 candidate (<=0: just report minimal)
    double p = 2.0;
    int d = 1;
    bool oned_window = false; // window uses denominator p-1 instead of d-p
};

struct SamplePlan {
    int points_per_dim = 10000;
    int annulus_points = 1000;
    int radii = 400;
};

/// d-dimensional sample points avoiding a relative 1e-8 neighborhood of the
/// declared zeros of v.
struct SampleGrid {
    int dimension = 1;
    std::vector<std::vector<double>> points;
};

SampleGrid make_sample_grid(const Domain& dom, const WeightFunction& v, int points_per_dim);
/// Rays through the origin in R^d (axes, diagonals) times a geometric radius
/// ladder; used for radial hypothesis checks above mesh dimension.
SampleGrid make_radial_grid(int d, double r_lo, double r_hi, int radii,
                            const WeightFunction& v);

HypothesisReport validate_shape_map(const ShapeMap& s, int m);

/// Smallest sigma with |grad v|_p <= sigma |v| / |x| on the grid, times a 1.01
/// safety factor; exact closed form for radial powers and constants.
double minimal_sigma(const WeightFunction& v, double p, const Domain& dom,
                     const SampleGrid& grid);

HypothesisReport hypothesis_check(HypothesisKind kind, const WeightFunction& v,
                                  const HypothesisParams& params, const SamplePlan& plan);

const char* hypothesis_kind_name(HypothesisKind kind);

} // namespace degenera
