#include "degenera/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degenera {

// ---------------------------------------------------------------------------
// ShapeMap

double ShapeMap::operator()(const MultiIndex& a) const {
    if (kind == Kind::abs) return static_cast<double>(a.order());
    auto it = table.find(a);
    if (it == table.end())
        throw std::invalid_argument("ShapeMap: table has no entry for " + a.str());
    return it->second;
}

ShapeMap ShapeMap::absolute(int d, int m) {
    ShapeMap s;
    s.kind = Kind::abs;
    s.dimension = d;
    s.max_order = m;
    return s;
}

ShapeMap ShapeMap::from_table(int d, int m, std::map<MultiIndex, double> t) {
    ShapeMap s;
    s.kind = Kind::table;
    s.dimension = d;
    s.max_order = m;
    s.table = std::move(t);
    return s;
}

HypothesisReport validate_shape_map(const ShapeMap& s, int m) {
    if (m < 0) throw std::invalid_argument("validate_shape_map: m >= 0 required");
    HypothesisReport rep;
    rep.kind = "shape_map";
    const double tol = 1e-12;
    auto pim = enumerate_pi_m(s.dimension, m);
    // superadditivity scanned first so a constant map is reported against it
    for (const auto& a : pim) {
        double sa = s(a);
        for (const auto& b : enumerate_below(a)) {
            double lhs = s(a.minus(b)) + s(b);
            if (lhs > sa + tol) {
                rep.holds = false;
                rep.witness.populated = true;
                rep.witness.alpha = a;
                rep.witness.beta = b;
                rep.witness.lhs = lhs;
                rep.witness.rhs = sa;
                rep.witness.condition = "s(alpha-beta)+s(beta) <= s(alpha)";
                return rep;
            }
        }
    }
    for (const auto& a : pim) {
        double sa = s(a);
        if (sa < -tol || sa > a.order() + tol) {
            rep.holds = false;
            rep.witness.populated = true;
            rep.witness.alpha = a;
            rep.witness.beta = MultiIndex::zero(s.dimension);
            rep.witness.lhs = sa;
            rep.witness.rhs = static_cast<double>(a.order());
            rep.witness.condition = "0 <= s(alpha) <= |alpha|";
            return rep;
        }
    }
    rep.holds = true;
    return rep;
}

// ---------------------------------------------------------------------------
// WeightFunction

std::vector<std::vector<double>> ZeroSet::as_points(int d) const {
    switch (kind) {
    case Kind::none: return {};
    case Kind::origin: return {std::vector<double>(d, 0.0)};
    case Kind::points: return points;
    }
    return {};
}

WeightFunction WeightFunction::radial_power(double beta, int d, int m) {
    WeightFunction w;
    w.kind = Kind::radial_power;
    w.dimension = d;
    w.derivative_order = m;
    w.exponent = beta;
    w.zero_set.kind = beta > 0 ? ZeroSet::Kind::origin : ZeroSet::Kind::none;
    return w;
}

WeightFunction WeightFunction::one(int d) {
    WeightFunction w;
    w.kind = Kind::one;
    w.dimension = d;
    w.derivative_order = 8;
    return w;
}

WeightFunction WeightFunction::affine_trig(double a, double b, double c, int m) {
    WeightFunction w;
    w.kind = Kind::affine_trig;
    w.dimension = 1;
    w.derivative_order = m;
    w.trig_a = a;
    w.trig_b = b;
    w.trig_c = c;
    return w;
}

WeightFunction WeightFunction::grid_sampled(std::vector<double> x, std::vector<double> v) {
    if (x.size() < 2 || x.size() != v.size())
        throw std::invalid_argument("grid_sampled: need matching node/value lists");
    WeightFunction w;
    w.kind = Kind::grid_sampled;
    w.dimension = 1;
    w.derivative_order = 1;
    w.grid_x = std::move(x);
    w.grid_v = std::move(v);
    w.zero_set.kind = ZeroSet::Kind::points;
    for (std::size_t i = 0; i < w.grid_v.size(); ++i)
        if (w.grid_v[i] == 0.0) w.zero_set.points.push_back({w.grid_x[i]});
    return w;
}

std::string WeightFunction::kind_name() const {
    switch (kind) {
    case Kind::radial_power: return "radial_power";
    case Kind::one: return "one";
    case Kind::affine_trig: return "affine_trig";
    case Kind::grid_sampled: return "grid_sampled";
    }
    return "?";
}

namespace {

struct RadTerm {
    double coef;
    std::vector<int> mono; // polynomial part, per coordinate
    double rexp;           // power of r
};

double eval_radial_terms(const std::vector<RadTerm>& terms, std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    if (r2 == 0.0) throw SingularEvaluationError("radial_power: derivative at the origin");
    double r = std::sqrt(r2);
    double s = 0.0;
    for (const RadTerm& t : terms) {
        double m = t.coef;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (int k = 0; k < t.mono[i]; ++k) m *= x[i];
        s += m * std::pow(r, t.rexp);
    }
    return s;
}

double radial_power_derivative(double beta, const MultiIndex& a, std::span<const double> x) {
    const int d = static_cast<int>(x.size());
    std::vector<RadTerm> terms{{1.0, std::vector<int>(d, 0), beta}};
    for (int i = 0; i < d; ++i) {
        for (int rep = 0; rep < a[i]; ++rep) {
            std::vector<RadTerm> next;
            for (const RadTerm& t : terms) {
                if (t.mono[i] > 0) {
                    RadTerm u = t;
                    u.coef *= t.mono[i];
                    u.mono[i] -= 1;
                    next.push_back(u);
                }
                if (t.rexp != 0.0) {
                    RadTerm u = t;
                    u.coef *= t.rexp;
                    u.mono[i] += 1;
                    u.rexp -= 2.0;
                    next.push_back(u);
                }
            }
            terms = std::move(next);
        }
    }
    return eval_radial_terms(terms, x);
}

} // namespace

double WeightFunction::value(std::span<const double> x) const {
    switch (kind) {
    case Kind::one: return 1.0;
    case Kind::radial_power: {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        if (r2 == 0.0) {
            if (exponent > 0) return 0.0;
            if (exponent == 0) return 1.0;
            throw SingularEvaluationError("radial_power: negative exponent at the origin");
        }
        return std::pow(std::sqrt(r2), exponent);
    }
    case Kind::affine_trig: return trig_a + trig_b * std::sin(trig_c * x[0]);
    case Kind::grid_sampled: {
        double xx = x[0];
        auto it = std::upper_bound(grid_x.begin(), grid_x.end(), xx);
        std::size_t hi = std::min(grid_x.size() - 1,
                                  std::max<std::size_t>(1, it - grid_x.begin()));
        std::size_t lo = hi - 1;
        double t = (xx - grid_x[lo]) / (grid_x[hi] - grid_x[lo]);
        return grid_v[lo] + t * (grid_v[hi] - grid_v[lo]);
    }
    }
    return 0.0;
}

double WeightFunction::derivative(const MultiIndex& a, std::span<const double> x) const {
    if (a.dim() != dimension)
        throw std::invalid_argument("WeightFunction::derivative: dimension mismatch");
    int order = a.order();
    if (order == 0) return value(x);
    if (order > derivative_order)
        throw std::invalid_argument("WeightFunction::derivative: order " + std::to_string(order) +
                                    " exceeds declared derivative order");
    switch (kind) {
    case Kind::one: return 0.0;
    case Kind::radial_power: return radial_power_derivative(exponent, a, x);
    case Kind::affine_trig: {
        for (int i = 1; i < dimension; ++i)
            if (a[i] > 0) return 0.0;
        int k = a[0];
        return trig_b * std::pow(trig_c, k) * std::sin(trig_c * x[0] + k * M_PI / 2.0);
    }
    case Kind::grid_sampled: {
        double xx = x[0];
        auto it = std::upper_bound(grid_x.begin(), grid_x.end(), xx);
        std::size_t hi = std::min(grid_x.size() - 1,
                                  std::max<std::size_t>(1, it - grid_x.begin()));
        std::size_t lo = hi - 1;
        return (grid_v[hi] - grid_v[lo]) / (grid_x[hi] - grid_x[lo]);
    }
    }
    return 0.0;
}

bool WeightFunction::gradient_bounded() const {
    switch (kind) {
    case Kind::one: return true;
    case Kind::affine_trig: return true;
    case Kind::grid_sampled: return true;
    case Kind::radial_power: return exponent == 0.0 || exponent >= 1.0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// WeightFamily

WeightFamily WeightFamily::standard(WeightFunction v, ShapeMap s, double p) {
    WeightFamily f;
    f.base_v = std::move(v);
    f.shape = std::move(s);
    f.p = p;
    return f;
}

double WeightFamily::weight_value(const MultiIndex& a, std::span<const double> x) const {
    auto it = custom.find(a);
    if (it != custom.end()) return it->second.value(x);
    return std::pow(std::abs(base_v.value(x)), shape(a) + 1.0);
}

// ---------------------------------------------------------------------------
// sample grids

namespace {

bool near_declared_zero(const std::vector<double>& pt,
                        const std::vector<std::vector<double>>& zeros, double scale) {
    for (const auto& z : zeros) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < pt.size(); ++i) d2 += (pt[i] - z[i]) * (pt[i] - z[i]);
        if (std::sqrt(d2) < 1e-8 * scale) return true;
    }
    return false;
}

std::vector<std::vector<double>> ray_directions(int d) {
    std::vector<std::vector<double>> dirs;
    dirs.push_back([&] {
        std::vector<double> e(d, 0.0);
        e[0] = 1.0;
        return e;
    }());
    if (d >= 2) {
        std::vector<double> diag(d, 1.0 / std::sqrt(double(d)));
        dirs.push_back(diag);
        std::vector<double> two(d, 0.0);
        two[0] = two[1] = 1.0 / std::sqrt(2.0);
        dirs.push_back(two);
        std::vector<double> mix(d, 0.0);
        mix[0] = 1.0 / std::sqrt(2.0);
        mix[1] = -1.0 / std::sqrt(2.0);
        dirs.push_back(mix);
        std::vector<double> last(d, 0.0);
        last[d - 1] = 1.0;
        dirs.push_back(last);
    }
    return dirs;
}

} // namespace

SampleGrid make_sample_grid(const Domain& dom, const WeightFunction& v, int points_per_dim) {
    SampleGrid g;
    auto zeros = v.zero_set.as_points(dom.dimension());
    double scale = dom.diameter();
    if (dom.kind == Domain::Kind::interval) {
        g.dimension = 1;
        for (int i = 0; i < points_per_dim; ++i) {
            double x = dom.a + (dom.b - dom.a) * (i + 0.5) / points_per_dim;
            std::vector<double> pt{x};
            if (!near_declared_zero(pt, zeros, scale)) g.points.push_back(pt);
        }
        return g;
    }
    // disk / square: polar or tensor grid
    g.dimension = 2;
    int n = std::max(8, static_cast<int>(std::sqrt(double(points_per_dim))));
    if (dom.kind == Domain::Kind::disk) {
        for (int i = 0; i < n; ++i) {
            // half uniform, half geometric shrinking toward the center
            double r = (i % 2 == 0)
                           ? dom.radius * (i + 1.0) / n
                           : dom.radius * std::pow(10.0, -6.0 * (1.0 - double(i) / n));
            for (int j = 0; j < n; ++j) {
                double th = 2.0 * M_PI * (j + 0.25) / n;
                std::vector<double> pt{r * std::cos(th), r * std::sin(th)};
                if (!near_declared_zero(pt, zeros, scale)) g.points.push_back(pt);
            }
        }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<double> pt{dom.a + (dom.b - dom.a) * (i + 0.5) / n,
                                       dom.a + (dom.b - dom.a) * (j + 0.5) / n};
                if (!near_declared_zero(pt, zeros, scale)) g.points.push_back(pt);
            }
    }
    return g;
}

SampleGrid make_radial_grid(int d, double r_lo, double r_hi, int radii, const WeightFunction& v) {
    if (!(r_lo > 0 && r_hi > r_lo)) throw std::invalid_argument("make_radial_grid: bad radii");
    SampleGrid g;
    g.dimension = d;
    auto zeros = v.zero_set.as_points(d);
    double ratio = std::pow(r_hi / r_lo, 1.0 / std::max(1, radii - 1));
    for (const auto& dir : ray_directions(d)) {
        double r = r_lo;
        for (int i = 0; i < radii; ++i, r *= ratio) {
            std::vector<double> pt(d);
            for (int k = 0; k < d; ++k) pt[k] = r * dir[k];
            if (!near_declared_zero(pt, zeros, r_hi)) g.points.push_back(pt);
            if (d == 1) {
                std::vector<double> neg{-pt[0]};
                if (!near_declared_zero(neg, zeros, r_hi)) g.points.push_back(neg);
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// minimal_sigma

double minimal_sigma(const WeightFunction& v, double p, const Domain& dom,
                     const SampleGrid& grid) {
    if (v.kind == WeightFunction::Kind::one) return 0.0;
    if (v.kind == WeightFunction::Kind::radial_power)
        return v.exponent * std::pow(double(grid.dimension), (2.0 - p) / 2.0);
    (void)dom;
    double sup = 0.0;
    const int d = grid.dimension;
    for (const auto& pt : grid.points) {
        std::span<const double> x(pt.data(), pt.size());
        double vv = v.value(x);
        if (std::abs(vv) < 1e-300)
            throw SingularEvaluationError("minimal_sigma: v vanishes at a grid point");
        double gp = 0.0, r2 = 0.0;
        for (int i = 0; i < d; ++i) {
            gp += std::pow(std::abs(v.derivative(MultiIndex::unit(d, i), x)), p);
            r2 += pt[i] * pt[i];
        }
        gp = std::pow(gp, 1.0 / p);
        sup = std::max(sup, gp * std::sqrt(r2) / std::abs(vv));
    }
    return 1.01 * sup;
}

// ---------------------------------------------------------------------------
// hypothesis checks

const char* hypothesis_kind_name(HypothesisKind kind) {
    switch (kind) {
    case HypothesisKind::domination_42: return "domination_42";
    case HypothesisKind::annulus_54: return "annulus_54";
    case HypothesisKind::floor_29: return "floor_29";
    case HypothesisKind::gradient_71: return "gradient_71";
    case HypothesisKind::window_72: return "window_72";
    }
    return "?";
}

namespace {

HypothesisReport check_window(const HypothesisParams& prm) {
    HypothesisReport rep;
    rep.kind = "window_72";
    double denom = prm.oned_window ? (prm.p - 1.0) : (prm.d - prm.p);
    double w = denom != 0.0 ? 2.0 * prm.sigma * prm.p / denom : 0.0;
    rep.constant = w;
    rep.holds = denom > 0.0 && w > 0.0 && w < 1.0;
    if (!rep.holds) {
        rep.witness.populated = true;
        rep.witness.lhs = w;
        rep.witness.rhs = 1.0;
        rep.witness.condition =
            prm.oned_window ? "(7.2) 0 < 2*sigma*p/(p-1) < 1" : "(7.2) 0 < 2*sigma*p/(d-p) < 1";
    }
    return rep;
}

HypothesisReport check_gradient(const WeightFunction& v, const HypothesisParams& prm,
                                const SamplePlan& plan) {
    HypothesisReport rep;
    rep.kind = "gradient_71";
    SampleGrid grid = (prm.d <= 2 && prm.d == prm.domain.dimension())
                          ? make_sample_grid(prm.domain, v, plan.points_per_dim)
                          : make_radial_grid(prm.d, 1e-6, 1.0, plan.radii, v);
    double sup = 0.0;
    std::vector<double> arg;
    const int d = grid.dimension;
    for (const auto& pt : grid.points) {
        std::span<const double> x(pt.data(), pt.size());
        double vv = v.value(x);
        if (std::abs(vv) < 1e-300) continue;
        double gp = 0.0, r2 = 0.0;
        for (int i = 0; i < d; ++i) {
            gp += std::pow(std::abs(v.derivative(MultiIndex::unit(d, i), x)), prm.p);
            r2 += pt[i] * pt[i];
        }
        double ratio = std::pow(gp, 1.0 / prm.p) * std::sqrt(r2) / std::abs(vv);
        if (ratio > sup) {
            sup = ratio;
            arg = pt;
        }
    }
    rep.constant = sup;
    rep.holds = prm.sigma > 0.0 ? sup <= prm.sigma * (1.0 + 1e-12) : true;
    if (!rep.holds) {
        rep.witness.populated = true;
        rep.witness.location = arg;
        rep.witness.lhs = sup;
        rep.witness.rhs = prm.sigma;
        rep.witness.condition = "(7.1) |grad v|_p <= sigma |v|/|x|";
    }
    return rep;
}

HypothesisReport check_floor(const WeightFunction& v, const HypothesisParams& prm,
                             const SamplePlan& plan) {
    HypothesisReport rep;
    rep.kind = "floor_29";
    const Domain& dom = prm.domain;
    auto zeros = v.zero_set.as_points(dom.dimension());
    double tol = 1e-12 * dom.diameter();

    auto in_K = [&](const std::vector<double>& z) {
        if (prm.K_empty) return false;
        if (dom.kind == Domain::Kind::interval) {
            if (!prm.compact_interval) return false;
            return z[0] > prm.compact_interval->first + tol &&
                   z[0] < prm.compact_interval->second - tol;
        }
        if (!prm.compact_radius) return false;
        return std::sqrt(z[0] * z[0] + z[1] * z[1]) < *prm.compact_radius - tol;
    };
    for (const auto& z : zeros) {
        if (!in_K(z)) {
            rep.holds = false;
            rep.witness.populated = true;
            rep.witness.location = z;
            rep.witness.lhs = 0.0;
            rep.witness.condition = "(2.9) |v| > delta on Omega \\ K";
            rep.constant = 0.0;
            return rep;
        }
    }
    double inf = std::numeric_limits<double>::infinity();
    SampleGrid grid = make_sample_grid(dom, v, plan.points_per_dim);
    for (const auto& pt : grid.points) {
        if (in_K(pt)) continue;
        inf = std::min(inf, std::abs(v.value(std::span<const double>(pt.data(), pt.size()))));
    }
    if (!std::isfinite(inf)) inf = 0.0;
    rep.constant = 0.99 * inf;
    rep.holds = rep.constant > 0.0;
    if (!rep.holds) {
        rep.witness.populated = true;
        rep.witness.condition = "(2.9) |v| > delta on Omega \\ K";
    }
    return rep;
}

HypothesisReport check_domination(const WeightFunction& v, const HypothesisParams& prm,
                                  const SamplePlan& plan) {
    HypothesisReport rep;
    rep.kind = "domination_42";
    if (!prm.family) throw std::invalid_argument("domination_42: params.family required");
    const WeightFamily& fam = *prm.family;
    const int m = fam.shape.max_order;
    auto pim = enumerate_pi_m(v.dimension, m);

    auto sup_on_grid = [&](int points) {
        double sup = 0.0;
        std::vector<double> arg;
        SampleGrid grid = make_sample_grid(prm.domain, v, points);
        for (const auto& pt : grid.points) {
            if (prm.compact_interval &&
                (pt[0] < prm.compact_interval->first || pt[0] > prm.compact_interval->second))
                continue;
            std::span<const double> x(pt.data(), pt.size());
            double av = std::abs(v.value(x));
            for (const auto& a : pim) {
                double num = std::pow(av, a.order() + 1.0);
                double den = std::abs(fam.weight_value(a, x));
                if (den < 1e-300) {
                    if (num < 1e-300) continue;
                    return std::pair<double, std::vector<double>>(
                        std::numeric_limits<double>::infinity(), pt);
                }
                double ratio = num / den;
                if (ratio > sup) {
                    sup = ratio;
                    arg = pt;
                }
            }
        }
        return std::pair<double, std::vector<double>>(sup, arg);
    };

    auto [s1, a1] = sup_on_grid(plan.points_per_dim / 4);
    auto [s2, a2] = sup_on_grid(plan.points_per_dim / 2);
    auto [s3, a3] = sup_on_grid(plan.points_per_dim);
    rep.constant = 1.01 * s3;
    bool unbounded = !std::isfinite(s3) || (s2 > 1.1 * s1 && s3 > 1.1 * s2);
    rep.holds = !unbounded;
    if (!rep.holds) {
        rep.witness.populated = true;
        rep.witness.location = a3;
        rep.witness.lhs = s3;
        rep.witness.condition = "(4.2) |v|^{|alpha|+1} <= C_K |w_alpha|";
    }
    return rep;
}

HypothesisReport check_annulus(const WeightFunction& v, const HypothesisParams& prm,
                               const SamplePlan& plan) {
    HypothesisReport rep;
    rep.kind = "annulus_54";
    if (!prm.shape) throw std::invalid_argument("annulus_54: params.shape required");
    if (prm.n_list.empty()) throw std::invalid_argument("annulus_54: params.n_list required");
    const ShapeMap& s = *prm.shape;
    const int d = v.dimension;
    auto pim = enumerate_pi_m(d, s.max_order);

    auto annulus_points = [&](int n) {
        std::vector<std::vector<double>> pts;
        double lo = 1.0 / (2.0 * n), hi = 1.0 / n;
        if (v.kind == WeightFunction::Kind::radial_power && v.exponent > 0) {
            for (const auto& dir : ray_directions(d)) {
                for (int j = 0; j < plan.annulus_points; ++j) {
                    double t = lo * std::pow(hi / lo, (j + 0.5) / plan.annulus_points);
                    double r = std::pow(t, 1.0 / v.exponent);
                    std::vector<double> pt(d);
                    for (int k = 0; k < d; ++k) pt[k] = r * dir[k];
                    pts.push_back(pt);
                    if (d == 1) pts.push_back({-pt[0]});
                }
            }
            return pts;
        }
        SampleGrid grid = make_sample_grid(prm.domain, v, plan.points_per_dim);
        for (const auto& pt : grid.points) {
            double av = std::abs(v.value(std::span<const double>(pt.data(), pt.size())));
            if (av > lo && av <= hi) pts.push_back(pt);
        }
        return pts;
    };

    double cmax = 0.0;
    for (const auto& sigma : pim) {
        if (sigma.order() == 0) continue;
        std::vector<double> cn;
        std::vector<std::vector<double>> argmax;
        for (int n : prm.n_list) {
            auto pts = annulus_points(n);
            if (pts.empty()) {
                if (std::find(rep.skipped_n.begin(), rep.skipped_n.end(), n) ==
                    rep.skipped_n.end())
                    rep.skipped_n.push_back(n);
                continue;
            }
            double sup = 0.0;
            std::vector<double> arg = pts.front();
            for (const auto& pt : pts) {
                double dv =
                    std::abs(v.derivative(sigma, std::span<const double>(pt.data(), pt.size())));
                if (dv > sup) {
                    sup = dv;
                    arg = pt;
                }
            }
            cn.push_back(sup / std::pow(double(n), s(sigma) - 1.0));
            argmax.push_back(arg);
        }
        if (cn.size() >= 3) {
            bool monotone = true;
            for (std::size_t i = 1; i < cn.size(); ++i)
                if (cn[i] <= cn[i - 1]) monotone = false;
            if (monotone && cn.back() > 1.5 * cn.front()) {
                rep.holds = false;
                rep.witness.populated = true;
                rep.witness.alpha = sigma;
                rep.witness.location = argmax.back();
                rep.witness.lhs = cn.back();
                rep.witness.rhs = cn.front();
                rep.witness.condition = "(5.4) |d^sigma v| <= C n^{s(sigma)-1}";
                return rep;
            }
        }
        for (double c : cn) cmax = std::max(cmax, c);
    }
    rep.holds = true;
    rep.constant = cmax;
    return rep;
}

} // namespace

HypothesisReport hypothesis_check(HypothesisKind kind, const WeightFunction& v,
                                  const HypothesisParams& params, const SamplePlan& plan) {
    switch (kind) {
    case HypothesisKind::window_72: return check_window(params);
    case HypothesisKind::gradient_71: return check_gradient(v, params, plan);
    case HypothesisKind::floor_29: return check_floor(v, params, plan);
    case HypothesisKind::domination_42: return check_domination(v, params, plan);
    case HypothesisKind::annulus_54: return check_annulus(v, params, plan);
    }
    throw std::invalid_argument("hypothesis_check: unknown kind");
}

} // namespace degenera
