#include "degenera/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "degenera/jet.hpp"

namespace degenera {

// ---------------------------------------------------------------------------
// transition profile

namespace {

// Taylor jet of G(u) = e(u)/(e(u)+e(1-u)) with e(u) = exp(-1/u); valid for
// u in (0,1).  Outside a 1e-8 margin the function is flat to double precision.
Jet smoothstep_jet(double u, int ord) {
    Jet ju = Jet::variable(u, ord);
    Jet e1 = exp(-1.0 * reciprocal(ju));
    Jet w = Jet::constant(1.0, ord) - ju;
    Jet e2 = exp(-1.0 * reciprocal(w));
    return e1 / (e1 + e2);
}

} // namespace

double TransitionProfile::eta(double t) const {
    double u = 2.0 * std::abs(t) - 1.0;
    if (u <= 1e-8) return 0.0;
    if (u >= 1.0 - 1e-8) return 1.0;
    return smoothstep_jet(u, 0).c[0];
}

double TransitionProfile::eta_derivative(int k, double t) const {
    if (k < 0 || k > kMaxJetOrder)
        throw std::invalid_argument("TransitionProfile: derivative order out of range");
    if (k == 0) return eta(t);
    double u = 2.0 * std::abs(t) - 1.0;
    if (u <= 1e-8 || u >= 1.0 - 1e-8) return 0.0;
    Jet g = smoothstep_jet(u, k);
    double sgn = t >= 0 ? 1.0 : -1.0;
    return g.derivative(k) * std::pow(2.0 * sgn, k);
}

TransitionProfile build_transition(int order_hint) {
    TransitionProfile p;
    int m = std::clamp(order_hint, 0, 6);
    p.derivative_sup.assign(m + 1, 0.0);
    p.derivative_sup[0] = 1.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
        double t = 0.5 + 0.5 * (i + 0.5) / samples; // eta is even; scan (1/2, 1)
        for (int k = 1; k <= m; ++k)
            p.derivative_sup[k] = std::max(p.derivative_sup[k], std::abs(p.eta_derivative(k, t)));
    }
    return p;
}

// ---------------------------------------------------------------------------
// multiset partitions

MultiIndex MultisetPartition::block_index(const std::vector<int>& block, int d) {
    std::vector<int> mu(d, 0);
    for (int i : block) mu.at(i) += 1;
    return MultiIndex(std::move(mu));
}

std::vector<MultisetPartition> multiindex_partitions(const MultiIndex& beta) {
    if (beta.order() < 1)
        throw std::invalid_argument("multiindex_partitions: |beta| >= 1 required");
    std::vector<int> elems;
    for (int i = 0; i < beta.dim(); ++i)
        for (int k = 0; k < beta[i]; ++k) elems.push_back(i);
    const int n = static_cast<int>(elems.size());

    // Set partitions of positions via restricted growth strings, then
    // canonicalised so that repeated elements do not produce duplicates.
    std::set<std::vector<std::vector<int>>> seen;
    std::vector<int> rgs(n, 0);
    while (true) {
        int nblocks = 1 + *std::max_element(rgs.begin(), rgs.end());
        std::vector<std::vector<int>> blocks(nblocks);
        for (int i = 0; i < n; ++i) blocks[rgs[i]].push_back(elems[i]);
        for (auto& b : blocks) std::sort(b.begin(), b.end());
        std::sort(blocks.begin(), blocks.end());
        seen.insert(blocks);
        // next restricted growth string
        int i = n - 1;
        for (; i > 0; --i) {
            int cap = 1 + *std::max_element(rgs.begin(), rgs.begin() + i);
            if (rgs[i] < cap) {
                rgs[i] += 1;
                std::fill(rgs.begin() + i + 1, rgs.end(), 0);
                break;
            }
            rgs[i] = 0;
        }
        if (i == 0) break;
    }
    std::vector<MultisetPartition> out;
    for (const auto& blocks : seen) {
        MultisetPartition p;
        p.blocks = blocks;
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// chi_n evaluation

double chi_eval(const CutoffFamily& family, std::span<const double> x, const MultiIndex& alpha) {
    const int order = alpha.order();
    if (order > family.v.derivative_order)
        throw std::invalid_argument("chi_eval: derivative order exceeds v's declared order");
    const double n = static_cast<double>(family.n);
    const double vv = family.v.value(x);
    const double t = n * vv;
    if (order == 0) return family.profile.eta(t);
    if (std::abs(vv) <= 0.5 / n) return 0.0; // M_{2n}
    if (std::abs(vv) >= 1.0 / n) return 0.0; // closure of M_n^c
    double sum = 0.0;
    for (const MultisetPartition& part : multiindex_partitions(alpha)) {
        int k = static_cast<int>(part.blocks.size());
        double prod = family.profile.eta_derivative(k, t) * std::pow(n, k);
        for (const auto& block : part.blocks) {
            MultiIndex mu = MultisetPartition::block_index(block, family.v.dimension);
            prod *= family.v.derivative(mu, x);
        }
        sum += prod;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// growth fit

std::vector<std::vector<double>> annulus_sample(const WeightFunction& v, int n,
                                                const Domain& domain, int points) {
    std::vector<std::vector<double>> pts;
    const double lo = 1.0 / (2.0 * n), hi = 1.0 / n;
    const int d = v.dimension;
    if (v.kind == WeightFunction::Kind::radial_power && v.exponent > 0) {
        std::vector<std::vector<double>> dirs;
        if (d == 1) {
            dirs = {{1.0}, {-1.0}};
        } else {
            for (int j = 0; j < 8; ++j) {
                double th = 2.0 * M_PI * (j + 0.3) / 8.0;
                std::vector<double> dir(d, 0.0);
                dir[0] = std::cos(th);
                dir[1] = std::sin(th);
                dirs.push_back(dir);
            }
        }
        for (const auto& dir : dirs)
            for (int j = 0; j < points; ++j) {
                double t = lo * std::pow(hi / lo, (j + 0.5) / points);
                double r = std::pow(t, 1.0 / v.exponent);
                std::vector<double> pt(d);
                for (int k = 0; k < d; ++k) pt[k] = r * dir[k];
                pts.push_back(std::move(pt));
            }
        return pts;
    }
    SampleGrid grid = make_sample_grid(domain, v, std::max(points * 10, 10000));
    for (const auto& pt : grid.points) {
        double av = std::abs(v.value(std::span<const double>(pt.data(), pt.size())));
        if (av > lo && av < hi) pts.push_back(pt);
    }
    return pts;
}

GrowthFit chi_growth_fit(const WeightFunction& v, const ShapeMap& s, const MultiIndex& sigma,
                         const std::vector<int>& n_list, const Domain& domain,
                         int annulus_points) {
    if (n_list.size() < 4)
        throw std::invalid_argument("chi_growth_fit: need at least 4 values of n");
    if (sigma.order() < 1) throw std::invalid_argument("chi_growth_fit: |sigma| >= 1 required");
    (void)s;

    GrowthFit fit;
    CutoffFamily fam;
    fam.profile = build_transition(std::max(sigma.order(), 2));
    fam.v = v;
    for (int n : n_list) {
        fam.n = n;
        auto pts = annulus_sample(v, n, domain, annulus_points);
        double sup = 0.0;
        for (const auto& pt : pts)
            sup = std::max(sup,
                           std::abs(chi_eval(fam, std::span<const double>(pt.data(), pt.size()),
                                             sigma)));
        if (pts.empty() || sup == 0.0) {
            fit.skipped_n.push_back(n);
            continue;
        }
        fit.used_n.push_back(n);
        fit.sup_values.push_back(sup);
    }
    if (fit.used_n.size() < 2) return fit; // warning: nothing to fit

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(fit.used_n.size());
    for (std::size_t i = 0; i < fit.used_n.size(); ++i) {
        double lx = std::log(double(fit.used_n[i]));
        double ly = std::log(fit.sup_values[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    double intercept = (sy - slope * sx) / cnt;
    fit.fitted_exponent = slope;
    fit.C = std::exp(intercept);
    fit.fitted = true;
    return fit;
}

} // namespace degenera
