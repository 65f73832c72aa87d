#pragma once

#include <span>
#include <vector>

#include "degenera/multi_index.hpp"
#include "degenera/weights.hpp"

namespace degenera {

/// Smooth step: identically 0 on [-1/2,1/2], identically 1 outside [-1,1],
/// built from the exponential bump smoothstep G(u) = e(u)/(e(u)+e(1-u)).
struct TransitionProfile {
    double inner_radius = 0.5;
    double outer_radius = 1.0;
    std::vector<double> derivative_sup; // sup |eta^(k)|, k = 0..order

    double eta(double t) const;
    double eta_derivative(int k, double t) const;
    int tabulated_order() const { return static_cast<int>(derivative_sup.size()) - 1; }
};

TransitionProfile build_transition(int order_hint);

/// One partition of the multiset of coordinate indices of a multi-index;
/// blocks and the block list are kept sorted so partitions compare canonically.
struct MultisetPartition {
    std::vector<std::vector<int>> blocks;

    /// Multi-index mu with mu_i = multiplicity of coordinate i in `block`.
    static MultiIndex block_index(const std::vector<int>& block, int d);
};

/// All partitions of the multiset {i with multiplicity beta_i}.
std::vector<MultisetPartition> multiindex_partitions(const MultiIndex& beta);

struct CutoffFamily {
    TransitionProfile profile;
    WeightFunction v;
    int n = 1;
};

/// chi_n = eta(n v(x)) and its partial derivatives via the chain rule over
/// multiset partitions.  Exactly 0 (all orders >= 1) off the transition
/// annulus 1/(2n) < |v| < 1/n.
double chi_eval(const CutoffFamily& family, std::span<const double> x, const MultiIndex& alpha);
inline double chi_eval(const CutoffFamily& family, const Point& p, const MultiIndex& alpha) {
    return chi_eval(family, std::span<const double>(p.data(), family.v.dimension), alpha);
}

/// Sample points with 1/(2n) < |v| <= 1/n, geometric in |v| for radial powers.
std::vector<std::vector<double>> annulus_sample(const WeightFunction& v, int n,
                                                const Domain& domain, int points);

struct GrowthFit {
    double C = 0.0;
    double fitted_exponent = 0.0;
    std::vector<int> used_n;
    std::vector<int> skipped_n; // empty annulus at these n
    std::vector<double> sup_values;
    bool fitted = false;
};

/// Per-n supremum of |d^sigma chi_n| over the transition annulus and the
/// log-log least squares fit of its growth in n.
GrowthFit chi_growth_fit(const WeightFunction& v, const ShapeMap& s, const MultiIndex& sigma,
                         const std::vector<int>& n_list, const Domain& domain,
                         int annulus_points = 1000);

} // namespace degenera
