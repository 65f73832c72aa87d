#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace degenera {

/// Multi-index alpha in N^d.  Component-wise partial order, |alpha| = sum.
struct MultiIndex {
    std::vector<int> comps;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> c) : comps(std::move(c)) {
        for (int k : comps)
            if (k < 0) throw std::invalid_argument("MultiIndex: negative component");
    }
    static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
    static MultiIndex unit(int d, int i) {
        std::vector<int> c(d, 0);
        c.at(i) = 1;
        return MultiIndex(std::move(c));
    }

    int dim() const { return static_cast<int>(comps.size()); }
    int order() const { return std::accumulate(comps.begin(), comps.end(), 0); }
    int operator[](int i) const { return comps[i]; }

    bool operator==(const MultiIndex& o) const { return comps == o.comps; }
    bool operator<(const MultiIndex& o) const { return comps < o.comps; } // for map keys

    /// beta <= alpha component-wise
    bool leq(const MultiIndex& a) const {
        if (dim() != a.dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (comps[i] > a.comps[i]) return false;
        return true;
    }

    MultiIndex minus(const MultiIndex& b) const {
        std::vector<int> c(comps);
        for (int i = 0; i < dim(); ++i) c[i] -= b.comps[i];
        return MultiIndex(std::move(c));
    }
    MultiIndex plus(const MultiIndex& b) const {
        std::vector<int> c(comps);
        for (int i = 0; i < dim(); ++i) c[i] += b.comps[i];
        return c.empty() ? MultiIndex() : MultiIndex(std::move(c));
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < dim(); ++i) s += (i ? "," : "") + std::to_string(comps[i]);
        return s + ")";
    }
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

/// Product of component binomials C(alpha_i, beta_i).
inline double multi_binomial(const MultiIndex& a, const MultiIndex& b) {
    double r = 1.0;
    for (int i = 0; i < a.dim(); ++i) r *= static_cast<double>(binomial(a[i], b[i]));
    return r;
}

/// All alpha in N^d with |alpha| <= m, in lexicographic order.
inline std::vector<MultiIndex> enumerate_pi_m(int d, int m) {
    if (d < 1) throw std::invalid_argument("enumerate_pi_m: d >= 1 required");
    if (m < 0) throw std::invalid_argument("enumerate_pi_m: m >= 0 required");
    std::vector<MultiIndex> out;
    std::vector<int> cur(d, 0);
    // counting in base (m+1) with the order constraint
    while (true) {
        int s = std::accumulate(cur.begin(), cur.end(), 0);
        if (s <= m) out.push_back(MultiIndex(cur));
        int i = d - 1;
        while (i >= 0) {
            if (++cur[i] <= m) break;
            cur[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

/// All beta with beta <= alpha component-wise.
inline std::vector<MultiIndex> enumerate_below(const MultiIndex& a) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(a.dim(), 0);
    while (true) {
        out.push_back(MultiIndex(cur));
        int i = a.dim() - 1;
        while (i >= 0) {
            if (++cur[i] <= a[i]) break;
            cur[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

} // namespace degenera
