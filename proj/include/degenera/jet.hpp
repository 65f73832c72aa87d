#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace degenera {

/// Truncated Taylor series in one variable: c[k] = f^(k)(x0)/k!.
/// Enough for analytic derivatives of the smoothstep and bump profiles up to
/// order kMaxJetOrder; composition with affine arguments is done by the caller.
inline constexpr int kMaxJetOrder = 8;

struct Jet {
    std::array<double, kMaxJetOrder + 1> c{};
    int ord = 0;

    static Jet constant(double v, int ord) {
        Jet j;
        j.ord = ord;
        j.c[0] = v;
        return j;
    }
    /// The identity map t -> t around t0.
    static Jet variable(double t0, int ord) {
        Jet j = constant(t0, ord);
        if (ord >= 1) j.c[1] = 1.0;
        return j;
    }

    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    for (int k = 0; k <= a.ord; ++k) r.c[k] += b.c[k];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r = a;
    for (int k = 0; k <= a.ord; ++k) r.c[k] -= b.c[k];
    return r;
}

inline Jet operator*(double s, const Jet& a) {
    Jet r = a;
    for (int k = 0; k <= a.ord; ++k) r.c[k] *= s;
    return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r = Jet::constant(0.0, a.ord);
    for (int k = 0; k <= a.ord; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet reciprocal(const Jet& a) {
    if (a.c[0] == 0.0) throw std::domain_error("Jet reciprocal at zero");
    Jet r = Jet::constant(1.0 / a.c[0], a.ord);
    for (int k = 1; k <= a.ord; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -r.c[0] * s;
    }
    return r;
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet exp(const Jet& a) {
    Jet r = Jet::constant(std::exp(a.c[0]), a.ord);
    // (k+1) e_{k+1} = sum_{j=0..k} (j+1) a_{j+1} e_{k-j}
    for (int k = 0; k < a.ord; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += (j + 1) * a.c[j + 1] * r.c[k - j];
        r.c[k + 1] = s / (k + 1);
    }
    return r;
}

} // namespace degenera
