#include "degenera/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace degenera {

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> t) {
    std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.n_ = n;
    m.rowptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < t.size();) {
        std::size_t j = i;
        double s = 0.0;
        while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].value;
        m.colind_.push_back(t[i].col);
        m.vals_.push_back(s);
        m.rowptr_[t[i].row + 1] += 1;
        i = j;
    }
    for (int r = 0; r < n; ++r) m.rowptr_[r + 1] += m.rowptr_[r];
    return m;
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) s += vals_[k] * x[colind_[k]];
        y[r] = s;
    }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
            if (colind_[k] == r) d[r] = vals_[k];
    return d;
}

double CsrMatrix::entry(int r, int c) const {
    for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
        if (colind_[k] == c) return vals_[k];
    return 0.0;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals_) m = std::max(m, std::abs(v));
    return m;
}

double CsrMatrix::max_asymmetry() const {
    double m = 0.0;
    for (int r = 0; r < n_; ++r)
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
            m = std::max(m, std::abs(vals_[k] - entry(colind_[k], r)));
    return m;
}

void CsrMatrix::write_coo(std::ostream& os) const {
    char buf[96];
    for (int r = 0; r < n_; ++r)
        for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, colind_[k], vals_[k]);
            os << buf;
        }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2_vec(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// iterative solvers

IterResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, double tol, int max_iter) {
    const int n = A.size();
    IterResult res;
    res.x.assign(n, 0.0);
    double bnorm = norm2_vec(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    std::vector<double> diag = A.diagonal();
    for (double& d : diag) d = (d != 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r = b, z(n), p(n), Ap(n);
    for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        A.multiply(p, Ap);
        double pAp = dot(p, Ap);
        if (pAp == 0.0) break;
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        res.iterations = it;
        res.rel_residual = norm2_vec(r) / bnorm;
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        for (int i = 0; i < n; ++i) z[i] = diag[i] * r[i];
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

IterResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b, double tol,
                          int max_iter) {
    const int n = A.size();
    IterResult res;
    res.x.assign(n, 0.0);
    double bnorm = norm2_vec(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    std::vector<double> diag = A.diagonal();
    for (double& d : diag) d = (d != 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r = b, r0 = b, p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iter; ++it) {
        double rho_new = dot(r0, r);
        if (rho_new == 0.0) break;
        if (it == 1) {
            p = r;
        } else {
            double beta = (rho_new / rho) * (alpha / omega);
            for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
        for (int i = 0; i < n; ++i) ph[i] = diag[i] * p[i];
        A.multiply(ph, v);
        double r0v = dot(r0, v);
        if (r0v == 0.0) break;
        alpha = rho / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2_vec(s) / bnorm <= tol) {
            for (int i = 0; i < n; ++i) res.x[i] += alpha * ph[i];
            res.iterations = it;
            res.rel_residual = norm2_vec(s) / bnorm;
            res.converged = true;
            return res;
        }
        for (int i = 0; i < n; ++i) sh[i] = diag[i] * s[i];
        A.multiply(sh, t);
        double tt = dot(t, t);
        if (tt == 0.0) break;
        omega = dot(t, s) / tt;
        for (int i = 0; i < n; ++i) {
            res.x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        res.iterations = it;
        res.rel_residual = norm2_vec(r) / bnorm;
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        if (omega == 0.0) break;
    }
    return res;
}

// ---------------------------------------------------------------------------
// dense factorization

DenseSolver::DenseSolver(const CsrMatrix& A, bool symmetric) : n_(A.size()) {
    scale_.assign(n_, 1.0);
    std::vector<double> diag = A.diagonal();
    for (int i = 0; i < n_; ++i)
        if (diag[i] > 0.0) scale_[i] = 1.0 / std::sqrt(diag[i]);

    fac_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            fac_[static_cast<std::size_t>(r) * n_ + c] = A.entry(r, c) * scale_[r] * scale_[c];

    if (symmetric) {
        // Cholesky on the equilibrated matrix; fall back to LU on breakdown
        std::vector<double> chol = fac_;
        bool ok = true;
        for (int j = 0; j < n_ && ok; ++j) {
            double d = chol[static_cast<std::size_t>(j) * n_ + j];
            for (int k = 0; k < j; ++k) {
                double l = chol[static_cast<std::size_t>(j) * n_ + k];
                d -= l * l;
            }
            if (d <= 0.0) {
                ok = false;
                break;
            }
            d = std::sqrt(d);
            chol[static_cast<std::size_t>(j) * n_ + j] = d;
            for (int i = j + 1; i < n_; ++i) {
                double s = chol[static_cast<std::size_t>(i) * n_ + j];
                for (int k = 0; k < j; ++k)
                    s -= chol[static_cast<std::size_t>(i) * n_ + k] *
                         chol[static_cast<std::size_t>(j) * n_ + k];
                chol[static_cast<std::size_t>(i) * n_ + j] = s / d;
            }
        }
        if (ok) {
            fac_ = std::move(chol);
            cholesky_ = true;
            return;
        }
    }
    // partial-pivot LU
    piv_.resize(n_);
    for (int k = 0; k < n_; ++k) {
        int p = k;
        for (int i = k + 1; i < n_; ++i)
            if (std::abs(fac_[static_cast<std::size_t>(i) * n_ + k]) >
                std::abs(fac_[static_cast<std::size_t>(p) * n_ + k]))
                p = i;
        piv_[k] = p;
        if (p != k)
            for (int c = 0; c < n_; ++c)
                std::swap(fac_[static_cast<std::size_t>(k) * n_ + c],
                          fac_[static_cast<std::size_t>(p) * n_ + c]);
        double pivot = fac_[static_cast<std::size_t>(k) * n_ + k];
        if (pivot == 0.0) throw NonConvergenceError("DenseSolver: singular matrix");
        for (int i = k + 1; i < n_; ++i) {
            double l = fac_[static_cast<std::size_t>(i) * n_ + k] / pivot;
            fac_[static_cast<std::size_t>(i) * n_ + k] = l;
            for (int c = k + 1; c < n_; ++c)
                fac_[static_cast<std::size_t>(i) * n_ + c] -=
                    l * fac_[static_cast<std::size_t>(k) * n_ + c];
        }
    }
}

std::vector<double> DenseSolver::solve(const std::vector<double>& b) const {
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i) y[i] = b[i] * scale_[i];
    if (cholesky_) {
        for (int i = 0; i < n_; ++i) {
            double s = y[i];
            for (int k = 0; k < i; ++k) s -= fac_[static_cast<std::size_t>(i) * n_ + k] * y[k];
            y[i] = s / fac_[static_cast<std::size_t>(i) * n_ + i];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < n_; ++k) s -= fac_[static_cast<std::size_t>(k) * n_ + i] * y[k];
            y[i] = s / fac_[static_cast<std::size_t>(i) * n_ + i];
        }
    } else {
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(y[k], y[piv_[k]]);
            for (int i = k + 1; i < n_; ++i) y[i] -= fac_[static_cast<std::size_t>(i) * n_ + k] * y[k];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < n_; ++k) s -= fac_[static_cast<std::size_t>(i) * n_ + k] * y[k];
            y[i] = s / fac_[static_cast<std::size_t>(i) * n_ + i];
        }
    }
    for (int i = 0; i < n_; ++i) y[i] *= scale_[i];
    return y;
}

// ---------------------------------------------------------------------------
// inverse power iteration

EigenResult smallest_generalized_eigen(const CsrMatrix& S, const CsrMatrix& Q, double tol,
                                       int max_iter) {
    const int n = S.size();
    EigenResult res;
    res.vec.assign(n, 1.0);
    DenseSolver fact(S, true);
    std::vector<double> qx(n);
    double lambda_prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Q.multiply(res.vec, qx);
        std::vector<double> y = fact.solve(qx);
        double ynorm = norm2_vec(y);
        if (ynorm == 0.0) break;
        for (double& v : y) v /= ynorm;
        res.vec = std::move(y);
        std::vector<double> Sx = S.multiply(res.vec);
        Q.multiply(res.vec, qx);
        double lambda = dot(res.vec, Sx) / dot(res.vec, qx);
        res.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
            res.lambda = lambda;
            res.converged = true;
            return res;
        }
        lambda_prev = lambda;
        res.lambda = lambda;
    }
    return res;
}

} // namespace degenera
