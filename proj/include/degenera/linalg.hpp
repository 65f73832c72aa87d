#pragma once

#include <iosfwd>
#include <vector>

#include "degenera/errors.hpp"

namespace degenera {

struct Triplet {
    int row = 0, col = 0;
    double value = 0.0;
};

/// Compressed-row sparse matrix assembled from triplets; duplicate entries are
/// summed in insertion order so assembly stays bit-stable.
class CsrMatrix {
public:
    CsrMatrix() = default;
    static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int size() const { return n_; }
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> diagonal() const;
    double entry(int r, int c) const;
    double max_abs() const;
    double max_asymmetry() const; // max |M_ij - M_ji|
    void write_coo(std::ostream& os) const;

private:
    int n_ = 0;
    std::vector<int> rowptr_, colind_;
    std::vector<double> vals_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2_vec(const std::vector<double>& a);

struct IterResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients (SPD systems).
IterResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, double tol, int max_iter);
/// Jacobi-preconditioned BiCGStab (general systems).
IterResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b, double tol,
                          int max_iter);

/// Dense factorization with symmetric diagonal equilibration: Cholesky when
/// `symmetric`, partial-pivot LU otherwise (also the Cholesky fallback).
class DenseSolver {
public:
    DenseSolver(const CsrMatrix& A, bool symmetric);
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    int n_ = 0;
    bool cholesky_ = false;
    std::vector<double> fac_;   // factor, row-major
    std::vector<int> piv_;      // LU pivots
    std::vector<double> scale_; // equilibration D^{-1/2}
};

struct EigenResult {
    double lambda = 0.0;
    std::vector<double> vec;
    int iterations = 0;
    bool converged = false;
};

/// Smallest generalized eigenvalue of S x = lambda Q x by inverse power
/// iteration (shift 0, deterministic all-ones start).
EigenResult smallest_generalized_eigen(const CsrMatrix& S, const CsrMatrix& Q, double tol,
                                       int max_iter);

} // namespace degenera
