#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "tds/errors.hpp"

namespace tds {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenvalues of a symmetric matrix, sorted ascending.
struct SymmetricSpectrum {
    std::vector<double> eigenvalues;
};

// Throws NonFinite if any entry is NaN/Inf.
void require_finite(const Matrix& m, const char* label);

// e^M by scaling-and-squaring with a Pade-13 approximant.
Matrix mat_exp(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Largest singular value.
double spectral_norm(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix (caller symmetrizes).
double min_eigenvalue_symmetric(const Matrix& s);
SymmetricSpectrum symmetric_spectrum(const Matrix& s);

struct LinearSolve {
    Vector x;
    double rcond;  // reciprocal condition estimate from the LU factorization
};

// Solve a x = b; throws SingularMatrix when rcond < rcond_min.
LinearSolve solve_linear(const Matrix& a, const Vector& b, double rcond_min = 1e-13);

// Reciprocal condition estimate alone.
double rcond_estimate(const Matrix& a);

// Principal branch of the Lambert W function for z >= 0.
// Halley iteration from log(1+z); |W e^W - z| <= 1e-12 (1+z).
double lambert_w0(double z);

// Bisection for a sign change of f on [lo, hi] down to interval width tol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

// Gauss-Legendre nodes and weights on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n, double a, double b);

}  // namespace tds
