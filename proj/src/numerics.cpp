#include "tds/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace tds {

void require_finite(const Matrix& m, const char* label) {
    if (!m.allFinite()) throw NonFinite(std::string(label) + ": non-finite entries");
}

Matrix mat_exp(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("mat_exp: matrix must be square");
    require_finite(m, "mat_exp input");
    Matrix e = m.exp();
    if (!e.allFinite()) throw NonFinite("mat_exp: overflow in result");
    return e;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw DimensionMismatch("unvec: length mismatch");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

double min_eigenvalue_symmetric(const Matrix& s) {
    return symmetric_spectrum(s).eigenvalues.front();
}

SymmetricSpectrum symmetric_spectrum(const Matrix& s) {
    if (s.rows() != s.cols()) throw DimensionMismatch("symmetric_spectrum: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("symmetric eigensolver failed to converge");
    SymmetricSpectrum out;
    out.eigenvalues.assign(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
    return out;
}

LinearSolve solve_linear(const Matrix& a, const Vector& b, double rcond_min) {
    if (a.rows() != a.cols()) throw DimensionMismatch("solve_linear: matrix must be square");
    if (a.rows() != b.size()) throw DimensionMismatch("solve_linear: rhs length mismatch");
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc >= rcond_min))
        throw SingularMatrix("solve_linear: reciprocal condition " + std::to_string(rc) +
                             " below " + std::to_string(rcond_min));
    return {lu.solve(b), rc};
}

double rcond_estimate(const Matrix& a) {
    return Eigen::PartialPivLU<Matrix>(a).rcond();
}

double lambert_w0(double z) {
    if (z < 0.0) throw OutOfRange("lambert_w0: z must be nonnegative");
    if (z == 0.0) return 0.0;
    double w = std::log1p(z);
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-14 * (1.0 + std::abs(w))) return w;
    }
    throw ConvergenceFailure("lambert_w0: Halley iteration did not converge");
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw InvalidInput("bisect_root: need lo < hi");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw NoSignChange("bisect_root: no sign change on bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw InvalidInput("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = -x;
        rule.weights[n - 1 - i] = w;
    }
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid - halfw * rule.nodes[i];  // ascending in [a, b]
        rule.weights[i] *= halfw;
    }
    return rule;
}

}  // namespace tds
