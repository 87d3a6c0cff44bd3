#pragma once

#include <vector>

#include "tds/config.hpp"
#include "tds/numerics.hpp"

namespace tds {

// Shifted Legendre polynomials l_0..l_{n-1} on [-h, 0]: l_k(0) = 1,
// l_k(-h) = (-1)^k, int l_j l_k = delta_jk h/(2k+1).
struct LegendreBasis {
    double h = 0.0;
    int n = 0;
};

// l_k(tau) via the three-term recurrence in the shifted variable.
double legendre_eval(const LegendreBasis& basis, int k, double tau);

// (h, h/3, ..., h/(2n-1)).
std::vector<double> gram_diagonal(const LegendreBasis& basis);

// Exponential moment matrices of e^{tau M} in the Legendre basis:
//   Gamma_k   = int_{-h}^{0} e^{(h+tau)M} l_k(tau) dtau
//   GammaBar_jk = int_{-h}^{0} ( int_{-h}^{tau1} e^{(tau1-tau2)M} l_k(tau2) dtau2 ) l_j(tau1) dtau1
// and GammaBarFlat_jk = (-1)^{j+k} GammaBar_jk (inner integral from tau1 to 0).
//
// The recursive route runs in extended precision sized from the rounding
// amplification bound of the forward recurrences; the quadrature route is an
// independent Gauss-Legendre evaluation of the defining integrals, also used
// as fallback when M is near-singular or the required precision exceeds the
// configured cap.
class LegendreTable {
public:
    enum class Source { recursion, quadrature };

    // Build all moments for j,k < n; the working precision is sized for n,
    // so the table cannot be extended past it.
    LegendreTable(const Matrix& M, double h, int n, const Config& cfg = {});

    int n() const { return n_; }
    double h() const { return h_; }
    Source source() const { return source_; }
    int digits_used() const { return digits_used_; }
    const Matrix& M_used() const { return M_; }

    const Matrix& gamma(int k) const;            // Gamma_k
    const Matrix& gamma_bar(int j, int k) const; // GammaBar_jk
    Matrix gamma_flat(int j, int k) const;       // GammaBarFlat_jk

    // Cross-check rows j in {0, n/2, n-1} of GammaBar plus the whole Gamma
    // sequence against quadrature; throws PrecisionLoss beyond `tol` (mixed
    // relative/absolute, floored at 1e-3 of the table scale).
    void validate(const Config& cfg) const;

private:
    int n_ = 0;
    double h_ = 0.0;
    Matrix M_;
    Source source_ = Source::recursion;
    int digits_used_ = 0;
    std::vector<Matrix> gamma_;                 // n matrices
    std::vector<std::vector<Matrix>> gamma_bar_;  // n x n
};

// Decimal digits of working precision needed to run the recursions to order
// n with double-accurate results: guard + twice the summed log10 of the
// per-step amplification factors max(1, 2(2k-1)/(h sigma_min(M))) -- twice
// because GammaBar errors amplify along two legs (diagonal seeds, then row).
int required_digits(const Matrix& M, double h, int n);

// Quadrature route, exposed directly as the oracle.
Matrix quadrature_gamma(const Matrix& M, double h, int k, int nodes = 0);
Matrix quadrature_gamma_bar(const Matrix& M, double h, int j, int k, int nodes = 0);

// GammaBarFlat by quadrature of its own defining integral (inner integral
// from tau1 to 0) -- used to verify the parity identity independently.
Matrix quadrature_gamma_flat(const Matrix& M, double h, int j, int k, int nodes = 0);

// Node count actually used for given order/matrix (grows with n and ||hM||).
int quadrature_auto_nodes(const Matrix& M, double h, int n, int configured);

}  // namespace tds
