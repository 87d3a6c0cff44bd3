#pragma once

#include <utility>
#include <vector>

#include "tds/config.hpp"
#include "tds/numerics.hpp"

namespace tds {

// x'(t) = A x(t) + Ad x(t - h)
struct TimeDelaySystem {
    Matrix A;
    Matrix Ad;
    double h = 0.0;

    int m() const { return static_cast<int>(A.rows()); }
    void validate() const;  // throws InvalidInput / NonFinite
};

// The finite-dimensional data behind the delay Lyapunov matrix U:
//   vec U(tau) = [I 0] e^{tau M} u          for tau >= 0,
//   vec U(tau) = [0 I] e^{(h+tau) M} u      for tau <  0,
// with u = N^{-1} [-vec(I_m); 0].
struct LyapunovOperatorData {
    int m = 0;
    double h = 0.0;
    Matrix M;       // 2m^2 x 2m^2
    Matrix N;       // 2m^2 x 2m^2
    Vector u;       // 2m^2
    Matrix expM_h;  // e^{hM}
    double rcond_N = 0.0;
};

// Constants of the order bound: n* = N(E(eta0)).
struct BoundConstants {
    double r = 0.0;       // ||A|| + ||Ad||
    double mu = 0.0;      // h r / 2
    double rho = 0.0;     // prefactor of the Legendre tail bound
    double b0 = 0.0;      // root of sin^4(b)((hr)^2+b^2) = (hr)^2 on [0, pi/2]
    double eta0 = 0.0;    // (e^{-2rh}/4r) cos^2(b0)
    double kappa1 = 0.0;  // max_{[0,h]}  ||U(tau) Ad||
    double kappa2 = 0.0;  // max_{[-h,h]} ||Ad^T U(tau) Ad||
    double eps_star = 0.0;  // E(eta0)
    int n_star = 0;
};

// Build M, N, u, e^{hM}; throws LyapunovConditionViolated when N is
// numerically singular (rcond < cfg.rcond_min_N).
LyapunovOperatorData build_MN(const TimeDelaySystem& sys, const Config& cfg = {});

// U(tau) for |tau| <= h.
Matrix eval_U(const LyapunovOperatorData& data, double tau);

// U on an equally spaced grid of `count` points over [tau0, tau1], computed
// by multiplicative stepping of e^{dtau M} with a periodic full refresh.
std::vector<Matrix> eval_U_grid(const LyapunovOperatorData& data, double tau0, double tau1,
                                int count, int refresh_every = 100);

double compute_r(const TimeDelaySystem& sys);

// (b0, eta0) of the guaranteed decay bound.
std::pair<double, double> compute_b0_eta0(const TimeDelaySystem& sys, double r,
                                          double bisect_tol = 1e-12);

// Grid maxima of the Lyapunov-matrix norms entering E(eta).
std::pair<double, double> compute_kappas(const LyapunovOperatorData& data,
                                         const TimeDelaySystem& sys, const Config& cfg = {});

// Positive root of eps^2 + 2 c eps - eta/(h(kappa2+1)) with
// c = (kappa1+kappa2)/(kappa2+1), evaluated in cancellation-free form.
double epsilon_of_eta(double eta, double h, double kappa1, double kappa2);

// Smallest admissible projection order for accuracy eps at parameter mu;
// N(eps) = max(4, ceil(3/2 + mu e^{1 + W(-log(rho eps)/(mu e))})), computed
// through log(rho) to stay finite for large mu.  Returns 4 when rho*eps >= 1.
int order_estimate(double eps, double mu);

// log(rho) for the same bound (exposed for diagnostics/tests).
double log_rho(double mu);

// Full chain: r, mu, b0, eta0, kappas, eps* = E(eta0), n* = N(eps*).
// Throws OrderTooLarge when n* exceeds cfg.order_cap.
BoundConstants compute_n_star(const TimeDelaySystem& sys, const LyapunovOperatorData& data,
                              const Config& cfg = {});

}  // namespace tds
