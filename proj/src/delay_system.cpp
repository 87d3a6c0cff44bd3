#include "tds/delay_system.hpp"

#include <cmath>

namespace tds {

void TimeDelaySystem::validate() const {
    if (A.rows() == 0 || A.rows() != A.cols())
        throw InvalidInput("system: A must be square and non-empty");
    if (Ad.rows() != A.rows() || Ad.cols() != A.cols())
        throw DimensionMismatch("system: Ad must match the size of A");
    if (!(h > 0.0)) throw InvalidInput("system: delay h must be positive");
    require_finite(A, "A");
    require_finite(Ad, "Ad");
}

LyapunovOperatorData build_MN(const TimeDelaySystem& sys, const Config& cfg) {
    sys.validate();
    const int m = sys.m();
    const int mm = m * m;
    const Matrix Im = Matrix::Identity(m, m);
    const Matrix Imm = Matrix::Identity(mm, mm);

    LyapunovOperatorData data;
    data.m = m;
    data.h = sys.h;

    data.M.resize(2 * mm, 2 * mm);
    data.M.topLeftCorner(mm, mm) = kron(sys.A.transpose(), Im);
    data.M.topRightCorner(mm, mm) = kron(sys.Ad.transpose(), Im);
    data.M.bottomLeftCorner(mm, mm) = -kron(Im, sys.Ad.transpose());
    data.M.bottomRightCorner(mm, mm) = -kron(Im, sys.A.transpose());

    data.expM_h = mat_exp(sys.h * data.M);

    Matrix left(2 * mm, 2 * mm);
    left.topLeftCorner(mm, mm) = kron(sys.A.transpose(), Im) + kron(Im, sys.A.transpose());
    left.topRightCorner(mm, mm) = kron(sys.Ad.transpose(), Im);
    left.bottomLeftCorner(mm, mm) = Imm;
    left.bottomRightCorner(mm, mm).setZero();

    Matrix gain(2 * mm, 2 * mm);
    gain.setZero();
    gain.topLeftCorner(mm, mm) = kron(Im, sys.Ad.transpose());
    gain.bottomRightCorner(mm, mm) = -Imm;

    data.N = left + gain * data.expM_h;

    Vector rhs = Vector::Zero(2 * mm);
    rhs.head(mm) = -vec(Im);
    data.rcond_N = rcond_estimate(data.N);
    if (!(data.rcond_N >= cfg.rcond_min_N))
        throw LyapunovConditionViolated(
            "boundary matrix N is numerically singular (rcond = " + std::to_string(data.rcond_N) +
            "): the system has characteristic roots s1 + s2 = 0 and no delay Lyapunov matrix");
    data.u = solve_linear(data.N, rhs, cfg.rcond_min_N).x;
    return data;
}

namespace {

Matrix read_U(const LyapunovOperatorData& data, const Vector& w, bool negative_branch) {
    const int mm = data.m * data.m;
    return negative_branch ? unvec(w.tail(mm), data.m, data.m)
                           : unvec(w.head(mm), data.m, data.m);
}

}  // namespace

Matrix eval_U(const LyapunovOperatorData& data, double tau) {
    if (std::abs(tau) > data.h * (1.0 + 1e-12))
        throw OutOfRange("eval_U: |tau| exceeds the delay");
    if (tau >= 0.0) return read_U(data, mat_exp(tau * data.M) * data.u, false);
    return read_U(data, mat_exp((data.h + tau) * data.M) * data.u, true);
}

std::vector<Matrix> eval_U_grid(const LyapunovOperatorData& data, double tau0, double tau1,
                                int count, int refresh_every) {
    if (count < 2) throw InvalidInput("eval_U_grid: need at least two points");
    if (refresh_every < 1) refresh_every = 1;
    const double dtau = (tau1 - tau0) / (count - 1);
    const Matrix Estep = mat_exp(dtau * data.M);
    std::vector<Matrix> out;
    out.reserve(count);

    // The exponent argument is tau on the nonnegative branch and h+tau on the
    // negative one; both advance by dtau, so each branch is one stepped walk.
    Vector w;
    int steps_since_refresh = 0;
    bool have_w = false;
    bool prev_negative = false;
    for (int i = 0; i < count; ++i) {
        const double tau = tau0 + i * dtau;
        const bool negative = tau < 0.0;
        const double s = negative ? data.h + tau : tau;
        if (!have_w || negative != prev_negative || steps_since_refresh >= refresh_every) {
            w = mat_exp(s * data.M) * data.u;
            steps_since_refresh = 0;
            have_w = true;
        } else {
            w = Estep * w;
            ++steps_since_refresh;
        }
        prev_negative = negative;
        out.push_back(read_U(data, w, negative));
    }
    return out;
}

double compute_r(const TimeDelaySystem& sys) {
    return spectral_norm(sys.A) + spectral_norm(sys.Ad);
}

std::pair<double, double> compute_b0_eta0(const TimeDelaySystem& sys, double r,
                                          double bisect_tol) {
    if (!(r > 0.0)) throw InvalidInput("compute_b0_eta0: r must be positive");
    const double hr = sys.h * r;
    auto g = [hr](double b) {
        const double s = std::sin(b);
        return s * s * s * s * (hr * hr + b * b) - hr * hr;
    };
    const double b0 = bisect_root(g, 0.0, M_PI / 2.0, bisect_tol);
    const double c = std::cos(b0);
    const double eta0 = std::exp(-2.0 * r * sys.h) / (4.0 * r) * c * c;
    return {b0, eta0};
}

std::pair<double, double> compute_kappas(const LyapunovOperatorData& data,
                                         const TimeDelaySystem& sys, const Config& cfg) {
    const int G = std::max(2, cfg.kappa_grid);
    double kappa1 = 0.0;
    for (const Matrix& U : eval_U_grid(data, 0.0, data.h, G, cfg.kappa_refresh_every))
        kappa1 = std::max(kappa1, spectral_norm(U * sys.Ad));
    double kappa2 = 0.0;
    for (const Matrix& U : eval_U_grid(data, -data.h, data.h, G, cfg.kappa_refresh_every))
        kappa2 = std::max(kappa2, spectral_norm(sys.Ad.transpose() * U * sys.Ad));
    return {kappa1, kappa2};
}

double epsilon_of_eta(double eta, double h, double kappa1, double kappa2) {
    if (!(eta > 0.0)) throw InvalidInput("epsilon_of_eta: eta must be positive");
    const double c = (kappa1 + kappa2) / (kappa2 + 1.0);
    const double x = eta / (h * (kappa2 + 1.0));
    // Positive root of eps^2 + 2c eps - x, written to survive x << c^2.
    return x / (c + std::sqrt(c * c + x));
}

double log_rho(double mu) {
    if (!(mu > 0.0)) throw InvalidInput("log_rho: mu must be positive");
    const double cm = std::ceil(mu);
    return 0.5 * std::log(2.0 * cm / (M_PI * M_PI * M_PI)) - 2.0 * std::log(mu) +
           (cm + 0.5) * std::log(mu * M_E / (cm + 0.5));
}

int order_estimate(double eps, double mu) {
    if (!(eps > 0.0)) throw InvalidInput("order_estimate: eps must be positive");
    const double lr = log_rho(mu);
    // Lambert argument -log(rho eps)/(mu e), assembled in logs so that huge
    // mu cannot overflow the rho power term.
    const double xw = -(lr + std::log(eps)) / (mu * M_E);
    if (xw <= 0.0) return 4;
    const double n = std::ceil(1.5 + mu * std::exp(1.0 + lambert_w0(xw)));
    if (n >= 2147483000.0) throw OrderTooLarge("order_estimate: bound exceeds integer range");
    return std::max(4, static_cast<int>(n));
}

BoundConstants compute_n_star(const TimeDelaySystem& sys, const LyapunovOperatorData& data,
                              const Config& cfg) {
    BoundConstants c;
    c.r = compute_r(sys);
    if (!(c.r > 0.0))
        throw InvalidInput("compute_n_star: r = 0, the system has no dynamics");
    c.mu = sys.h * c.r / 2.0;
    std::tie(c.b0, c.eta0) = compute_b0_eta0(sys, c.r, cfg.bisect_tol);
    std::tie(c.kappa1, c.kappa2) = compute_kappas(data, sys, cfg);
    c.eps_star = epsilon_of_eta(c.eta0, sys.h, c.kappa1, c.kappa2);
    c.rho = std::exp(log_rho(c.mu));
    c.n_star = order_estimate(c.eps_star, c.mu);
    if (c.n_star > cfg.order_cap)
        throw OrderTooLarge("certified order n* = " + std::to_string(c.n_star) +
                            " exceeds the cap " + std::to_string(cfg.order_cap));
    return c;
}

}  // namespace tds
