#include "tds/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tds/mpmat.hpp"

namespace tds {

double legendre_eval(const LegendreBasis& basis, int k, double tau) {
    if (k < 0 || k >= basis.n) throw OutOfRange("legendre_eval: index outside basis");
    if (tau < -basis.h * (1.0 + 1e-12) || tau > basis.h * 1e-12)
        throw OutOfRange("legendre_eval: tau outside [-h, 0]");
    const double x = (2.0 * tau + basis.h) / basis.h;
    double p0 = 1.0;
    if (k == 0) return p0;
    double p1 = x;
    for (int j = 2; j <= k; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

std::vector<double> gram_diagonal(const LegendreBasis& basis) {
    std::vector<double> d(basis.n);
    for (int k = 0; k < basis.n; ++k) d[k] = basis.h / (2 * k + 1);
    return d;
}

int required_digits(const Matrix& M, double h, int n) {
    const auto sv = M.jacobiSvd().singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<int>::max();
    double sum = 0.0;
    for (int k = 2; k < n; ++k)
        sum += std::log10(std::max(1.0, 2.0 * (2 * k - 1) / (h * smin)));
    // Rounding errors in the double-moment recursion ride two amplifying
    // legs (down the diagonal seeds, then along the row), so the single-leg
    // exponent enters twice.
    return 30 + static_cast<int>(std::ceil(2.0 * sum));
}

int quadrature_auto_nodes(const Matrix& M, double h, int n, int configured) {
    const double hM = h * spectral_norm(M);
    const int needed = n + 12 + static_cast<int>(std::ceil(0.8 * hM));
    return std::min(2048, std::max(configured > 0 ? configured : 64, needed));
}

namespace {

// All Legendre values l_k(tau_i), k < n, on a node set.
std::vector<std::vector<double>> legendre_rows(double h, int n, const std::vector<double>& taus) {
    std::vector<std::vector<double>> L(n, std::vector<double>(taus.size()));
    for (size_t i = 0; i < taus.size(); ++i) {
        const double x = (2.0 * taus[i] + h) / h;
        double p0 = 1.0, p1 = x;
        if (n > 0) L[0][i] = p0;
        if (n > 1) L[1][i] = p1;
        for (int k = 2; k < n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            L[k][i] = p2;
            p0 = p1;
            p1 = p2;
        }
    }
    return L;
}

// Shared-node quadrature of the moment integrals: caches e^{(h+tau)M} per
// outer node and the inner integrals int_{-h}^{tau1} e^{(tau1-tau2)M} l_k
// per (k, outer node), from which any Gamma_k / GammaBar_jk assembles
// cheaply.
class QuadratureMoments {
public:
    QuadratureMoments(const Matrix& M, double h, int n, int nodes)
        : h_(h), n_(n), nq_(nodes), outer_(gauss_legendre(nodes, -h, 0.0)) {
        const int d = static_cast<int>(M.rows());
        louter_ = legendre_rows(h, n, outer_.nodes);
        eouter_.reserve(nq_);
        for (int i = 0; i < nq_; ++i) eouter_.push_back(mat_exp((h + outer_.nodes[i]) * M));
        inner_.assign(n_, std::vector<Matrix>(nq_, Matrix::Zero(d, d)));
        for (int i1 = 0; i1 < nq_; ++i1) {
            const double tau1 = outer_.nodes[i1];
            const QuadratureRule in = gauss_legendre(nq_, -h, tau1);
            const auto lin = legendre_rows(h, n, in.nodes);
            for (int i2 = 0; i2 < nq_; ++i2) {
                const Matrix E = mat_exp((tau1 - in.nodes[i2]) * M);
                for (int k = 0; k < n_; ++k) {
                    const double c = in.weights[i2] * lin[k][i2];
                    if (c != 0.0) inner_[k][i1] += c * E;
                }
            }
        }
    }

    Matrix gamma(int k) const {
        Matrix out = Matrix::Zero(eouter_[0].rows(), eouter_[0].cols());
        for (int i = 0; i < nq_; ++i) out += outer_.weights[i] * louter_[k][i] * eouter_[i];
        return out;
    }

    Matrix gamma_bar(int j, int k) const {
        Matrix out = Matrix::Zero(eouter_[0].rows(), eouter_[0].cols());
        for (int i = 0; i < nq_; ++i) out += outer_.weights[i] * louter_[j][i] * inner_[k][i];
        return out;
    }

    // Inner integral taken from tau1 to 0 instead (defining integral of the
    // flat variant), for independent parity checks.
    Matrix gamma_flat(const Matrix& M, int j, int k) const {
        const int d = static_cast<int>(M.rows());
        Matrix out = Matrix::Zero(d, d);
        for (int i1 = 0; i1 < nq_; ++i1) {
            const double tau1 = outer_.nodes[i1];
            const QuadratureRule in = gauss_legendre(nq_, tau1, 0.0);
            const auto lin = legendre_rows(h_, n_, in.nodes);
            Matrix acc = Matrix::Zero(d, d);
            for (int i2 = 0; i2 < nq_; ++i2)
                acc += in.weights[i2] * lin[k][i2] * mat_exp((in.nodes[i2] - tau1) * M);
            out += outer_.weights[i1] * louter_[j][i1] * acc;
        }
        return out;
    }

private:
    double h_;
    int n_;
    int nq_;
    QuadratureRule outer_;
    std::vector<std::vector<double>> louter_;  // l_k at outer nodes
    std::vector<Matrix> eouter_;               // e^{(h+tau_i) M}
    std::vector<std::vector<Matrix>> inner_;   // inner_[k][i1]
};

template <unsigned D>
using bf = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<D>>;

// Forward recursions of the moment matrices, carried in scalar type T and
// rounded to double on completion.  Only a three-row window of the GammaBar
// table is alive in T at any time.
template <class T>
void build_tables_recursive(const Matrix& M, double h, int n, std::vector<Matrix>& gamma_out,
                            std::vector<std::vector<Matrix>>& gamma_bar_out) {
    using mpmat::Mat;
    const int d = static_cast<int>(M.rows());
    const T hh(h);
    const Mat<T> Mt = mpmat::from_double<T>(M);
    const Mat<T> I = Mat<T>::identity(d);
    const Mat<T> E = mpmat::exponential(mpmat::scale(Mt, hh));
    const Mat<T> Minv = mpmat::inverse(Mt);

    std::vector<Mat<T>> G;
    G.reserve(std::max(n, 2));
    G.push_back(mpmat::mul(Minv, mpmat::sub(E, I)));
    {
        Mat<T> g1 = mpmat::mul(Minv, mpmat::add(E, I));
        g1 = mpmat::sub(g1, mpmat::scale(mpmat::mul(Minv, G[0]), T(2) / hh));
        G.push_back(std::move(g1));
    }
    for (int k = 2; k < n; ++k)
        G.push_back(mpmat::sub(G[k - 2], mpmat::scale(mpmat::mul(Minv, G[k - 1]),
                                                      T(2 * (2 * k - 1)) / hh)));

    gamma_out.resize(n);
    for (int k = 0; k < n; ++k) gamma_out[k] = mpmat::to_double(G[k]);

    gamma_bar_out.assign(n, std::vector<Matrix>(n));
    std::vector<Mat<T>> prev2, prev1, row;  // row r stores columns r..n-1 at [k-r]
    for (int j = 0; j < n; ++j) {
        row.assign(n - j, Mat<T>());
        const Mat<T> Dj = mpmat::scale(Minv, hh / T(2 * j + 1));
        for (int k = j; k < n; ++k) {
            Mat<T> val;
            if (j == 0 && k == 0) {
                Mat<T> b = G[0];
                mpmat::add_diag(b, -hh);
                val = mpmat::mul(Minv, b);
            } else if (j == 0 && k == 1) {
                val = mpmat::scale(mpmat::mul(Minv, G[1]), T(-1));
            } else if (j == 1 && k == 1) {
                Mat<T> b = mpmat::sub(mpmat::scale(mpmat::mul(Minv, G[1]), T(2) / hh), G[1]);
                mpmat::add_diag(b, -hh / T(3));
                val = mpmat::mul(Minv, b);
            } else {
                // columns k-1, k-2; below the row start they mirror earlier rows
                // with the parity sign (-1)^{j+k}.
                auto fetch = [&](int kk) -> Mat<T> {
                    if (kk >= j) return row[kk - j];
                    if (kk == j - 1) return mpmat::scale(prev1[1], T(-1));
                    return prev2[2];  // kk == j-2, even index sum
                };
                val = mpmat::add(fetch(k - 2),
                                 mpmat::scale(mpmat::mul(Minv, fetch(k - 1)),
                                              T(2 * (2 * k - 1)) / hh));
                if (k == j) val = mpmat::sub(val, Dj);
                if (k == j + 2) val = mpmat::add(val, Dj);
            }
            row[k - j] = std::move(val);
        }
        for (int k = j; k < n; ++k) gamma_bar_out[j][k] = mpmat::to_double(row[k - j]);
        prev2 = std::move(prev1);
        prev1 = std::move(row);
        row.clear();
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < j; ++k)
            gamma_bar_out[j][k] = (((j + k) % 2 == 0) ? 1.0 : -1.0) * gamma_bar_out[k][j];
}

double table_scale(const std::vector<Matrix>& ms) {
    double s = 0.0;
    for (const auto& m : ms) s = std::max(s, m.norm());
    return s;
}

// Relative error floored at a fraction of the table scale: entries that
// decay below roundoff of the scale are compared absolutely against S/1000.
double mixed_error(const Matrix& a, const Matrix& b, double scale) {
    const double denom = std::max({a.norm(), b.norm(), 1e-3 * scale});
    return (a - b).norm() / denom;
}

}  // namespace

LegendreTable::LegendreTable(const Matrix& M, double h, int n, const Config& cfg)
    : n_(n), h_(h), M_(M) {
    if (n < 1) throw InvalidInput("LegendreTable: order must be at least 1");
    if (!(h > 0.0)) throw InvalidInput("LegendreTable: h must be positive");
    if (M.rows() != M.cols()) throw DimensionMismatch("LegendreTable: M must be square");
    require_finite(M, "LegendreTable M");

    int digits = std::numeric_limits<int>::max();
    if (rcond_estimate(M) >= cfg.rcond_min_M) digits = required_digits(M, h, n);

    if (digits <= 15) {
        build_tables_recursive<double>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 15;
    } else if (digits <= 50 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<50>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 50;
    } else if (digits <= 100 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<100>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 100;
    } else if (digits <= 200 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<200>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 200;
    } else if (digits <= 400 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<400>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 400;
    } else if (digits <= 800 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<800>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 800;
    } else if (digits <= 1600 && digits <= cfg.table_digits_cap) {
        build_tables_recursive<bf<1600>>(M, h, n, gamma_, gamma_bar_);
        digits_used_ = 1600;
    } else {
        // Singular M or precision demand beyond the cap: integrate instead.
        source_ = Source::quadrature;
        const int nodes = quadrature_auto_nodes(M, h, n, cfg.quad_nodes);
        QuadratureMoments q(M, h, n, nodes);
        gamma_.resize(n);
        for (int k = 0; k < n; ++k) gamma_[k] = q.gamma(k);
        gamma_bar_.assign(n, std::vector<Matrix>(n));
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                gamma_bar_[j][k] = q.gamma_bar(j, k);
                if (k > j)
                    gamma_bar_[k][j] =
                        (((j + k) % 2 == 0) ? 1.0 : -1.0) * gamma_bar_[j][k];
            }
    }
}

const Matrix& LegendreTable::gamma(int k) const {
    if (k < 0 || k >= n_) throw OutOfRange("gamma: index outside table");
    return gamma_[k];
}

const Matrix& LegendreTable::gamma_bar(int j, int k) const {
    if (j < 0 || j >= n_ || k < 0 || k >= n_) throw OutOfRange("gamma_bar: index outside table");
    return gamma_bar_[j][k];
}

Matrix LegendreTable::gamma_flat(int j, int k) const {
    return (((j + k) % 2 == 0) ? 1.0 : -1.0) * gamma_bar(j, k);
}

void LegendreTable::validate(const Config& cfg) const {
    const int nodes = quadrature_auto_nodes(M_, h_, n_, cfg.quad_nodes);
    QuadratureMoments q(M_, h_, n_, nodes);

    std::vector<Matrix> qgamma(n_);
    for (int k = 0; k < n_; ++k) qgamma[k] = q.gamma(k);
    const double sg = table_scale(qgamma);

    double worst = 0.0;
    std::string worst_at;
    for (int k = 0; k < n_; ++k) {
        const double e = mixed_error(gamma_[k], qgamma[k], sg);
        if (e > worst) {
            worst = e;
            worst_at = "Gamma_" + std::to_string(k);
        }
    }

    std::vector<int> rows{0, n_ / 2, n_ - 1};
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::vector<Matrix> qrows;
    for (int j : rows)
        for (int k = 0; k < n_; ++k) qrows.push_back(q.gamma_bar(j, k));
    const double sb = table_scale(qrows);
    size_t idx = 0;
    for (int j : rows)
        for (int k = 0; k < n_; ++k, ++idx) {
            const double e = mixed_error(gamma_bar_[j][k], qrows[idx], sb);
            if (e > worst) {
                worst = e;
                worst_at = "GammaBar_" + std::to_string(j) + "," + std::to_string(k);
            }
        }

    if (worst > cfg.validate_tol) {
        std::ostringstream msg;
        msg << "moment table failed quadrature cross-check: error " << worst << " at " << worst_at
            << " (tolerance " << cfg.validate_tol << ", source "
            << (source_ == Source::recursion ? "recursion" : "quadrature") << ", digits "
            << digits_used_ << ")";
        throw PrecisionLoss(msg.str());
    }
}

Matrix quadrature_gamma(const Matrix& M, double h, int k, int nodes) {
    const int nq = quadrature_auto_nodes(M, h, k + 1, nodes);
    const QuadratureRule rule = gauss_legendre(nq, -h, 0.0);
    const auto L = legendre_rows(h, k + 1, rule.nodes);
    Matrix out = Matrix::Zero(M.rows(), M.cols());
    for (int i = 0; i < nq; ++i)
        out += rule.weights[i] * L[k][i] * mat_exp((h + rule.nodes[i]) * M);
    return out;
}

Matrix quadrature_gamma_bar(const Matrix& M, double h, int j, int k, int nodes) {
    const int n = std::max(j, k) + 1;
    QuadratureMoments q(M, h, n, quadrature_auto_nodes(M, h, n, nodes));
    return q.gamma_bar(j, k);
}

Matrix quadrature_gamma_flat(const Matrix& M, double h, int j, int k, int nodes) {
    const int n = std::max(j, k) + 1;
    QuadratureMoments q(M, h, n, quadrature_auto_nodes(M, h, n, nodes));
    return q.gamma_flat(M, j, k);
}

}  // namespace tds
