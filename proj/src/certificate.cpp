#include "tds/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace tds {

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::Stable: return "Stable";
        case VerdictKind::Unstable: return "Unstable";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

UCoefficients u_coefficients(const LyapunovOperatorData& data, const LegendreTable& table, int n) {
    if (n < 1 || n > table.n()) throw DimensionMismatch("u_coefficients: order outside table");
    if (table.M_used().rows() != data.M.rows())
        throw DimensionMismatch("u_coefficients: table was built for another system");
    const int m = data.m;
    const int mm = m * m;
    UCoefficients c;
    c.m = m;
    c.n = n;
    c.Q.reserve(n);
    for (int k = 0; k < n; ++k)
        c.Q.push_back(unvec((table.gamma(k) * data.u).head(mm), m, m));
    c.T.assign(n, std::vector<Matrix>(n));
    c.Tflat.assign(n, std::vector<Matrix>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            c.T[j][k] = unvec((table.gamma_bar(j, k) * data.u).head(mm), m, m);
            c.Tflat[j][k] = (((j + k) % 2 == 0) ? 1.0 : -1.0) * c.T[j][k];
        }
    return c;
}

CertificateMatrix assemble_P(const TimeDelaySystem& sys, const LyapunovOperatorData& data,
                             const UCoefficients& coeffs, int n) {
    if (n < 0 || n > coeffs.n) throw DimensionMismatch("assemble_P: order outside coefficients");
    const int m = data.m;
    const int mm = m * m;
    CertificateMatrix cert;
    cert.n = n;
    cert.m = m;
    Matrix& P = cert.P;
    P = Matrix::Zero((n + 1) * m, (n + 1) * m);
    P.topLeftCorner(m, m) = unvec(data.u.head(mm), m, m);  // U(0) = unvec([I 0] e^{0} u)
    for (int k = 0; k < n; ++k) {
        P.block(0, (k + 1) * m, m, m) = coeffs.Q[k].transpose() * sys.Ad;
        P.block((k + 1) * m, 0, m, m) = P.block(0, (k + 1) * m, m, m).transpose();
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Matrix block = sys.Ad.transpose() *
                           (coeffs.T[j][k] + coeffs.Tflat[j][k].transpose()) * sys.Ad;
            if (j == k) block += (sys.h / (2 * j + 1)) * Matrix::Identity(m, m);
            P.block((j + 1) * m, (k + 1) * m, m, m) = block;
        }
    P = 0.5 * (P + P.transpose()).eval();
    cert.min_eig = min_eigenvalue_symmetric(P);
    return cert;
}

Positivity test_positivity(const CertificateMatrix& cert, double theta) {
    const double band = theta * (1.0 + spectral_norm(cert.P));
    if (cert.min_eig > band) return Positivity::Positive;
    if (cert.min_eig < -band) return Positivity::NotPositive;
    return Positivity::Inconclusive;
}

namespace {

StabilityVerdict run_certificate(const TimeDelaySystem& sys, const Config& cfg,
                                 std::optional<int> n_max, bool hierarchical) {
    sys.validate();
    const LyapunovOperatorData data = build_MN(sys, cfg);
    const BoundConstants constants = compute_n_star(sys, data, cfg);

    const int target = n_max ? std::min(*n_max, constants.n_star) : constants.n_star;
    LegendreTable table(data.M, sys.h, target, cfg);
    if (cfg.validate_table) table.validate(cfg);
    const UCoefficients coeffs = u_coefficients(data, table, target);

    StabilityVerdict v;
    v.n_star = constants.n_star;
    v.constants = constants;
    v.table_source = table.source();

    const int first = hierarchical ? 1 : target;
    CertificateMatrix cert;
    for (int n = first; n <= target; ++n) {
        cert = assemble_P(sys, data, coeffs, n);
        if (test_positivity(cert, cfg.positivity_theta) == Positivity::NotPositive) {
            v.kind = VerdictKind::Unstable;
            v.first_failing_order = n;
            v.margin = cert.min_eig;
            return v;
        }
    }
    v.margin = cert.min_eig;
    if (target == constants.n_star &&
        test_positivity(cert, cfg.positivity_theta) == Positivity::Positive)
        v.kind = VerdictKind::Stable;
    else
        v.kind = VerdictKind::Inconclusive;  // borderline, or the guarantee order was not reached
    return v;
}

}  // namespace

StabilityVerdict theorem_test(const TimeDelaySystem& sys, const Config& cfg) {
    return run_certificate(sys, cfg, std::nullopt, false);
}

CertificateSequence certificate_sequence(const TimeDelaySystem& sys, const Config& cfg,
                                         int n_max) {
    if (n_max < 1) throw InvalidInput("certificate_sequence: n_max must be positive");
    sys.validate();
    const LyapunovOperatorData data = build_MN(sys, cfg);

    CertificateSequence seq;
    seq.constants = compute_n_star(sys, data, cfg);
    LegendreTable table(data.M, sys.h, n_max, cfg);
    if (cfg.validate_table) table.validate(cfg);
    seq.table_source = table.source();
    const UCoefficients coeffs = u_coefficients(data, table, n_max);
    seq.orders.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) seq.orders.push_back(assemble_P(sys, data, coeffs, n));
    return seq;
}

StabilityVerdict hierarchical_sweep(const TimeDelaySystem& sys, const Config& cfg,
                                    std::optional<int> n_max) {
    return run_certificate(sys, cfg, n_max, true);
}

}  // namespace tds
