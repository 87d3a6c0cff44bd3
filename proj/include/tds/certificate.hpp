#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tds/config.hpp"
#include "tds/delay_system.hpp"
#include "tds/legendre.hpp"
#include "tds/numerics.hpp"

namespace tds {

// Legendre coefficients of the delay Lyapunov matrix U:
//   vec Q_k     = [I 0] Gamma_k u
//   vec T_jk    = [I 0] GammaBar_jk u
//   vec Tflat_jk = [I 0] GammaBarFlat_jk u
struct UCoefficients {
    int m = 0;
    int n = 0;
    std::vector<Matrix> Q;
    std::vector<std::vector<Matrix>> T;
    std::vector<std::vector<Matrix>> Tflat;
};

// The stability certificate at order n: block matrix of size (n+1)m with
//   P(0,0)     = U(0)
//   P(0,k+1)   = Q_k^T Ad
//   P(j+1,k+1) = Ad^T (T_jk + Tflat_jk^T) Ad + delta_jk h/(2j+1) I_m
struct CertificateMatrix {
    int n = 0;
    int m = 0;
    Matrix P;
    double min_eig = 0.0;
};

enum class VerdictKind { Stable, Unstable, Inconclusive };

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    int n_star = 0;
    std::optional<int> first_failing_order;
    double margin = 0.0;  // lambda_min of the decisive certificate
    BoundConstants constants;
    LegendreTable::Source table_source = LegendreTable::Source::recursion;
};

const char* to_string(VerdictKind k);

UCoefficients u_coefficients(const LyapunovOperatorData& data, const LegendreTable& table, int n);

CertificateMatrix assemble_P(const TimeDelaySystem& sys, const LyapunovOperatorData& data,
                             const UCoefficients& coeffs, int n);

enum class Positivity { Positive, NotPositive, Inconclusive };

// Positive iff min_eig > theta (1 + ||P||); within the band => Inconclusive.
Positivity test_positivity(const CertificateMatrix& cert, double theta = 1e-10);

// The exact test: build P at order n* and check positivity once.
StabilityVerdict theorem_test(const TimeDelaySystem& sys, const Config& cfg = {});

// The hierarchical variant: test P_1, P_2, ... and stop at the first
// non-positive order (instability certificate); reaching n_max = n* with all
// orders positive certifies stability.  If n_max < n* is given, a run that
// never fails is Inconclusive (the guarantee order was not reached).
StabilityVerdict hierarchical_sweep(const TimeDelaySystem& sys, const Config& cfg = {},
                                    std::optional<int> n_max = std::nullopt);

// P_1 .. P_n_max assembled from one shared coefficient table, every order
// tested independently (no early stop).  This is what grid membership and
// eigenvalue-interlacing checks consume.
struct CertificateSequence {
    BoundConstants constants;
    LegendreTable::Source table_source = LegendreTable::Source::recursion;
    std::vector<CertificateMatrix> orders;  // orders[i] holds P_{i+1}
};

CertificateSequence certificate_sequence(const TimeDelaySystem& sys, const Config& cfg, int n_max);

}  // namespace tds
