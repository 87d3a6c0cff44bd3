#pragma once

#include <stdexcept>
#include <string>

namespace tds {

// Base class for all library errors; carries a stable code used by the CLI
// to map failures onto process exit codes.
class Error : public std::runtime_error {
public:
    enum class Code {
        invalid_input,
        dimension_mismatch,
        out_of_range,
        non_finite,
        singular_matrix,
        no_sign_change,
        convergence_failure,
        lyapunov_condition_violated,
        order_too_large,
        precision_loss,
        not_scalar,
    };

    Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& w) : Error(Code::invalid_input, w) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& w) : Error(Code::dimension_mismatch, w) {}
};
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& w) : Error(Code::out_of_range, w) {}
};
struct NonFinite : Error {
    explicit NonFinite(const std::string& w) : Error(Code::non_finite, w) {}
};
struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& w) : Error(Code::singular_matrix, w) {}
};
struct NoSignChange : Error {
    explicit NoSignChange(const std::string& w) : Error(Code::no_sign_change, w) {}
};
struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& w) : Error(Code::convergence_failure, w) {}
};

// The boundary matrix N is numerically singular: the system has a pair of
// characteristic roots s1 + s2 = 0 (typically on the stability boundary) and
// the delay Lyapunov matrix is not defined.
struct LyapunovConditionViolated : Error {
    explicit LyapunovConditionViolated(const std::string& w)
        : Error(Code::lyapunov_condition_violated, w) {}
};

struct OrderTooLarge : Error {
    explicit OrderTooLarge(const std::string& w) : Error(Code::order_too_large, w) {}
};

struct PrecisionLoss : Error {
    explicit PrecisionLoss(const std::string& w) : Error(Code::precision_loss, w) {}
};

struct NotScalar : Error {
    explicit NotScalar(const std::string& w) : Error(Code::not_scalar, w) {}
};

}  // namespace tds
