#pragma once

#include <optional>
#include <span>
#include <string>

namespace rahl {

enum class LossKind { Mse, Mae, Huber, Rahl };

std::string loss_kind_name(LossKind k);
LossKind loss_kind_from_name(const std::string& name);

/// Selects one of the four training losses.
///
/// Huber uses a fixed breakpoint `delta`. Rahl replaces the fixed breakpoint
/// with delta = alpha + ELU(beta; alpha), where `alpha` is both the initial
/// breakpoint and the ELU scale (the two are tied so the effective breakpoint
/// stays positive for every finite beta) and `beta` is trained alongside the
/// model weights.
struct LossSpec {
    LossKind kind = LossKind::Mse;
    double delta = 1.0;  // Huber only
    double alpha = 1.0;  // Rahl only
    double beta = 0.0;   // Rahl only, learnable

    static LossSpec mse() { return {LossKind::Mse, 0, 0, 0}; }
    static LossSpec mae() { return {LossKind::Mae, 0, 0, 0}; }
    static LossSpec huber(double delta) { return {LossKind::Huber, delta, 0, 0}; }
    static LossSpec rahl(double alpha, double beta = 0.0) {
        return {LossKind::Rahl, 0, alpha, beta};
    }

    /// Throws InvalidArgument if the active variant's fields are out of range.
    void validate() const;

    /// The breakpoint currently in effect (Huber: delta; Rahl: derived from
    /// alpha and beta). Meaningless for Mse/Mae.
    double effective_delta() const;
};

struct LossGrad {
    double d_pred = 0.0;                // d loss / d prediction
    std::optional<double> d_beta;       // d loss / d beta, Rahl only
};

/// ELU with scale `a`: x for x >= 0, a*(e^x - 1) otherwise.
double elu(double x, double a);

/// Derivative of elu(x, a) in x: 1 for x >= 0, a*e^x otherwise.
double elu_deriv(double x, double a);

/// Effective Rahl breakpoint alpha + elu(beta, alpha). For beta < 0 this is
/// computed in the algebraically identical form alpha*e^beta, which stays
/// positive where the literal sum would round to zero; the result is clamped
/// to DBL_MIN so it is > 0 for every finite beta.
double rahl_delta(double alpha, double beta);

/// Per-sample loss. Mse is the unhalved squared error; the Huber/Rahl
/// quadratic branch keeps its 1/2 factor. |y - pred| == delta evaluates the
/// quadratic branch.
double loss_value(const LossSpec& spec, double y, double pred);

/// Analytic derivatives of loss_value. d_beta is populated iff spec is Rahl;
/// it is zero in the quadratic branch (which does not contain delta).
LossGrad loss_grad(const LossSpec& spec, double y, double pred);

/// Arithmetic mean of per-sample losses. Lengths must match and be nonzero.
double batch_loss(const LossSpec& spec, std::span<const double> ys,
                  std::span<const double> preds);

}  // namespace rahl
