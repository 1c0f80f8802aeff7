#include "rahl/losses.hpp"

#include <cfloat>
#include <cmath>

#include "rahl/errors.hpp"

namespace rahl {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

double sign(double r) { return (r > 0.0) - (r < 0.0); }

// Both Huber variants funnel through these two helpers so that a fixed-delta
// run and a frozen-beta Rahl run with the same effective breakpoint follow
// the identical arithmetic path.
double huber_value(double r, double delta) {
    const double a = std::abs(r);
    if (a <= delta) {
        return 0.5 * r * r;
    }
    return delta * a - 0.5 * delta * delta;
}

double huber_d_pred(double r, double delta) {
    // r = y - pred, so d/d pred = -d/d r.
    if (std::abs(r) <= delta) {
        return -r;
    }
    return -delta * sign(r);
}

}  // namespace

std::string loss_kind_name(LossKind k) {
    switch (k) {
        case LossKind::Mse: return "mse";
        case LossKind::Mae: return "mae";
        case LossKind::Huber: return "huber";
        case LossKind::Rahl: return "rahl";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "mae") return LossKind::Mae;
    if (name == "huber") return LossKind::Huber;
    if (name == "rahl") return LossKind::Rahl;
    throw InvalidArgument("unknown loss kind: " + name);
}

void LossSpec::validate() const {
    switch (kind) {
        case LossKind::Mse:
        case LossKind::Mae:
            return;
        case LossKind::Huber:
            if (!std::isfinite(delta) || delta <= 0.0) {
                throw InvalidArgument("huber delta must be positive and finite");
            }
            return;
        case LossKind::Rahl:
            if (!std::isfinite(alpha) || alpha <= 0.0) {
                throw InvalidArgument("rahl alpha must be positive and finite");
            }
            require_finite(beta, "rahl beta");
            return;
    }
}

double LossSpec::effective_delta() const {
    if (kind == LossKind::Huber) return delta;
    if (kind == LossKind::Rahl) return rahl_delta(alpha, beta);
    return 0.0;
}

double elu(double x, double a) {
    require_finite(x, "elu input");
    if (!std::isfinite(a) || a <= 0.0) {
        throw InvalidArgument("elu scale must be positive and finite");
    }
    return x >= 0.0 ? x : a * std::expm1(x);
}

double elu_deriv(double x, double a) {
    require_finite(x, "elu input");
    if (!std::isfinite(a) || a <= 0.0) {
        throw InvalidArgument("elu scale must be positive and finite");
    }
    return x >= 0.0 ? 1.0 : a * std::exp(x);
}

double rahl_delta(double alpha, double beta) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw InvalidArgument("rahl alpha must be positive and finite");
    }
    require_finite(beta, "rahl beta");
    // alpha + alpha*(e^beta - 1) == alpha*e^beta; the product form avoids the
    // cancellation that would return exactly 0 for beta <~ -37.
    const double d = beta >= 0.0 ? alpha + beta : alpha * std::exp(beta);
    return d > 0.0 ? d : DBL_MIN;
}

double loss_value(const LossSpec& spec, double y, double pred) {
    spec.validate();
    require_finite(y, "y");
    require_finite(pred, "pred");
    const double r = y - pred;
    switch (spec.kind) {
        case LossKind::Mse: return r * r;
        case LossKind::Mae: return std::abs(r);
        case LossKind::Huber: return huber_value(r, spec.delta);
        case LossKind::Rahl: return huber_value(r, rahl_delta(spec.alpha, spec.beta));
    }
    return 0.0;
}

LossGrad loss_grad(const LossSpec& spec, double y, double pred) {
    spec.validate();
    require_finite(y, "y");
    require_finite(pred, "pred");
    const double r = y - pred;
    LossGrad g;
    switch (spec.kind) {
        case LossKind::Mse:
            g.d_pred = -2.0 * r;
            break;
        case LossKind::Mae:
            g.d_pred = -sign(r);
            break;
        case LossKind::Huber:
            g.d_pred = huber_d_pred(r, spec.delta);
            break;
        case LossKind::Rahl: {
            const double delta = rahl_delta(spec.alpha, spec.beta);
            g.d_pred = huber_d_pred(r, delta);
            // The quadratic branch does not contain delta, so beta only
            // receives gradient from samples in the linear branch.
            const double a = std::abs(r);
            g.d_beta = a <= delta ? 0.0 : (a - delta) * elu_deriv(spec.beta, spec.alpha);
            break;
        }
    }
    return g;
}

double batch_loss(const LossSpec& spec, std::span<const double> ys,
                  std::span<const double> preds) {
    if (ys.size() != preds.size()) {
        throw InvalidArgument("batch_loss: length mismatch");
    }
    if (ys.empty()) {
        throw InvalidArgument("batch_loss: empty batch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        sum += loss_value(spec, ys[i], preds[i]);
    }
    return sum / static_cast<double>(ys.size());
}

}  // namespace rahl
