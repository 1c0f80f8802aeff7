#include "rahl/optim.hpp"

#include <cmath>
#include <string>

#include "rahl/errors.hpp"

namespace rahl {

AdamState adam_init(std::size_t n_params, double lr) {
    if (!std::isfinite(lr) || lr <= 0.0) {
        throw InvalidArgument("adam: learning rate must be positive");
    }
    AdamState st;
    st.lr = lr;
    st.m.assign(n_params, 0.0);
    st.v.assign(n_params, 0.0);
    return st;
}

void adam_step(AdamState& state, std::span<const ParamSegment> segments,
               const ParamNamer& namer) {
    std::size_t total = 0;
    for (const ParamSegment& seg : segments) total += seg.n;
    if (total != state.size()) {
        throw InvalidArgument("adam_step: segments cover " + std::to_string(total) +
                              " parameters, state tracks " + std::to_string(state.size()));
    }

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);

    std::size_t k = 0;
    for (const ParamSegment& seg : segments) {
        for (std::size_t i = 0; i < seg.n; ++i, ++k) {
            const double g = seg.grads[i];
            if (!std::isfinite(g)) {
                const std::string name = namer ? namer(k) : "param[" + std::to_string(k) + "]";
                throw TrainingDiverged("non-finite gradient for " + name, 0, 0, name);
            }
            state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
            state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g;
            const double m_hat = state.m[k] / bc1;
            const double v_hat = state.v[k] / bc2;
            seg.params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, const ParamNamer& namer) {
    if (params.size() != grads.size()) {
        throw InvalidArgument("adam_step: params/grads length mismatch");
    }
    const ParamSegment seg{params.data(), grads.data(), params.size()};
    adam_step(state, std::span<const ParamSegment>(&seg, 1), namer);
}

}  // namespace rahl
