#include "rahl/model.hpp"

#include <algorithm>
#include <cmath>

#include "rahl/errors.hpp"
#include "rahl/kernels.hpp"
#include "rahl/rng.hpp"

namespace rahl {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr const char* kGateNames[4] = {"input", "forget", "candidate", "output"};

}  // namespace

void ModelConfig::validate() const {
    if (input_size < 1 || hidden_size < 1 || fc_hidden < 1) {
        throw InvalidArgument("model sizes must be >= 1");
    }
}

LstmParams::LstmParams(const ModelConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    const std::size_t h = cfg.hidden_size, i = cfg.input_size, f = cfg.fc_hidden;
    data_.assign(4 * h * i + 4 * h * h + 4 * h + f * h + f + f + 1, 0.0);
}

std::size_t LstmParams::w_off(Gate g) const {
    return static_cast<std::size_t>(g) * cfg_.hidden_size * cfg_.input_size;
}

std::size_t LstmParams::u_off(Gate g) const {
    return 4 * cfg_.hidden_size * cfg_.input_size +
           static_cast<std::size_t>(g) * cfg_.hidden_size * cfg_.hidden_size;
}

std::size_t LstmParams::b_off(Gate g) const {
    return 4 * cfg_.hidden_size * cfg_.input_size + 4 * cfg_.hidden_size * cfg_.hidden_size +
           static_cast<std::size_t>(g) * cfg_.hidden_size;
}

std::span<double> LstmParams::w(Gate g) {
    return {data_.data() + w_off(g), cfg_.hidden_size * cfg_.input_size};
}
std::span<const double> LstmParams::w(Gate g) const {
    return {data_.data() + w_off(g), cfg_.hidden_size * cfg_.input_size};
}
std::span<double> LstmParams::u(Gate g) {
    return {data_.data() + u_off(g), cfg_.hidden_size * cfg_.hidden_size};
}
std::span<const double> LstmParams::u(Gate g) const {
    return {data_.data() + u_off(g), cfg_.hidden_size * cfg_.hidden_size};
}
std::span<double> LstmParams::b(Gate g) {
    return {data_.data() + b_off(g), cfg_.hidden_size};
}
std::span<const double> LstmParams::b(Gate g) const {
    return {data_.data() + b_off(g), cfg_.hidden_size};
}

std::span<double> LstmParams::fc_weight() {
    return {data_.data() + b_off(Gate::Output) + cfg_.hidden_size,
            cfg_.fc_hidden * cfg_.hidden_size};
}
std::span<const double> LstmParams::fc_weight() const {
    return {data_.data() + b_off(Gate::Output) + cfg_.hidden_size,
            cfg_.fc_hidden * cfg_.hidden_size};
}
std::span<double> LstmParams::fc_bias() {
    const std::size_t off = b_off(Gate::Output) + cfg_.hidden_size +
                            cfg_.fc_hidden * cfg_.hidden_size;
    return {data_.data() + off, cfg_.fc_hidden};
}
std::span<const double> LstmParams::fc_bias() const {
    const std::size_t off = b_off(Gate::Output) + cfg_.hidden_size +
                            cfg_.fc_hidden * cfg_.hidden_size;
    return {data_.data() + off, cfg_.fc_hidden};
}
std::span<double> LstmParams::out_weight() {
    const std::size_t off = b_off(Gate::Output) + cfg_.hidden_size +
                            cfg_.fc_hidden * cfg_.hidden_size + cfg_.fc_hidden;
    return {data_.data() + off, cfg_.fc_hidden};
}
std::span<const double> LstmParams::out_weight() const {
    const std::size_t off = b_off(Gate::Output) + cfg_.hidden_size +
                            cfg_.fc_hidden * cfg_.hidden_size + cfg_.fc_hidden;
    return {data_.data() + off, cfg_.fc_hidden};
}
double& LstmParams::out_bias() { return data_.back(); }
double LstmParams::out_bias() const { return data_.back(); }

void LstmParams::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string LstmParams::name_at(std::size_t idx) const {
    const std::size_t h = cfg_.hidden_size, in = cfg_.input_size, f = cfg_.fc_hidden;
    std::size_t off = idx;
    for (int g = 0; g < 4; ++g) {
        if (off < h * in) return "w_" + std::string(kGateNames[g]) + "[" + std::to_string(off) + "]";
        off -= h * in;
    }
    for (int g = 0; g < 4; ++g) {
        if (off < h * h) return "u_" + std::string(kGateNames[g]) + "[" + std::to_string(off) + "]";
        off -= h * h;
    }
    for (int g = 0; g < 4; ++g) {
        if (off < h) return "b_" + std::string(kGateNames[g]) + "[" + std::to_string(off) + "]";
        off -= h;
    }
    if (off < f * h) return "fc_weight[" + std::to_string(off) + "]";
    off -= f * h;
    if (off < f) return "fc_bias[" + std::to_string(off) + "]";
    off -= f;
    if (off < f) return "out_weight[" + std::to_string(off) + "]";
    return "out_bias";
}

std::uint64_t LstmParams::fingerprint() const {
    return fnv1a(data_.data(), data_.size() * sizeof(double));
}

void ForwardTrace::resize(std::size_t t, const ModelConfig& c) {
    steps = t;
    cfg = c;
    x.resize(t * c.input_size);
    const std::size_t th = t * c.hidden_size;
    gate_i.resize(th);
    gate_f.resize(th);
    gate_g.resize(th);
    gate_o.resize(th);
    cell.resize(th);
    cell_tanh.resize(th);
    hidden.resize(th);
    fc_pre.resize(c.fc_hidden);
    fc_post.resize(c.fc_hidden);
}

LstmParams init_params(const ModelConfig& cfg) {
    cfg.validate();
    LstmParams p(cfg);
    RngStream rng(cfg.seed);
    const double k = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));

    auto draw = [&](std::span<double> dst) {
        for (double& v : dst) v = rng.uniform(-k, k);
    };
    for (Gate g : {Gate::Input, Gate::Forget, Gate::Candidate, Gate::Output}) draw(p.w(g));
    for (Gate g : {Gate::Input, Gate::Forget, Gate::Candidate, Gate::Output}) draw(p.u(g));
    draw(p.fc_weight());
    draw(p.out_weight());

    // Forget-gate bias 1 keeps early cell-state memory open; every other
    // bias starts at 0.
    for (double& v : p.b(Gate::Forget)) v = 1.0;
    return p;
}

double forward(const LstmParams& params, std::span<const double> window,
               ForwardTrace& trace) {
    const ModelConfig& cfg = params.config();
    const std::size_t in = cfg.input_size, h = cfg.hidden_size, f = cfg.fc_hidden;
    if (window.empty() || window.size() % in != 0) {
        throw InvalidArgument("forward: window must be a nonempty multiple of input_size");
    }
    for (double v : window) {
        if (!std::isfinite(v)) throw InvalidArgument("forward: non-finite window entry");
    }
    const std::size_t steps = window.size() / in;
    trace.resize(steps, cfg);
    std::copy(window.begin(), window.end(), trace.x.begin());

    const double* wi = params.w(Gate::Input).data();
    const double* wf = params.w(Gate::Forget).data();
    const double* wg = params.w(Gate::Candidate).data();
    const double* wo = params.w(Gate::Output).data();
    const double* ui = params.u(Gate::Input).data();
    const double* uf = params.u(Gate::Forget).data();
    const double* ug = params.u(Gate::Candidate).data();
    const double* uo = params.u(Gate::Output).data();
    const double* bi = params.b(Gate::Input).data();
    const double* bf = params.b(Gate::Forget).data();
    const double* bg = params.b(Gate::Candidate).data();
    const double* bo = params.b(Gate::Output).data();

    static thread_local std::vector<double> zeros;
    zeros.assign(h, 0.0);

    for (std::size_t t = 0; t < steps; ++t) {
        const double* xt = window.data() + t * in;
        const double* h_prev = t == 0 ? zeros.data() : trace.hidden.data() + (t - 1) * h;
        const double* c_prev = t == 0 ? zeros.data() : trace.cell.data() + (t - 1) * h;

        double* it = trace.gate_i.data() + t * h;
        double* ft = trace.gate_f.data() + t * h;
        double* gt = trace.gate_g.data() + t * h;
        double* ot = trace.gate_o.data() + t * h;
        double* ct = trace.cell.data() + t * h;
        double* tct = trace.cell_tanh.data() + t * h;
        double* ht = trace.hidden.data() + t * h;

        for (std::size_t j = 0; j < h; ++j) {
            double pi = bi[j], pf = bf[j], pg = bg[j], po = bo[j];
            for (std::size_t k = 0; k < in; ++k) {
                pi += wi[j * in + k] * xt[k];
                pf += wf[j * in + k] * xt[k];
                pg += wg[j * in + k] * xt[k];
                po += wo[j * in + k] * xt[k];
            }
            pi += dot(ui + j * h, h_prev, h);
            pf += dot(uf + j * h, h_prev, h);
            pg += dot(ug + j * h, h_prev, h);
            po += dot(uo + j * h, h_prev, h);

            it[j] = sigmoid(pi);
            ft[j] = sigmoid(pf);
            gt[j] = std::tanh(pg);
            ot[j] = sigmoid(po);
            ct[j] = ft[j] * c_prev[j] + it[j] * gt[j];
            tct[j] = std::tanh(ct[j]);
            ht[j] = ot[j] * tct[j];
        }
    }

    const double* h_last = trace.hidden.data() + (steps - 1) * h;
    const double* fcw = params.fc_weight().data();
    const double* fcb = params.fc_bias().data();
    for (std::size_t q = 0; q < f; ++q) {
        trace.fc_pre[q] = fcb[q] + dot(fcw + q * h, h_last, h);
        trace.fc_post[q] = trace.fc_pre[q] > 0.0 ? trace.fc_pre[q] : 0.0;
    }
    trace.prediction = params.out_bias() + dot(params.out_weight().data(), trace.fc_post.data(), f);
    return trace.prediction;
}

std::pair<double, ForwardTrace> forward(const LstmParams& params,
                                        std::span<const double> window) {
    ForwardTrace trace;
    double pred = forward(params, window, trace);
    return {pred, std::move(trace)};
}

double predict(const LstmParams& params, std::span<const double> window) {
    static thread_local ForwardTrace trace;
    return forward(params, window, trace);
}

void backward_accumulate(const LstmParams& params, const ForwardTrace& trace,
                         double d_prediction, LstmGrads& grads,
                         BackwardScratch& s) {
    const ModelConfig& cfg = params.config();
    if (!trace.cfg.same_shape(cfg) || !grads.config().same_shape(cfg) || trace.steps == 0) {
        throw InvalidArgument("backward: trace/params/grads shape mismatch");
    }
    const std::size_t in = cfg.input_size, h = cfg.hidden_size, f = cfg.fc_hidden;
    const std::size_t steps = trace.steps;

    s.dh.assign(h, 0.0);
    s.dh_prev.assign(h, 0.0);
    s.dc.assign(h, 0.0);
    s.da_i.resize(h);
    s.da_f.resize(h);
    s.da_g.resize(h);
    s.da_o.resize(h);
    s.d_fc_pre.resize(f);

    // Head: pred = out_b + out_w . relu(fc_w h_T + fc_b)
    grads.out_bias() += d_prediction;
    const double* fc_post = trace.fc_post.data();
    axpy(d_prediction, fc_post, grads.out_weight().data(), f);

    const double* out_w = params.out_weight().data();
    for (std::size_t q = 0; q < f; ++q) {
        const double d_post = d_prediction * out_w[q];
        s.d_fc_pre[q] = trace.fc_pre[q] > 0.0 ? d_post : 0.0;
    }

    const double* h_last = trace.hidden.data() + (steps - 1) * h;
    double* g_fc_w = grads.fc_weight().data();
    double* g_fc_b = grads.fc_bias().data();
    const double* fc_w = params.fc_weight().data();
    for (std::size_t q = 0; q < f; ++q) {
        const double d = s.d_fc_pre[q];
        g_fc_b[q] += d;
        axpy(d, h_last, g_fc_w + q * h, h);
        axpy(d, fc_w + q * h, s.dh.data(), h);
    }

    const double* ui = params.u(Gate::Input).data();
    const double* uf = params.u(Gate::Forget).data();
    const double* ug = params.u(Gate::Candidate).data();
    const double* uo = params.u(Gate::Output).data();

    double* gwi = grads.w(Gate::Input).data();
    double* gwf = grads.w(Gate::Forget).data();
    double* gwg = grads.w(Gate::Candidate).data();
    double* gwo = grads.w(Gate::Output).data();
    double* gui = grads.u(Gate::Input).data();
    double* guf = grads.u(Gate::Forget).data();
    double* gug = grads.u(Gate::Candidate).data();
    double* guo = grads.u(Gate::Output).data();
    double* gbi = grads.b(Gate::Input).data();
    double* gbf = grads.b(Gate::Forget).data();
    double* gbg = grads.b(Gate::Candidate).data();
    double* gbo = grads.b(Gate::Output).data();

    static thread_local std::vector<double> zeros;
    zeros.assign(h, 0.0);

    for (std::size_t tt = steps; tt-- > 0;) {
        const double* it = trace.gate_i.data() + tt * h;
        const double* ft = trace.gate_f.data() + tt * h;
        const double* gt = trace.gate_g.data() + tt * h;
        const double* ot = trace.gate_o.data() + tt * h;
        const double* tct = trace.cell_tanh.data() + tt * h;
        const double* c_prev = tt == 0 ? zeros.data() : trace.cell.data() + (tt - 1) * h;
        const double* h_prev = tt == 0 ? zeros.data() : trace.hidden.data() + (tt - 1) * h;
        const double* xt = trace.x.data() + tt * in;

        for (std::size_t j = 0; j < h; ++j) {
            const double dh = s.dh[j];
            const double d_o = dh * tct[j];
            s.da_o[j] = d_o * ot[j] * (1.0 - ot[j]);
            const double dc = s.dc[j] + dh * ot[j] * (1.0 - tct[j] * tct[j]);
            s.da_f[j] = dc * c_prev[j] * ft[j] * (1.0 - ft[j]);
            s.da_i[j] = dc * gt[j] * it[j] * (1.0 - it[j]);
            s.da_g[j] = dc * it[j] * (1.0 - gt[j] * gt[j]);
            s.dc[j] = dc * ft[j];  // carries to t-1
        }

        std::fill(s.dh_prev.begin(), s.dh_prev.end(), 0.0);
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t k = 0; k < in; ++k) {
                gwi[j * in + k] += s.da_i[j] * xt[k];
                gwf[j * in + k] += s.da_f[j] * xt[k];
                gwg[j * in + k] += s.da_g[j] * xt[k];
                gwo[j * in + k] += s.da_o[j] * xt[k];
            }
            gbi[j] += s.da_i[j];
            gbf[j] += s.da_f[j];
            gbg[j] += s.da_g[j];
            gbo[j] += s.da_o[j];
            axpy(s.da_i[j], h_prev, gui + j * h, h);
            axpy(s.da_f[j], h_prev, guf + j * h, h);
            axpy(s.da_g[j], h_prev, gug + j * h, h);
            axpy(s.da_o[j], h_prev, guo + j * h, h);
            axpy(s.da_i[j], ui + j * h, s.dh_prev.data(), h);
            axpy(s.da_f[j], uf + j * h, s.dh_prev.data(), h);
            axpy(s.da_g[j], ug + j * h, s.dh_prev.data(), h);
            axpy(s.da_o[j], uo + j * h, s.dh_prev.data(), h);
        }
        std::swap(s.dh, s.dh_prev);
    }
}

LstmGrads backward(const LstmParams& params, const ForwardTrace& trace,
                   double d_prediction) {
    LstmGrads grads(params.config());
    BackwardScratch scratch;
    backward_accumulate(params, trace, d_prediction, grads, scratch);
    return grads;
}

}  // namespace rahl
