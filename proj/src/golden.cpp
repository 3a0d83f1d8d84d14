#include <dscsim/error.hpp>
#include <dscsim/golden.hpp>

#include <algorithm>

namespace dscsim {

namespace {
__extension__ using i128 = __int128;
}  // namespace

std::int8_t requantize(std::int32_t acc, const RequantSpec& spec, std::int8_t out_zp, std::int8_t act_min,
                       std::int8_t act_max) noexcept {
    const std::int64_t t = std::int64_t{acc} + spec.bias;
    const i128 scaled = static_cast<i128>(t) * spec.multiplier + (i128{1} << 30);
    const auto h = static_cast<std::int64_t>(scaled >> 31);
    const std::int64_t r = spec.shift > 0 ? (h + (std::int64_t{1} << (spec.shift - 1))) >> spec.shift : h;
    const std::int64_t v = std::clamp<std::int64_t>(r + out_zp, act_min, act_max);
    return static_cast<std::int8_t>(v);
}

QuantTensor conv1x1(const QuantTensor& in, std::span<const std::int8_t> weights, std::span<const RequantSpec> rq,
                    QuantParams out_qp, Activation act) {
    const std::size_t k_in = in.channels();
    const std::size_t k_out = rq.size();
    if (k_out == 0 || weights.size() != k_out * k_in) {
        throw Error(ErrorCode::ShapeMismatch, "conv1x1 weights do not match " + std::to_string(k_out) + " x " +
                                                  std::to_string(k_in));
    }
    const auto range = activation_range(act, out_qp.zero_point);
    const std::int32_t in_zp = in.zero_point();

    QuantTensor out(in.height(), in.width(), k_out, out_qp);
    for (std::size_t r = 0; r < in.height(); ++r) {
        for (std::size_t c = 0; c < in.width(); ++c) {
            const auto px = in.pixel(r, c);
            for (std::size_t oc = 0; oc < k_out; ++oc) {
                const auto row = weights.subspan(oc * k_in, k_in);
                std::int32_t acc = 0;
                for (std::size_t k = 0; k < k_in; ++k) {
                    acc += (std::int32_t{px[k]} - in_zp) * row[k];
                }
                out.at(r, c, oc) = requantize(acc, rq[oc], out_qp.zero_point, range);
            }
        }
    }
    return out;
}

QuantTensor pad_explicit(const QuantTensor& t) {
    QuantTensor out(t.height() + 2, t.width() + 2, t.channels(), t.qparams());
    for (std::size_t r = 0; r < t.height(); ++r) {
        const auto src = t.data().subspan(t.index(r, 0, 0), t.width() * t.channels());
        std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(out.index(r + 1, 1, 0)));
    }
    return out;
}

QuantTensor dwconv3x3(const QuantTensor& f1_padded, std::span<const std::int8_t> dw_w,
                      std::span<const RequantSpec> rq, QuantParams out_qp, std::size_t stride, Activation act) {
    const std::size_t m_ch = f1_padded.channels();
    if (f1_padded.height() < 3 || f1_padded.width() < 3) {
        throw Error(ErrorCode::ShapeMismatch, "dwconv3x3 needs a padded map of at least 3x3");
    }
    if (dw_w.size() != m_ch * kKernelTaps || rq.size() != m_ch) {
        throw Error(ErrorCode::ShapeMismatch, "dwconv3x3 weights do not match " + std::to_string(m_ch) + " channels");
    }
    if (stride != 1 && stride != 2) {
        throw Error(ErrorCode::BadStride, "stride=" + std::to_string(stride));
    }
    const std::size_t out_h = (f1_padded.height() - 2 + stride - 1) / stride;
    const std::size_t out_w = (f1_padded.width() - 2 + stride - 1) / stride;
    const auto range = activation_range(act, out_qp.zero_point);
    const std::int32_t zp = f1_padded.zero_point();

    QuantTensor out(out_h, out_w, m_ch, out_qp);
    for (std::size_t r = 0; r < out_h; ++r) {
        for (std::size_t c = 0; c < out_w; ++c) {
            for (std::size_t m = 0; m < m_ch; ++m) {
                std::int32_t acc = 0;
                for (std::size_t i = 0; i < 3; ++i) {
                    for (std::size_t j = 0; j < 3; ++j) {
                        const std::int32_t x = f1_padded.at(r * stride + i, c * stride + j, m);
                        acc += (x - zp) * dw_w[m * kKernelTaps + 3 * i + j];
                    }
                }
                out.at(r, c, m) = requantize(acc, rq[m], out_qp.zero_point, range);
            }
        }
    }
    return out;
}

GoldenTrace run_block_golden(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input) {
    validate_config(cfg);
    validate_weights(cfg, weights);
    validate_input(cfg, input);

    GoldenTrace trace;
    trace.f1 = conv1x1(input, weights.ex_w, weights.ex_rq, cfg.ex_out_qp, cfg.ex_act);
    trace.f1_padded = pad_explicit(trace.f1);
    trace.f2 = dwconv3x3(trace.f1_padded, weights.dw_w, weights.dw_rq, cfg.dw_out_qp, cfg.stride, cfg.dw_act);
    trace.out = conv1x1(trace.f2, weights.pr_w, weights.pr_rq, cfg.pr_out_qp, cfg.pr_act);
    return trace;
}

}  // namespace dscsim
