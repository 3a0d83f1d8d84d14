#pragma once

#include <dscsim/core_types.hpp>

#include <cstdint>
#include <span>

namespace dscsim {

/// Fixed-point requantization of a 32-bit accumulator:
///   t = acc + bias                          (64-bit, never wraps)
///   h = (t * multiplier + 2^30) >> 31       (arithmetic, 128-bit product)
///   r = shift ? (h + 2^(shift-1)) >> shift : h
///   out = clamp(r + out_zp, act_min, act_max)
std::int8_t requantize(std::int32_t acc, const RequantSpec& spec, std::int8_t out_zp, std::int8_t act_min,
                       std::int8_t act_max) noexcept;

inline std::int8_t requantize(std::int32_t acc, const RequantSpec& spec, std::int8_t out_zp,
                              ActivationRange range) noexcept {
    return requantize(acc, spec, out_zp, range.min, range.max);
}

/// Pointwise convolution. weights holds rq.size() rows of in.channels() values.
QuantTensor conv1x1(const QuantTensor& in, std::span<const std::int8_t> weights, std::span<const RequantSpec> rq,
                    QuantParams out_qp, Activation act);

/// SAME padding by one pixel on every side, border = t.zero_point().
QuantTensor pad_explicit(const QuantTensor& t);

/// 3x3 depthwise convolution over an already padded map. Output pixel (r, c)
/// reads padded rows r*stride .. r*stride+2 and the matching columns.
QuantTensor dwconv3x3(const QuantTensor& f1_padded, std::span<const std::int8_t> dw_w,
                      std::span<const RequantSpec> rq, QuantParams out_qp, std::size_t stride, Activation act);

/// Every intermediate map of a layer-by-layer block run.
struct GoldenTrace {
    QuantTensor f1;
    QuantTensor f1_padded;
    QuantTensor f2;
    QuantTensor out;
};

GoldenTrace run_block_golden(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input);

}  // namespace dscsim
