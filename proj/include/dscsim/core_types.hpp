#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dscsim {

/// Affine INT8 quantization: real = scale * (q - zero_point).
struct QuantParams {
    float scale = 1.0f;
    std::int8_t zero_point = 0;

    friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

/// NHWC (channel-fastest) signed 8-bit activation tensor.
class QuantTensor {
public:
    QuantTensor() = default;

    /// All elements initialised to the zero point (real value 0).
    QuantTensor(std::size_t height, std::size_t width, std::size_t channels, QuantParams qparams);
    QuantTensor(std::size_t height, std::size_t width, std::size_t channels, QuantParams qparams,
                std::vector<std::int8_t> data);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    const QuantParams& qparams() const noexcept { return qparams_; }
    std::int8_t zero_point() const noexcept { return qparams_.zero_point; }

    /// Linear NHWC offset; throws OutOfBounds.
    std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const;

    std::int8_t at(std::size_t row, std::size_t col, std::size_t ch) const { return data_[index(row, col, ch)]; }
    std::int8_t& at(std::size_t row, std::size_t col, std::size_t ch) { return data_[index(row, col, ch)]; }

    /// The channel vector of one pixel.
    std::span<const std::int8_t> pixel(std::size_t row, std::size_t col) const;

    std::span<const std::int8_t> data() const noexcept { return data_; }
    std::span<std::int8_t> data() noexcept { return data_; }

    friend bool operator==(const QuantTensor&, const QuantTensor&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    QuantParams qparams_{};
    std::vector<std::int8_t> data_;
};

/// Free-function form of QuantTensor::index.
std::size_t tensor_index(const QuantTensor& t, std::size_t row, std::size_t col, std::size_t ch);

/// Fixed-point requantization parameters for one output channel.
/// multiplier is read as multiplier / 2^31 and lies in [2^30, 2^31).
struct RequantSpec {
    std::int32_t multiplier = std::int32_t{1} << 30;
    std::int32_t shift = 0;
    std::int32_t bias = 0;

    friend bool operator==(const RequantSpec&, const RequantSpec&) = default;
};

inline constexpr std::int64_t kMinMultiplier = std::int64_t{1} << 30;
inline constexpr std::int64_t kMaxMultiplier = (std::int64_t{1} << 31) - 1;
inline constexpr std::int32_t kMaxShift = 31;

/// Throws BadQuantParams if the multiplier or shift is out of range.
void validate_requant(const RequantSpec& spec);

/// Stage activation. Clamped stages model quantized ReLU: values below the
/// output zero point saturate to it. `ceiling` expresses ReLU6-style caps.
struct Activation {
    bool clamped = false;
    std::int8_t ceiling = 127;

    friend bool operator==(const Activation&, const Activation&) = default;
};

struct ActivationRange {
    std::int8_t min;
    std::int8_t max;
};

ActivationRange activation_range(const Activation& act, std::int8_t out_zero_point) noexcept;

/// Per-channel caps that keep every accumulator inside 32 bits.
inline constexpr std::size_t kMaxChannels = 1024;
inline constexpr std::size_t kChannelAlignment = 8;
inline constexpr std::size_t kKernelTaps = 9;

/// Geometry and quantization of one inverted-residual block
/// (1x1 expansion -> 3x3 depthwise -> 1x1 projection).
struct BlockConfig {
    std::size_t in_h = 0;
    std::size_t in_w = 0;
    std::size_t n_in = 0;
    std::size_t m_expanded = 0;
    std::size_t n_out = 0;
    std::size_t stride = 1;

    QuantParams in_qp{};
    QuantParams ex_out_qp{};
    QuantParams dw_out_qp{};
    QuantParams pr_out_qp{};

    Activation ex_act{.clamped = true};
    Activation dw_act{.clamped = true};
    Activation pr_act{.clamped = false};

    /// When set, every channel of every stage uses this requant spec.
    std::optional<RequantSpec> requant_override;

    std::size_t out_h() const noexcept { return (in_h + stride - 1) / stride; }
    std::size_t out_w() const noexcept { return (in_w + stride - 1) / stride; }
    std::size_t out_pixels() const noexcept { return out_h() * out_w(); }

    friend bool operator==(const BlockConfig&, const BlockConfig&) = default;
};

/// Returns cfg unchanged or throws ChannelAlignment / BadStride / EmptyDims /
/// ChannelLimit / BadQuantParams.
const BlockConfig& validate_config(const BlockConfig& cfg);

/// Weights are symmetric (zero point 0). Row-major layouts:
///   ex_w[m * n_in + k], dw_w[m * 9 + tap], pr_w[c * M + m].
struct BlockWeights {
    std::vector<std::int8_t> ex_w;
    std::vector<std::int8_t> dw_w;
    std::vector<std::int8_t> pr_w;
    std::vector<RequantSpec> ex_rq;
    std::vector<RequantSpec> dw_rq;
    std::vector<RequantSpec> pr_rq;

    std::span<const std::int8_t> ex_row(std::size_t m, std::size_t n_in) const {
        return std::span<const std::int8_t>(ex_w).subspan(m * n_in, n_in);
    }
    std::span<const std::int8_t> dw_row(std::size_t m) const {
        return std::span<const std::int8_t>(dw_w).subspan(m * kKernelTaps, kKernelTaps);
    }
    std::span<const std::int8_t> pr_row(std::size_t c, std::size_t m_expanded) const {
        return std::span<const std::int8_t>(pr_w).subspan(c * m_expanded, m_expanded);
    }

    friend bool operator==(const BlockWeights&, const BlockWeights&) = default;
};

/// Throws ShapeMismatch if array lengths disagree with cfg.
void validate_weights(const BlockConfig& cfg, const BlockWeights& weights);

/// Throws ShapeMismatch if the tensor is not in_h x in_w x n_in.
void validate_input(const BlockConfig& cfg, const QuantTensor& input);

}  // namespace dscsim
