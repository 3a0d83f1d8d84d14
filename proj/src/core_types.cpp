#include <dscsim/core_types.hpp>
#include <dscsim/error.hpp>

#include <algorithm>
#include <string>

namespace dscsim {

namespace {

std::string dims_string(std::size_t h, std::size_t w, std::size_t c) {
    return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

void check_qparams(const QuantParams& qp, const char* which) {
    // NaN fails the comparison as well.
    if (!(qp.scale > 0.0f)) {
        throw Error(ErrorCode::BadQuantParams, std::string(which) + " scale must be positive");
    }
}

}  // namespace

QuantTensor::QuantTensor(std::size_t height, std::size_t width, std::size_t channels, QuantParams qparams)
    : QuantTensor(height, width, channels, qparams,
                  std::vector<std::int8_t>(height * width * channels, qparams.zero_point)) {}

QuantTensor::QuantTensor(std::size_t height, std::size_t width, std::size_t channels, QuantParams qparams,
                         std::vector<std::int8_t> data)
    : height_(height), width_(width), channels_(channels), qparams_(qparams), data_(std::move(data)) {
    if (height == 0 || width == 0 || channels == 0) {
        throw Error(ErrorCode::EmptyDims, "tensor " + dims_string(height, width, channels));
    }
    if (data_.size() != height * width * channels) {
        throw Error(ErrorCode::ShapeMismatch, "tensor " + dims_string(height, width, channels) + " given " +
                                                  std::to_string(data_.size()) + " bytes");
    }
    check_qparams(qparams_, "tensor");
}

std::size_t QuantTensor::index(std::size_t row, std::size_t col, std::size_t ch) const {
    if (row >= height_ || col >= width_ || ch >= channels_) {
        throw Error(ErrorCode::OutOfBounds, "(" + std::to_string(row) + ", " + std::to_string(col) + ", " +
                                                std::to_string(ch) + ") in " +
                                                dims_string(height_, width_, channels_));
    }
    return (row * width_ + col) * channels_ + ch;
}

std::span<const std::int8_t> QuantTensor::pixel(std::size_t row, std::size_t col) const {
    return data().subspan(index(row, col, 0), channels_);
}

std::size_t tensor_index(const QuantTensor& t, std::size_t row, std::size_t col, std::size_t ch) {
    return t.index(row, col, ch);
}

void validate_requant(const RequantSpec& spec) {
    if (spec.multiplier < kMinMultiplier || spec.multiplier > kMaxMultiplier) {
        throw Error(ErrorCode::BadQuantParams, "multiplier " + std::to_string(spec.multiplier) +
                                                   " outside [2^30, 2^31)");
    }
    if (spec.shift < 0 || spec.shift > kMaxShift) {
        throw Error(ErrorCode::BadQuantParams, "shift " + std::to_string(spec.shift) + " outside [0, 31]");
    }
}

ActivationRange activation_range(const Activation& act, std::int8_t out_zero_point) noexcept {
    const std::int8_t lo = act.clamped ? out_zero_point : std::int8_t{-128};
    // A ceiling below the floor collapses the range onto the floor.
    return {lo, std::max(lo, act.ceiling)};
}

const BlockConfig& validate_config(const BlockConfig& cfg) {
    if (cfg.in_h == 0 || cfg.in_w == 0 || cfg.n_in == 0 || cfg.m_expanded == 0 || cfg.n_out == 0) {
        throw Error(ErrorCode::EmptyDims, "in " + dims_string(cfg.in_h, cfg.in_w, cfg.n_in) + ", M=" +
                                              std::to_string(cfg.m_expanded) +
                                              ", n_out=" + std::to_string(cfg.n_out));
    }
    if (cfg.n_in % kChannelAlignment != 0) {
        throw Error(ErrorCode::ChannelAlignment,
                    "n_in=" + std::to_string(cfg.n_in) + " is not a multiple of 8");
    }
    if (cfg.stride != 1 && cfg.stride != 2) {
        throw Error(ErrorCode::BadStride, "stride=" + std::to_string(cfg.stride));
    }
    if (cfg.n_in > kMaxChannels || cfg.m_expanded > kMaxChannels || cfg.n_out > kMaxChannels) {
        throw Error(ErrorCode::ChannelLimit, "channel counts are capped at 1024");
    }
    check_qparams(cfg.in_qp, "in_qp");
    check_qparams(cfg.ex_out_qp, "ex_out_qp");
    check_qparams(cfg.dw_out_qp, "dw_out_qp");
    check_qparams(cfg.pr_out_qp, "pr_out_qp");
    if (cfg.requant_override) {
        validate_requant(*cfg.requant_override);
    }
    return cfg;
}

void validate_weights(const BlockConfig& cfg, const BlockWeights& w) {
    const auto expect = [](std::size_t got, std::size_t want, const char* name) {
        if (got != want) {
            throw Error(ErrorCode::ShapeMismatch, std::string(name) + " has " + std::to_string(got) +
                                                      " entries, expected " + std::to_string(want));
        }
    };
    const std::size_t m = cfg.m_expanded;
    expect(w.ex_w.size(), m * cfg.n_in, "ex_w");
    expect(w.dw_w.size(), m * kKernelTaps, "dw_w");
    expect(w.pr_w.size(), cfg.n_out * m, "pr_w");
    expect(w.ex_rq.size(), m, "ex_rq");
    expect(w.dw_rq.size(), m, "dw_rq");
    expect(w.pr_rq.size(), cfg.n_out, "pr_rq");
}

void validate_input(const BlockConfig& cfg, const QuantTensor& input) {
    if (input.height() != cfg.in_h || input.width() != cfg.in_w || input.channels() != cfg.n_in) {
        throw Error(ErrorCode::ShapeMismatch,
                    "input " + dims_string(input.height(), input.width(), input.channels()) + ", config expects " +
                        dims_string(cfg.in_h, cfg.in_w, cfg.n_in));
    }
}

}  // namespace dscsim
