#pragma once

#include <dscsim/core_types.hpp>

#include <cstdint>
#include <utility>

namespace dscsim {

/// One SplitMix64 step: returns (new state, output).
std::pair<std::uint64_t, std::uint64_t> splitmix_next(std::uint64_t state) noexcept;

/// Stateful wrapper over splitmix_next.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        auto [s, out] = splitmix_next(state_);
        state_ = s;
        return out;
    }

    /// lo + (next() mod span); one draw. Requires lo <= hi.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) noexcept;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

struct Workload {
    QuantTensor input;
    BlockWeights weights;
};

/// Deterministic block workload. Draw order: input bytes (NHWC), ex_w, dw_w,
/// pr_w, then (multiplier, shift, bias) for ex_rq, dw_rq, pr_rq in array order.
/// Activations span [-128, 127], weights [-127, 127], multipliers [2^30, 2^31),
/// shifts [0, 10], biases [-2^15, 2^15]. Quant params are taken from cfg.
Workload generate_workload(const BlockConfig& cfg, std::uint64_t seed);

/// Sampling ranges for random_config; inclusive bounds.
struct ConfigRanges {
    std::size_t spatial_min = 1;
    std::size_t spatial_max = 32;
    std::size_t n_in_max_multiple = 4;  // n_in in {8, 16, ..., 8 * this}
    std::size_t m_max_multiple = 24;    // M in {8, 16, ..., 8 * this}
    std::size_t n_out_min = 8;
    std::size_t n_out_max = 112;
    bool allow_stride2 = false;
};

/// Random valid block configuration with zero points drawn from [-64, 64].
BlockConfig random_config(SplitMix64& rng, const ConfigRanges& ranges = {});

}  // namespace dscsim
