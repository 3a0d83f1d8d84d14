#pragma once

#include <dscsim/core_types.hpp>
#include <dscsim/memory_model.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace dscsim {

/// Registers for loop indices and pixel coordinates held by the controller.
inline constexpr std::size_t kControlBytes = 16;
inline constexpr std::size_t kTransientBudgetBytes = 256;

/// Everything the fused pipeline keeps between stages: one F1 tile, one F2
/// element and the projection accumulators of the current group.
struct TransientState {
    std::array<std::int8_t, kKernelTaps> tile{};
    std::int8_t dw_elem = 0;
    std::array<std::int32_t, kProjectionEngines> pr_acc{};
    std::size_t active_accumulators = 0;
    std::size_t peak_transient_bytes = 0;

    std::size_t live_bytes() const noexcept {
        return tile.size() + sizeof(dw_elem) + sizeof(std::int32_t) * active_accumulators + kControlBytes;
    }
    void note_live() noexcept;

    /// Zeroes the first `active` accumulators and makes them live.
    void begin_group(std::size_t active);
};

/// The 3x3x1 F1 tile around (center_r, center_c) for expanded channel m.
/// Positions outside the map take F1's zero point and skip the expansion
/// datapath. Throws BadChannel if m >= M.
std::array<std::int8_t, kKernelTaps> expansion_tile(const QuantTensor& input, const BlockConfig& cfg,
                                                    const BlockWeights& weights, std::ptrdiff_t center_r,
                                                    std::ptrdiff_t center_c, std::size_t m);

/// One F2 element from an F1 tile.
std::int8_t depthwise_element(std::span<const std::int8_t, kKernelTaps> tile,
                              std::span<const std::int8_t, kKernelTaps> dw_filter, const RequantSpec& rq,
                              std::int8_t f1_zp, QuantParams f2_qp, Activation act);

/// Broadcast x to every engine of the group: pr_acc[e] += (x - f2_zp) * w[e].
void projection_accumulate(TransientState& state, std::int8_t x, std::int8_t f2_zp,
                           std::span<const std::int8_t> group_weights);

struct FusedOptions {
    /// Output channels computed per stream pass (hardware: 56).
    std::size_t group_size = kProjectionEngines;
};

struct TransientSummary {
    std::size_t peak_transient_bytes = 0;
    std::size_t max_accumulators = 0;
};

struct FusedRunResult {
    QuantTensor out;
    TransientSummary transient;
    AccessCounters access;
    std::size_t groups = 0;
};

/// Pixel-by-pixel execution. The only tensor allocated is the output; F1 and
/// F2 exist solely as TransientState values. Bit-identical to
/// run_block_golden(...).out.
FusedRunResult run_block_fused(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input,
                               const FusedOptions& options = {});

}  // namespace dscsim
