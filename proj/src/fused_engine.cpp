#include <dscsim/error.hpp>
#include <dscsim/fused_engine.hpp>
#include <dscsim/golden.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dscsim {

void TransientState::note_live() noexcept {
    peak_transient_bytes = std::max(peak_transient_bytes, live_bytes());
}

void TransientState::begin_group(std::size_t active) {
    if (active > pr_acc.size()) {
        throw Error(ErrorCode::BadIndex, "group of " + std::to_string(active) + " exceeds 56 accumulators");
    }
    std::fill(pr_acc.begin(), pr_acc.end(), 0);
    active_accumulators = active;
    note_live();
}

namespace {

bool inside(std::ptrdiff_t r, std::ptrdiff_t c, std::size_t h, std::size_t w) {
    return r >= 0 && c >= 0 && r < static_cast<std::ptrdiff_t>(h) && c < static_cast<std::ptrdiff_t>(w);
}

}  // namespace

std::array<std::int8_t, kKernelTaps> expansion_tile(const QuantTensor& input, const BlockConfig& cfg,
                                                    const BlockWeights& weights, std::ptrdiff_t center_r,
                                                    std::ptrdiff_t center_c, std::size_t m) {
    if (m >= cfg.m_expanded) {
        throw Error(ErrorCode::BadChannel, "m=" + std::to_string(m) + " with M=" + std::to_string(cfg.m_expanded));
    }
    const auto range = activation_range(cfg.ex_act, cfg.ex_out_qp.zero_point);
    const auto filter = weights.ex_row(m, cfg.n_in);
    const std::int32_t in_zp = input.zero_point();

    std::array<std::int8_t, kKernelTaps> tile{};
    for (std::size_t k = 0; k < kKernelTaps; ++k) {
        const std::ptrdiff_t r = center_r + static_cast<std::ptrdiff_t>(k / 3) - 1;
        const std::ptrdiff_t c = center_c + static_cast<std::ptrdiff_t>(k % 3) - 1;
        if (!inside(r, c, input.height(), input.width())) {
            tile[k] = cfg.ex_out_qp.zero_point;
            continue;
        }
        const auto px = input.pixel(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        std::int32_t acc = 0;
        for (std::size_t i = 0; i < px.size(); ++i) {
            acc += (std::int32_t{px[i]} - in_zp) * filter[i];
        }
        tile[k] = requantize(acc, weights.ex_rq[m], cfg.ex_out_qp.zero_point, range);
    }
    return tile;
}

std::int8_t depthwise_element(std::span<const std::int8_t, kKernelTaps> tile,
                              std::span<const std::int8_t, kKernelTaps> dw_filter, const RequantSpec& rq,
                              std::int8_t f1_zp, QuantParams f2_qp, Activation act) {
    std::int32_t acc = 0;
    for (std::size_t k = 0; k < kKernelTaps; ++k) {
        acc += (std::int32_t{tile[k]} - f1_zp) * dw_filter[k];
    }
    return requantize(acc, rq, f2_qp.zero_point, activation_range(act, f2_qp.zero_point));
}

void projection_accumulate(TransientState& state, std::int8_t x, std::int8_t f2_zp,
                           std::span<const std::int8_t> group_weights) {
    const std::int32_t centred = std::int32_t{x} - f2_zp;
    for (std::size_t e = 0; e < group_weights.size(); ++e) {
        state.pr_acc[e] += centred * group_weights[e];
    }
}

namespace {

/// Expansion stage as the hardware sees it: nine engines share each 8-byte
/// filter chunk broadcast from the filter buffer.
void expand_window(const WindowSlots& window, ExFilterBuffer& filters, std::size_t m, std::int32_t in_zp,
                   const RequantSpec& rq, std::int8_t f1_zp, ActivationRange range,
                   std::array<std::int8_t, kKernelTaps>& tile) {
    std::array<std::int32_t, kKernelTaps> acc{};
    for (std::size_t chunk = 0; chunk < filters.chunks_per_filter(); ++chunk) {
        const auto w = filters.read_chunk(m, chunk);
        for (std::size_t k = 0; k < kKernelTaps; ++k) {
            if (window.is_padding(k)) {
                continue;
            }
            const auto px = window.slots[k].subspan(chunk * kExChunkBytes, kExChunkBytes);
            for (std::size_t i = 0; i < kExChunkBytes; ++i) {
                acc[k] += (std::int32_t{px[i]} - in_zp) * w[i];
            }
        }
    }
    for (std::size_t k = 0; k < kKernelTaps; ++k) {
        tile[k] = window.is_padding(k) ? f1_zp : requantize(acc[k], rq, f1_zp, range);
    }
}

}  // namespace

FusedRunResult run_block_fused(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input,
                               const FusedOptions& options) {
    validate_config(cfg);
    validate_weights(cfg, weights);
    validate_input(cfg, input);

    MemorySystem mem(cfg, weights, input, options.group_size);
    auto& pr = mem.pr_weights();

    const std::int32_t in_zp = input.zero_point();
    const std::int8_t f1_zp = cfg.ex_out_qp.zero_point;
    const std::int8_t f2_zp = cfg.dw_out_qp.zero_point;
    const auto ex_range = activation_range(cfg.ex_act, f1_zp);
    const auto pr_range = activation_range(cfg.pr_act, cfg.pr_out_qp.zero_point);

    QuantTensor out(cfg.out_h(), cfg.out_w(), cfg.n_out, cfg.pr_out_qp);
    TransientState state;
    std::array<std::int8_t, kProjectionEngines> column{};
    std::size_t max_acc = 0;

    for (std::size_t r = 0; r < cfg.out_h(); ++r) {
        for (std::size_t c = 0; c < cfg.out_w(); ++c) {
            const auto center_r = static_cast<std::ptrdiff_t>(r * cfg.stride);
            const auto center_c = static_cast<std::ptrdiff_t>(c * cfg.stride);

            for (std::size_t g = 0; g < pr.groups(); ++g) {
                pr.select_group(g);
                const std::size_t active = pr.active_engines();
                state.begin_group(active);
                max_acc = std::max(max_acc, active);

                for (std::size_t m = 0; m < cfg.m_expanded; ++m) {
                    const auto window = mem.ifmap().window_read(center_r, center_c);
                    expand_window(window, mem.ex_filters(), m, in_zp, weights.ex_rq[m], f1_zp, ex_range, state.tile);

                    const auto dw = mem.dw_filters().read(m);
                    state.dw_elem = depthwise_element(state.tile, dw, weights.dw_rq[m], f1_zp, cfg.dw_out_qp, cfg.dw_act);

                    for (std::size_t e = 0; e < active; ++e) {
                        column[e] = pr.read(e, m);
                    }
                    projection_accumulate(state, state.dw_elem, f2_zp, std::span(column).first(active));
                    state.note_live();
                }

                for (std::size_t e = 0; e < active; ++e) {
                    const std::size_t oc = pr.group_base() + e;
                    out.at(r, c, oc) = requantize(state.pr_acc[e], weights.pr_rq[oc], cfg.pr_out_qp.zero_point, pr_range);
                    mem.record_output_write(1);
                }
            }
        }
    }

    if (state.peak_transient_bytes > kTransientBudgetBytes) {
        throw std::logic_error("fused transient state exceeded " + std::to_string(kTransientBudgetBytes) + " bytes");
    }

    FusedRunResult result;
    result.out = std::move(out);
    result.transient = {state.peak_transient_bytes, max_acc};
    result.access = mem.snapshot_counters();
    result.groups = pr.groups();
    return result;
}

}  // namespace dscsim
