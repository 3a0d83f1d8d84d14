#pragma once

#include <dscsim/core_types.hpp>

#include <cstdint>
#include <span>
#include <string_view>

namespace dscsim {

/// W*W*K*K*M*N multiply-accumulates for a standard KxK convolution from a
/// WxWxM map to WxWxN. Throws EmptyDims for zero arguments and Overflow past 2^63.
std::uint64_t mac_cost_standard(std::uint64_t w, std::uint64_t k, std::uint64_t m, std::uint64_t n);

/// Depthwise KxK plus pointwise MxN: W*W*K*K*M + W*W*M*N.
std::uint64_t mac_cost_dsc(std::uint64_t w, std::uint64_t k, std::uint64_t m, std::uint64_t n);

/// Reduced fraction with positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational reduced(std::int64_t num, std::int64_t den);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
};

/// 1/N + 1/K^2, exact.
Rational dsc_ratio_exact(std::uint64_t k, std::uint64_t n);
double dsc_ratio(std::uint64_t k, std::uint64_t n);

/// Off-chip bytes for writing and re-reading both intermediate maps:
/// 2*(H1*W1*C1) + 2*(H2*W2*C2), one byte per element.
std::uint64_t traffic_dram_baseline(std::uint64_t h1, std::uint64_t w1, std::uint64_t c1, std::uint64_t h2,
                                    std::uint64_t w2, std::uint64_t c2);

/// On-chip bytes needed to hold the first intermediate map: H1*W1*C1.
std::uint64_t buffer_sram_min(std::uint64_t h1, std::uint64_t w1, std::uint64_t c1);

struct TrafficBreakdown {
    std::uint64_t input_bytes = 0;
    std::uint64_t weight_bytes = 0;
    std::uint64_t intermediate_bytes = 0;
    std::uint64_t output_bytes = 0;
    /// Fused mode only: the expansion/depthwise stream is recomputed once per
    /// 56-channel output group. Not folded into the byte counts.
    std::uint64_t stream_passes = 1;

    std::uint64_t total_bytes() const noexcept {
        return input_bytes + weight_bytes + intermediate_bytes + output_bytes;
    }

    TrafficBreakdown& operator+=(const TrafficBreakdown& o) noexcept;
    friend bool operator==(const TrafficBreakdown&, const TrafficBreakdown&) = default;
};

/// Input, three filters and output each moved once; no intermediate traffic.
TrafficBreakdown fused_traffic(const BlockConfig& cfg);

/// As fused_traffic plus the DRAM round trip of F1 and F2.
TrafficBreakdown baseline_traffic(const BlockConfig& cfg);

/// 100 * (1 - fused.total / base.total).
double reduction_percent(const TrafficBreakdown& base, const TrafficBreakdown& fused) noexcept;

/// Aggregate data-movement reduction window for the four presets.
inline constexpr double kReductionWindowLo = 82.0;
inline constexpr double kReductionWindowHi = 92.0;
inline constexpr double kReferenceReductionPercent = 87.0;

/// MobileNetV2 bottleneck workloads: M = 6 * n_in, n_out = n_in, stride 1.
struct LayerPreset {
    std::string_view name;
    std::size_t in_h;
    std::size_t in_w;
    std::size_t n_in;
    /// Reference baseline intermediate bytes for the layer.
    std::uint64_t reference_intermediate_bytes;

    BlockConfig config() const;
};

std::span<const LayerPreset> layer_presets() noexcept;

/// nullptr when the name is unknown.
const LayerPreset* find_preset(std::string_view name) noexcept;

}  // namespace dscsim
