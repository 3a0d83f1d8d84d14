#pragma once

#include <dscsim/core_types.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dscsim {

enum class PipelineVersion { V1, V2, V3 };

std::string_view to_string(PipelineVersion v) noexcept;
std::optional<PipelineVersion> parse_version(std::string_view text) noexcept;

/// Cycle costs of the datapath. A stage is occupied for its full latency per
/// work unit; the quantize and control numbers are model constants, not
/// measured hardware values.
struct StageLatencies {
    std::uint64_t ex_mac_per_chunk = 1;  // 8 input channels per cycle
    std::uint64_t ex_quant = 4;
    std::uint64_t dw_mac = 1;            // all nine taps in one cycle
    std::uint64_t dw_quant = 4;
    std::uint64_t pr_mac = 1;            // one broadcast per cycle
    std::uint64_t readback_per_value = 1;
    std::uint64_t pixel_overhead = 8;

    friend bool operator==(const StageLatencies&, const StageLatencies&) = default;
};

StageLatencies default_latencies() noexcept;

/// Throws BadLatency unless every latency is >= 1 (pixel_overhead >= 0).
void validate_latencies(const StageLatencies& lat);

enum class Stage : std::size_t { ExMac, ExQuant, DwMac, DwQuant, PrMac, Readback, Control };
inline constexpr std::size_t kStageCount = 7;

std::string_view to_string(Stage s) noexcept;

struct TimingReport {
    PipelineVersion version = PipelineVersion::V1;
    std::uint64_t total_cycles = 0;
    std::array<std::uint64_t, kStageCount> busy{};
    std::array<std::uint64_t, kStageCount> idle{};
    /// Cycles between successive expanded-channel work units once the
    /// pipeline is full.
    std::uint64_t steady_state_interval = 0;
    std::size_t pixels_in_flight_max = 0;
    std::uint64_t work_units = 0;

    std::uint64_t busy_of(Stage s) const noexcept { return busy[static_cast<std::size_t>(s)]; }
    std::uint64_t idle_of(Stage s) const noexcept { return idle[static_cast<std::size_t>(s)]; }
};

/// Schedules the fused engine's (pixel, group, m) work units, in the engine's
/// traversal order, on the chosen pipeline:
///   v1  everything strictly sequential, readback included;
///   v2  three stages (Ex MAC+Quant, Dw MAC+Quant, Pr MAC);
///   v3  five stages (Ex MAC, Ex Quant, Dw MAC, Dw Quant, Pr MAC).
/// In v2/v3 stages pass units through single pipeline registers, the pixel's
/// control overhead runs on the front stage once the expansion unit has
/// drained the previous pixel, and a group's first projection MAC waits for
/// the previous group's readback to free the accumulators.
TimingReport simulate(PipelineVersion version, const BlockConfig& cfg, const StageLatencies& lat = {});

/// a.total_cycles / b.total_cycles.
double speedup(const TimingReport& a, const TimingReport& b) noexcept;

struct RatioWindow {
    double lo;
    double hi;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Speedup windows for the 3rd-layer preset under default latencies.
inline constexpr RatioWindow kV2OverV1Window{1.5, 2.6};
inline constexpr RatioWindow kV3OverV1Window{2.0, 3.4};

}  // namespace dscsim
