#include <dscsim/error.hpp>
#include <dscsim/memory_model.hpp>
#include <dscsim/timing_model.hpp>

#include <algorithm>
#include <deque>
#include <vector>

namespace dscsim {

std::string_view to_string(PipelineVersion v) noexcept {
    switch (v) {
        case PipelineVersion::V1: return "v1";
        case PipelineVersion::V2: return "v2";
        case PipelineVersion::V3: return "v3";
    }
    return "?";
}

std::optional<PipelineVersion> parse_version(std::string_view text) noexcept {
    if (text == "v1") return PipelineVersion::V1;
    if (text == "v2") return PipelineVersion::V2;
    if (text == "v3") return PipelineVersion::V3;
    return std::nullopt;
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::ExMac: return "ex_mac";
        case Stage::ExQuant: return "ex_quant";
        case Stage::DwMac: return "dw_mac";
        case Stage::DwQuant: return "dw_quant";
        case Stage::PrMac: return "pr_mac";
        case Stage::Readback: return "readback";
        case Stage::Control: return "control";
    }
    return "?";
}

StageLatencies default_latencies() noexcept { return StageLatencies{}; }

void validate_latencies(const StageLatencies& lat) {
    const std::array<std::uint64_t, 6> must_be_positive = {lat.ex_mac_per_chunk, lat.ex_quant, lat.dw_mac,
                                                           lat.dw_quant, lat.pr_mac, lat.readback_per_value};
    if (std::any_of(must_be_positive.begin(), must_be_positive.end(), [](auto v) { return v == 0; })) {
        throw Error(ErrorCode::BadLatency, "stage latencies must be at least 1 cycle");
    }
}

namespace {

struct Geometry {
    std::uint64_t pixels;
    std::size_t groups;
    std::size_t m;
    std::size_t n_out;

    std::size_t group_channels(std::size_t g) const {
        return std::min(kProjectionEngines, n_out - g * kProjectionEngines);
    }
};

/// Per-unit occupancy of each of the five datapath stages.
std::array<std::uint64_t, 5> unit_stage_cycles(const BlockConfig& cfg, const StageLatencies& lat) {
    const std::uint64_t chunks = (cfg.n_in + kExChunkBytes - 1) / kExChunkBytes;
    return {chunks * lat.ex_mac_per_chunk, lat.ex_quant, lat.dw_mac, lat.dw_quant, lat.pr_mac};
}

std::uint64_t simulate_sequential(const Geometry& geo, std::uint64_t unit, const StageLatencies& lat) {
    std::uint64_t cursor = 0;
    for (std::uint64_t p = 0; p < geo.pixels; ++p) {
        cursor += lat.pixel_overhead;
        for (std::size_t g = 0; g < geo.groups; ++g) {
            cursor += unit * geo.m;
            cursor += geo.group_channels(g) * lat.readback_per_value;
        }
    }
    return cursor;
}

struct PipelineOutcome {
    std::uint64_t total = 0;
    std::size_t max_in_flight = 0;
};

/// Earliest-start schedule over `resources`, each a pipeline stage holding
/// one unit at a time. `drain_resource` is the stage whose completion frees
/// the expansion unit for the next pixel.
PipelineOutcome simulate_pipelined(const Geometry& geo, const std::vector<std::uint64_t>& resources,
                                   std::size_t drain_resource, const StageLatencies& lat) {
    const std::size_t k_last = resources.size() - 1;
    std::vector<std::uint64_t> free(resources.size(), 0);
    std::vector<std::uint64_t> prev_start(resources.size(), 0);
    std::vector<std::uint64_t> start(resources.size(), 0);
    std::uint64_t expansion_drained = 0;
    std::uint64_t readback_free = 0;

    // Pixels start and finish in order, so a FIFO of end times suffices.
    std::deque<std::uint64_t> open_pixel_ends;
    std::size_t max_in_flight = 0;

    for (std::uint64_t p = 0; p < geo.pixels; ++p) {
        std::uint64_t pixel_start = 0;
        for (std::size_t g = 0; g < geo.groups; ++g) {
            for (std::size_t m = 0; m < geo.m; ++m) {
                std::uint64_t ready = 0;
                for (std::size_t k = 0; k < resources.size(); ++k) {
                    std::uint64_t s = std::max(ready, free[k]);
                    if (k < k_last) {
                        s = std::max(s, prev_start[k + 1]);
                    }
                    std::uint64_t dur = resources[k];
                    if (k == 0 && g == 0 && m == 0) {
                        s = std::max(s, expansion_drained);
                        pixel_start = s;
                        dur += lat.pixel_overhead;
                    }
                    if (k == k_last && m == 0) {
                        s = std::max(s, readback_free);
                    }
                    start[k] = s;
                    free[k] = s + dur;
                    ready = free[k];
                }
                prev_start = start;
                expansion_drained = free[drain_resource];
            }
            const std::uint64_t rb_start = std::max(free[k_last], readback_free);
            readback_free = rb_start + geo.group_channels(g) * lat.readback_per_value;
        }

        while (!open_pixel_ends.empty() && open_pixel_ends.front() <= pixel_start) {
            open_pixel_ends.pop_front();
        }
        open_pixel_ends.push_back(readback_free);
        max_in_flight = std::max(max_in_flight, open_pixel_ends.size());
    }
    return {readback_free, max_in_flight};
}

}  // namespace

TimingReport simulate(PipelineVersion version, const BlockConfig& cfg, const StageLatencies& lat) {
    validate_config(cfg);
    validate_latencies(lat);

    const Geometry geo{cfg.out_pixels(), (cfg.n_out + kProjectionEngines - 1) / kProjectionEngines,
                       cfg.m_expanded, cfg.n_out};
    const auto st = unit_stage_cycles(cfg, lat);
    const auto [ex_mac, ex_quant, dw_mac, dw_quant, pr_mac] = st;

    TimingReport rep;
    rep.version = version;
    rep.work_units = geo.pixels * geo.groups * geo.m;

    for (std::size_t i = 0; i < st.size(); ++i) {
        rep.busy[i] = rep.work_units * st[i];
    }
    rep.busy[static_cast<std::size_t>(Stage::Readback)] = geo.pixels * geo.n_out * lat.readback_per_value;
    rep.busy[static_cast<std::size_t>(Stage::Control)] = geo.pixels * lat.pixel_overhead;

    switch (version) {
        case PipelineVersion::V1: {
            const std::uint64_t unit = ex_mac + ex_quant + dw_mac + dw_quant + pr_mac;
            rep.total_cycles = simulate_sequential(geo, unit, lat);
            rep.steady_state_interval = unit;
            rep.pixels_in_flight_max = 1;
            break;
        }
        case PipelineVersion::V2: {
            const std::vector<std::uint64_t> res = {ex_mac + ex_quant, dw_mac + dw_quant, pr_mac};
            const auto outcome = simulate_pipelined(geo, res, 0, lat);
            rep.total_cycles = outcome.total;
            rep.steady_state_interval = *std::max_element(res.begin(), res.end());
            rep.pixels_in_flight_max = outcome.max_in_flight;
            break;
        }
        case PipelineVersion::V3: {
            const std::vector<std::uint64_t> res(st.begin(), st.end());
            const auto outcome = simulate_pipelined(geo, res, 1, lat);
            rep.total_cycles = outcome.total;
            rep.steady_state_interval = *std::max_element(res.begin(), res.end());
            rep.pixels_in_flight_max = outcome.max_in_flight;
            break;
        }
    }

    for (std::size_t i = 0; i < kStageCount; ++i) {
        rep.idle[i] = rep.total_cycles - rep.busy[i];
    }
    return rep;
}

double speedup(const TimingReport& a, const TimingReport& b) noexcept {
    return static_cast<double>(a.total_cycles) / static_cast<double>(b.total_cycles);
}

}  // namespace dscsim
