#include <dscsim/analysis.hpp>
#include <dscsim/error.hpp>
#include <dscsim/memory_model.hpp>

#include <array>
#include <initializer_list>
#include <limits>
#include <numeric>

namespace dscsim {

namespace {

constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;

std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors) {
    std::uint64_t acc = 1;
    for (auto f : factors) {
        if (f == 0) {
            throw Error(ErrorCode::EmptyDims, "dimensions must be at least 1");
        }
        if (__builtin_mul_overflow(acc, f, &acc) || acc >= kLimit) {
            throw Error(ErrorCode::Overflow, "product exceeds 2^63");
        }
    }
    return acc;
}

std::uint64_t checked_sum(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = 0;
    if (__builtin_add_overflow(a, b, &s) || s >= kLimit) {
        throw Error(ErrorCode::Overflow, "sum exceeds 2^63");
    }
    return s;
}

}  // namespace

std::uint64_t mac_cost_standard(std::uint64_t w, std::uint64_t k, std::uint64_t m, std::uint64_t n) {
    return checked_product({w, w, k, k, m, n});
}

std::uint64_t mac_cost_dsc(std::uint64_t w, std::uint64_t k, std::uint64_t m, std::uint64_t n) {
    return checked_sum(checked_product({w, w, k, k, m}), checked_product({w, w, m, n}));
}

Rational Rational::reduced(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw Error(ErrorCode::Overflow, "zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

Rational dsc_ratio_exact(std::uint64_t k, std::uint64_t n) {
    const std::uint64_t k2 = checked_product({k, k});
    // 1/n + 1/k^2 = (k^2 + n) / (n * k^2)
    return Rational::reduced(static_cast<std::int64_t>(checked_sum(k2, n)),
                             static_cast<std::int64_t>(checked_product({n, k2})));
}

double dsc_ratio(std::uint64_t k, std::uint64_t n) { return dsc_ratio_exact(k, n).value(); }

std::uint64_t traffic_dram_baseline(std::uint64_t h1, std::uint64_t w1, std::uint64_t c1, std::uint64_t h2,
                                    std::uint64_t w2, std::uint64_t c2) {
    return checked_sum(checked_product({2, h1, w1, c1}), checked_product({2, h2, w2, c2}));
}

std::uint64_t buffer_sram_min(std::uint64_t h1, std::uint64_t w1, std::uint64_t c1) {
    return checked_product({h1, w1, c1});
}

TrafficBreakdown& TrafficBreakdown::operator+=(const TrafficBreakdown& o) noexcept {
    input_bytes += o.input_bytes;
    weight_bytes += o.weight_bytes;
    intermediate_bytes += o.intermediate_bytes;
    output_bytes += o.output_bytes;
    stream_passes = std::max(stream_passes, o.stream_passes);
    return *this;
}

TrafficBreakdown fused_traffic(const BlockConfig& cfg) {
    validate_config(cfg);
    const std::uint64_t m = cfg.m_expanded;
    TrafficBreakdown t;
    t.input_bytes = checked_product({cfg.in_h, cfg.in_w, cfg.n_in});
    t.weight_bytes = cfg.n_in * m + kKernelTaps * m + m * cfg.n_out;
    t.intermediate_bytes = 0;
    t.output_bytes = checked_product({cfg.out_h(), cfg.out_w(), cfg.n_out});
    t.stream_passes = (cfg.n_out + kProjectionEngines - 1) / kProjectionEngines;
    return t;
}

TrafficBreakdown baseline_traffic(const BlockConfig& cfg) {
    TrafficBreakdown t = fused_traffic(cfg);
    t.stream_passes = 1;
    t.intermediate_bytes =
        traffic_dram_baseline(cfg.in_h, cfg.in_w, cfg.m_expanded, cfg.out_h(), cfg.out_w(), cfg.m_expanded);
    return t;
}

double reduction_percent(const TrafficBreakdown& base, const TrafficBreakdown& fused) noexcept {
    if (base.total_bytes() == 0) {
        return 0.0;
    }
    return 100.0 * (1.0 - static_cast<double>(fused.total_bytes()) / static_cast<double>(base.total_bytes()));
}

BlockConfig LayerPreset::config() const {
    BlockConfig cfg;
    cfg.in_h = in_h;
    cfg.in_w = in_w;
    cfg.n_in = n_in;
    cfg.m_expanded = 6 * n_in;
    cfg.n_out = n_in;
    cfg.stride = 1;
    return cfg;
}

namespace {

constexpr std::array<LayerPreset, 4> kPresets = {{
    {"3rd", 40, 40, 8, 307'200},
    {"5th", 20, 20, 16, 153'600},
    {"8th", 10, 10, 24, 57'600},
    {"15th", 5, 5, 56, 33'600},
}};

}  // namespace

std::span<const LayerPreset> layer_presets() noexcept { return kPresets; }

const LayerPreset* find_preset(std::string_view name) noexcept {
    for (const auto& p : kPresets) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

}  // namespace dscsim
