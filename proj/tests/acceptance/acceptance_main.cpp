// One line per acceptance criterion; exit status is the number of failures.

#include <dscsim/analysis.hpp>
#include <dscsim/cli.hpp>
#include <dscsim/fused_engine.hpp>
#include <dscsim/golden.hpp>
#include <dscsim/memory_model.hpp>
#include <dscsim/tensor_io.hpp>
#include <dscsim/timing_model.hpp>
#include <dscsim/workload.hpp>

#include "oracles/naive_block.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>

using namespace dscsim;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome oracle_equivalence() {
    SplitMix64 rng(0xACCE5501);
    const ConfigRanges ranges;  // spatial 1-32, n_in 8-32, M 8-192, n_out 8-112, stride 1
    constexpr int kConfigs = 200;
    for (int i = 0; i < kConfigs; ++i) {
        const auto cfg = random_config(rng, ranges);
        const auto wl = generate_workload(cfg, rng.next());
        const auto golden = run_block_golden(cfg, wl.weights, wl.input).out;
        const auto fused = run_block_fused(cfg, wl.weights, wl.input).out;
        const std::vector<std::int8_t> in(wl.input.data().begin(), wl.input.data().end());
        const auto naive_out = naive::run(cfg, wl.weights, in);
        const bool naive_ok =
            std::equal(naive_out.begin(), naive_out.end(), fused.data().begin(), fused.data().end());
        if (!(fused == golden) || !naive_ok) {
            std::ostringstream os;
            os << "config " << i << " (" << cfg.in_h << "x" << cfg.in_w << "x" << cfg.n_in << " M=" << cfg.m_expanded
               << " n_out=" << cfg.n_out << ") differs";
            return {false, os.str()};
        }
    }
    return {true, std::to_string(kConfigs) + " random configs bit-identical (fused, golden, naive)"};
}

Outcome zero_buffer() {
    const auto cfg = find_preset("5th")->config();
    const auto wl = generate_workload(cfg, 42);
    const auto trace = run_block_golden(cfg, wl.weights, wl.input);
    const auto fused = run_block_fused(cfg, wl.weights, wl.input);
    const std::size_t peak = fused.transient.peak_transient_bytes;
    const std::size_t f1 = trace.f1.size();
    const bool pass = peak <= 256 && f1 == 38400 && f1 >= 150 * peak && fused.out == trace.out;
    std::ostringstream os;
    os << "peak transient " << peak << " B, golden F1 " << f1 << " B, ratio "
       << static_cast<double>(f1) / static_cast<double>(peak);
    return {pass, os.str()};
}

Outcome preset_traffic() {
    const std::array<std::pair<const char*, std::uint64_t>, 4> expected = {{
        {"3rd", 307200}, {"5th", 153600}, {"8th", 57600}, {"15th", 33600}}};
    std::ostringstream os;
    bool pass = true;
    for (const auto& [name, bytes] : expected) {
        const auto got = baseline_traffic(find_preset(name)->config()).intermediate_bytes;
        pass = pass && got == bytes;
        os << name << "=" << got << " ";
    }
    return {pass, os.str()};
}

Outcome spot_values() {
    const auto t = traffic_dram_baseline(20, 20, 96, 20, 20, 96);
    const auto b = buffer_sram_min(20, 20, 96);
    return {t == 153600 && b == 38400, "traffic " + std::to_string(t) + " B, buffer " + std::to_string(b) + " B"};
}

Outcome traffic_reduction() {
    SplitMix64 rng(0xACCE5505);
    ConfigRanges ranges;
    ranges.n_out_max = 1024;
    ranges.allow_stride2 = true;
    for (int i = 0; i < 500; ++i) {
        if (fused_traffic(random_config(rng, ranges)).intermediate_bytes != 0) {
            return {false, "fused intermediate bytes nonzero"};
        }
    }
    TrafficBreakdown base;
    TrafficBreakdown fused;
    for (const auto& p : layer_presets()) {
        const auto c = p.config();
        if (fused_traffic(c).intermediate_bytes != 0) {
            return {false, "fused intermediate bytes nonzero on a preset"};
        }
        base += baseline_traffic(c);
        fused += fused_traffic(c);
    }
    const double r = reduction_percent(base, fused);
    std::ostringstream os;
    os << "aggregate reduction " << r << "% (reference about " << kReferenceReductionPercent << "%, window ["
       << kReductionWindowLo << ", " << kReductionWindowHi << "])";
    return {r >= kReductionWindowLo && r <= kReductionWindowHi, os.str()};
}

Outcome mac_identities() {
    SplitMix64 rng(0xACCE5506);
    for (int i = 0; i < 100; ++i) {
        const auto w = static_cast<std::uint64_t>(rng.uniform(1, 224));
        const auto k = static_cast<std::uint64_t>(rng.uniform(1, 11));
        const auto m = static_cast<std::uint64_t>(rng.uniform(1, 1024));
        const auto n = static_cast<std::uint64_t>(rng.uniform(1, 1024));
        const auto got = Rational::reduced(static_cast<std::int64_t>(mac_cost_dsc(w, k, m, n)),
                                           static_cast<std::int64_t>(mac_cost_standard(w, k, m, n)));
        const auto kk = static_cast<std::int64_t>(k * k);
        const auto nn = static_cast<std::int64_t>(n);
        if (!(got == Rational::reduced(kk + nn, nn * kk)) || !(got == dsc_ratio_exact(k, n))) {
            return {false, "ratio mismatch"};
        }
    }
    for (std::int64_t n = 1; n <= 4096; ++n) {
        const auto r = dsc_ratio_exact(3, static_cast<std::uint64_t>(n));
        // 1/9 < r <= 1/9 + 1/n
        if (!(9 * r.num > r.den) || !(9 * n * r.num <= (n + 9) * r.den)) {
            return {false, "dsc_ratio(3, " + std::to_string(n) + ") outside (1/9, 1/9 + 1/N]"};
        }
    }
    std::ostringstream os;
    os << "100 random (W,K,M,N) exact; 1/dsc_ratio(3, 1024) = " << 1.0 / dsc_ratio(3, 1024) << "x";
    return {true, os.str()};
}

Outcome bank_conflicts() {
    std::size_t windows = 0;
    for (std::size_t r = 0; r + 3 <= 64; ++r) {
        for (std::size_t c = 0; c + 3 <= 64; ++c) {
            unsigned seen = 0;
            for (std::size_t i = 0; i < 9; ++i) {
                seen |= 1u << bank_id(r + i / 3, c + i % 3);
            }
            if (seen != 0x1FFu) {
                return {false, "window at (" + std::to_string(r) + ", " + std::to_string(c) + ") conflicts"};
            }
            ++windows;
        }
    }
    return {true, std::to_string(windows) + " windows map onto all 9 banks"};
}

Outcome timing_ordering() {
    SplitMix64 rng(0xACCE5508);
    ConfigRanges ranges;
    ranges.spatial_max = 8;
    ranges.m_max_multiple = 12;
    ranges.n_out_max = 120;
    std::size_t checked = 0;
    const auto ordered = [&checked](const BlockConfig& c, const StageLatencies& lat) {
        ++checked;
        const auto t1 = simulate(PipelineVersion::V1, c, lat).total_cycles;
        const auto t2 = simulate(PipelineVersion::V2, c, lat).total_cycles;
        const auto t3 = simulate(PipelineVersion::V3, c, lat).total_cycles;
        return t3 <= t2 && t2 <= t1;
    };
    for (int i = 0; i < 200; ++i) {
        const auto c = random_config(rng, ranges);
        StageLatencies lat;
        lat.ex_mac_per_chunk = 1 + rng.next() % 8;
        lat.ex_quant = 1 + rng.next() % 8;
        lat.dw_mac = 1 + rng.next() % 8;
        lat.dw_quant = 1 + rng.next() % 8;
        lat.pr_mac = 1 + rng.next() % 8;
        lat.readback_per_value = 1 + rng.next() % 4;
        lat.pixel_overhead = rng.next() % 32;
        if (!ordered(c, lat) || !ordered(c, StageLatencies{})) {
            return {false, "ordering violated on random config " + std::to_string(i)};
        }
    }
    for (const auto& p : layer_presets()) {
        if (!ordered(p.config(), StageLatencies{})) {
            return {false, std::string("ordering violated on preset ") + std::string(p.name)};
        }
    }
    const auto c = find_preset("3rd")->config();
    const auto v1 = simulate(PipelineVersion::V1, c);
    const double s2 = speedup(v1, simulate(PipelineVersion::V2, c));
    const double s3 = speedup(v1, simulate(PipelineVersion::V3, c));
    std::ostringstream os;
    os << checked << " orderings hold; 3rd preset v2/v1 " << s2 << " in [" << kV2OverV1Window.lo << ", "
       << kV2OverV1Window.hi << "], v3/v1 " << s3 << " in [" << kV3OverV1Window.lo << ", " << kV3OverV1Window.hi
       << "]";
    return {kV2OverV1Window.contains(s2) && kV3OverV1Window.contains(s3), os.str()};
}

Outcome padding_equivalence() {
    std::size_t cases = 0;
    for (std::size_t h = 1; h <= 4; ++h) {
        for (std::size_t w = 1; w <= 4; ++w) {
            for (std::size_t n_in : {8u, 24u}) {
                for (std::size_t m : {8u, 40u}) {
                    for (std::size_t n_out : {8u, 61u}) {
                        BlockConfig c;
                        c.in_h = h;
                        c.in_w = w;
                        c.n_in = n_in;
                        c.m_expanded = m;
                        c.n_out = n_out;
                        c.in_qp.zero_point = static_cast<std::int8_t>(h * 7) - 14;
                        c.ex_out_qp.zero_point = static_cast<std::int8_t>(w * 11) - 30;
                        c.dw_out_qp.zero_point = -5;
                        const auto wl = generate_workload(c, h * 1000 + w * 100 + m + n_out);
                        const auto trace = run_block_golden(c, wl.weights, wl.input);
                        if (!(run_block_fused(c, wl.weights, wl.input).out == trace.out)) {
                            return {false, "padded and virtual paths differ at " + std::to_string(h) + "x" +
                                               std::to_string(w)};
                        }
                        // F2 computed with the explicitly padded map must also be reachable
                        // from fused tiles, element by element.
                        for (std::size_t r = 0; r < h; ++r) {
                            for (std::size_t col = 0; col < w; ++col) {
                                for (std::size_t mm = 0; mm < m; ++mm) {
                                    const auto tile = expansion_tile(wl.input, c, wl.weights,
                                                                     static_cast<std::ptrdiff_t>(r),
                                                                     static_cast<std::ptrdiff_t>(col), mm);
                                    const auto f2 = depthwise_element(
                                        tile, std::span<const std::int8_t, 9>(wl.weights.dw_row(mm).data(), 9),
                                        wl.weights.dw_rq[mm], c.ex_out_qp.zero_point, c.dw_out_qp, c.dw_act);
                                    if (f2 != trace.f2.at(r, col, mm)) {
                                        return {false, "F2 element differs"};
                                    }
                                }
                            }
                        }
                        ++cases;
                    }
                }
            }
        }
    }
    return {true, std::to_string(cases) + " border-heavy configs match element-wise"};
}

Outcome determinism() {
    const auto machine = [](std::vector<std::string> args) {
        std::ostringstream out;
        std::ostringstream err;
        const int rc = run_cli(std::move(args), out, err);
        return std::make_pair(rc, out.str());
    };
    const std::vector<std::vector<std::string>> commands = {
        {"verify", "--preset", "8th", "--seed", "1234", "--machine"},
        {"timing", "--preset", "8th", "--machine"},
        {"traffic", "--presets", "--machine"},
        {"macs", "--preset", "5th", "--machine"},
    };
    for (const auto& c : commands) {
        const auto a = machine(c);
        const auto b = machine(c);
        if (a.first != kExitOk || a.second != b.second || a.second.empty()) {
            return {false, "report for '" + c[0] + "' is not reproducible"};
        }
    }
    SplitMix64 rng(0xACCE5510);
    for (int i = 0; i < 50; ++i) {
        ConfigRanges ranges;
        ranges.spatial_max = 12;
        const auto cfg = random_config(rng, ranges);
        const auto wl = generate_workload(cfg, rng.next());
        const auto trace = run_block_golden(cfg, wl.weights, wl.input);
        for (const auto* t : {&wl.input, &trace.f1, &trace.f2, &trace.out}) {
            std::stringstream ss;
            write_tensor(*t, ss);
            const std::string bytes = ss.str();
            const auto back = read_tensor(ss);
            std::stringstream again;
            write_tensor(back, again);
            if (!(back == *t) || again.str() != bytes) {
                return {false, "QTSR round trip changed a tensor"};
            }
        }
    }
    return {true, "4 machine reports byte-identical; 200 QTSR round trips exact"};
}

}  // namespace

int main() {
    const std::array<std::pair<const char*, std::function<Outcome()>>, 10> criteria = {{
        {"oracle equivalence", oracle_equivalence},
        {"zero-buffer transient storage", zero_buffer},
        {"preset intermediate traffic", preset_traffic},
        {"traffic and buffer spot values", spot_values},
        {"traffic reduction", traffic_reduction},
        {"MAC-cost identities", mac_identities},
        {"bank conflict-freedom", bank_conflicts},
        {"timing ordering and speedup windows", timing_ordering},
        {"padding equivalence", padding_equivalence},
        {"determinism and QTSR format", determinism},
    }};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2zu %-38s %s (%lld ms)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), static_cast<long long>(ms));
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
