#include <dscsim/analysis.hpp>
#include <dscsim/cli.hpp>
#include <dscsim/error.hpp>
#include <dscsim/golden.hpp>
#include <dscsim/tensor_io.hpp>
#include <dscsim/workload.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace dscsim {

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_int(std::string_view v, std::size_t line, std::string_view key) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        parse_fail(line, "bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    return out;
}

float parse_scale(std::string_view v, std::size_t line, std::string_view key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        parse_fail(line, "bad number for " + std::string(key) + ": '" + std::string(v) + "'");
    }
    if (!(out > 0.0)) {
        throw Error(ErrorCode::BadQuantParams, "line " + std::to_string(line) + ": " + std::string(key) +
                                                   " must be positive");
    }
    return static_cast<float>(out);
}

std::int8_t parse_i8(std::string_view v, std::size_t line, std::string_view key) {
    const auto x = parse_int<std::int64_t>(v, line, key);
    if (x < -128 || x > 127) {
        parse_fail(line, std::string(key) + " must be in [-128, 127]");
    }
    return static_cast<std::int8_t>(x);
}

}  // namespace

BlockConfig parse_config(std::string_view text) {
    BlockConfig cfg;
    std::map<std::string, std::size_t, std::less<>> seen;  // key -> line
    RequantSpec override_spec;
    bool has_override = false;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            parse_fail(line_no, "expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            parse_fail(line_no, "expected key = value");
        }
        if (!seen.emplace(key, line_no).second) {
            parse_fail(line_no, "duplicate key " + key);
        }

        const auto at_line = [line_no](ErrorCode code, const std::string& msg) {
            throw Error(code, "line " + std::to_string(line_no) + ": " + msg);
        };
        const auto dim = [&](std::size_t& field) {
            const auto v = parse_int<std::int64_t>(val, line_no, key);
            if (v < 1) at_line(ErrorCode::EmptyDims, key + " must be at least 1");
            field = static_cast<std::size_t>(v);
        };
        const auto channels = [&](std::size_t& field) {
            dim(field);
            if (field > kMaxChannels) at_line(ErrorCode::ChannelLimit, key + " exceeds 1024");
        };

        if (key == "in_h") {
            dim(cfg.in_h);
        } else if (key == "in_w") {
            dim(cfg.in_w);
        } else if (key == "n_in") {
            channels(cfg.n_in);
            if (cfg.n_in % kChannelAlignment != 0) {
                at_line(ErrorCode::ChannelAlignment, "n_in=" + std::string(val) + " is not a multiple of 8");
            }
        } else if (key == "m_expanded") {
            channels(cfg.m_expanded);
        } else if (key == "n_out") {
            channels(cfg.n_out);
        } else if (key == "stride") {
            const auto s = parse_int<std::int64_t>(val, line_no, key);
            if (s != 1 && s != 2) at_line(ErrorCode::BadStride, "stride=" + std::string(val));
            cfg.stride = static_cast<std::size_t>(s);
        } else if (key == "in_zp") {
            cfg.in_qp.zero_point = parse_i8(val, line_no, key);
        } else if (key == "ex_zp") {
            cfg.ex_out_qp.zero_point = parse_i8(val, line_no, key);
        } else if (key == "dw_zp") {
            cfg.dw_out_qp.zero_point = parse_i8(val, line_no, key);
        } else if (key == "pr_zp") {
            cfg.pr_out_qp.zero_point = parse_i8(val, line_no, key);
        } else if (key == "in_scale") {
            cfg.in_qp.scale = parse_scale(val, line_no, key);
        } else if (key == "ex_scale") {
            cfg.ex_out_qp.scale = parse_scale(val, line_no, key);
        } else if (key == "dw_scale") {
            cfg.dw_out_qp.scale = parse_scale(val, line_no, key);
        } else if (key == "pr_scale") {
            cfg.pr_out_qp.scale = parse_scale(val, line_no, key);
        } else if (key == "ex_act_max") {
            cfg.ex_act.ceiling = parse_i8(val, line_no, key);
        } else if (key == "dw_act_max") {
            cfg.dw_act.ceiling = parse_i8(val, line_no, key);
        } else if (key == "multiplier" || key == "shift" || key == "bias") {
            const auto v = parse_int<std::int64_t>(val, line_no, key);
            has_override = true;
            if (key == "multiplier") {
                if (v < kMinMultiplier || v > kMaxMultiplier) at_line(ErrorCode::BadQuantParams, "multiplier outside [2^30, 2^31)");
                override_spec.multiplier = static_cast<std::int32_t>(v);
            } else if (key == "shift") {
                if (v < 0 || v > kMaxShift) at_line(ErrorCode::BadQuantParams, "shift outside [0, 31]");
                override_spec.shift = static_cast<std::int32_t>(v);
            } else {
                if (v < INT32_MIN || v > INT32_MAX) at_line(ErrorCode::BadQuantParams, "bias outside int32");
                override_spec.bias = static_cast<std::int32_t>(v);
            }
        } else {
            parse_fail(line_no, "unknown key " + key);
        }
    }

    for (const char* required : {"in_h", "in_w", "n_in", "m_expanded", "n_out"}) {
        if (!seen.contains(required)) {
            throw Error(ErrorCode::ParseError, std::string("missing required key ") + required);
        }
    }
    if (has_override) {
        cfg.requant_override = override_spec;
    }
    return validate_config(cfg);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string cfg_string(const BlockConfig& c) {
    std::ostringstream os;
    os << c.in_h << "x" << c.in_w << "x" << c.n_in << " M=" << c.m_expanded << " n_out=" << c.n_out
       << " stride=" << c.stride;
    return os.str();
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace

void write_manifest(const RunManifest& m, std::ostream& os) {
    const auto& c = m.cfg;
    os << "command=" << m.command << "\n";
    os << "source=" << m.source << "\n";
    os << "in_h=" << c.in_h << "\nin_w=" << c.in_w << "\nn_in=" << c.n_in << "\nm_expanded=" << c.m_expanded
       << "\nn_out=" << c.n_out << "\nstride=" << c.stride << "\n";
    os << "in_zp=" << int{c.in_qp.zero_point} << "\nex_zp=" << int{c.ex_out_qp.zero_point}
       << "\ndw_zp=" << int{c.dw_out_qp.zero_point} << "\npr_zp=" << int{c.pr_out_qp.zero_point} << "\n";
    if (c.requant_override) {
        os << "multiplier=" << c.requant_override->multiplier << "\nshift=" << c.requant_override->shift
           << "\nbias=" << c.requant_override->bias << "\n";
    }
    os << "seed=" << m.seed << "\n";
    if (!m.versions.empty()) {
        os << "versions=";
        for (std::size_t i = 0; i < m.versions.size(); ++i) {
            os << (i ? "," : "") << to_string(m.versions[i]);
        }
        os << "\n";
        const auto& l = m.latencies;
        os << "lat.ex_mac_per_chunk=" << l.ex_mac_per_chunk << "\nlat.ex_quant=" << l.ex_quant
           << "\nlat.dw_mac=" << l.dw_mac << "\nlat.dw_quant=" << l.dw_quant << "\nlat.pr_mac=" << l.pr_mac
           << "\nlat.readback_per_value=" << l.readback_per_value << "\nlat.pixel_overhead=" << l.pixel_overhead
           << "\n";
    }
}

VerifyReport verify_block(const BlockConfig& cfg, std::uint64_t seed, const FusedRunner& runner) {
    const auto wl = generate_workload(cfg, seed);
    const auto golden = run_block_golden(cfg, wl.weights, wl.input);
    const auto fused = runner(cfg, wl.weights, wl.input);

    VerifyReport rep;
    rep.peak_transient_bytes = fused.transient.peak_transient_bytes;
    rep.golden_f1_bytes = golden.f1.size();

    const auto& want = golden.out;
    const auto& got = fused.out;
    if (got.height() != want.height() || got.width() != want.width() || got.channels() != want.channels()) {
        rep.first_mismatch = std::array<std::size_t, 3>{0, 0, 0};
        return rep;
    }
    const auto a = want.data();
    const auto b = got.data();
    const auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin());
    if (ia == a.end()) {
        rep.identical = true;
        return rep;
    }
    const auto off = static_cast<std::size_t>(ia - a.begin());
    const std::size_t ch = off % want.channels();
    const std::size_t px = off / want.channels();
    rep.first_mismatch = std::array<std::size_t, 3>{px / want.width(), px % want.width(), ch};
    rep.expected = *ia;
    rep.actual = *ib;
    return rep;
}

int run_verify(const RunManifest& m, std::ostream& out, const FusedRunner& runner) {
    const auto rep = verify_block(m.cfg, m.seed, runner);
    const double ratio = rep.peak_transient_bytes
                             ? static_cast<double>(rep.golden_f1_bytes) / static_cast<double>(rep.peak_transient_bytes)
                             : 0.0;
    if (m.machine) {
        write_manifest(m, out);
        out << "result=" << (rep.identical ? "IDENTICAL" : "MISMATCH") << "\n";
        if (rep.first_mismatch) {
            const auto& [r, c, ch] = *rep.first_mismatch;
            out << "mismatch.row=" << r << "\nmismatch.col=" << c << "\nmismatch.ch=" << ch
                << "\nmismatch.expected=" << int{rep.expected} << "\nmismatch.actual=" << int{rep.actual} << "\n";
        }
        out << "peak_transient_bytes=" << rep.peak_transient_bytes << "\n";
        out << "golden_f1_bytes=" << rep.golden_f1_bytes << "\n";
        out << "buffer_ratio=" << fixed(ratio, 2) << "\n";
    } else {
        out << "verify " << cfg_string(m.cfg) << " seed=" << m.seed << "\n";
        if (rep.identical) {
            out << "IDENTICAL\n";
        } else if (rep.first_mismatch) {
            const auto& [r, c, ch] = *rep.first_mismatch;
            out << "MISMATCH at (row=" << r << ", col=" << c << ", ch=" << ch << "): golden " << int{rep.expected}
                << ", fused " << int{rep.actual} << "\n";
        }
        out << std::left << std::setw(28) << "fused peak transient bytes" << rep.peak_transient_bytes << "\n";
        out << std::left << std::setw(28) << "golden F1 buffer bytes" << rep.golden_f1_bytes << "\n";
        out << std::left << std::setw(28) << "ratio" << fixed(ratio, 2) << "x\n";
    }
    return rep.identical ? kExitOk : kExitMismatch;
}

namespace {

void write_breakdown(std::ostream& out, std::string_view prefix, const TrafficBreakdown& t) {
    out << prefix << ".input=" << t.input_bytes << "\n";
    out << prefix << ".weights=" << t.weight_bytes << "\n";
    out << prefix << ".intermediate=" << t.intermediate_bytes << "\n";
    out << prefix << ".output=" << t.output_bytes << "\n";
    out << prefix << ".total=" << t.total_bytes() << "\n";
}

void human_breakdown(std::ostream& out, const TrafficBreakdown& base, const TrafficBreakdown& fused) {
    const auto row = [&out](std::string_view name, std::uint64_t b, std::uint64_t f) {
        out << "  " << std::left << std::setw(14) << name << std::right << std::setw(12) << b << std::setw(12) << f
            << "\n";
    };
    out << "  " << std::left << std::setw(14) << "bytes" << std::right << std::setw(12) << "baseline"
        << std::setw(12) << "fused" << "\n";
    row("input", base.input_bytes, fused.input_bytes);
    row("weights", base.weight_bytes, fused.weight_bytes);
    row("intermediate", base.intermediate_bytes, fused.intermediate_bytes);
    row("output", base.output_bytes, fused.output_bytes);
    row("total", base.total_bytes(), fused.total_bytes());
}

int traffic_presets(const RunManifest& m, std::ostream& out) {
    TrafficBreakdown base_sum;
    TrafficBreakdown fused_sum;
    bool all_pass = true;
    if (m.machine) {
        out << "command=traffic\nsource=presets\n";
    } else {
        out << std::left << std::setw(8) << "layer" << std::setw(14) << "workload" << std::right << std::setw(14)
            << "intermediate" << std::setw(12) << "reference" << std::setw(8) << "check" << std::setw(12)
            << "reduction" << "\n";
    }
    for (const auto& p : layer_presets()) {
        const auto cfg = p.config();
        const auto base = baseline_traffic(cfg);
        const auto fused = fused_traffic(cfg);
        base_sum += base;
        fused_sum += fused;
        const bool pass = base.intermediate_bytes == p.reference_intermediate_bytes;
        all_pass = all_pass && pass;
        const double red = reduction_percent(base, fused);
        if (m.machine) {
            out << "preset." << p.name << ".intermediate=" << base.intermediate_bytes << "\n";
            out << "preset." << p.name << ".reference=" << p.reference_intermediate_bytes << "\n";
            out << "preset." << p.name << ".check=" << (pass ? "PASS" : "FAIL") << "\n";
            out << "preset." << p.name << ".baseline_total=" << base.total_bytes() << "\n";
            out << "preset." << p.name << ".fused_total=" << fused.total_bytes() << "\n";
            out << "preset." << p.name << ".reduction_percent=" << fixed(red, 3) << "\n";
        } else {
            std::ostringstream wl;
            wl << p.in_h << "x" << p.in_w << "x" << p.n_in;
            out << std::left << std::setw(8) << p.name << std::setw(14) << wl.str() << std::right << std::setw(14)
                << base.intermediate_bytes << std::setw(12) << p.reference_intermediate_bytes << std::setw(8)
                << (pass ? "PASS" : "FAIL") << std::setw(11) << fixed(red, 2) << "%\n";
        }
    }
    const double agg = reduction_percent(base_sum, fused_sum);
    const bool in_window = agg >= kReductionWindowLo && agg <= kReductionWindowHi;
    if (m.machine) {
        out << "aggregate.baseline_total=" << base_sum.total_bytes() << "\n";
        out << "aggregate.fused_total=" << fused_sum.total_bytes() << "\n";
        out << "aggregate.reduction_percent=" << fixed(agg, 3) << "\n";
        out << "aggregate.reference_percent=" << fixed(kReferenceReductionPercent, 1) << "\n";
        out << "aggregate.window=" << (in_window ? "IN" : "OUT") << "\n";
    } else {
        out << "aggregate reduction " << fixed(agg, 2) << "% (reference about " << fixed(kReferenceReductionPercent, 0)
            << "%, window [" << fixed(kReductionWindowLo, 0) << ", " << fixed(kReductionWindowHi, 0) << "]: "
            << (in_window ? "IN" : "OUT") << ")\n";
    }
    return kExitOk;
}

}  // namespace

int run_traffic(const RunManifest& m, std::ostream& out) {
    if (m.all_presets) {
        return traffic_presets(m, out);
    }
    const auto base = baseline_traffic(m.cfg);
    const auto fused = fused_traffic(m.cfg);
    const double red = reduction_percent(base, fused);

    const LayerPreset* preset = nullptr;
    if (m.source.starts_with("preset:")) {
        preset = find_preset(std::string_view(m.source).substr(7));
    }
    if (m.machine) {
        write_manifest(m, out);
        write_breakdown(out, "baseline", base);
        write_breakdown(out, "fused", fused);
        out << "fused.stream_passes=" << fused.stream_passes << "\n";
        out << "sram_buffer_min=" << buffer_sram_min(m.cfg.in_h, m.cfg.in_w, m.cfg.m_expanded) << "\n";
        out << "reduction_percent=" << fixed(red, 3) << "\n";
        if (preset) {
            out << "intermediate=" << base.intermediate_bytes << " "
                << (base.intermediate_bytes == preset->reference_intermediate_bytes ? "PASS" : "FAIL") << "\n";
        }
    } else {
        out << "traffic " << cfg_string(m.cfg) << "\n";
        human_breakdown(out, base, fused);
        out << "  layer-by-layer SRAM buffer minimum: "
            << buffer_sram_min(m.cfg.in_h, m.cfg.in_w, m.cfg.m_expanded) << " bytes\n";
        if (fused.stream_passes > 1) {
            out << "  fused stream passes (n_out > 56): " << fused.stream_passes << "\n";
        }
        out << "  reduction: " << fixed(red, 2) << "%\n";
        if (preset) {
            out << "  intermediate=" << base.intermediate_bytes << " "
                << (base.intermediate_bytes == preset->reference_intermediate_bytes ? "PASS" : "FAIL")
                << " (reference " << preset->reference_intermediate_bytes << ")\n";
        }
    }
    return kExitOk;
}

int run_timing(const RunManifest& m, std::ostream& out) {
    std::vector<TimingReport> reports;
    for (auto v : m.versions) {
        reports.push_back(simulate(v, m.cfg, m.latencies));
    }
    if (m.machine) {
        write_manifest(m, out);
    } else {
        out << "timing " << cfg_string(m.cfg) << "\n";
    }
    for (const auto& r : reports) {
        const auto v = to_string(r.version);
        if (m.machine) {
            out << v << ".total_cycles=" << r.total_cycles << "\n";
            out << v << ".steady_state_interval=" << r.steady_state_interval << "\n";
            out << v << ".pixels_in_flight_max=" << r.pixels_in_flight_max << "\n";
            for (std::size_t s = 0; s < kStageCount; ++s) {
                const auto name = to_string(static_cast<Stage>(s));
                out << v << ".busy." << name << "=" << r.busy[s] << "\n";
                out << v << ".idle." << name << "=" << r.idle[s] << "\n";
            }
        } else {
            out << "  " << v << ": " << r.total_cycles << " cycles, II=" << r.steady_state_interval
                << ", pixels in flight <= " << r.pixels_in_flight_max << "\n";
            for (std::size_t s = 0; s < kStageCount; ++s) {
                const double util = r.total_cycles ? 100.0 * static_cast<double>(r.busy[s]) /
                                                         static_cast<double>(r.total_cycles)
                                                   : 0.0;
                out << "      " << std::left << std::setw(10) << to_string(static_cast<Stage>(s)) << std::right
                    << " busy " << std::setw(12) << r.busy[s] << "  idle " << std::setw(12) << r.idle[s] << "  ("
                    << fixed(util, 1) << "%)\n";
            }
        }
    }

    bool ordered = true;
    const auto find = [&reports](PipelineVersion v) -> const TimingReport* {
        for (const auto& r : reports) {
            if (r.version == v) return &r;
        }
        return nullptr;
    };
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = 0; j < reports.size(); ++j) {
            if (reports[i].version < reports[j].version && reports[i].total_cycles < reports[j].total_cycles) {
                ordered = false;
            }
            if (i < j && reports[i].version != reports[j].version) {
                const auto& a = reports[i].version < reports[j].version ? reports[i] : reports[j];
                const auto& b = reports[i].version < reports[j].version ? reports[j] : reports[i];
                const std::string key = "speedup." + std::string(to_string(b.version)) + "_over_" +
                                        std::string(to_string(a.version));
                if (m.machine) {
                    out << key << "=" << fixed(speedup(a, b), 4) << "\n";
                } else {
                    out << "  " << to_string(b.version) << " over " << to_string(a.version) << ": "
                        << fixed(speedup(a, b), 3) << "x\n";
                }
            }
        }
    }
    if (reports.size() > 1) {
        out << (m.machine ? "ordering=" : "  ordering v1 >= v2 >= v3: ") << (ordered ? "OK" : "VIOLATED") << "\n";
    }
    const auto window_line = [&](PipelineVersion fast, const RatioWindow& w) {
        const auto* base = find(PipelineVersion::V1);
        const auto* f = find(fast);
        if (!base || !f) return;
        const double s = speedup(*base, *f);
        const std::string tag = std::string(to_string(fast)) + "_over_v1";
        if (m.machine) {
            out << "window." << tag << "=" << (w.contains(s) ? "IN" : "OUT") << "\n";
        } else {
            out << "  " << tag << " " << fixed(s, 3) << " in [" << fixed(w.lo, 1) << ", " << fixed(w.hi, 1)
                << "]: " << (w.contains(s) ? "yes" : "no") << "\n";
        }
    };
    window_line(PipelineVersion::V2, kV2OverV1Window);
    window_line(PipelineVersion::V3, kV3OverV1Window);
    return ordered ? kExitOk : kExitMismatch;
}

int run_macs(const RunManifest& m, std::ostream& out, std::optional<std::array<std::uint64_t, 4>> wkmn) {
    std::uint64_t w = 0, k = 3, mm = 0, n = 0;
    if (wkmn) {
        w = (*wkmn)[0];
        k = (*wkmn)[1];
        mm = (*wkmn)[2];
        n = (*wkmn)[3];
    } else {
        if (m.cfg.out_h() != m.cfg.out_w()) {
            throw Error(ErrorCode::ShapeMismatch, "macs needs a square map; pass --W/--K/--M/--N instead");
        }
        w = m.cfg.out_h();
        mm = m.cfg.m_expanded;
        n = m.cfg.n_out;
    }
    const auto sc = mac_cost_standard(w, k, mm, n);
    const auto dsc = mac_cost_dsc(w, k, mm, n);
    const auto ratio = dsc_ratio_exact(k, n);
    if (m.machine) {
        out << "command=macs\nW=" << w << "\nK=" << k << "\nM=" << mm << "\nN=" << n << "\n";
        out << "standard=" << sc << "\ndsc=" << dsc << "\n";
        out << "ratio=" << ratio.num << "/" << ratio.den << "\n";
        out << "ratio_value=" << fixed(ratio.value(), 6) << "\n";
        out << "fewer_ops_factor=" << fixed(1.0 / ratio.value(), 3) << "\n";
    } else {
        out << "MACs for W=" << w << " K=" << k << " M=" << mm << " N=" << n << "\n";
        out << "  standard convolution:            " << sc << "\n";
        out << "  depthwise separable convolution: " << dsc << "\n";
        out << "  ratio 1/N + 1/K^2 = " << ratio.num << "/" << ratio.den << " = " << fixed(ratio.value(), 6)
            << " (" << fixed(1.0 / ratio.value(), 2) << "x fewer)\n";
    }
    return kExitOk;
}

int run_gen(const RunManifest& m, std::ostream& out) {
    namespace fs = std::filesystem;
    const fs::path dir = m.out_path;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
    const auto wl = generate_workload(m.cfg, m.seed);
    const auto trace = run_block_golden(m.cfg, wl.weights, wl.input);
    const std::array<std::pair<const char*, const QuantTensor*>, 4> files = {{
        {"input.qtsr", &wl.input},
        {"f1.qtsr", &trace.f1},
        {"f2.qtsr", &trace.f2},
        {"output.qtsr", &trace.out},
    }};
    for (const auto& [name, t] : files) {
        save_tensor(*t, dir / name);
        out << (m.machine ? "wrote=" : "wrote ") << (dir / name).string() << "\n";
    }
    std::ofstream mf(dir / "manifest.txt");
    if (!mf) {
        throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
    }
    write_manifest(m, mf);
    return kExitOk;
}

void apply_latency_override(StageLatencies& lat, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw Error(ErrorCode::ParseError, "--lat expects KEY=VAL, got '" + std::string(assignment) + "'");
    }
    const std::string key(trim(assignment.substr(0, eq)));
    const auto v = parse_int<std::uint64_t>(trim(assignment.substr(eq + 1)), 0, key);
    const std::map<std::string_view, std::uint64_t StageLatencies::*> fields = {
        {"ex_mac_per_chunk", &StageLatencies::ex_mac_per_chunk},
        {"ex_quant", &StageLatencies::ex_quant},
        {"dw_mac", &StageLatencies::dw_mac},
        {"dw_quant", &StageLatencies::dw_quant},
        {"pr_mac", &StageLatencies::pr_mac},
        {"readback_per_value", &StageLatencies::readback_per_value},
        {"pixel_overhead", &StageLatencies::pixel_overhead},
    };
    const auto it = fields.find(key);
    if (it == fields.end()) {
        throw Error(ErrorCode::ParseError, "unknown latency key " + key);
    }
    lat.*(it->second) = v;
    validate_latencies(lat);
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct CommonOptions {
    std::string preset;
    std::string config;
    std::uint64_t seed = 42;
    std::string out;
    bool machine = false;
};

void add_common(CLI::App* sub, CommonOptions& o, bool with_seed) {
    auto* p = sub->add_option("--preset", o.preset, "Workload preset: 3rd, 5th, 8th or 15th");
    auto* c = sub->add_option("--config", o.config, "Block config file (key = value lines)");
    p->excludes(c);
    if (with_seed) {
        sub->add_option("--seed", o.seed, "Workload seed");
    }
    sub->add_option("--out", o.out, "Write the report to PATH");
    sub->add_flag("--machine", o.machine, "Machine-readable key=value output");
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Fills cfg/source from --preset or --config; false when neither was given.
bool resolve_workload(const CommonOptions& o, RunManifest& m) {
    if (!o.preset.empty()) {
        const auto* p = find_preset(o.preset);
        if (!p) {
            throw Error(ErrorCode::ParseError, "unknown preset '" + o.preset + "' (expected 3rd, 5th, 8th, 15th)");
        }
        m.cfg = p->config();
        m.source = "preset:" + o.preset;
        return true;
    }
    if (!o.config.empty()) {
        m.cfg = parse_config(read_file(o.config));
        m.source = "config:" + o.config;
        return true;
    }
    return false;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::IoError:
        case ErrorCode::BadMagic:
        case ErrorCode::TruncatedStream:
        case ErrorCode::VersionMismatch:
            return kExitIo;
        default:
            return kExitUsage;
    }
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fused depthwise-separable block accelerator simulator", "dscsim"};
    app.require_subcommand(1);

    CommonOptions verify_o, traffic_o, timing_o, macs_o, gen_o;
    bool all_presets = false;
    std::string versions = "v1,v2,v3";
    std::vector<std::string> lat_overrides;
    std::optional<std::uint64_t> mw, mk, mm, mn;

    auto* verify = app.add_subcommand("verify", "Run fused and golden models and compare outputs");
    add_common(verify, verify_o, true);
    auto* traffic = app.add_subcommand("traffic", "Baseline vs fused data movement");
    add_common(traffic, traffic_o, false);
    traffic->add_flag("--presets", all_presets, "Report all four presets against reference bytes");
    auto* timing = app.add_subcommand("timing", "Cycle counts for pipeline versions");
    add_common(timing, timing_o, false);
    timing->add_option("--versions", versions, "Comma-separated subset of v1,v2,v3");
    timing->add_option("--lat", lat_overrides, "Latency override KEY=VAL (repeatable)");
    auto* macs = app.add_subcommand("macs", "Standard vs depthwise separable MAC counts");
    add_common(macs, macs_o, false);
    macs->add_option("--W", mw, "Spatial size");
    macs->add_option("--K", mk, "Kernel size");
    macs->add_option("--M", mm, "Input channels");
    macs->add_option("--N", mn, "Output channels");
    auto* gen = app.add_subcommand("gen", "Emit QTSR tensors for a seeded workload");
    add_common(gen, gen_o, true);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunManifest m;
        CommonOptions* o = nullptr;
        if (verify->parsed()) {
            o = &verify_o;
            m.command = "verify";
        } else if (traffic->parsed()) {
            o = &traffic_o;
            m.command = "traffic";
        } else if (timing->parsed()) {
            o = &timing_o;
            m.command = "timing";
        } else if (macs->parsed()) {
            o = &macs_o;
            m.command = "macs";
        } else {
            o = &gen_o;
            m.command = "gen";
        }
        m.seed = o->seed;
        m.machine = o->machine;
        m.out_path = o->out;
        m.all_presets = all_presets;

        const bool have_workload = resolve_workload(*o, m);
        std::optional<std::array<std::uint64_t, 4>> wkmn;
        if (m.command == "macs" && (mw || mn || mm || mk)) {
            if (!mw || !mm || !mn) {
                err << "macs: --W, --M and --N must be given together (--K defaults to 3)\n";
                return kExitUsage;
            }
            wkmn = std::array<std::uint64_t, 4>{*mw, mk.value_or(3), *mm, *mn};
        }
        if (!have_workload && !m.all_presets && !wkmn) {
            err << m.command << ": one of --preset or --config is required\n";
            return kExitUsage;
        }
        if (m.command == "gen" && m.out_path.empty()) {
            err << "gen: --out DIR is required\n";
            return kExitUsage;
        }
        if (m.command == "timing") {
            std::stringstream ss(versions);
            for (std::string item; std::getline(ss, item, ',');) {
                const auto v = parse_version(trim(item));
                if (!v) {
                    err << "timing: unknown version '" << item << "'\n";
                    return kExitUsage;
                }
                if (std::find(m.versions.begin(), m.versions.end(), *v) == m.versions.end()) {
                    m.versions.push_back(*v);
                }
            }
            std::sort(m.versions.begin(), m.versions.end());
            for (const auto& l : lat_overrides) {
                apply_latency_override(m.latencies, l);
            }
        }

        std::ostringstream report;
        int rc = kExitOk;
        if (m.command == "verify") {
            rc = run_verify(m, report, [](const BlockConfig& c, const BlockWeights& w, const QuantTensor& in) {
                return run_block_fused(c, w, in);
            });
        } else if (m.command == "traffic") {
            rc = run_traffic(m, report);
        } else if (m.command == "timing") {
            rc = run_timing(m, report);
        } else if (m.command == "macs") {
            rc = run_macs(m, report, wkmn);
        } else {
            rc = run_gen(m, report);
        }

        if (!m.out_path.empty() && m.command != "gen") {
            std::ofstream os(m.out_path, std::ios::binary | std::ios::trunc);
            if (!os || !(os << report.str()) || !os.flush()) {
                err << "cannot write " << m.out_path << "\n";
                return kExitIo;
            }
        } else {
            out << report.str();
        }
        return rc;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace dscsim
