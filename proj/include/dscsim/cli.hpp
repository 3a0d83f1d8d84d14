#pragma once

#include <dscsim/core_types.hpp>
#include <dscsim/fused_engine.hpp>
#include <dscsim/timing_model.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dscsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMismatch = 2;
inline constexpr int kExitIo = 3;

/// Line-based `key = value` block description, `#` starts a comment.
/// Required: in_h, in_w, n_in, m_expanded, n_out. Optional: stride (1),
/// {in,ex,dw,pr}_zp (0), {in,ex,dw,pr}_scale (1.0), ex_act_max / dw_act_max
/// (127), and multiplier / shift / bias which, when any is present, fix every
/// channel's requant spec (defaults 2^30 / 0 / 0). Errors carry the line.
BlockConfig parse_config(std::string_view text);

/// Everything needed to reproduce one CLI run.
struct RunManifest {
    std::string command;
    BlockConfig cfg;
    std::string source;  // "preset:<name>", "config:<path>" or "custom"
    std::uint64_t seed = 42;
    std::vector<PipelineVersion> versions;
    StageLatencies latencies;
    std::string out_path;
    bool machine = false;
    bool all_presets = false;
};

/// Writes the manifest as stable `key=value` lines.
void write_manifest(const RunManifest& m, std::ostream& os);

using FusedRunner =
    std::function<FusedRunResult(const BlockConfig&, const BlockWeights&, const QuantTensor&)>;

struct VerifyReport {
    bool identical = false;
    std::optional<std::array<std::size_t, 3>> first_mismatch;  // (row, col, ch)
    std::int8_t expected = 0;
    std::int8_t actual = 0;
    std::size_t peak_transient_bytes = 0;
    std::size_t golden_f1_bytes = 0;
};

/// Generates the seeded workload, runs golden and `runner`, and compares.
VerifyReport verify_block(const BlockConfig& cfg, std::uint64_t seed, const FusedRunner& runner);

int run_verify(const RunManifest& m, std::ostream& out, const FusedRunner& runner);
int run_traffic(const RunManifest& m, std::ostream& out);
int run_timing(const RunManifest& m, std::ostream& out);
int run_macs(const RunManifest& m, std::ostream& out, std::optional<std::array<std::uint64_t, 4>> explicit_wkmn);
int run_gen(const RunManifest& m, std::ostream& out);

/// Applies `key=value` overrides to a latency set; throws ParseError.
void apply_latency_override(StageLatencies& lat, std::string_view assignment);

/// Full command-line entry point. Exit codes: 0 ok, 1 usage, 2 verification
/// mismatch, 3 IO failure.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace dscsim
