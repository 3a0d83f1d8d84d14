#pragma once

#include <dscsim/core_types.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dscsim {

inline constexpr std::size_t kBanks = 9;
inline constexpr std::size_t kExChunkBytes = 8;
inline constexpr std::size_t kProjectionEngines = 56;

/// (row mod 3) * 3 + (col mod 3). Any aligned 3x3 window touches all nine banks.
constexpr std::size_t bank_id(std::size_t row, std::size_t col) noexcept {
    return (row % 3) * 3 + (col % 3);
}

/// Nine independent word arrays with per-bank access counters.
class BankedBuffer {
public:
    BankedBuffer(std::size_t words_per_bank, std::size_t word_bytes);

    void write(std::size_t bank, std::size_t addr, std::span<const std::int8_t> word);
    std::span<const std::int8_t> read(std::size_t bank, std::size_t addr);

    std::size_t word_bytes() const noexcept { return word_bytes_; }
    std::size_t words_per_bank() const noexcept { return words_per_bank_; }
    const std::array<std::uint64_t, kBanks>& read_counts() const noexcept { return reads_; }
    const std::array<std::uint64_t, kBanks>& write_counts() const noexcept { return writes_; }
    std::uint64_t total_reads() const noexcept;
    std::uint64_t total_writes() const noexcept;

private:
    std::size_t offset(std::size_t bank, std::size_t addr) const;

    std::size_t words_per_bank_;
    std::size_t word_bytes_;
    std::array<std::vector<std::int8_t>, kBanks> banks_;
    std::array<std::uint64_t, kBanks> reads_{};
    std::array<std::uint64_t, kBanks> writes_{};
};

/// Result of one 3x3 window request. Slot k = (dr + 1) * 3 + (dc + 1);
/// an empty span marks a padding slot synthesised by address logic.
struct WindowSlots {
    std::array<std::span<const std::int8_t>, 9> slots{};
    std::size_t in_bounds = 0;

    bool is_padding(std::size_t k) const noexcept { return slots[k].empty(); }
};

/// Input feature map held in nine banks, one pixel (n_in bytes) per word.
class IfmapBuffer {
public:
    explicit IfmapBuffer(const QuantTensor& input);

    /// Reads the window centred at (center_r, center_c). Out-of-bounds slots
    /// cost no bank access.
    WindowSlots window_read(std::ptrdiff_t center_r, std::ptrdiff_t center_c);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return banks_.word_bytes(); }
    std::uint64_t window_reads() const noexcept { return window_reads_; }
    const BankedBuffer& banks() const noexcept { return banks_; }

private:
    std::size_t address(std::size_t row, std::size_t col) const noexcept;

    std::size_t height_;
    std::size_t width_;
    std::size_t cols_per_bank_;
    BankedBuffer banks_;
    std::uint64_t window_reads_ = 0;
};

/// M expansion filters stored back to back, read 8 bytes per access. One
/// access is broadcast to all nine expansion engines.
class ExFilterBuffer {
public:
    ExFilterBuffer(std::span<const std::int8_t> ex_w, std::size_t m_expanded, std::size_t n_in);

    std::span<const std::int8_t> read_chunk(std::size_t m, std::size_t chunk_idx);

    std::size_t chunks_per_filter() const noexcept { return n_in_ / kExChunkBytes; }
    std::uint64_t reads() const noexcept { return reads_; }
    std::uint64_t loaded_bytes() const noexcept { return storage_.size(); }

private:
    std::size_t m_expanded_;
    std::size_t n_in_;
    std::vector<std::int8_t> storage_;
    std::uint64_t reads_ = 0;
};

/// Depthwise filters: bank k holds kernel tap k of every filter, so one
/// access returns a whole 3x3 (72-bit) filter.
class DwFilterBuffer {
public:
    DwFilterBuffer(std::span<const std::int8_t> dw_w, std::size_t m_expanded);

    std::array<std::int8_t, kKernelTaps> read(std::size_t m);

    std::uint64_t reads() const noexcept { return reads_; }
    std::uint64_t loaded_bytes() const noexcept { return banks_.total_writes() * banks_.word_bytes(); }
    const BankedBuffer& banks() const noexcept { return banks_; }

private:
    std::size_t m_expanded_;
    BankedBuffer banks_;
    std::uint64_t reads_ = 0;
};

/// Private per-engine projection weight stores. Engine e holds output
/// channels e, e + engines, e + 2 * engines, ...; select_group() picks which.
class PrWeightBuffers {
public:
    PrWeightBuffers(std::span<const std::int8_t> pr_w, std::size_t n_out, std::size_t m_expanded,
                    std::size_t engines = kProjectionEngines);

    void select_group(std::size_t group);
    std::int8_t read(std::size_t engine, std::size_t m);

    std::size_t engines() const noexcept { return engines_; }
    std::size_t groups() const noexcept { return (n_out_ + engines_ - 1) / engines_; }
    std::size_t group_base() const noexcept { return group_ * engines_; }
    /// Output channels served in the selected group.
    std::size_t active_engines() const noexcept;
    const std::vector<std::uint64_t>& engine_reads() const noexcept { return reads_; }
    std::uint64_t total_reads() const noexcept;
    std::uint64_t loaded_bytes() const noexcept { return loaded_; }

private:
    std::size_t n_out_;
    std::size_t m_expanded_;
    std::size_t engines_;
    std::size_t group_ = 0;
    std::vector<std::vector<std::int8_t>> stores_;
    std::vector<std::uint64_t> reads_;
    std::uint64_t loaded_ = 0;
};

struct AccessCount {
    std::uint64_t accesses = 0;
    std::uint64_t bytes = 0;

    friend bool operator==(const AccessCount&, const AccessCount&) = default;
};

/// On-chip reads plus off-chip fills/writes, per category.
struct AccessCounters {
    AccessCount ifmap_reads;      // bank word reads, n_in bytes each
    std::uint64_t ifmap_window_reads = 0;
    AccessCount ex_filter_reads;  // 8 bytes each
    AccessCount dw_filter_reads;  // 9 bytes each
    AccessCount pr_weight_reads;  // 1 byte each
    AccessCount output_writes;    // 1 byte each

    AccessCount ifmap_loads;
    AccessCount ex_filter_loads;
    AccessCount dw_filter_loads;
    AccessCount pr_weight_loads;

    friend bool operator==(const AccessCounters&, const AccessCounters&) = default;
};

/// Every buffer one fused block run touches.
class MemorySystem {
public:
    MemorySystem(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input,
                 std::size_t projection_engines = kProjectionEngines);

    IfmapBuffer& ifmap() noexcept { return ifmap_; }
    ExFilterBuffer& ex_filters() noexcept { return ex_; }
    DwFilterBuffer& dw_filters() noexcept { return dw_; }
    PrWeightBuffers& pr_weights() noexcept { return pr_; }

    void record_output_write(std::size_t bytes) noexcept;

    AccessCounters snapshot_counters() const;

private:
    IfmapBuffer ifmap_;
    ExFilterBuffer ex_;
    DwFilterBuffer dw_;
    PrWeightBuffers pr_;
    AccessCount output_writes_;
};

}  // namespace dscsim
