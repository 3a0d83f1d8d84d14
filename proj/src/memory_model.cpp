#include <dscsim/error.hpp>
#include <dscsim/memory_model.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace dscsim {

namespace {

[[noreturn]] void bad_index(const std::string& what) { throw Error(ErrorCode::BadIndex, what); }

}  // namespace

// ---------------------------------------------------------------------------
// BankedBuffer

BankedBuffer::BankedBuffer(std::size_t words_per_bank, std::size_t word_bytes)
    : words_per_bank_(words_per_bank), word_bytes_(word_bytes) {
    for (auto& b : banks_) {
        b.assign(words_per_bank * word_bytes, 0);
    }
}

std::size_t BankedBuffer::offset(std::size_t bank, std::size_t addr) const {
    if (bank >= kBanks || addr >= words_per_bank_) {
        bad_index("bank " + std::to_string(bank) + " address " + std::to_string(addr));
    }
    return addr * word_bytes_;
}

void BankedBuffer::write(std::size_t bank, std::size_t addr, std::span<const std::int8_t> word) {
    const std::size_t off = offset(bank, addr);
    if (word.size() != word_bytes_) {
        throw Error(ErrorCode::ShapeMismatch, "word of " + std::to_string(word.size()) + " bytes, bank word is " +
                                                  std::to_string(word_bytes_));
    }
    std::copy(word.begin(), word.end(), banks_[bank].begin() + static_cast<std::ptrdiff_t>(off));
    ++writes_[bank];
}

std::span<const std::int8_t> BankedBuffer::read(std::size_t bank, std::size_t addr) {
    const std::size_t off = offset(bank, addr);
    ++reads_[bank];
    return std::span<const std::int8_t>(banks_[bank]).subspan(off, word_bytes_);
}

std::uint64_t BankedBuffer::total_reads() const noexcept {
    return std::accumulate(reads_.begin(), reads_.end(), std::uint64_t{0});
}

std::uint64_t BankedBuffer::total_writes() const noexcept {
    return std::accumulate(writes_.begin(), writes_.end(), std::uint64_t{0});
}

// ---------------------------------------------------------------------------
// IfmapBuffer

IfmapBuffer::IfmapBuffer(const QuantTensor& input)
    : height_(input.height()),
      width_(input.width()),
      cols_per_bank_((input.width() + 2) / 3),
      banks_(((input.height() + 2) / 3) * ((input.width() + 2) / 3), input.channels()) {
    for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
            banks_.write(bank_id(r, c), address(r, c), input.pixel(r, c));
        }
    }
}

std::size_t IfmapBuffer::address(std::size_t row, std::size_t col) const noexcept {
    return (row / 3) * cols_per_bank_ + col / 3;
}

WindowSlots IfmapBuffer::window_read(std::ptrdiff_t center_r, std::ptrdiff_t center_c) {
    WindowSlots w;
    for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
            const std::ptrdiff_t r = center_r + dr;
            const std::ptrdiff_t c = center_c + dc;
            if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(height_) ||
                c >= static_cast<std::ptrdiff_t>(width_)) {
                continue;
            }
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            w.slots[static_cast<std::size_t>((dr + 1) * 3 + (dc + 1))] = banks_.read(bank_id(ur, uc), address(ur, uc));
            ++w.in_bounds;
        }
    }
    ++window_reads_;
    return w;
}

// ---------------------------------------------------------------------------
// ExFilterBuffer

ExFilterBuffer::ExFilterBuffer(std::span<const std::int8_t> ex_w, std::size_t m_expanded, std::size_t n_in)
    : m_expanded_(m_expanded), n_in_(n_in), storage_(ex_w.begin(), ex_w.end()) {
    if (n_in % kExChunkBytes != 0 || storage_.size() != m_expanded * n_in) {
        throw Error(ErrorCode::ShapeMismatch, "expansion filters must be M x n_in with n_in a multiple of 8");
    }
}

std::span<const std::int8_t> ExFilterBuffer::read_chunk(std::size_t m, std::size_t chunk_idx) {
    if (m >= m_expanded_ || chunk_idx >= chunks_per_filter()) {
        bad_index("expansion filter " + std::to_string(m) + " chunk " + std::to_string(chunk_idx));
    }
    ++reads_;
    return std::span<const std::int8_t>(storage_).subspan(m * n_in_ + chunk_idx * kExChunkBytes, kExChunkBytes);
}

// ---------------------------------------------------------------------------
// DwFilterBuffer

DwFilterBuffer::DwFilterBuffer(std::span<const std::int8_t> dw_w, std::size_t m_expanded)
    : m_expanded_(m_expanded), banks_(m_expanded, 1) {
    if (dw_w.size() != m_expanded * kKernelTaps) {
        throw Error(ErrorCode::ShapeMismatch, "depthwise filters must be M x 9");
    }
    for (std::size_t m = 0; m < m_expanded; ++m) {
        for (std::size_t k = 0; k < kKernelTaps; ++k) {
            banks_.write(k, m, dw_w.subspan(m * kKernelTaps + k, 1));
        }
    }
}

std::array<std::int8_t, kKernelTaps> DwFilterBuffer::read(std::size_t m) {
    if (m >= m_expanded_) {
        bad_index("depthwise filter " + std::to_string(m));
    }
    std::array<std::int8_t, kKernelTaps> out{};
    for (std::size_t k = 0; k < kKernelTaps; ++k) {
        out[k] = banks_.read(k, m)[0];
    }
    ++reads_;
    return out;
}

// ---------------------------------------------------------------------------
// PrWeightBuffers

PrWeightBuffers::PrWeightBuffers(std::span<const std::int8_t> pr_w, std::size_t n_out, std::size_t m_expanded,
                                 std::size_t engines)
    : n_out_(n_out), m_expanded_(m_expanded), engines_(engines), stores_(engines), reads_(engines, 0) {
    if (engines == 0 || engines > kProjectionEngines) {
        throw Error(ErrorCode::BadIndex, "projection engine count must be in [1, 56]");
    }
    if (pr_w.size() != n_out * m_expanded) {
        throw Error(ErrorCode::ShapeMismatch, "projection weights must be n_out x M");
    }
    for (std::size_t c = 0; c < n_out; ++c) {
        auto& store = stores_[c % engines];
        const auto row = pr_w.subspan(c * m_expanded, m_expanded);
        store.insert(store.end(), row.begin(), row.end());
        loaded_ += m_expanded;
    }
}

void PrWeightBuffers::select_group(std::size_t group) {
    if (group >= groups()) {
        bad_index("projection group " + std::to_string(group));
    }
    group_ = group;
}

std::size_t PrWeightBuffers::active_engines() const noexcept {
    return std::min(engines_, n_out_ - group_base());
}

std::int8_t PrWeightBuffers::read(std::size_t engine, std::size_t m) {
    if (engine >= active_engines() || m >= m_expanded_) {
        bad_index("projection engine " + std::to_string(engine) + " channel " + std::to_string(m));
    }
    ++reads_[engine];
    return stores_[engine][group_ * m_expanded_ + m];
}

std::uint64_t PrWeightBuffers::total_reads() const noexcept {
    return std::accumulate(reads_.begin(), reads_.end(), std::uint64_t{0});
}

// ---------------------------------------------------------------------------
// MemorySystem

MemorySystem::MemorySystem(const BlockConfig& cfg, const BlockWeights& weights, const QuantTensor& input,
                           std::size_t projection_engines)
    : ifmap_(input),
      ex_(weights.ex_w, cfg.m_expanded, cfg.n_in),
      dw_(weights.dw_w, cfg.m_expanded),
      pr_(weights.pr_w, cfg.n_out, cfg.m_expanded, projection_engines) {}

void MemorySystem::record_output_write(std::size_t bytes) noexcept {
    ++output_writes_.accesses;
    output_writes_.bytes += bytes;
}

AccessCounters MemorySystem::snapshot_counters() const {
    AccessCounters s;
    const std::uint64_t pixel_bytes = ifmap_.channels();
    s.ifmap_reads = {ifmap_.banks().total_reads(), ifmap_.banks().total_reads() * pixel_bytes};
    s.ifmap_window_reads = ifmap_.window_reads();
    s.ex_filter_reads = {ex_.reads(), ex_.reads() * kExChunkBytes};
    s.dw_filter_reads = {dw_.reads(), dw_.reads() * kKernelTaps};
    s.pr_weight_reads = {pr_.total_reads(), pr_.total_reads()};
    s.output_writes = output_writes_;

    s.ifmap_loads = {ifmap_.banks().total_writes(), ifmap_.banks().total_writes() * pixel_bytes};
    s.ex_filter_loads = {ex_.loaded_bytes() / kExChunkBytes, ex_.loaded_bytes()};
    s.dw_filter_loads = {dw_.loaded_bytes() / kKernelTaps, dw_.loaded_bytes()};
    s.pr_weight_loads = {pr_.loaded_bytes(), pr_.loaded_bytes()};
    return s;
}

}  // namespace dscsim
