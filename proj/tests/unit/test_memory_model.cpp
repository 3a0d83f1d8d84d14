#include <catch_amalgamated.hpp>

#include <dscsim/error.hpp>
#include <dscsim/fused_engine.hpp>
#include <dscsim/memory_model.hpp>
#include <dscsim/workload.hpp>

#include <algorithm>
#include <numeric>

using namespace dscsim;

TEST_CASE("bank_id covers every bank in any 3x3 window") {
    for (std::size_t r = 0; r + 3 <= 40; ++r) {
        for (std::size_t c = 0; c + 3 <= 40; ++c) {
            std::array<int, kBanks> hits{};
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) {
                    ++hits[bank_id(r + i, c + j)];
                }
            }
            REQUIRE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        }
    }
    static_assert(bank_id(0, 0) == 0);
    static_assert(bank_id(4, 5) == 5);
    static_assert(bank_id(2, 1) == 7);
}

TEST_CASE("BankedBuffer read/write and counters") {
    BankedBuffer b(4, 2);
    const std::array<std::int8_t, 2> word{7, -1};
    b.write(3, 2, word);
    const auto got = b.read(3, 2);
    CHECK(got[0] == 7);
    CHECK(got[1] == -1);
    CHECK(b.read_counts()[3] == 1);
    CHECK(b.write_counts()[3] == 1);
    CHECK(b.total_reads() == 1);
    CHECK_THROWS_AS(b.read(9, 0), Error);
    CHECK_THROWS_AS(b.read(0, 4), Error);
    CHECK_THROWS_AS(b.write(0, 0, std::span(word).first(1)), Error);
}

TEST_CASE("IfmapBuffer returns stored pixels through bank addressing") {
    BlockConfig cfg;
    cfg.in_h = 7;
    cfg.in_w = 5;
    cfg.n_in = 16;
    cfg.m_expanded = 8;
    cfg.n_out = 8;
    const auto wl = generate_workload(cfg, 4);
    IfmapBuffer buf(wl.input);
    CHECK(buf.banks().total_writes() == 35);

    for (std::ptrdiff_t r = -1; r <= 7; ++r) {
        for (std::ptrdiff_t c = -1; c <= 5; ++c) {
            const auto w = buf.window_read(r, c);
            std::size_t inside = 0;
            for (std::size_t k = 0; k < 9; ++k) {
                const auto rr = r + static_cast<std::ptrdiff_t>(k / 3) - 1;
                const auto cc = c + static_cast<std::ptrdiff_t>(k % 3) - 1;
                const bool in = rr >= 0 && cc >= 0 && rr < 7 && cc < 5;
                REQUIRE(w.is_padding(k) == !in);
                if (in) {
                    ++inside;
                    const auto px = wl.input.pixel(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                    REQUIRE(std::equal(px.begin(), px.end(), w.slots[k].begin(), w.slots[k].end()));
                }
            }
            REQUIRE(w.in_bounds == inside);
        }
    }
    CHECK(buf.window_reads() == 9 * 7);
    const auto w = buf.window_read(0, 0);
    CHECK(w.in_bounds == 4);
}

TEST_CASE("Interior window touches each bank once") {
    QuantTensor t(9, 9, 8, {});
    IfmapBuffer buf(t);
    (void)buf.window_read(4, 4);
    for (auto n : buf.banks().read_counts()) {
        CHECK(n == 1);
    }
}

TEST_CASE("ExFilterBuffer serves 8-byte chunks") {
    std::vector<std::int8_t> w(3 * 16);
    std::iota(w.begin(), w.end(), 0);
    ExFilterBuffer f(w, 3, 16);
    CHECK(f.chunks_per_filter() == 2);
    const auto c = f.read_chunk(2, 1);
    REQUIRE(c.size() == 8);
    CHECK(c[0] == 40);
    CHECK(c[7] == 47);
    CHECK(f.reads() == 1);
    CHECK(f.loaded_bytes() == 48);
    CHECK_THROWS_AS(f.read_chunk(3, 0), Error);
    CHECK_THROWS_AS(f.read_chunk(0, 2), Error);
    CHECK_THROWS_AS(ExFilterBuffer(w, 4, 12), Error);
}

TEST_CASE("DwFilterBuffer stores tap k in bank k") {
    std::vector<std::int8_t> w(4 * 9);
    std::iota(w.begin(), w.end(), 0);
    DwFilterBuffer f(w, 4);
    const auto taps = f.read(2);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(taps[k] == static_cast<std::int8_t>(18 + k));
    }
    for (auto n : f.banks().read_counts()) {
        CHECK(n == 1);
    }
    for (auto n : f.banks().write_counts()) {
        CHECK(n == 4);
    }
    CHECK(f.loaded_bytes() == 36);
    CHECK_THROWS_AS(f.read(4), Error);
}

TEST_CASE("PrWeightBuffers distribute channels round robin") {
    const std::size_t n_out = 130;
    const std::size_t m = 3;
    std::vector<std::int8_t> w(n_out * m);
    for (std::size_t c = 0; c < n_out; ++c) {
        for (std::size_t j = 0; j < m; ++j) {
            w[c * m + j] = static_cast<std::int8_t>((c * 7 + j) % 251 - 125);
        }
    }
    PrWeightBuffers p(w, n_out, m);
    CHECK(p.groups() == 3);
    CHECK(p.active_engines() == 56);
    p.select_group(2);
    CHECK(p.group_base() == 112);
    CHECK(p.active_engines() == 18);
    CHECK(p.read(17, 2) == w[129 * m + 2]);
    CHECK_THROWS_AS(p.read(18, 0), Error);
    p.select_group(1);
    CHECK(p.read(0, 1) == w[56 * m + 1]);
    CHECK_THROWS_AS(p.select_group(3), Error);
    CHECK(p.loaded_bytes() == n_out * m);
    CHECK(p.engine_reads()[0] == 1);
    CHECK(p.total_reads() == 2);

    PrWeightBuffers small(w, n_out, m, 8);
    CHECK(small.groups() == 17);
    CHECK_THROWS_AS(PrWeightBuffers(w, n_out, m, 57), Error);
    CHECK_THROWS_AS(PrWeightBuffers(w, n_out, m, 0), Error);
}

TEST_CASE("Access counters after a fused run") {
    SplitMix64 rng(31);
    ConfigRanges ranges;
    ranges.spatial_max = 8;
    ranges.m_max_multiple = 6;
    ranges.n_out_max = 130;
    ranges.allow_stride2 = true;
    for (int i = 0; i < 40; ++i) {
        const auto cfg = random_config(rng, ranges);
        const auto wl = generate_workload(cfg, i);
        const auto res = run_block_fused(cfg, wl.weights, wl.input);
        const auto& a = res.access;
        const std::uint64_t pixels = cfg.out_pixels();
        const std::uint64_t groups = (cfg.n_out + 55) / 56;
        const std::uint64_t units = pixels * groups * cfg.m_expanded;

        std::uint64_t in_bounds = 0;
        for (std::size_t r = 0; r < cfg.out_h(); ++r) {
            for (std::size_t c = 0; c < cfg.out_w(); ++c) {
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const auto rr = static_cast<std::ptrdiff_t>(r * cfg.stride) + dr;
                        const auto cc = static_cast<std::ptrdiff_t>(c * cfg.stride) + dc;
                        in_bounds += rr >= 0 && cc >= 0 && rr < static_cast<std::ptrdiff_t>(cfg.in_h) &&
                                     cc < static_cast<std::ptrdiff_t>(cfg.in_w);
                    }
                }
            }
        }

        CHECK(res.groups == groups);
        CHECK(a.ifmap_window_reads == units);
        CHECK(a.ifmap_reads.accesses == in_bounds * groups * cfg.m_expanded);
        CHECK(a.ifmap_reads.bytes == a.ifmap_reads.accesses * cfg.n_in);
        CHECK(a.ex_filter_reads.accesses == units * (cfg.n_in / 8));
        CHECK(a.dw_filter_reads.accesses == units);
        CHECK(a.pr_weight_reads.accesses == pixels * cfg.m_expanded * cfg.n_out);
        CHECK(a.output_writes.accesses == pixels * cfg.n_out);
        CHECK(a.output_writes.bytes == pixels * cfg.n_out);

        CHECK(a.ifmap_loads.bytes == cfg.in_h * cfg.in_w * cfg.n_in);
        CHECK(a.ex_filter_loads.bytes == cfg.m_expanded * cfg.n_in);
        CHECK(a.dw_filter_loads.bytes == cfg.m_expanded * 9);
        CHECK(a.pr_weight_loads.bytes == cfg.n_out * cfg.m_expanded);
    }
}
