#pragma once

// Straight-loop reference for one block. Shares no code with the library
// beyond the data containers: requantization uses floor division on a wide
// integer instead of shifts, and padding is handled by index tests.

#include <dscsim/core_types.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace naive {

__extension__ using wide = __int128;

inline wide floor_div(wide a, wide b) {
    wide q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

inline int requant(std::int64_t acc, const dscsim::RequantSpec& s, int zp, int lo, int hi) {
    const wide t = wide{acc} + s.bias;
    const wide two31 = wide{1} << 31;
    wide h = floor_div(t * s.multiplier + two31 / 2, two31);
    if (s.shift > 0) {
        const wide d = wide{1} << s.shift;
        h = floor_div(h + d / 2, d);
    }
    const wide v = h + zp;
    return static_cast<int>(std::min<wide>(std::max<wide>(v, lo), hi));
}

inline std::pair<int, int> range(const dscsim::Activation& a, int zp) {
    if (!a.clamped) {
        return {-128, 127};
    }
    return {zp, std::max<int>(zp, a.ceiling)};
}

/// Output tensor data (out_h x out_w x n_out, NHWC).
inline std::vector<std::int8_t> run(const dscsim::BlockConfig& c, const dscsim::BlockWeights& w,
                                    const std::vector<std::int8_t>& in) {
    const long H = static_cast<long>(c.in_h);
    const long W = static_cast<long>(c.in_w);
    const long N = static_cast<long>(c.n_in);
    const long M = static_cast<long>(c.m_expanded);
    const long O = static_cast<long>(c.n_out);
    const long S = static_cast<long>(c.stride);
    const long OH = (H + S - 1) / S;
    const long OW = (W + S - 1) / S;
    const int in_zp = c.in_qp.zero_point;
    const int f1_zp = c.ex_out_qp.zero_point;
    const int f2_zp = c.dw_out_qp.zero_point;
    const int out_zp = c.pr_out_qp.zero_point;
    const auto [e_lo, e_hi] = range(c.ex_act, f1_zp);
    const auto [d_lo, d_hi] = range(c.dw_act, f2_zp);
    const auto [p_lo, p_hi] = range(c.pr_act, out_zp);

    auto f1 = [&](long r, long col, long m) -> int {
        if (r < 0 || col < 0 || r >= H || col >= W) {
            return f1_zp;
        }
        std::int64_t acc = 0;
        for (long k = 0; k < N; ++k) {
            acc += (std::int64_t{in[static_cast<std::size_t>((r * W + col) * N + k)]} - in_zp) *
                   w.ex_w[static_cast<std::size_t>(m * N + k)];
        }
        return requant(acc, w.ex_rq[static_cast<std::size_t>(m)], f1_zp, e_lo, e_hi);
    };

    std::vector<std::int8_t> out(static_cast<std::size_t>(OH * OW * O));
    std::vector<int> f2(static_cast<std::size_t>(M));
    for (long orow = 0; orow < OH; ++orow) {
        for (long ocol = 0; ocol < OW; ++ocol) {
            for (long m = 0; m < M; ++m) {
                std::int64_t acc = 0;
                for (long i = 0; i < 3; ++i) {
                    for (long j = 0; j < 3; ++j) {
                        const long r = orow * S + i - 1;
                        const long col = ocol * S + j - 1;
                        acc += std::int64_t{f1(r, col, m) - f1_zp} * w.dw_w[static_cast<std::size_t>(m * 9 + i * 3 + j)];
                    }
                }
                f2[static_cast<std::size_t>(m)] = requant(acc, w.dw_rq[static_cast<std::size_t>(m)], f2_zp, d_lo, d_hi);
            }
            for (long o = 0; o < O; ++o) {
                std::int64_t acc = 0;
                for (long m = 0; m < M; ++m) {
                    acc += std::int64_t{f2[static_cast<std::size_t>(m)] - f2_zp} * w.pr_w[static_cast<std::size_t>(o * M + m)];
                }
                out[static_cast<std::size_t>((orow * OW + ocol) * O + o)] =
                    static_cast<std::int8_t>(requant(acc, w.pr_rq[static_cast<std::size_t>(o)], out_zp, p_lo, p_hi));
            }
        }
    }
    return out;
}

}  // namespace naive
