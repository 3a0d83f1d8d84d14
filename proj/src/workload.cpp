#include <dscsim/workload.hpp>

namespace dscsim {

std::pair<std::uint64_t, std::uint64_t> splitmix_next(std::uint64_t state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {state, z ^ (z >> 31)};
}

std::int64_t SplitMix64::uniform(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

namespace {

void fill_bytes(SplitMix64& rng, std::span<std::int8_t> out, std::int64_t lo, std::int64_t hi) {
    for (auto& v : out) {
        v = static_cast<std::int8_t>(rng.uniform(lo, hi));
    }
}

void fill_requant(SplitMix64& rng, std::vector<RequantSpec>& specs) {
    for (auto& s : specs) {
        s.multiplier = static_cast<std::int32_t>(rng.uniform(kMinMultiplier, kMaxMultiplier));
        s.shift = static_cast<std::int32_t>(rng.uniform(0, 10));
        s.bias = static_cast<std::int32_t>(rng.uniform(-(1 << 15), 1 << 15));
    }
}

}  // namespace

Workload generate_workload(const BlockConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    SplitMix64 rng(seed);

    QuantTensor input(cfg.in_h, cfg.in_w, cfg.n_in, cfg.in_qp);
    fill_bytes(rng, input.data(), -128, 127);

    const std::size_t m = cfg.m_expanded;
    BlockWeights w;
    w.ex_w.resize(m * cfg.n_in);
    w.dw_w.resize(m * kKernelTaps);
    w.pr_w.resize(cfg.n_out * m);
    fill_bytes(rng, w.ex_w, -127, 127);
    fill_bytes(rng, w.dw_w, -127, 127);
    fill_bytes(rng, w.pr_w, -127, 127);

    w.ex_rq.resize(m);
    w.dw_rq.resize(m);
    w.pr_rq.resize(cfg.n_out);
    fill_requant(rng, w.ex_rq);
    fill_requant(rng, w.dw_rq);
    fill_requant(rng, w.pr_rq);

    if (cfg.requant_override) {
        for (auto* specs : {&w.ex_rq, &w.dw_rq, &w.pr_rq}) {
            specs->assign(specs->size(), *cfg.requant_override);
        }
    }
    return {std::move(input), std::move(w)};
}

BlockConfig random_config(SplitMix64& rng, const ConfigRanges& r) {
    const auto pick = [&rng](std::size_t lo, std::size_t hi) {
        return static_cast<std::size_t>(rng.uniform(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    };
    const auto qp = [&rng] {
        QuantParams q;
        q.scale = static_cast<float>(rng.uniform(1, 1024)) / 1024.0f;
        q.zero_point = static_cast<std::int8_t>(rng.uniform(-64, 64));
        return q;
    };

    BlockConfig cfg;
    cfg.in_h = pick(r.spatial_min, r.spatial_max);
    cfg.in_w = pick(r.spatial_min, r.spatial_max);
    cfg.n_in = kChannelAlignment * pick(1, r.n_in_max_multiple);
    cfg.m_expanded = kChannelAlignment * pick(1, r.m_max_multiple);
    cfg.n_out = pick(r.n_out_min, r.n_out_max);
    cfg.stride = r.allow_stride2 ? pick(1, 2) : 1;
    cfg.in_qp = qp();
    cfg.ex_out_qp = qp();
    cfg.dw_out_qp = qp();
    cfg.pr_out_qp = qp();
    return validate_config(cfg);
}

}  // namespace dscsim
