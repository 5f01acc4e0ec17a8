#ifndef MTID_BOOTSTRAP_HPP
#define MTID_BOOTSTRAP_HPP

#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "mtid/dgp.hpp"
#include "mtid/rng.hpp"

namespace mtid {

/// Nonparametric bootstrap resample (records drawn with replacement).
inline SampleSet bootstrap_resample(const SampleSet& s, Rng& rng) {
    const std::size_t n = s.size();
    SampleSet out;
    out.j_dim = s.j_dim;
    out.z_dim = s.z_dim;
    out.k_count = s.k_count;
    out.has_latent = s.has_latent;
    out.y.resize(n);
    out.d.resize(n);
    out.z.resize(n * s.z_dim);
    if (s.has_latent) {
        out.v.resize(n * s.j_dim);
        out.yk.resize(n * s.k_count);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform() * n);
        const std::size_t src = pick < n ? pick : n - 1;
        out.y[i] = s.y[src];
        out.d[i] = s.d[src];
        for (int c = 0; c < s.z_dim; ++c) out.z[i * s.z_dim + c] = s.z[src * s.z_dim + c];
        if (s.has_latent) {
            for (int c = 0; c < s.j_dim; ++c) out.v[i * s.j_dim + c] = s.v[src * s.j_dim + c];
            for (int c = 0; c < s.k_count; ++c)
                out.yk[i * s.k_count + c] = s.yk[src * s.k_count + c];
        }
    }
    return out;
}

/// Runs `f` on B independent resamples (derived seeds, replicates spread
/// over threads, deterministic aggregation order).
template <class F>
auto bootstrap_replicates(const SampleSet& s, int b, std::uint64_t seed, int threads, F&& f)
    -> std::vector<decltype(f(s))> {
    std::vector<decltype(f(s))> out(b);
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const unsigned t = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::min<unsigned>(hw, 8u);
    auto work = [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) {
            Rng rng(derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(r)));
            const SampleSet rs = bootstrap_resample(s, rng);
            out[r] = f(rs);
        }
    };
    if (t <= 1 || b < 2) {
        work(0, b);
    } else {
        std::vector<std::thread> pool;
        const int per = (b + static_cast<int>(t) - 1) / static_cast<int>(t);
        for (unsigned i = 0; i < t; ++i) {
            const int a = static_cast<int>(i) * per;
            const int e = std::min(b, a + per);
            if (a >= e) break;
            pool.emplace_back(work, a, e);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

inline double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (x.size() - 1));
}

} // namespace mtid

#endif
