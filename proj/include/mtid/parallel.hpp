#ifndef MTID_PARALLEL_HPP
#define MTID_PARALLEL_HPP

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace mtid {

/// Contiguous-range fork/join over [0, count). Writers own disjoint slots,
/// so results do not depend on scheduling.
inline void parallel_chunks(std::size_t count, int threads,
                            const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    const unsigned t = threads > 0 ? static_cast<unsigned>(threads) : std::min(hw, 8u);
    if (t <= 1 || count < 2 * t) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t per = (count + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
        const std::size_t a = i * per;
        const std::size_t b = std::min(count, a + per);
        if (a >= b) break;
        pool.emplace_back(body, a, b);
    }
    for (auto& th : pool) th.join();
}

} // namespace mtid

#endif
