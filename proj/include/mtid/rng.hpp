#ifndef MTID_RNG_HPP
#define MTID_RNG_HPP

#include <cstdint>
#include <string_view>

namespace mtid {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Stage-keyed seed derivation: one master seed fans out into independent
/// per-stage (and per-chunk) streams. Same inputs always give the same seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index);

/// xoshiro256++ stream. Every consumer takes an explicit Rng; nothing in the
/// library draws from hidden global state.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0,1).
    double uniform();

    /// Uniform on (a,b).
    double uniform(double a, double b);

    /// Standard normal via inverse-CDF (deterministic across platforms).
    double normal();

    /// Derived independent stream, keyed by tag and index.
    Rng fork(std::string_view tag, std::uint64_t index = 0) const;

private:
    std::uint64_t s_[4];
};

} // namespace mtid

#endif
