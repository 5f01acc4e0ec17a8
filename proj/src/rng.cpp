#include "mtid/rng.hpp"
#include "mtid/special.hpp"

namespace mtid {

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}
} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
    std::uint64_t st = master ^ fnv1a64(stage);
    splitmix64(st);
    return splitmix64(st);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index) {
    std::uint64_t st = derive_seed(master, stage) ^ (0x9e3779b97f4a7c15ull * (index + 1));
    splitmix64(st);
    return splitmix64(st);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t st = seed;
    for (auto& w : s_) w = splitmix64(st);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    // 53 random bits, shifted off the unit endpoints
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

double Rng::normal() {
    return norm_quantile(uniform());
}

Rng Rng::fork(std::string_view tag, std::uint64_t index) const {
    Rng copy = *this;
    std::uint64_t base = copy.next_u64();
    return Rng(derive_seed(base, tag, index));
}

} // namespace mtid
