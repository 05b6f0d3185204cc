#include "skyrelay/seed.hpp"

namespace skyrelay {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label, std::uint64_t index)
{
    const std::uint64_t head = mix64(mix64(master_seed) ^ fnv1a64(stream_label));
    return mix64(head + mix64(index ^ kGolden));
}

std::uint64_t Stream::poisson(double mean)
{
    if (mean <= 0.0) {
        return 0;
    }
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

}  // namespace skyrelay
