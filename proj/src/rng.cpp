#include "sdlab/rng.hpp"

namespace sdlab {

__extension__ typedef unsigned __int128 u128;

std::uint64_t Rng::below(std::uint64_t n) {
    u128 m = static_cast<u128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>(engine_()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace sdlab
