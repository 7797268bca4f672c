#include "mbcool/rng.hpp"

namespace mbcool {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
    // two rounds keep nearby counters and nearby keys decorrelated
    return mix64(mix64(key_ ^ 0xd1b54a32d192ed03ULL) + mix64(counter));
}

double CounterStream::uniform(std::uint64_t counter) const {
    return double(bits(counter) >> 11) * 0x1.0p-53;
}

}  // namespace mbcool
