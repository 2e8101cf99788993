#pragma once

#include <array>
#include <cstdint>

namespace chawkes {

// Philox4x32-10 counter-based generator. A block is a pure function of
// (key, stream, counter), so any event of any replication can be produced
// out of order: replication r draws from stream r, event n from counter n.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t stream,
                                        std::uint64_t counter);

struct UniformPair {
    double u1;
    double u2;
};

// Two independent U(0,1) variates (open interval) from one Philox block.
UniformPair block_uniforms(std::uint64_t key, std::uint64_t stream, std::uint64_t counter);

// Sequential view over one (key, stream) lane.
class CounterRng {
public:
    CounterRng(std::uint64_t key, std::uint64_t stream, std::uint64_t start = 0)
        : key_(key), stream_(stream), counter_(start) {}

    UniformPair next_pair() { return block_uniforms(key_, stream_, counter_++); }
    double next_u01();

    std::uint64_t key() const { return key_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace chawkes
