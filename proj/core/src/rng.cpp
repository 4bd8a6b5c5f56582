#include "msteer/rng.hpp"

#include <cmath>
#include <numbers>

namespace msteer {

namespace {

// splitmix64 finalizer; full avalanche on the state word
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id) {
    state_ = mix64(master_seed + kGolden);
    state_ = mix64(state_ ^ (stream_id + kGolden * (stream_id | 1)));
}

RngStream RngStream::derive(std::uint64_t child_id) const {
    return RngStream(master_, mix64(id_ + kGolden) ^ (child_id + kGolden * (child_id | 1)));
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double RngStream::normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::cauchy(double loc, double scale) {
    return loc + scale * std::tan(std::numbers::pi * (uniform_open01() - 0.5));
}

} // namespace msteer
