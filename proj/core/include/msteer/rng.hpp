#pragma once

#include <cstdint>

namespace msteer {

// Small deterministic generator with cheap stream derivation, so every
// (master seed, stream id) pair yields the same draws on every platform.
// The core is the splitmix64 sequence.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_id() const { return id_; }

    // child stream fully determined by (master, id, child_id)
    RngStream derive(std::uint64_t child_id) const;

    std::uint64_t next_u64();
    double uniform01();      // [0, 1)
    double uniform_open01(); // (0, 1)
    double uniform(double lo, double hi);
    double normal();         // standard normal, Box-Muller
    double cauchy(double loc, double scale);

  private:
    std::uint64_t master_;
    std::uint64_t id_;
    std::uint64_t state_;
};

} // namespace msteer
