#pragma once

#include "skgeom/common.hpp"

#include <cstdint>

namespace skgeom {

// Counter-based stream: each (seed, index) pair opens an independent
// generator, so a sample loop can be partitioned across workers without
// changing the draw sequence of any sample.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed, std::uint64_t index = 0)
        : state_(seed ^ (0x9E3779B97F4A7C15ULL * (index + 0x632BE59BD9B4E019ULL))) {
        next_u64(); // decorrelate nearby indices
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0,1), never exactly 0.
    Real next_u01() {
        return (static_cast<Real>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    Real next_gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        Real u = next_u01();
        Real v = next_u01();
        Real r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(2.0 * kPi * v);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * v);
    }

    Vec3 gauss3(Real sigma = 1.0) {
        return {sigma * next_gauss(), sigma * next_gauss(), sigma * next_gauss()};
    }
    Vec2 gauss2(Real sigma = 1.0) {
        return {sigma * next_gauss(), sigma * next_gauss()};
    }

private:
    std::uint64_t state_;
    Real spare_ = 0;
    bool have_spare_ = false;
};

} // namespace skgeom
