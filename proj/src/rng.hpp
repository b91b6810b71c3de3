#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qptomo::detail {

// 53-bit uniform in (0, 1), never exactly 0 or 1.
inline double uniform01(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
}

// Box-Muller on top of mt19937_64.  std::normal_distribution is
// implementation-defined, which would break byte-stable outputs across
// standard libraries; this sampler is fully pinned.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double u1 = uniform01(gen_);
        const double u2 = uniform01(gen_);
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(two_pi * u2);
        have_spare_ = true;
        return m * std::cos(two_pi * u2);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qptomo::detail
