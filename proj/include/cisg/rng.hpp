#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cisg {

// Deterministic, platform-independent random stream. Each component of a
// simulation (environment, agent 0, agent 1, ...) gets its own stream derived
// from the master seed, so logs replay exactly and agent draws never perturb
// environment draws.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {
        // avoid the all-zero fixed point
        next_u64();
        next_u64();
    }

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n), unbiased via rejection
    int next_int(int n) {
        if (n <= 0) throw std::invalid_argument("next_int: n must be positive");
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    // sample an index from a probability vector (assumed to sum to 1)
    int sample(const std::vector<double>& probs) {
        double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        // numerical slack: fall back to the last positive entry
        for (std::size_t i = probs.size(); i-- > 0;) {
            if (probs[i] > 0.0) return static_cast<int>(i);
        }
        throw std::invalid_argument("sample: empty or zero distribution");
    }

    // derive an independent child stream (used by nested protocols)
    RngStream split() { return RngStream(next_u64() ^ 0xa5a5a5a5a5a5a5a5ULL); }

private:
    std::uint64_t state_;
};

// Named-stream derivation: stream 0 is the environment, stream i+1 is agent i.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    // one splitmix step over (seed, index) decorrelates the streams
    std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (stream_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return RngStream(z ^ (z >> 31));
}

} // namespace cisg
