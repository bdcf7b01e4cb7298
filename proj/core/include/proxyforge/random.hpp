#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace proxyforge {

/// Deterministic random stream identified by (master seed, stream id).
///
/// Two streams built from the same pair produce identical sequences. Child
/// streams obtained with derive() are keyed by the parent identity, so the
/// whole tree of streams used by an experiment is a pure function of the
/// master seed.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_id() const { return stream_; }

    /// Independent child stream.
    RandomStream derive(std::uint64_t child_id) const;

    /// Uniform in [lo, hi).
    double uniform(double lo = 0.0, double hi = 1.0);
    /// Uniform integer in [lo, hi] (inclusive).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Uniform index in [0, n).
    std::size_t index(std::size_t n);
    double normal(double mean, double sd);
    double cauchy(double location, double scale);
    bool bernoulli(double p);
    std::uint64_t next_u64() { return engine_(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::uint64_t master_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

RandomStream seeded_rng(std::uint64_t master_seed, std::uint64_t stream_id);

/// Stateless 64-bit mixer (splitmix64 finalizer); used to derive seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace proxyforge
