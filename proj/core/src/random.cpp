#include "proxyforge/random.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace proxyforge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x70726f78u};
    return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), stream_(stream_id), engine_(make_engine(master_seed, stream_id)) {}

RandomStream RandomStream::derive(std::uint64_t child_id) const {
    return RandomStream(mix_seed(master_, stream_), child_id);
}

double RandomStream::uniform(double lo, double hi) {
    double u = std::generate_canonical<double, 64>(engine_);
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    return lo + (hi - lo) * u;
}

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    std::uniform_int_distribution<std::int64_t> dist(lo, hi);
    return dist(engine_);
}

std::size_t RandomStream::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("index: n == 0");
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

double RandomStream::normal(double mean, double sd) {
    std::normal_distribution<double> dist(mean, sd);
    return dist(engine_);
}

double RandomStream::cauchy(double location, double scale) {
    std::cauchy_distribution<double> dist(location, scale);
    return dist(engine_);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

std::vector<std::size_t> RandomStream::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

RandomStream seeded_rng(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RandomStream(master_seed, stream_id);
}

}  // namespace proxyforge
