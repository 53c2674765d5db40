#include "uwb/simkit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwb {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64_mix(a ^ (b + kGolden + (a << 12) + (a >> 4)));
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view label,
                     std::uint64_t index) {
    std::uint64_t key = hash_combine(seed, fnv1a64(label));
    key = hash_combine(key, index);
    // splitmix64 stream to fill the state; never all-zero.
    for (auto& s : s_) {
        key += kGolden;
        s = splitmix64_mix(key);
    }
    s_[0] |= 1;
}

RngStream derive_stream(std::uint64_t seed, std::string_view label,
                        std::uint64_t index) {
    return RngStream(seed, label, index);
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log1p(-uniform()));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RngStream::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

int RngStream::sign() {
    return (next_u64() >> 63) ? 1 : -1;
}

std::uint32_t RngStream::bit_pair() {
    return static_cast<std::uint32_t>(next_u64() >> 62);
}

double pairwise_dot(const double* a, const double* b, Eigen::Index n) {
    if (n <= 32) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    const Eigen::Index h = n / 2;
    return pairwise_dot(a, b, h) + pairwise_dot(a + h, b + h, n - h);
}

double pairwise_sum(const double* a, Eigen::Index n) {
    if (n <= 32) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += a[i];
        return s;
    }
    const Eigen::Index h = n / 2;
    return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

double energy(const SampledWaveform& w, double t_upper) {
    if (w.dt <= 0.0) throw std::invalid_argument("energy: dt must be > 0");
    if (t_upper <= w.t0) return 0.0;
    // Samples with t0 + i*dt < t_upper; the 1e-9 slack absorbs rounding when
    // t_upper sits on a cell boundary.
    const double x = (t_upper - w.t0) / w.dt;
    Eigen::Index count = static_cast<Eigen::Index>(std::ceil(x - 1e-9));
    count = std::min(count, w.samples.size());
    if (count <= 0) return 0.0;
    return pairwise_dot(w.samples.data(), w.samples.data(), count) * w.dt;
}

double energy(const SampledWaveform& w) {
    if (w.samples.size() == 0) return 0.0;
    return pairwise_dot(w.samples.data(), w.samples.data(), w.samples.size()) *
           w.dt;
}

Eigen::Index SimConfig::window_samples() const {
    return static_cast<Eigen::Index>(std::llround(ti * fs));
}

void SimConfig::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("SimConfig: " + what);
    };
    if (!(eb >= 0.0)) fail("eb must be >= 0");
    if (!(n0 >= 0.0)) fail("n0 must be >= 0");
    if (!(fs > 0.0)) fail("fs must be > 0");
    if (!(tf > 0.0)) fail("tf must be > 0");
    if (!(ti > 0.0 && ti <= tf)) fail("requires 0 < ti <= tf");
    if (!(tw > 0.0 && tw <= ti)) fail("requires 0 < tw <= ti");
    if (m < 2) fail("m must be >= 2");
    if (nt != 2) fail("nt is fixed at 2");
    if (nr < 1) fail("nr must be >= 1");
    if (fs * tw < 8.0) fail("fs*tw must be >= 8 (pulse resolved by >=8 samples)");
    if (block_len < 1) fail("block_len must be >= 1");
}

}  // namespace uwb
