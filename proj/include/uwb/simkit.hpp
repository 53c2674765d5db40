#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace uwb {

/// Deterministic random stream, keyed by (master seed, purpose label, index).
/// The same key always yields the same sequence, on any host and under any
/// thread schedule; distinct keys give statistically independent streams.
/// Core generator is xoshiro256++ seeded through splitmix64.
class RngStream {
public:
    RngStream() : RngStream(0, "", 0) {}
    RngStream(std::uint64_t seed, std::string_view label, std::uint64_t index);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal via Box-Muller (pair cached). No std::<random>
    /// distributions anywhere: their output is implementation-defined.
    double gaussian();

    /// Exponential with the given rate (rate > 0).
    double exponential(double rate);

    /// Equiprobable +1 / -1.
    int sign();

    /// Two equiprobable bits packed in the low bits of the result.
    std::uint32_t bit_pair();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

RngStream derive_stream(std::uint64_t seed, std::string_view label,
                        std::uint64_t index);

/// Uniformly sampled real waveform. Sample i covers the time cell
/// [t0 + i*dt, t0 + (i+1)*dt); integrals are Riemann sums scaled by dt.
struct SampledWaveform {
    Eigen::ArrayXd samples;
    double dt = 0.0;
    double t0 = 0.0;

    Eigen::Index size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) * dt; }
};

/// Exact-split pairwise dot product; bounds accumulation error on the
/// few-hundred-sample windows the correlators integrate over.
double pairwise_dot(const double* a, const double* b, Eigen::Index n);
double pairwise_sum(const double* a, Eigen::Index n);

/// Integral of w^2 over [t0, t_upper), Riemann sum scaled by dt.
double energy(const SampledWaveform& w, double t_upper);

/// Integral of w^2 over the full support.
double energy(const SampledWaveform& w);

/// Shared simulation configuration. All times in seconds, energies linear.
struct SimConfig {
    double eb = 1.0;        // energy per information bit
    double n0 = 0.0;        // one-sided noise spectral density
    double tf = 100e-9;     // frame duration
    double ti = 20e-9;      // integration interval
    double tw = 0.5e-9;     // pulse duration
    double fs = 20e9;       // sampling rate
    int m = 2;              // observation window size in symbols
    int nr = 1;             // receive antennas
    int nt = 2;             // transmit antennas (fixed at 2)
    int block_len = 100;    // symbols per channel realization
    std::uint64_t seed = 1;

    double dt() const { return 1.0 / fs; }
    double symbol_duration() const { return 2.0 * tf; }
    /// Effective receiver noise bandwidth of ideally sampled white noise.
    double noise_bandwidth() const { return fs / 2.0; }
    /// Samples in one [0, ti) integration window.
    Eigen::Index window_samples() const;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

}  // namespace uwb
