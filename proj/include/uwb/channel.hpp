#pragma once

#include "uwb/simkit.hpp"

#include <iosfwd>
#include <vector>

namespace uwb {

/// Saleh-Valenzuela parameters, IEEE 802.15.3a CM2 defaults. Rates are per
/// nanosecond and decays in nanoseconds (the units the model is tabulated
/// in); the delay-spread cap tg is in seconds like every other time here.
struct ChannelParams {
    double cluster_rate = 0.4;   // Lambda, 1/ns
    double ray_rate = 0.5;       // lambda, 1/ns
    double cluster_decay = 5.5;  // Gamma, ns
    double ray_decay = 6.7;      // gamma, ns
    double sigma1_db = 3.3941;   // cluster lognormal std, dB
    double sigma2_db = 3.3941;   // ray lognormal std, dB
    double tg = 99e-9;           // max delay spread cap, seconds
    bool normalize_energy = true;

    void validate(double tf) const;
};

struct Tap {
    double delay = 0.0;  // seconds
    double gain = 0.0;
};

/// One multipath realization for every (receive, transmit) antenna pair.
/// Taps are sorted by delay and all delays are < tg.
class ChannelRealization {
public:
    ChannelRealization(int nr, int nt) : nr_(nr), nt_(nt), taps_(nr * nt) {}

    int nr() const { return nr_; }
    int nt() const { return nt_; }

    /// q in 1..nr, p in 1..nt (antenna indices as used throughout).
    const std::vector<Tap>& taps(int q, int p) const;
    std::vector<Tap>& taps(int q, int p);

    /// Fraction of pre-normalization tap energy discarded by the tg cap.
    double dropped_energy_fraction = 0.0;

private:
    int nr_;
    int nt_;
    std::vector<std::vector<Tap>> taps_;
};

/// Unit-energy second derivative of a Gaussian, supported on [0, tw). Sampled
/// at cell midpoints, mirrored so the sequence is exactly even about tw/2,
/// and mean-removed so the sampled waveform has exactly zero DC.
SampledWaveform gaussian_doublet(double tw, double fs);

/// Independent Saleh-Venzuela draws per (q,p) pair: Poisson cluster arrivals,
/// Poisson ray arrivals inside clusters, double-exponential mean-square gain
/// decay, lognormal amplitude fading, equiprobable polarity. Taps at or past
/// params.tg are dropped; gains are rescaled to unit total energy when
/// normalize_energy is set.
ChannelRealization draw_channel(const ChannelParams& params, int nr, int nt,
                                RngStream& rng);

/// Process-wide count of realizations whose tg cap discarded more than 1%
/// of the generated tap energy.
std::uint64_t dropped_energy_warning_count();

/// g_{q,p} = sum_l gain_l * pulse shifted by delay_l, delays rounded to the
/// sample grid. Support is [0, tg + tw).
SampledWaveform overall_response(const ChannelRealization& ch,
                                 const SampledWaveform& pulse, int q, int p);

/// Energy of the response captured by an integrator of length ti.
double captured_energy(const SampledWaveform& g, double ti);

/// Text record format, one tap per line: q p delay_ns gain.
void write_taps(std::ostream& os, const ChannelRealization& ch);
ChannelRealization read_taps(std::istream& is, int nr, int nt);

}  // namespace uwb
