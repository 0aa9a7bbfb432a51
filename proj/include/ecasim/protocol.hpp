#ifndef ECASIM_PROTOCOL_HPP
#define ECASIM_PROTOCOL_HPP

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <random>
#include <string>

namespace ecasim {

enum class Variant { CsmaCa, CsmaEca, EcaHysteresis, EcaHysteresisFairShare };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::CsmaCa: return "ca";
        case Variant::CsmaEca: return "eca";
        case Variant::EcaHysteresis: return "eca-hys";
        case Variant::EcaHysteresisFairShare: return "eca-hys-fs";
    }
    return "?";
}

inline bool uses_hysteresis(Variant v) {
    return v == Variant::EcaHysteresis || v == Variant::EcaHysteresisFairShare;
}

using Rng = std::mt19937_64;

struct ProtocolParams {
    int cw_min = 32;    // minimum contention window, power of two
    int max_stage = 5;  // highest backoff stage m
};

inline bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

// CW(k) = 2^k * CW_min
inline int cw(const ProtocolParams& p, int stage) {
    assert(stage >= 0 && stage <= p.max_stage);
    return p.cw_min << stage;
}

// Uniform draw on [0, CW(stage)-1]. The window is a power of two, so
// masking the raw 64-bit output is exactly uniform.
inline int sample_random_backoff(const ProtocolParams& p, int stage, Rng& rng) {
    const int window = cw(p, stage);
    assert(is_power_of_two(window));
    return static_cast<int>(rng() & static_cast<std::uint64_t>(window - 1));
}

// Post-success backoff: CW_min/2 for plain ECA, CW(k)/2 with hysteresis.
inline int deterministic_backoff(const ProtocolParams& p, Variant v, int stage) {
    assert(v != Variant::CsmaCa);
    if (v == Variant::CsmaEca) return p.cw_min / 2;
    return cw(p, stage) / 2;
}

struct NodeState {
    int backoff = 0;       // counter B
    int stage = 0;         // stage k
    int pending_burst = 1; // packets sent at the next attempt (2^k under fair-share)
    std::uint64_t delivered_payload_bits = 0;
};

inline int burst_for_stage(Variant v, int stage) {
    return v == Variant::EcaHysteresisFairShare ? (1 << stage) : 1;
}

inline NodeState on_success(NodeState s, const ProtocolParams& p, Variant v, Rng& rng) {
    switch (v) {
        case Variant::CsmaCa:
            s.stage = 0;
            s.backoff = sample_random_backoff(p, 0, rng);
            break;
        case Variant::CsmaEca:
            s.stage = 0;
            s.backoff = p.cw_min / 2;
            break;
        case Variant::EcaHysteresis:
        case Variant::EcaHysteresisFairShare:
            // hysteresis: keep the stage, schedule CW(k)/2 slots ahead
            s.backoff = deterministic_backoff(p, v, s.stage);
            break;
    }
    s.pending_burst = burst_for_stage(v, s.stage);
    return s;
}

inline NodeState on_collision(NodeState s, const ProtocolParams& p, Variant v, Rng& rng) {
    s.stage = std::min(s.stage + 1, p.max_stage);
    s.backoff = sample_random_backoff(p, s.stage, rng);
    s.pending_burst = burst_for_stage(v, s.stage);
    return s;
}

inline NodeState on_empty_slot(NodeState s) {
    assert(s.backoff > 0 && "a node at backoff 0 transmits, it never sees an empty slot");
    --s.backoff;
    return s;
}

inline bool wants_to_transmit(const NodeState& s) { return s.backoff == 0; }

}  // namespace ecasim

#endif
