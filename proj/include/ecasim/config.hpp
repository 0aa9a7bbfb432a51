#ifndef ECASIM_CONFIG_HPP
#define ECASIM_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ecasim/protocol.hpp"

namespace ecasim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-slot timing and frame sizes. The acceptance properties are
// ordering/fairness based, so these defaults are overridable.
struct TimingModel {
    double sigma_us = 20.0;          // empty slot
    double difs_us = 50.0;
    double sifs_us = 10.0;
    double payload_bits = 3400.0;    // 425-byte payload
    double header_bits = 400.0;      // MAC+PHY overhead
    double ack_bits = 304.0;
    double data_rate_bps = 11e6;

    double data_airtime_us() const {
        return (header_bits + payload_bits) / data_rate_bps * 1e6;
    }
    double ack_airtime_us() const { return ack_bits / data_rate_bps * 1e6; }

    void validate() const {
        if (sigma_us <= 0 || difs_us <= 0 || sifs_us <= 0)
            throw ConfigError("all slot/interframe durations must be positive");
        if (payload_bits <= 0 || header_bits <= 0 || ack_bits <= 0)
            throw ConfigError("frame sizes must be positive");
        if (data_rate_bps <= 0) throw ConfigError("data rate must be positive");
    }
};

struct SimConfig {
    Variant variant = Variant::CsmaEca;
    int num_nodes = 2;
    ProtocolParams protocol;
    TimingModel timing;
    double duration_s = 10.0;
    std::uint64_t seed = 1;
    bool trace_enabled = false;
    // fraction of the run's final slots that must be collision-free to
    // report convergence
    double convergence_window_fraction = 0.2;

    void validate() const {
        if (num_nodes < 1) throw ConfigError("need at least one node");
        if (duration_s <= 0) throw ConfigError("duration must be positive");
        if (protocol.cw_min < 2 || !is_power_of_two(protocol.cw_min))
            throw ConfigError("cw_min must be a power of two >= 2");
        if (protocol.max_stage < 0) throw ConfigError("max stage must be >= 0");
        if (convergence_window_fraction <= 0 || convergence_window_fraction > 1)
            throw ConfigError("convergence window fraction must be in (0,1]");
        timing.validate();
    }
};

}  // namespace ecasim

#endif
