#ifndef ECASIM_ENGINE_HPP
#define ECASIM_ENGINE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/metrics.hpp"
#include "ecasim/protocol.hpp"

namespace ecasim {

enum class SlotKind { Empty, Success, Collision };

inline char slot_kind_char(SlotKind k) {
    switch (k) {
        case SlotKind::Empty: return 'E';
        case SlotKind::Success: return 'S';
        case SlotKind::Collision: return 'C';
    }
    return '?';
}

struct SlotOutcome {
    SlotKind kind = SlotKind::Empty;
    std::vector<int> transmitters;
    double duration_us = 0.0;
    int packets_delivered = 0;  // Success only: the burst size
};

struct TraceRecord {
    std::uint64_t slot_index = 0;
    SlotKind kind = SlotKind::Empty;
    std::vector<int> transmitters;
    double duration_us = 0.0;
    std::vector<int> stages;  // per transmitter, same order
};

// 0 transmitters -> Empty, 1 -> Success, >=2 -> Collision
SlotKind classify_slot(std::size_t num_transmitters);

// Empty: sigma. Success with burst n: DIFS + n*(T_data + SIFS + T_ack).
// Collision: DIFS + longest colliding data airtime + SIFS + T_ack.
double slot_duration(SlotKind kind, const std::vector<int>& burst_sizes,
                     const TimingModel& timing);

// Smallest slot index s with no collision in [s, end) and at least
// `window` slots after s; nullopt if no such index.
std::optional<std::uint64_t> convergence_index(const std::vector<SlotKind>& trace,
                                               std::uint64_t window);

class Simulation {
  public:
    explicit Simulation(const SimConfig& config);

    // Advance one system slot.
    SlotOutcome step();

    // Run until the configured duration elapses and compute metrics.
    RunMetrics run_to_end();

    const std::vector<NodeState>& nodes() const { return nodes_; }
    std::uint64_t slot_index() const { return slot_index_; }
    double elapsed_us() const { return elapsed_us_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }

  private:
    SimConfig config_;
    std::vector<NodeState> nodes_;
    Rng rng_;
    std::uint64_t slot_index_ = 0;
    double elapsed_us_ = 0.0;
    std::uint64_t empty_slots_ = 0;
    std::uint64_t success_slots_ = 0;
    std::uint64_t collision_slots_ = 0;
    std::uint64_t packets_delivered_ = 0;
    // last collision slot index + 1; 0 if no collision yet
    std::uint64_t collision_free_from_ = 0;
    std::vector<TraceRecord> trace_;
    std::vector<int> scratch_transmitters_;
};

RunMetrics run(const SimConfig& config);

// One line per slot: index, kind, transmitter list, duration,
// per-transmitter stage.
void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace);

}  // namespace ecasim

#endif
