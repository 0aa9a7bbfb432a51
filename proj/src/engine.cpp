#include "ecasim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

namespace ecasim {

SlotKind classify_slot(std::size_t num_transmitters) {
    if (num_transmitters == 0) return SlotKind::Empty;
    if (num_transmitters == 1) return SlotKind::Success;
    return SlotKind::Collision;
}

double slot_duration(SlotKind kind, const std::vector<int>& burst_sizes,
                     const TimingModel& timing) {
    const double t_data = timing.data_airtime_us();
    const double t_ack = timing.ack_airtime_us();
    switch (kind) {
        case SlotKind::Empty:
            assert(burst_sizes.empty());
            return timing.sigma_us;
        case SlotKind::Success: {
            assert(burst_sizes.size() == 1 && burst_sizes[0] >= 1);
            const double n = static_cast<double>(burst_sizes[0]);
            return timing.difs_us + n * (t_data + timing.sifs_us + t_ack);
        }
        case SlotKind::Collision: {
            assert(burst_sizes.size() >= 2);
            // the channel is busy for the longest colliding burst, then
            // everyone waits out the ACK timeout
            int longest = 0;
            for (int n : burst_sizes) longest = std::max(longest, n);
            return timing.difs_us + static_cast<double>(longest) * t_data +
                   timing.sifs_us + t_ack;
        }
    }
    return 0.0;
}

std::optional<std::uint64_t> convergence_index(const std::vector<SlotKind>& trace,
                                               std::uint64_t window) {
    assert(window >= 1);
    std::uint64_t from = 0;
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i] == SlotKind::Collision) from = static_cast<std::uint64_t>(i) + 1;
    if (trace.size() < from + window) return std::nullopt;
    return from;
}

Simulation::Simulation(const SimConfig& config) : config_(config), rng_(config.seed) {
    config_.validate();
    nodes_.resize(static_cast<std::size_t>(config_.num_nodes));
    // cold start: stage 0, uniform backoff over the whole minimum window
    for (auto& node : nodes_) {
        node.backoff = sample_random_backoff(config_.protocol, 0, rng_);
        node.pending_burst = burst_for_stage(config_.variant, 0);
    }
    scratch_transmitters_.reserve(nodes_.size());
}

SlotOutcome Simulation::step() {
    scratch_transmitters_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (wants_to_transmit(nodes_[i]))
            scratch_transmitters_.push_back(static_cast<int>(i));

    SlotOutcome outcome;
    outcome.kind = classify_slot(scratch_transmitters_.size());
    outcome.transmitters = scratch_transmitters_;

    std::vector<int> bursts;
    bursts.reserve(scratch_transmitters_.size());
    for (int i : scratch_transmitters_)
        bursts.push_back(nodes_[static_cast<std::size_t>(i)].pending_burst);
    outcome.duration_us = slot_duration(outcome.kind, bursts, config_.timing);

    std::vector<int> stages;
    if (config_.trace_enabled) {
        stages.reserve(scratch_transmitters_.size());
        for (int i : scratch_transmitters_)
            stages.push_back(nodes_[static_cast<std::size_t>(i)].stage);
    }

    switch (outcome.kind) {
        case SlotKind::Empty:
            for (auto& node : nodes_) node = on_empty_slot(node);
            ++empty_slots_;
            break;
        case SlotKind::Success: {
            auto& node = nodes_[static_cast<std::size_t>(scratch_transmitters_[0])];
            const int burst = node.pending_burst;
            node.delivered_payload_bits +=
                static_cast<std::uint64_t>(burst) *
                static_cast<std::uint64_t>(config_.timing.payload_bits);
            node = on_success(node, config_.protocol, config_.variant, rng_);
            outcome.packets_delivered = burst;
            packets_delivered_ += static_cast<std::uint64_t>(burst);
            ++success_slots_;
            break;
        }
        case SlotKind::Collision:
            for (int i : scratch_transmitters_) {
                auto& node = nodes_[static_cast<std::size_t>(i)];
                node = on_collision(node, config_.protocol, config_.variant, rng_);
            }
            ++collision_slots_;
            collision_free_from_ = slot_index_ + 1;
            break;
    }

    if (config_.trace_enabled)
        trace_.push_back({slot_index_, outcome.kind, outcome.transmitters,
                          outcome.duration_us, std::move(stages)});

    ++slot_index_;
    elapsed_us_ += outcome.duration_us;
    return outcome;
}

RunMetrics Simulation::run_to_end() {
    const double deadline_us = config_.duration_s * 1e6;
    // a slot that starts before the deadline runs to completion
    while (elapsed_us_ < deadline_us) step();

    RunMetrics m;
    const double elapsed_s = elapsed_us_ / 1e6;
    m.per_node_throughput_bps.reserve(nodes_.size());
    for (const auto& node : nodes_) {
        m.per_node_throughput_bps.push_back(
            static_cast<double>(node.delivered_payload_bits) / elapsed_s);
        m.aggregate_throughput_bps += m.per_node_throughput_bps.back();
    }
    m.jfi = jain_index(m.per_node_throughput_bps);
    m.empty_slots = empty_slots_;
    m.success_slots = success_slots_;
    m.collision_slots = collision_slots_;
    m.packets_delivered = packets_delivered_;
    m.elapsed_us = elapsed_us_;

    const auto window = static_cast<std::uint64_t>(
        std::ceil(config_.convergence_window_fraction * static_cast<double>(slot_index_)));
    if (slot_index_ >= collision_free_from_ + std::max<std::uint64_t>(window, 1))
        m.convergence_slot = collision_free_from_;
    return m;
}

RunMetrics run(const SimConfig& config) {
    Simulation sim(config);
    return sim.run_to_end();
}

void write_trace(std::ostream& os, const std::vector<TraceRecord>& trace) {
    for (const auto& rec : trace) {
        os << rec.slot_index << ' ' << slot_kind_char(rec.kind) << ' ';
        if (rec.transmitters.empty()) {
            os << '-';
        } else {
            for (std::size_t i = 0; i < rec.transmitters.size(); ++i) {
                if (i) os << ',';
                os << rec.transmitters[i];
            }
        }
        os << ' ' << rec.duration_us << ' ';
        if (rec.stages.empty()) {
            os << '-';
        } else {
            for (std::size_t i = 0; i < rec.stages.size(); ++i) {
                if (i) os << ',';
                os << rec.stages[i];
            }
        }
        os << '\n';
    }
}

}  // namespace ecasim
