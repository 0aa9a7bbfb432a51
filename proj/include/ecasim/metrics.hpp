#ifndef ECASIM_METRICS_HPP
#define ECASIM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ecasim/protocol.hpp"

namespace ecasim {

struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunMetrics {
    std::vector<double> per_node_throughput_bps;
    double aggregate_throughput_bps = 0.0;
    // absent when no node delivered any traffic
    std::optional<double> jfi;
    std::optional<std::uint64_t> convergence_slot;
    std::uint64_t empty_slots = 0;
    std::uint64_t success_slots = 0;
    std::uint64_t collision_slots = 0;
    std::uint64_t packets_delivered = 0;
    double elapsed_us = 0.0;

    std::uint64_t total_slots() const {
        return empty_slots + success_slots + collision_slots;
    }
};

// Jain's index (sum x)^2 / (n * sum x^2). Empty input throws; an all-zero
// vector has no defined fairness and yields nullopt.
std::optional<double> jain_index(const std::vector<double>& x);

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
};

// Student-t interval: mean +/- t_{(1+level)/2, n-1} * s / sqrt(n).
MeanCi confidence_interval(const std::vector<double>& samples, double level = 0.95);

struct SweepCell {
    Variant variant;
    int num_nodes;
    MeanCi throughput_bps;
    MeanCi jfi;
    double converged_fraction = 0.0;
    int replications = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

struct CellInput {
    Variant variant;
    int num_nodes;
    std::vector<RunMetrics> runs;
};

SweepResult aggregate(const std::vector<CellInput>& cells);

}  // namespace ecasim

#endif
