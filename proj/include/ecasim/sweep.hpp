#ifndef ECASIM_SWEEP_HPP
#define ECASIM_SWEEP_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecasim/config.hpp"
#include "ecasim/metrics.hpp"

namespace ecasim {

struct SweepSpec {
    std::vector<Variant> variants;
    std::vector<int> n_values;  // default 2..50, see default_spec()
    int replications = 100;
    std::uint64_t base_seed = 1;
    SimConfig base_config;  // protocol/timing/duration template; variant, N, seed
                            // are filled per run
    std::string output_csv;       // empty: don't write
    std::string metadata_path;    // empty: derive from output_csv
    int workers = 1;

    void validate() const;
};

std::vector<int> default_n_values();  // 2..50

// SplitMix-style stateless mix over (base, variant, N, replication).
std::uint64_t derive_seed(std::uint64_t base, Variant variant, int n, int replication);

// Runs every (variant, N, replication) cell, aggregates, and writes the
// CSV dataset plus a metadata sidecar when output paths are set.
SweepResult run_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& os, const SweepResult& result, bool complete = true);
void write_sweep_metadata(std::ostream& os, const SweepSpec& spec);

std::string tool_version();

}  // namespace ecasim

#endif
