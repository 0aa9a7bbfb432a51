#include "ecasim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "ecasim/engine.hpp"

namespace ecasim {

std::string tool_version() { return "0.1.0"; }

std::vector<int> default_n_values() {
    std::vector<int> n(49);
    std::iota(n.begin(), n.end(), 2);
    return n;
}

void SweepSpec::validate() const {
    if (variants.empty()) throw ConfigError("sweep needs at least one variant");
    if (n_values.empty()) throw ConfigError("sweep needs at least one N value");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (int n : n_values)
        if (n < 1) throw ConfigError("N values must be >= 1");
    SimConfig probe = base_config;
    probe.num_nodes = n_values.front();
    probe.validate();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, Variant variant, int n, int replication) {
    std::uint64_t x = splitmix64(base);
    x = splitmix64(x ^ static_cast<std::uint64_t>(variant));
    x = splitmix64(x ^ static_cast<std::uint64_t>(n));
    x = splitmix64(x ^ static_cast<std::uint64_t>(replication));
    return x;
}

namespace {

// %.6g keeps CSV values at 6 significant digits
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result, bool complete) {
    if (!complete) os << "# INCOMPLETE: sweep aborted, partial results only\n";
    os << "variant,N,mean_throughput_bps,ci_throughput_bps,mean_jfi,ci_jfi,"
          "converged_fraction\n";
    for (const auto& cell : result.cells) {
        os << variant_name(cell.variant) << ',' << cell.num_nodes << ','
           << fmt6(cell.throughput_bps.mean) << ',' << fmt6(cell.throughput_bps.half_width)
           << ',' << fmt6(cell.jfi.mean) << ',' << fmt6(cell.jfi.half_width) << ','
           << fmt6(cell.converged_fraction) << '\n';
    }
}

void write_sweep_metadata(std::ostream& os, const SweepSpec& spec) {
    nlohmann::json j;
    j["tool_version"] = tool_version();
    j["base_seed"] = spec.base_seed;
    j["replications"] = spec.replications;
    std::vector<std::string> names;
    for (Variant v : spec.variants) names.emplace_back(variant_name(v));
    j["variants"] = names;
    j["n_values"] = spec.n_values;
    const SimConfig& c = spec.base_config;
    j["config"] = {
        {"cw_min", c.protocol.cw_min},
        {"max_stage", c.protocol.max_stage},
        {"duration_s", c.duration_s},
        {"convergence_window_fraction", c.convergence_window_fraction},
        {"timing",
         {{"sigma_us", c.timing.sigma_us},
          {"difs_us", c.timing.difs_us},
          {"sifs_us", c.timing.sifs_us},
          {"payload_bits", c.timing.payload_bits},
          {"header_bits", c.timing.header_bits},
          {"ack_bits", c.timing.ack_bits},
          {"data_rate_bps", c.timing.data_rate_bps}}},
    };
    os << j.dump(2) << '\n';
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();

    struct Task {
        std::size_t cell;
        int replication;
    };
    std::vector<CellInput> cells;
    for (Variant v : spec.variants)
        for (int n : spec.n_values)
            cells.push_back({v, n, {}});

    // fail on an unwritable output path before any run starts
    std::ofstream csv_out;
    std::ofstream meta_out;
    if (!spec.output_csv.empty()) {
        csv_out.open(spec.output_csv);
        if (!csv_out) throw ConfigError("cannot write output file: " + spec.output_csv);
        std::string meta_path = spec.metadata_path.empty()
                                    ? spec.output_csv + ".meta.json"
                                    : spec.metadata_path;
        meta_out.open(meta_path);
        if (!meta_out) throw ConfigError("cannot write metadata file: " + meta_path);
    }

    // the derived seed space must be collision-free for this sweep
    std::unordered_set<std::uint64_t> seeds;
    for (const auto& cell : cells)
        for (int r = 0; r < spec.replications; ++r)
            if (!seeds.insert(derive_seed(spec.base_seed, cell.variant, cell.num_nodes, r))
                     .second)
                throw ConfigError("seed collision in sweep tuple space");

    std::vector<Task> tasks;
    tasks.reserve(cells.size() * static_cast<std::size_t>(spec.replications));
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (int r = 0; r < spec.replications; ++r) tasks.push_back({c, r});

    for (auto& cell : cells)
        cell.runs.resize(static_cast<std::size_t>(spec.replications));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            const Task& t = tasks[i];
            auto& cell = cells[t.cell];
            SimConfig config = spec.base_config;
            config.variant = cell.variant;
            config.num_nodes = cell.num_nodes;
            config.trace_enabled = false;
            config.seed = derive_seed(spec.base_seed, cell.variant, cell.num_nodes,
                                      t.replication);
            try {
                cell.runs[static_cast<std::size_t>(t.replication)] = run(config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    if (spec.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < spec.workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (failed.load()) {
        // keep cells whose replications all completed, mark the file partial
        std::vector<CellInput> complete_cells;
        for (auto& cell : cells) {
            bool complete = true;
            for (const auto& run_result : cell.runs)
                if (run_result.per_node_throughput_bps.empty()) complete = false;
            if (complete && cell.runs.size() >= 2) complete_cells.push_back(cell);
        }
        if (csv_out.is_open()) {
            SweepResult partial = complete_cells.empty() ? SweepResult{}
                                                         : aggregate(complete_cells);
            write_sweep_csv(csv_out, partial, /*complete=*/false);
        }
        std::rethrow_exception(first_error);
    }

    SweepResult result = aggregate(cells);
    if (csv_out.is_open()) {
        write_sweep_csv(csv_out, result);
        write_sweep_metadata(meta_out, spec);
    }
    return result;
}

}  // namespace ecasim
