#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecasim/engine.hpp"
#include "ecasim/sweep.hpp"

namespace {

using namespace ecasim;

const std::map<std::string, Variant> kVariantNames = {
    {"ca", Variant::CsmaCa},
    {"eca", Variant::CsmaEca},
    {"eca-hys", Variant::EcaHysteresis},
    {"eca-hys-fs", Variant::EcaHysteresisFairShare},
};

struct RunOptions {
    std::string variant = "eca";
    int nodes = 2;
    double duration_s = 10.0;
    std::uint64_t seed = 1;
    int cw_min = 32;
    int max_stage = 5;
    TimingModel timing;
    bool json_output = false;
};

void add_run_flags(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--variant", opt.variant, "Protocol variant")
        ->transform(CLI::IsMember({"ca", "eca", "eca-hys", "eca-hys-fs"}))
        ->capture_default_str();
    cmd->add_option("--nodes", opt.nodes, "Number of contenders")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--duration", opt.duration_s, "Simulated seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--cw-min", opt.cw_min, "Minimum contention window")
        ->capture_default_str();
    cmd->add_option("--max-stage", opt.max_stage, "Maximum backoff stage")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--sigma-us", opt.timing.sigma_us, "Empty slot duration (us)");
    cmd->add_option("--difs-us", opt.timing.difs_us, "DIFS (us)");
    cmd->add_option("--sifs-us", opt.timing.sifs_us, "SIFS (us)");
    cmd->add_option("--payload-bits", opt.timing.payload_bits, "Payload per packet (bits)");
    cmd->add_option("--header-bits", opt.timing.header_bits, "MAC+PHY header (bits)");
    cmd->add_option("--ack-bits", opt.timing.ack_bits, "ACK frame size (bits)");
    cmd->add_option("--rate-bps", opt.timing.data_rate_bps, "Channel bit rate (bps)");
}

SimConfig to_config(const RunOptions& opt) {
    SimConfig config;
    config.variant = kVariantNames.at(opt.variant);
    config.num_nodes = opt.nodes;
    config.duration_s = opt.duration_s;
    config.seed = opt.seed;
    config.protocol.cw_min = opt.cw_min;
    config.protocol.max_stage = opt.max_stage;
    config.timing = opt.timing;
    return config;
}

void print_summary(const SimConfig& config, const RunMetrics& m) {
    std::printf("variant             %s\n", variant_name(config.variant));
    std::printf("nodes               %d\n", config.num_nodes);
    std::printf("simulated time      %.6f s\n", m.elapsed_us / 1e6);
    std::printf("slots               %llu (empty %llu, success %llu, collision %llu)\n",
                static_cast<unsigned long long>(m.total_slots()),
                static_cast<unsigned long long>(m.empty_slots),
                static_cast<unsigned long long>(m.success_slots),
                static_cast<unsigned long long>(m.collision_slots));
    std::printf("packets delivered   %llu\n",
                static_cast<unsigned long long>(m.packets_delivered));
    std::printf("aggregate throughput %.6g Mbps\n", m.aggregate_throughput_bps / 1e6);
    if (m.jfi)
        std::printf("jain fairness index %.6f\n", *m.jfi);
    else
        std::printf("jain fairness index n/a (no traffic)\n");
    if (m.convergence_slot)
        std::printf("converged at slot   %llu\n",
                    static_cast<unsigned long long>(*m.convergence_slot));
    else
        std::printf("converged at slot   never\n");
}

void print_json(const SimConfig& config, const RunMetrics& m) {
    nlohmann::json j;
    j["variant"] = variant_name(config.variant);
    j["nodes"] = config.num_nodes;
    j["seed"] = config.seed;
    j["elapsed_s"] = m.elapsed_us / 1e6;
    j["slots"] = {{"empty", m.empty_slots},
                  {"success", m.success_slots},
                  {"collision", m.collision_slots}};
    j["packets_delivered"] = m.packets_delivered;
    j["aggregate_throughput_bps"] = m.aggregate_throughput_bps;
    j["per_node_throughput_bps"] = m.per_node_throughput_bps;
    if (m.jfi) j["jfi"] = *m.jfi;
    if (m.convergence_slot) j["convergence_slot"] = *m.convergence_slot;
    std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slotted CSMA/CA + CSMA/ECA contention simulator"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file with a [run]/[sweep]/[trace] section per "
                   "subcommand; flags take precedence");

    RunOptions run_opt;
    bool run_json = false;
    auto* run_cmd = app.add_subcommand("run", "Simulate a single run and print metrics");
    add_run_flags(run_cmd, run_opt);
    run_cmd->add_flag("--json", run_json, "Emit a machine-readable JSON record");

    RunOptions trace_opt;
    std::uint64_t trace_slots = 500;
    std::string trace_output;
    auto* trace_cmd = app.add_subcommand("trace", "Dump a per-slot trace");
    add_run_flags(trace_cmd, trace_opt);
    trace_cmd->add_option("--slots", trace_slots, "Number of slots to trace")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    trace_cmd->add_option("--output", trace_output, "Write trace to a file instead of stdout");

    RunOptions sweep_opt;
    std::vector<std::string> sweep_variants;
    int n_min = 2, n_max = 50;
    int replications = 100;
    int workers = 1;
    std::string output_dir = ".";
    auto* sweep_cmd =
        app.add_subcommand("sweep", "Sweep N and replications, write figure datasets");
    add_run_flags(sweep_cmd, sweep_opt);
    sweep_cmd
        ->add_option("--variants", sweep_variants,
                     "Variants to sweep (default: ca,eca into figure1.csv and "
                     "eca-hys,eca-hys-fs into figure2.csv)")
        ->transform(CLI::IsMember({"ca", "eca", "eca-hys", "eca-hys-fs"}));
    sweep_cmd->add_option("--n-min", n_min, "Smallest N")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--n-max", n_max, "Largest N")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--replications", replications, "Replications per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--workers", workers, "Parallel worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--output-dir", output_dir, "Dataset output directory")
        ->envname("ECASIM_OUTPUT_DIR")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, help exits 0
    }

    try {
        if (*run_cmd) {
            const SimConfig config = to_config(run_opt);
            const RunMetrics m = run(config);
            if (run_json)
                print_json(config, m);
            else
                print_summary(config, m);
            return 0;
        }

        if (*trace_cmd) {
            SimConfig config = to_config(trace_opt);
            config.trace_enabled = true;
            Simulation sim(config);
            for (std::uint64_t i = 0; i < trace_slots; ++i) sim.step();
            if (trace_output.empty()) {
                write_trace(std::cout, sim.trace());
            } else {
                std::ofstream out(trace_output);
                if (!out) throw ConfigError("cannot write trace file: " + trace_output);
                write_trace(out, sim.trace());
            }
            return 0;
        }

        if (*sweep_cmd) {
            if (n_min > n_max) throw ConfigError("--n-min must not exceed --n-max");
            SweepSpec base;
            base.base_config = to_config(sweep_opt);
            base.base_seed = sweep_opt.seed;
            base.replications = replications;
            base.workers = workers;
            for (int n = n_min; n <= n_max; ++n) base.n_values.push_back(n);

            struct Dataset {
                std::string file;
                std::vector<Variant> variants;
            };
            std::vector<Dataset> datasets;
            if (sweep_variants.empty()) {
                datasets.push_back({"figure1.csv", {Variant::CsmaCa, Variant::CsmaEca}});
                datasets.push_back({"figure2.csv",
                                    {Variant::EcaHysteresis,
                                     Variant::EcaHysteresisFairShare}});
            } else {
                std::vector<Variant> vs;
                for (const auto& name : sweep_variants) vs.push_back(kVariantNames.at(name));
                datasets.push_back({"sweep.csv", vs});
            }
            for (const auto& ds : datasets) {
                SweepSpec spec = base;
                spec.variants = ds.variants;
                spec.output_csv = (std::filesystem::path(output_dir) / ds.file).string();
                const SweepResult result = run_sweep(spec);
                std::printf("%s: %zu cells, %d replications each\n",
                            spec.output_csv.c_str(), result.cells.size(),
                            spec.replications);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
