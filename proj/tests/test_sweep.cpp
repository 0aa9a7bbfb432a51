#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "ecasim/sweep.hpp"

using namespace ecasim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepSpec smoke_spec(const std::filesystem::path& dir) {
    SweepSpec spec;
    spec.variants = {Variant::CsmaCa, Variant::CsmaEca};
    spec.n_values = {2, 3};
    spec.replications = 3;
    spec.base_seed = 9;
    spec.base_config.duration_s = 0.2;
    spec.output_csv = (dir / "smoke.csv").string();
    return spec;
}

}  // namespace

TEST_CASE("derived seeds are deterministic and distinct") {
    CHECK(derive_seed(1, Variant::CsmaCa, 2, 0) == derive_seed(1, Variant::CsmaCa, 2, 0));
    CHECK(derive_seed(1, Variant::CsmaCa, 2, 0) != derive_seed(1, Variant::CsmaCa, 2, 1));
    CHECK(derive_seed(1, Variant::CsmaCa, 2, 0) != derive_seed(1, Variant::CsmaCa, 3, 0));
    CHECK(derive_seed(1, Variant::CsmaCa, 2, 0) != derive_seed(1, Variant::CsmaEca, 2, 0));
    CHECK(derive_seed(1, Variant::CsmaCa, 2, 0) != derive_seed(2, Variant::CsmaCa, 2, 0));
}

TEST_CASE("no seed collisions across the default sweep tuple space") {
    std::unordered_set<std::uint64_t> seen;
    for (Variant v : {Variant::CsmaCa, Variant::CsmaEca, Variant::EcaHysteresis,
                      Variant::EcaHysteresisFairShare})
        for (int n : default_n_values())
            for (int r = 0; r < 100; ++r)
                CHECK(seen.insert(derive_seed(1, v, n, r)).second);
    CHECK(seen.size() == 4u * 49u * 100u);
}

TEST_CASE("sweep writes a deterministic dataset") {
    const auto dir = std::filesystem::temp_directory_path() / "ecasim_sweep_test";
    std::filesystem::create_directories(dir);
    SweepSpec spec = smoke_spec(dir);

    SweepResult first = run_sweep(spec);
    const std::string csv_a = slurp(spec.output_csv);
    run_sweep(spec);
    const std::string csv_b = slurp(spec.output_csv);
    CHECK(csv_a == csv_b);

    REQUIRE(first.cells.size() == 4);
    std::istringstream lines(csv_a);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "variant,N,mean_throughput_bps,ci_throughput_bps,mean_jfi,ci_jfi,"
          "converged_fraction");
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    auto meta = nlohmann::json::parse(slurp(spec.output_csv + ".meta.json"));
    CHECK(meta["base_seed"] == 9);
    CHECK(meta["replications"] == 3);
    CHECK(meta["config"]["cw_min"] == 32);
    CHECK(meta["tool_version"].is_string());
}

TEST_CASE("execution order does not change cell results") {
    const auto dir = std::filesystem::temp_directory_path() / "ecasim_sweep_test";
    std::filesystem::create_directories(dir);
    SweepSpec spec = smoke_spec(dir);
    spec.output_csv.clear();

    SweepResult forward = run_sweep(spec);
    std::swap(spec.variants[0], spec.variants[1]);
    SweepResult swapped = run_sweep(spec);
    for (const auto& cell : forward.cells) {
        bool found = false;
        for (const auto& other : swapped.cells) {
            if (other.variant == cell.variant && other.num_nodes == cell.num_nodes) {
                found = true;
                CHECK(other.throughput_bps.mean == cell.throughput_bps.mean);
                CHECK(other.jfi.mean == cell.jfi.mean);
                CHECK(other.converged_fraction == cell.converged_fraction);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("unwritable output fails before any run starts") {
    SweepSpec spec;
    spec.variants = {Variant::CsmaEca};
    spec.n_values = {2};
    spec.replications = 2;
    spec.output_csv = "/nonexistent_dir/out.csv";
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("small csma/eca populations converge in every replication") {
    SweepSpec spec;
    spec.variants = {Variant::CsmaEca};
    spec.n_values = {8};
    spec.replications = 5;
    spec.base_config.duration_s = 1.0;
    SweepResult r = run_sweep(spec);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].converged_fraction == doctest::Approx(1.0));
}

TEST_CASE("sweep spec validation") {
    SweepSpec spec;
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);  // no variants
    spec.variants = {Variant::CsmaCa};
    spec.n_values = {};
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
    spec.n_values = {2};
    spec.replications = 0;
    CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}
