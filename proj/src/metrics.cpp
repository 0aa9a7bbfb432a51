#include "ecasim/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace ecasim {

std::optional<double> jain_index(const std::vector<double>& x) {
    if (x.empty()) throw StatisticsError("jain_index: empty input");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : x) {
        if (v < 0) throw StatisticsError("jain_index: negative allocation");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) return std::nullopt;  // no traffic
    return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

MeanCi confidence_interval(const std::vector<double>& samples, double level) {
    const std::size_t n = samples.size();
    if (n < 2) throw StatisticsError("confidence_interval: need at least 2 samples");
    if (level <= 0 || level >= 1) throw StatisticsError("confidence_interval: level must be in (0,1)");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    if (s == 0.0) return {mean, 0.0};
    boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    return {mean, t * s / std::sqrt(static_cast<double>(n))};
}

SweepResult aggregate(const std::vector<CellInput>& cells) {
    SweepResult out;
    out.cells.reserve(cells.size());
    for (const auto& cell : cells) {
        if (cell.runs.size() < 2)
            throw StatisticsError("aggregate: each cell needs at least 2 replications");
        std::vector<double> thr, jfi;
        thr.reserve(cell.runs.size());
        jfi.reserve(cell.runs.size());
        std::size_t converged = 0;
        for (const auto& run : cell.runs) {
            thr.push_back(run.aggregate_throughput_bps);
            jfi.push_back(run.jfi.value_or(0.0));
            if (run.convergence_slot) ++converged;
        }
        SweepCell sc;
        sc.variant = cell.variant;
        sc.num_nodes = cell.num_nodes;
        sc.throughput_bps = confidence_interval(thr);
        sc.jfi = confidence_interval(jfi);
        sc.converged_fraction =
            static_cast<double>(converged) / static_cast<double>(cell.runs.size());
        sc.replications = static_cast<int>(cell.runs.size());
        out.cells.push_back(sc);
    }
    return out;
}

}  // namespace ecasim
