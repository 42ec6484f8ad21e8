#include "rssa/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

namespace rssa {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

BatchRow batch_row(const TrialRecord& record) {
    BatchRow row;
    row.trial = record.trial;
    row.method = record.method;
    row.metrics = record.metrics;
    row.aborted = record.aborted;
    row.error = record.diagnostic;
    return row;
}

std::vector<BatchRow> run_batch(std::span<const Scenario> scenarios,
                                std::span<const MethodId> methods, unsigned threads) {
    const std::size_t n = scenarios.size() * methods.size();
    std::vector<BatchRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const Scenario& sc = scenarios[i / methods.size()];
            const MethodId method = methods[i % methods.size()];
            try {
                rows[i] = batch_row(run_trial(sc, method));
            } catch (const std::exception& ex) {
                rows[i].trial = sc.name;
                rows[i].method = method;
                rows[i].error = ex.what();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return rows;
}

std::string metrics_csv(std::span<const BatchRow> rows) {
    std::ostringstream out;
    out << kMetricsCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.trial << ',' << to_string(r.method) << ',';
        if (r.metrics) {
            const TrialMetrics& m = *r.metrics;
            out << m.goals_reached << ',' << m.violations << ',' << fmt(m.min_distance) << ','
                << fmt(m.avg_distance) << ',' << m.clipped_ticks << ',' << m.infeasible_ticks;
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace rssa
