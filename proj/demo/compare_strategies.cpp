// Runs every strategy on the same Poisson arrivals at a heavy load and prints
// a small QoE table.
//
//   demo_compare_strategies [rho] [duration]

#include <cstdio>
#include <cstdlib>

#include "smartstream/arrivals.hpp"
#include "smartstream/behavior_model.hpp"
#include "smartstream/sim_engine.hpp"
#include "smartstream/strategy.hpp"

using namespace smartstream;

int main(int argc, char** argv) {
    double const rho = argc > 1 ? std::atof(argv[1]) : 0.995;

    sim_config config; // 1 Mb/s video, 300 s long, 2 Mb/s access, 1000 Mb/s server
    config.duration = argc > 2 ? static_cast<std::size_t>(std::atol(argv[2])) : 3600;

    auto const model = synthetic_model({});
    auto const rates = rates_from_histogram(model);
    std::printf("mean viewing ratio %.3f, browsing boundary %.3f\n", mean_viewing_ratio(model),
                find_phase_boundary(rates).boundary_ratio);

    double const lambda = load_to_arrival_rate(rho, config.server_capacity, static_cast<double>(config.video_length),
                                               config.bitrate, mean_viewing_ratio(model));
    auto const arrivals = realize(poisson_arrivals{lambda}, config.duration, config.seed);

    std::printf("%-4s %12s %12s %12s %12s %12s\n", "", "PercentUser", "AvgNFreeze", "FreezeRatio", "RateFreeze",
                "Wasted");
    for (auto k : {strategy_kind::sc, strategy_kind::sc_plus, strategy_kind::be, strategy_kind::eb, strategy_kind::ew,
                   strategy_kind::bb}) {
        auto const m = run(config, make_strategy(k, rates), arrivals, model).report;
        std::printf("%-4s %12.4f %12.4f %12.5f %12.4f %12.0f\n", std::string(to_string(k)).c_str(), m.percent_user,
                    m.avg_n_freeze, m.freeze_ratio, m.rate_freeze, m.wasted_bw);
    }
}
