// Prints a small capacity curve: recognition accuracy and mean margin as
// more patterns share one memory, at fixed phase jitter.

#include <iostream>

#include "qam/bench.hpp"

int main() {
    qam::ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.dimension = 64;
    cfg.pattern_counts = {1, 2, 4, 8, 16, 32};
    cfg.noise_levels = {0.4};
    cfg.trials = 50;
    cfg.min_confidence = 0.8;

    const qam::ExperimentResult result = qam::run_capacity_sweep(cfg);
    std::cout << "P\taccuracy\tmean_margin\n";
    for (const qam::CellSummary& cell : result.summary())
        std::cout << cell.pattern_count << '\t' << cell.accuracy << "\t\t"
                  << cell.mean_margin << '\n';
    return 0;
}
