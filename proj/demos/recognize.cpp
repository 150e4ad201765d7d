// Stores a handful of phase-encoded patterns, then recognizes a jittered
// probe of one of them and prints the overlap report.

#include <iostream>

#include "qam/qam.hpp"

int main() {
    using namespace qam;

    const std::size_t dimension = 64;
    const std::size_t stored_count = 5;
    const auto patterns = gen_random_phase_patterns(2718, dimension, stored_count);
    const Hologram memory = Hologram::build(patterns);

    const StatePattern probe = perturb_phases(patterns[2], 0.25, 314);
    const Recognition result = memory.recognize(probe.amplitudes, 0.8);

    std::cout << "probe derived from pattern 2, jitter 0.25 rad\n";
    std::cout << (result.recognized ? "recognized" : "ambiguous") << "\n";
    for (std::size_t k = 0; k < stored_count; ++k)
        std::cout << "  |c[" << k << "]| = " << std::abs(result.report.coefficients[k])
                  << (result.report.winner == k ? "   <- winner" : "") << "\n";
    std::cout << "confidence " << result.report.confidence << ", margin "
              << result.report.margin << "\n";
    return result.recognized ? 0 : 1;
}
