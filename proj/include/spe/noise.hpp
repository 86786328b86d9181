#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spe {

enum class NoiseChannel { ZFlip, Depolarizing };

// STAR-architecture noise: Clifford gates are error-free, every Rz carries
// logical error rate P_L = 1 - (1 - 2 p_phys / 15)^2, evaluated exactly.
struct NoiseModel {
    double p_phys = 0.0;
    NoiseChannel channel = NoiseChannel::ZFlip;

    double logical_rz_error_rate() const {
        double base = 1.0 - 2.0 * p_phys / 15.0;
        double pl = 1.0 - base * base;
        if (!(pl >= 0.0 && pl <= 1.0))
            throw std::invalid_argument("NoiseModel: P_L outside [0, 1] for p_phys=" +
                                        std::to_string(p_phys));
        return pl;
    }
};

struct NoiseStats {
    std::uint64_t rz_applications = 0;
    std::uint64_t injections = 0;
};

}  // namespace spe
