#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spe/circuit.hpp"

namespace spe {

struct ResourceLedger {
    double t_max = 0.0;    // max_i |t_i|, dimensionless Hamiltonian time
    double t_total = 0.0;  // sum_i |t_i|
    std::int64_t n_shots = 0;
    std::int64_t rz_per_circuit = 0;
    double circuit_fidelity = 1.0;
    double est_execution_seconds = 0.0;  // model estimate, ratios meaningful
};

// Per-instruction execution times in seconds at a fixed code distance.
// Defaults are order-of-magnitude surface-code cycle assumptions; absolute
// values are a model estimate, only cross-algorithm ratios are meaningful.
struct TimingTable {
    double cnot_seconds = 1e-5;
    double h_seconds = 1e-5;
    double rz_seconds = 2e-5;

    void validate() const;
};

TimingTable load_timing_table(const std::string& path);

// (T_max, T_total); empty input gives (0, 0).
std::pair<double, double> accumulate(std::span<const double> times);

// (1 - P_L)^{N_Rz}; Clifford instructions contribute fidelity 1. Requires a
// transpiled circuit.
double circuit_fidelity(const Circuit& c, double p_phys);
double fidelity_from_rz_count(std::int64_t rz_count, double p_phys);

// Sum of per-instruction times for one execution.
double execution_time(const Circuit& c, const TimingTable& timing);

// Rz count a fidelity value implies at a given physical error rate
// (calibration against published fidelity tables).
double implied_rz_count(double fidelity, double p_phys);

}  // namespace spe
