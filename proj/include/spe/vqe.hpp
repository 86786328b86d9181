#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spe/circuit.hpp"
#include "spe/noise.hpp"
#include "spe/pauli.hpp"
#include "spe/rng.hpp"
#include "spe/statevector.hpp"

namespace spe {

struct AnsatzGenerator {
    PauliString string;
    int param_index = 0;
};

// Hartree-Fock preparation followed by Pauli-rotation generators, applied
// in order with angle = params[param_index].
struct Ansatz {
    int n_qubits = 0;
    std::string hf_bitstring;
    std::vector<AnsatzGenerator> generators;
    int n_params = 0;
};

Ansatz parse_ansatz(const std::string& text);
Ansatz load_ansatz(const std::string& path);

// IR circuit (X prep as H Rz(pi) H with phase bookkeeping happens at
// transpile time; prep is emitted as PauliRot-free native gates directly).
Circuit ansatz_circuit(const Ansatz& a, const std::vector<double>& params);

// Term-wise Pauli sampling: for each non-identity term, rotate to the Z
// basis and average `shots_per_term` parity measurements. shots_per_term = 0
// gives the exact statevector expectation.
double estimate_energy(const PauliHamiltonian& h, const Ansatz& ansatz,
                       const std::vector<double>& params, std::int64_t shots_per_term,
                       const std::optional<NoiseModel>& noise, std::uint64_t seed,
                       std::uint64_t eval_index = 0);

struct VqeIterate {
    std::vector<double> params;
    double energy = 0.0;
    std::int64_t cumulative_shots = 0;
};

struct VqeRunLedger {
    std::vector<VqeIterate> iterations;
    std::int64_t total_shots = 0;
    double final_energy = 0.0;
    std::vector<double> final_params;
    int energy_evaluations = 0;
    std::string termination;  // "budget", "gradient", "max_iterations"
};

struct VqeOptimizerConfig {
    std::int64_t shots_per_term = 0;  // 0 = exact expectations
    std::int64_t total_shot_budget = 0;  // 0 = unlimited (exact mode)
    int max_iterations = 200;
    double gradient_tolerance = 1e-7;
    double fd_scale = 0.5;  // finite-difference step = fd_scale * shots^-1/4
};

// BFGS with central finite differences; step size tuned to shot noise.
VqeRunLedger optimize(const PauliHamiltonian& h, const Ansatz& ansatz,
                      std::vector<double> initial_params, const VqeOptimizerConfig& cfg,
                      const std::optional<NoiseModel>& noise, std::uint64_t seed);

std::string vqe_ledger_csv(const VqeRunLedger& ledger);

}  // namespace spe
