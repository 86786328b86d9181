#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "spe/circuit.hpp"
#include "spe/noise.hpp"
#include "spe/pauli.hpp"
#include "spe/rng.hpp"
#include "spe/statevector.hpp"

namespace spe {

// Applies the circuit. With a noise model, a Pauli error is injected after
// each Rz with probability P_L (channel per model); Clifford gates are
// error-free. `rng` is required when noise is present.
Statevector apply_circuit(const Statevector& state, const Circuit& circuit,
                          const NoiseModel* noise = nullptr, Rng* rng = nullptr,
                          NoiseStats* stats = nullptr);

// First-order Trotter circuit for exp(-i H t), `steps` repetitions of the
// per-term product. Controlled variant conditions every rotation on
// `control_qubit`; identity terms become plain ancilla Rz (they shift the
// measured phase). Uncontrolled identity terms accumulate in global_phase.
Circuit trotter_evolution_circuit(const PauliHamiltonian& h, double t, int steps,
                                  bool controlled = false, int control_qubit = 0);

// <psi| exp(-i H t) |psi> = sum_i p_i exp(-i lambda_i t), from the
// eigensystem.
cplx exact_evolution_expectation(const SpectralData& spec, const Statevector& psi,
                                 double t);
cplx exact_evolution_expectation(const PauliHamiltonian& h, const Statevector& psi,
                                 double t);

Statevector exact_evolve(const SpectralData& spec, const Statevector& psi, double t);

// |<psi_exact(t)|psi_trotter(t)>|^2
double trotter_state_fidelity(const PauliHamiltonian& h, const Statevector& psi,
                              double t, int steps);

enum class HadamardPart { Real, Imaginary };

// Full Hadamard-test circuit on n+1 qubits (ancilla appended last),
// transpiled to the native gate set. The imaginary variant inserts S^dag
// on the ancilla.
Circuit hadamard_test_circuit(const PauliHamiltonian& h, double t, HadamardPart part,
                              int trotter_steps);

// Single +-1 shot; E[shot] is Re or Im of the Trotterized <exp(-iHt)>.
int hadamard_test_shot(const PauliHamiltonian& h, const Statevector& psi, double t,
                       HadamardPart part, int trotter_steps, const NoiseModel* noise,
                       Rng& rng);

// Repeated Hadamard tests against one Hamiltonian share the same gate
// sequence; only Rz angles change with t. This sampler instantiates that
// sequence once, caches the noiseless ancilla distribution per evolution
// time, and runs noisy shots as stochastic Pauli-injection trajectories
// (clean trajectories reuse the cache, so low error rates stay cheap).
class HadamardTestSampler {
  public:
    HadamardTestSampler(const PauliHamiltonian& h, const Statevector& psi,
                        int trotter_steps, std::optional<NoiseModel> noise);

    int shot(double t, HadamardPart part, Rng& rng);

    std::size_t rz_count(HadamardPart part) const;
    std::uint64_t executions() const { return executions_; }
    const NoiseStats& noise_stats() const { return stats_; }
    const Circuit& template_circuit(HadamardPart part) const;

  private:
    struct ScaledGate {
        GateKind kind;
        int q0, q1;
        double angle_offset;
        double angle_slope;  // angle = offset + slope * t
    };

    double clean_prob_zero(double t, HadamardPart part);
    double trajectory_prob_zero(double t, HadamardPart part,
                                const std::vector<std::pair<std::size_t, char>>& injections);

    const std::vector<ScaledGate>& body(HadamardPart part) const {
        return part == HadamardPart::Real ? body_real_ : body_imag_;
    }

    Statevector base_state_;
    std::vector<ScaledGate> body_real_, body_imag_;
    Circuit template_real_, template_imag_;  // slope-1 instances, for accounting
    std::vector<std::size_t> rz_positions_real_, rz_positions_imag_;
    std::optional<NoiseModel> noise_;
    double p_l_ = 0.0;
    std::unordered_map<std::uint64_t, double> clean_cache_real_, clean_cache_imag_;
    std::uint64_t executions_ = 0;
    NoiseStats stats_;
};

}  // namespace spe
