#pragma once

#include <string>
#include <vector>

#include "spe/pauli.hpp"

namespace spe {

enum class GateKind { H, Cnot, Rz, PauliRot, ControlledPauliRot };

// PauliRot applies exp(-i angle P / 2) on `support` (pre-transpilation IR);
// ControlledPauliRot applies it controlled on qubit q0. After transpilation
// only H, Cnot and Rz remain.
struct Gate {
    GateKind kind = GateKind::H;
    int q0 = 0;  // H/Rz target, Cnot control, ControlledPauliRot control
    int q1 = 0;  // Cnot target
    double angle = 0.0;
    std::vector<int> support;  // PauliRot targets
    std::string paulis;        // X/Y/Z per support entry

    static Gate h(int q);
    static Gate cnot(int control, int target);
    static Gate rz(int q, double angle);
    static Gate pauli_rot(std::vector<int> support, std::string paulis, double angle);
    static Gate controlled_pauli_rot(int control, std::vector<int> support,
                                     std::string paulis, double angle);
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    // Accumulated global phase; simulation multiplies the state by
    // exp(i global_phase). Keeps circuits exactly equal to the operator
    // products they encode (identity Hamiltonian terms, S^dag bookkeeping).
    double global_phase = 0.0;

    void add(Gate g);
    std::size_t rz_count() const;
    bool is_transpiled() const;
    void validate() const;  // throws on out-of-range qubit indices
};

// Rewrites PauliRot / ControlledPauliRot into {H, Cnot, Rz}. Basis changes
// use H for X and Rz(-pi/2)+H conjugation for Y; the controlled core is
// Rz(a/2) Cnot Rz(-a/2) Cnot on the pivot. Exact, including phases.
Circuit transpile(const Circuit& c);

// Line-based text format, one gate per line.
std::string serialize_circuit(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace spe
