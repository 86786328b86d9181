#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace spe {

using cplx = std::complex<double>;

// Dense amplitude vector. Qubit 0 is the most significant bit of the basis
// index, matching the leftmost character of basis-state labels.
class Statevector {
  public:
    Statevector() = default;
    explicit Statevector(int n_qubits);
    static Statevector basis_state(int n_qubits, std::uint64_t index);
    static Statevector from_bitstring(const std::string& bits);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    std::vector<cplx>& amplitudes() { return amps_; }

    double norm_sq() const;
    void normalize();
    cplx inner(const Statevector& other) const;  // <this|other>

    void apply_h(int qubit);
    void apply_cnot(int control, int target);
    void apply_rz(int qubit, double angle);     // exp(-i angle Z / 2)
    void apply_pauli(int qubit, char op);       // X, Y or Z
    void apply_phase(double phase);             // multiply by exp(i phase)

    // Appends one |0> qubit as the new last qubit (least significant bit).
    Statevector with_ancilla() const;

    // Probability that the last qubit measures 0.
    double prob_last_qubit_zero() const;

  private:
    std::size_t bit_of(int qubit) const {
        return std::size_t{1} << (n_qubits_ - 1 - qubit);
    }

    int n_qubits_ = 0;
    std::vector<cplx> amps_;
};

}  // namespace spe
