#include "spe/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace spe {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

Statevector::Statevector(int n_qubits)
    : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, cplx{0.0, 0.0}) {
    if (n_qubits < 1 || n_qubits > 24)
        throw std::invalid_argument("statevector qubit count out of range");
    amps_[0] = 1.0;
}

Statevector Statevector::basis_state(int n_qubits, std::uint64_t index) {
    Statevector s(n_qubits);
    if (index >= s.dim()) throw std::invalid_argument("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

Statevector Statevector::from_bitstring(const std::string& bits) {
    std::uint64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("invalid bitstring '" + bits + "'");
        idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return basis_state(static_cast<int>(bits.size()), idx);
}

double Statevector::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

void Statevector::normalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0.0) throw std::runtime_error("cannot normalize zero state");
    for (auto& a : amps_) a /= n;
}

cplx Statevector::inner(const Statevector& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i)
        s += std::conj(amps_[i]) * other.amps_[i];
    return s;
}

void Statevector::apply_h(int qubit) {
    std::size_t bit = bit_of(qubit);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        cplx a = amps_[i];
        cplx b = amps_[i | bit];
        amps_[i] = (a + b) * kInvSqrt2;
        amps_[i | bit] = (a - b) * kInvSqrt2;
    }
}

void Statevector::apply_cnot(int control, int target) {
    std::size_t cbit = bit_of(control);
    std::size_t tbit = bit_of(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
    }
}

void Statevector::apply_rz(int qubit, double angle) {
    std::size_t bit = bit_of(qubit);
    cplx lo = std::polar(1.0, -0.5 * angle);
    cplx hi = std::polar(1.0, 0.5 * angle);
    for (std::size_t i = 0; i < amps_.size(); ++i)
        amps_[i] *= (i & bit) ? hi : lo;
}

void Statevector::apply_pauli(int qubit, char op) {
    std::size_t bit = bit_of(qubit);
    switch (op) {
        case 'X':
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
            break;
        case 'Y':
            for (std::size_t i = 0; i < amps_.size(); ++i) {
                if (i & bit) continue;
                cplx a = amps_[i];
                amps_[i] = cplx{0.0, -1.0} * amps_[i | bit];
                amps_[i | bit] = cplx{0.0, 1.0} * a;
            }
            break;
        case 'Z':
            for (std::size_t i = 0; i < amps_.size(); ++i)
                if (i & bit) amps_[i] = -amps_[i];
            break;
        default:
            throw std::invalid_argument("apply_pauli: unknown operator");
    }
}

void Statevector::apply_phase(double phase) {
    cplx f = std::polar(1.0, phase);
    for (auto& a : amps_) a *= f;
}

Statevector Statevector::with_ancilla() const {
    Statevector out(n_qubits_ + 1);
    out.amps_.assign(amps_.size() * 2, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < amps_.size(); ++i) out.amps_[2 * i] = amps_[i];
    return out;
}

double Statevector::prob_last_qubit_zero() const {
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); i += 2) p += std::norm(amps_[i]);
    return p;
}

}  // namespace spe
