#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace spe {

using cplx = std::complex<double>;

class Statevector;

// One Pauli operator per qubit, qubit 0 leftmost. "IXYZ" acts with X on
// qubit 1, Y on qubit 2, Z on qubit 3.
struct PauliString {
    std::string ops;

    PauliString() = default;
    explicit PauliString(std::string labels);

    int n_qubits() const { return static_cast<int>(ops.size()); }
    bool is_identity() const;

    // Action on a computational basis state (qubit 0 = most significant
    // bit): P|index> = phase * |index ^ flip_mask()>.
    std::uint64_t flip_mask() const;
    cplx basis_phase(std::uint64_t index) const;

    bool operator==(const PauliString& other) const { return ops == other.ops; }
};

struct PauliTerm {
    double coefficient = 0.0;  // Hartree
    PauliString string;
};

struct PauliHamiltonian {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;

    Eigen::MatrixXcd to_matrix() const;
    std::size_t dim() const { return std::size_t{1} << n_qubits; }
};

struct SpectralData {
    Eigen::VectorXd eigenvalues;   // ascending, Hartree
    Eigen::MatrixXcd eigenvectors; // columns
    double ground_energy() const { return eigenvalues(0); }
    double spectral_norm() const;
    // Gap from the ground state to the nearest distinct eigenvalue carrying
    // at least `weight_floor` overlap with `state` (all eigenvalues when the
    // floor is zero).
    double gap_above_ground(const Statevector& state, double weight_floor) const;
};

// Parses the structured Hamiltonian document: {"n_qubits": n, "terms":
// [[label, coefficient], ...]}. Duplicate strings merge additively.
PauliHamiltonian parse_hamiltonian(const std::string& text);
PauliHamiltonian load_hamiltonian(const std::string& path);

SpectralData eigensystem(const PauliHamiltonian& h);

std::vector<double> overlaps(const Statevector& state, const SpectralData& spec);

// tau = pi / (4 ||H||_2); normalizes the spectrum into [-pi/4, pi/4].
double default_tau(const SpectralData& spec);
double default_tau(const PauliHamiltonian& h);

// Finds theta in [0, pi/2] with |<lambda_0| cos(theta)|a> + sin(theta)|b>|^2
// equal to target_p0. Scans for a bracket, then bisects.
double calibrate_theta(const PauliHamiltonian& h, const std::string& basis_a,
                       const std::string& basis_b, double target_p0);

std::uint64_t bitstring_index(const std::string& bits);

}  // namespace spe
