#include "spe/pauli.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spe/statevector.hpp"

namespace spe {

namespace {

bool valid_label(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
    });
}

constexpr int kMaxDenseQubits = 12;

}  // namespace

PauliString::PauliString(std::string labels) : ops(std::move(labels)) {
    if (!valid_label(ops))
        throw std::invalid_argument("invalid Pauli label '" + ops + "'");
}

bool PauliString::is_identity() const {
    return std::all_of(ops.begin(), ops.end(), [](char c) { return c == 'I'; });
}

std::uint64_t PauliString::flip_mask() const {
    std::uint64_t mask = 0;
    int n = n_qubits();
    for (int q = 0; q < n; ++q) {
        char c = ops[q];
        if (c == 'X' || c == 'Y') mask |= std::uint64_t{1} << (n - 1 - q);
    }
    return mask;
}

cplx PauliString::basis_phase(std::uint64_t index) const {
    // Phase of P|index> (the output state is |index ^ flip_mask()>).
    cplx phase{1.0, 0.0};
    int n = n_qubits();
    for (int q = 0; q < n; ++q) {
        bool bit = (index >> (n - 1 - q)) & 1;
        switch (ops[q]) {
            case 'Y':
                phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
                break;
            case 'Z':
                if (bit) phase = -phase;
                break;
            default:
                break;
        }
    }
    return phase;
}

Eigen::MatrixXcd PauliHamiltonian::to_matrix() const {
    if (n_qubits > kMaxDenseQubits)
        throw std::invalid_argument("dense matrix limited to " +
                                    std::to_string(kMaxDenseQubits) + " qubits, got " +
                                    std::to_string(n_qubits));
    std::size_t n = dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& term : terms) {
        std::uint64_t flip = term.string.flip_mask();
        for (std::size_t col = 0; col < n; ++col) {
            m(col ^ flip, col) += term.coefficient * term.string.basis_phase(col);
        }
    }
    return m;
}

PauliHamiltonian parse_hamiltonian(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("hamiltonian document: ") + e.what());
    }
    if (!doc.contains("n_qubits") || !doc.contains("terms"))
        throw std::invalid_argument("hamiltonian document: missing n_qubits or terms");
    int n = doc["n_qubits"].get<int>();
    if (n < 1) throw std::invalid_argument("n_qubits must be positive");

    std::map<std::string, double> merged;
    std::vector<std::string> order;
    for (const auto& entry : doc["terms"]) {
        if (!entry.is_array() || entry.size() != 2)
            throw std::invalid_argument("term entries must be [label, coefficient]");
        std::string label = entry[0].get<std::string>();
        double coef = entry[1].get<double>();
        if (!valid_label(label))
            throw std::invalid_argument("invalid Pauli label '" + label + "'");
        if (static_cast<int>(label.size()) != n)
            throw std::invalid_argument("label '" + label + "' length does not match n_qubits=" +
                                        std::to_string(n));
        if (!std::isfinite(coef))
            throw std::invalid_argument("non-finite coefficient for '" + label + "'");
        auto [it, inserted] = merged.try_emplace(label, 0.0);
        if (inserted) order.push_back(label);
        it->second += coef;
    }

    PauliHamiltonian h;
    h.n_qubits = n;
    for (const auto& label : order)
        h.terms.push_back({merged[label], PauliString(label)});
    return h;
}

PauliHamiltonian load_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hamiltonian file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_hamiltonian(buf.str());
}

SpectralData eigensystem(const PauliHamiltonian& h) {
    if (h.n_qubits > kMaxDenseQubits)
        throw std::invalid_argument("eigensystem limited to " +
                                    std::to_string(kMaxDenseQubits) + " qubits, got " +
                                    std::to_string(h.n_qubits));
    Eigen::MatrixXcd m = h.to_matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensystem solver failed");
    SpectralData spec;
    spec.eigenvalues = solver.eigenvalues();
    spec.eigenvectors = solver.eigenvectors();
    return spec;
}

double SpectralData::spectral_norm() const {
    return std::max(std::abs(eigenvalues(0)),
                    std::abs(eigenvalues(eigenvalues.size() - 1)));
}

double SpectralData::gap_above_ground(const Statevector& state,
                                      double weight_floor) const {
    std::vector<double> p = overlaps(state, *this);
    double ground = eigenvalues(0);
    for (Eigen::Index i = 1; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) - ground < 1e-12) continue;
        if (p[static_cast<std::size_t>(i)] >= weight_floor)
            return eigenvalues(i) - ground;
    }
    throw std::runtime_error("no excited eigenvalue above the weight floor");
}

std::vector<double> overlaps(const Statevector& state, const SpectralData& spec) {
    if (static_cast<Eigen::Index>(state.dim()) != spec.eigenvectors.rows())
        throw std::invalid_argument("overlaps: dimension mismatch");
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(), state.dim());
    Eigen::VectorXcd amp = spec.eigenvectors.adjoint() * psi;
    std::vector<double> p(amp.size());
    for (Eigen::Index i = 0; i < amp.size(); ++i) p[i] = std::norm(amp(i));
    return p;
}

double default_tau(const SpectralData& spec) {
    double norm = spec.spectral_norm();
    if (norm <= 0.0) throw std::invalid_argument("default_tau: zero Hamiltonian");
    return M_PI / (4.0 * norm);
}

double default_tau(const PauliHamiltonian& h) { return default_tau(eigensystem(h)); }

std::uint64_t bitstring_index(const std::string& bits) {
    std::uint64_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("invalid basis bitstring '" + bits + "'");
        idx = (idx << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return idx;
}

double calibrate_theta(const PauliHamiltonian& h, const std::string& basis_a,
                       const std::string& basis_b, double target_p0) {
    if (static_cast<int>(basis_a.size()) != h.n_qubits ||
        static_cast<int>(basis_b.size()) != h.n_qubits)
        throw std::invalid_argument("calibrate_theta: bitstring length mismatch");
    SpectralData spec = eigensystem(h);
    cplx a = std::conj(spec.eigenvectors(bitstring_index(basis_a), 0));
    cplx b = std::conj(spec.eigenvectors(bitstring_index(basis_b), 0));
    auto p0 = [&](double th) { return std::norm(std::cos(th) * a + std::sin(th) * b); };

    constexpr int kScan = 4096;
    double prev_theta = 0.0;
    double prev_val = p0(0.0) - target_p0;
    if (std::abs(prev_val) < 1e-15) return 0.0;
    double lo = 0.0, hi = -1.0;
    for (int i = 1; i <= kScan; ++i) {
        double th = M_PI / 2.0 * i / kScan;
        double val = p0(th) - target_p0;
        if (val == 0.0 || (val > 0) != (prev_val > 0)) {
            lo = prev_theta;
            hi = th;
            break;
        }
        prev_theta = th;
        prev_val = val;
    }
    if (hi < 0.0)
        throw std::invalid_argument("calibrate_theta: target overlap unreachable");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double val = p0(mid) - target_p0;
        if (std::abs(val) < 1e-14) return mid;
        if ((val > 0) == (p0(lo) - target_p0 > 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace spe
