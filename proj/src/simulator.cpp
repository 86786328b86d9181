#include "spe/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace spe {

namespace {

std::uint64_t support_flip_mask(const Gate& g, int n_qubits) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < g.support.size(); ++i) {
        char p = g.paulis[i];
        if (p == 'X' || p == 'Y')
            mask |= std::uint64_t{1} << (n_qubits - 1 - g.support[i]);
    }
    return mask;
}

cplx support_phase(const Gate& g, int n_qubits, std::uint64_t index) {
    cplx phase{1.0, 0.0};
    for (std::size_t i = 0; i < g.support.size(); ++i) {
        bool bit = (index >> (n_qubits - 1 - g.support[i])) & 1;
        switch (g.paulis[i]) {
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

// exp(-i angle P / 2) restricted to indices where `control_mask` bits are
// set (control_mask = 0 applies everywhere).
void apply_pauli_rot(Statevector& st, const Gate& g, std::uint64_t control_mask) {
    int n = st.n_qubits();
    std::uint64_t flip = support_flip_mask(g, n);
    double c = std::cos(0.5 * g.angle);
    cplx mis{0.0, -std::sin(0.5 * g.angle)};  // -i sin(angle/2)
    auto& amps = st.amplitudes();
    if (flip == 0) {
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if ((i & control_mask) != control_mask) continue;
            // Z-only string: phase is +-1
            double s = support_phase(g, n, i).real();
            amps[i] *= cplx{c, 0.0} + mis * s;
        }
        return;
    }
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t j = i ^ flip;
        if (j < i) continue;
        if ((i & control_mask) != control_mask) continue;
        cplx pi = support_phase(g, n, i);  // P|i> = pi |j>
        cplx pj = support_phase(g, n, j);  // P|j> = pj |i>
        cplx ai = amps[i], aj = amps[j];
        amps[i] = c * ai + mis * pj * aj;
        amps[j] = c * aj + mis * pi * ai;
    }
}

void maybe_inject(Statevector& st, int qubit, const NoiseModel& noise, Rng& rng,
                  NoiseStats* stats) {
    double pl = noise.logical_rz_error_rate();
    if (stats) ++stats->rz_applications;
    if (!rng.bernoulli(pl)) return;
    if (stats) ++stats->injections;
    char op = 'Z';
    if (noise.channel == NoiseChannel::Depolarizing) {
        double u = rng.uniform();
        op = u < 1.0 / 3.0 ? 'X' : (u < 2.0 / 3.0 ? 'Y' : 'Z');
    }
    st.apply_pauli(qubit, op);
}

}  // namespace

Statevector apply_circuit(const Statevector& state, const Circuit& circuit,
                          const NoiseModel* noise, Rng* rng, NoiseStats* stats) {
    if (state.n_qubits() != circuit.n_qubits)
        throw std::invalid_argument("apply_circuit: qubit count mismatch");
    circuit.validate();
    if (noise && !rng)
        throw std::invalid_argument("apply_circuit: noise requires an rng");
    Statevector st = state;
    for (const auto& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::H:
                st.apply_h(g.q0);
                break;
            case GateKind::Cnot:
                st.apply_cnot(g.q0, g.q1);
                break;
            case GateKind::Rz:
                st.apply_rz(g.q0, g.angle);
                if (noise) maybe_inject(st, g.q0, *noise, *rng, stats);
                break;
            case GateKind::PauliRot:
                apply_pauli_rot(st, g, 0);
                break;
            case GateKind::ControlledPauliRot: {
                std::uint64_t cmask = std::uint64_t{1}
                                      << (circuit.n_qubits - 1 - g.q0);
                apply_pauli_rot(st, g, cmask);
                break;
            }
        }
    }
    if (circuit.global_phase != 0.0) st.apply_phase(circuit.global_phase);
    return st;
}

Circuit trotter_evolution_circuit(const PauliHamiltonian& h, double t, int steps,
                                  bool controlled, int control_qubit) {
    if (steps < 1) throw std::invalid_argument("trotter steps must be >= 1");
    Circuit c;
    c.n_qubits = controlled ? std::max(h.n_qubits, control_qubit + 1) : h.n_qubits;
    double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
        for (const auto& term : h.terms) {
            if (term.string.is_identity()) {
                if (controlled) {
                    // diag(1, exp(-i c dt)) on the control, up to the tracked
                    // global phase
                    c.add(Gate::rz(control_qubit, -term.coefficient * dt));
                    c.global_phase += -0.5 * term.coefficient * dt;
                } else {
                    c.global_phase += -term.coefficient * dt;
                }
                continue;
            }
            std::vector<int> support;
            std::string paulis;
            for (int q = 0; q < h.n_qubits; ++q) {
                if (term.string.ops[q] != 'I') {
                    support.push_back(q);
                    paulis.push_back(term.string.ops[q]);
                }
            }
            double angle = 2.0 * term.coefficient * dt;
            if (controlled) {
                if (std::find(support.begin(), support.end(), control_qubit) !=
                    support.end())
                    throw std::invalid_argument("control qubit inside term support");
                c.add(Gate::controlled_pauli_rot(control_qubit, std::move(support),
                                                 std::move(paulis), angle));
            } else {
                c.add(Gate::pauli_rot(std::move(support), std::move(paulis), angle));
            }
        }
    }
    return c;
}

cplx exact_evolution_expectation(const SpectralData& spec, const Statevector& psi,
                                 double t) {
    std::vector<double> p = overlaps(psi, spec);
    cplx out{0.0, 0.0};
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        out += p[i] * std::polar(1.0, -spec.eigenvalues(static_cast<Eigen::Index>(i)) * t);
    }
    return out;
}

cplx exact_evolution_expectation(const PauliHamiltonian& h, const Statevector& psi,
                                 double t) {
    return exact_evolution_expectation(eigensystem(h), psi, t);
}

Statevector exact_evolve(const SpectralData& spec, const Statevector& psi, double t) {
    Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), psi.dim());
    Eigen::VectorXcd coeffs = spec.eigenvectors.adjoint() * v;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        coeffs(i) *= std::polar(1.0, -spec.eigenvalues(i) * t);
    Eigen::VectorXcd evolved = spec.eigenvectors * coeffs;
    Statevector out = psi;
    for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] = evolved(static_cast<Eigen::Index>(i));
    return out;
}

double trotter_state_fidelity(const PauliHamiltonian& h, const Statevector& psi,
                              double t, int steps) {
    Circuit c = trotter_evolution_circuit(h, t, steps, false, 0);
    Statevector trotter = apply_circuit(psi, c);
    Statevector exact = exact_evolve(eigensystem(h), psi, t);
    return std::norm(exact.inner(trotter));
}

Circuit hadamard_test_circuit(const PauliHamiltonian& h, double t, HadamardPart part,
                              int trotter_steps) {
    int anc = h.n_qubits;
    Circuit evo = trotter_evolution_circuit(h, t, trotter_steps, true, anc);
    Circuit c;
    c.n_qubits = h.n_qubits + 1;
    c.add(Gate::h(anc));
    if (part == HadamardPart::Imaginary) {
        // S^dag = exp(-i pi/4) Rz(-pi/2)
        c.add(Gate::rz(anc, -M_PI / 2.0));
        c.global_phase += -M_PI / 4.0;
    }
    for (auto& g : evo.gates) c.add(std::move(g));
    c.global_phase += evo.global_phase;
    c.add(Gate::h(anc));
    return transpile(c);
}

int hadamard_test_shot(const PauliHamiltonian& h, const Statevector& psi, double t,
                       HadamardPart part, int trotter_steps, const NoiseModel* noise,
                       Rng& rng) {
    if (!std::isfinite(t)) throw std::invalid_argument("hadamard test: t not finite");
    Circuit c = hadamard_test_circuit(h, t, part, trotter_steps);
    Statevector in = psi.with_ancilla();
    Statevector out = apply_circuit(in, c, noise, noise ? &rng : nullptr);
    double p0 = out.prob_last_qubit_zero();
    return rng.uniform() < p0 ? +1 : -1;
}

HadamardTestSampler::HadamardTestSampler(const PauliHamiltonian& h,
                                         const Statevector& psi, int trotter_steps,
                                         std::optional<NoiseModel> noise)
    : base_state_(psi.with_ancilla()), noise_(std::move(noise)) {
    if (psi.n_qubits() != h.n_qubits)
        throw std::invalid_argument("sampler: state / hamiltonian mismatch");
    if (noise_) p_l_ = noise_->logical_rz_error_rate();

    // All angles are linear in t; recover (offset, slope) per gate from the
    // t=1 and t=2 instances of the same gate sequence.
    for (HadamardPart part : {HadamardPart::Real, HadamardPart::Imaginary}) {
        Circuit c1 = hadamard_test_circuit(h, 1.0, part, trotter_steps);
        Circuit c2 = hadamard_test_circuit(h, 2.0, part, trotter_steps);
        auto& body = part == HadamardPart::Real ? body_real_ : body_imag_;
        auto& rzpos = part == HadamardPart::Real ? rz_positions_real_ : rz_positions_imag_;
        body.reserve(c1.gates.size());
        for (std::size_t i = 0; i < c1.gates.size(); ++i) {
            const Gate& a = c1.gates[i];
            const Gate& b = c2.gates[i];
            double slope = b.angle - a.angle;
            body.push_back({a.kind, a.q0, a.q1, 2.0 * a.angle - b.angle, slope});
            if (a.kind == GateKind::Rz) rzpos.push_back(body.size() - 1);
        }
        (part == HadamardPart::Real ? template_real_ : template_imag_) = std::move(c1);
    }
}

std::size_t HadamardTestSampler::rz_count(HadamardPart part) const {
    return part == HadamardPart::Real ? rz_positions_real_.size()
                                      : rz_positions_imag_.size();
}

const Circuit& HadamardTestSampler::template_circuit(HadamardPart part) const {
    return part == HadamardPart::Real ? template_real_ : template_imag_;
}

double HadamardTestSampler::clean_prob_zero(double t, HadamardPart part) {
    auto& cache = part == HadamardPart::Real ? clean_cache_real_ : clean_cache_imag_;
    std::uint64_t key = std::bit_cast<std::uint64_t>(t);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double p = trajectory_prob_zero(t, part, {});
    cache.emplace(key, p);
    return p;
}

double HadamardTestSampler::trajectory_prob_zero(
    double t, HadamardPart part,
    const std::vector<std::pair<std::size_t, char>>& injections) {
    const auto& gates = body(part);
    Statevector st = base_state_;
    std::size_t rz_seen = 0;
    std::size_t next_injection = 0;
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateKind::H:
                st.apply_h(g.q0);
                break;
            case GateKind::Cnot:
                st.apply_cnot(g.q0, g.q1);
                break;
            case GateKind::Rz:
                st.apply_rz(g.q0, g.angle_offset + g.angle_slope * t);
                if (next_injection < injections.size() &&
                    injections[next_injection].first == rz_seen) {
                    st.apply_pauli(g.q0, injections[next_injection].second);
                    ++next_injection;
                }
                ++rz_seen;
                break;
            default:
                throw std::logic_error("sampler template must be transpiled");
        }
    }
    return st.prob_last_qubit_zero();
}

int HadamardTestSampler::shot(double t, HadamardPart part, Rng& rng) {
    ++executions_;
    double p0;
    if (!noise_ || p_l_ == 0.0) {
        p0 = clean_prob_zero(t, part);
    } else {
        std::size_t n_rz = rz_count(part);
        stats_.rz_applications += n_rz;
        std::vector<std::pair<std::size_t, char>> injections;
        std::uint64_t pos = 0;
        while (pos < n_rz) {
            std::uint64_t skip = rng.geometric_skip(p_l_, n_rz - pos);
            pos += skip;
            if (pos >= n_rz) break;
            char op = 'Z';
            if (noise_->channel == NoiseChannel::Depolarizing) {
                double u = rng.uniform();
                op = u < 1.0 / 3.0 ? 'X' : (u < 2.0 / 3.0 ? 'Y' : 'Z');
            }
            injections.emplace_back(pos, op);
            ++pos;
        }
        stats_.injections += injections.size();
        p0 = injections.empty() ? clean_prob_zero(t, part)
                                : trajectory_prob_zero(t, part, injections);
    }
    return rng.uniform() < p0 ? +1 : -1;
}

}  // namespace spe
