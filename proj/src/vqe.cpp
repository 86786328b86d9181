#include "spe/vqe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spe/simulator.hpp"

namespace spe {

Ansatz parse_ansatz(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("ansatz document: ") + e.what());
    }
    Ansatz a;
    a.n_qubits = doc.at("n_qubits").get<int>();
    a.hf_bitstring = doc.at("hf_state").get<std::string>();
    if (static_cast<int>(a.hf_bitstring.size()) != a.n_qubits)
        throw std::invalid_argument("ansatz: hf_state length mismatch");
    int max_idx = -1;
    for (const auto& entry : doc.at("generators")) {
        AnsatzGenerator g;
        g.string = PauliString(entry.at(0).get<std::string>());
        g.param_index = entry.at(1).get<int>();
        if (g.string.n_qubits() != a.n_qubits)
            throw std::invalid_argument("ansatz: generator length mismatch");
        if (g.param_index < 0)
            throw std::invalid_argument("ansatz: negative parameter index");
        max_idx = std::max(max_idx, g.param_index);
        a.generators.push_back(std::move(g));
    }
    a.n_params = max_idx + 1;
    return a;
}

Ansatz load_ansatz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ansatz file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ansatz(buf.str());
}

Circuit ansatz_circuit(const Ansatz& a, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != a.n_params)
        throw std::invalid_argument("ansatz_circuit: expected " +
                                    std::to_string(a.n_params) + " parameters");
    Circuit c;
    c.n_qubits = a.n_qubits;
    for (int q = 0; q < a.n_qubits; ++q) {
        if (a.hf_bitstring[q] == '1') {
            // X = exp(i pi/2) H Rz(pi) H
            c.add(Gate::h(q));
            c.add(Gate::rz(q, M_PI));
            c.add(Gate::h(q));
            c.global_phase += M_PI / 2.0;
        }
    }
    for (const auto& g : a.generators) {
        std::vector<int> support;
        std::string paulis;
        for (int q = 0; q < a.n_qubits; ++q) {
            if (g.string.ops[q] != 'I') {
                support.push_back(q);
                paulis.push_back(g.string.ops[q]);
            }
        }
        if (support.empty()) continue;
        c.add(Gate::pauli_rot(std::move(support), std::move(paulis),
                              params[static_cast<std::size_t>(g.param_index)]));
    }
    return c;
}

namespace {

double pauli_expectation(const Statevector& st, const PauliString& p) {
    std::uint64_t flip = p.flip_mask();
    cplx acc{0.0, 0.0};
    const auto& amps = st.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        std::size_t j = i ^ flip;
        acc += std::conj(amps[j]) * p.basis_phase(i) * amps[i];
    }
    return acc.real();
}

// Z-basis rotation for measuring a Pauli string.
void append_measurement_rotation(Circuit& c, const PauliString& p) {
    for (int q = 0; q < p.n_qubits(); ++q) {
        if (p.ops[q] == 'X') {
            c.add(Gate::h(q));
        } else if (p.ops[q] == 'Y') {
            c.add(Gate::rz(q, -M_PI / 2.0));
            c.add(Gate::h(q));
            c.global_phase += -M_PI / 4.0;
        }
    }
}

int parity_outcome(std::uint64_t basis, const PauliString& p) {
    int sign = 1;
    int n = p.n_qubits();
    for (int q = 0; q < n; ++q)
        if (p.ops[q] != 'I' && ((basis >> (n - 1 - q)) & 1)) sign = -sign;
    return sign;
}

std::vector<double> cumulative_distribution(const Statevector& st) {
    std::vector<double> cum(st.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < st.dim(); ++i) {
        acc += std::norm(st[i]);
        cum[i] = acc;
    }
    cum.back() = std::max(cum.back(), 1.0);
    return cum;
}

std::size_t sample_basis(const std::vector<double>& cum, double u) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) return cum.size() - 1;
    return static_cast<std::size_t>(it - cum.begin());
}

}  // namespace

double estimate_energy(const PauliHamiltonian& h, const Ansatz& ansatz,
                       const std::vector<double>& params, std::int64_t shots_per_term,
                       const std::optional<NoiseModel>& noise, std::uint64_t seed,
                       std::uint64_t eval_index) {
    if (h.n_qubits != ansatz.n_qubits)
        throw std::invalid_argument("estimate_energy: qubit count mismatch");
    Circuit base = ansatz_circuit(ansatz, params);

    if (shots_per_term == 0) {
        Statevector st = apply_circuit(Statevector(h.n_qubits), transpile(base));
        double e = 0.0;
        for (const auto& term : h.terms)
            e += term.coefficient *
                 (term.string.is_identity() ? 1.0 : pauli_expectation(st, term.string));
        return e;
    }
    if (shots_per_term < 0) throw std::invalid_argument("estimate_energy: negative shots");

    double p_l = noise ? noise->logical_rz_error_rate() : 0.0;
    double energy = 0.0;
    std::uint64_t term_index = 0;
    for (const auto& term : h.terms) {
        if (term.string.is_identity()) {
            energy += term.coefficient;
            continue;
        }
        Circuit mc = base;
        append_measurement_rotation(mc, term.string);
        Circuit tc = transpile(mc);
        std::vector<std::size_t> rz_targets;
        for (std::size_t i = 0; i < tc.gates.size(); ++i)
            if (tc.gates[i].kind == GateKind::Rz) rz_targets.push_back(i);

        Statevector clean = apply_circuit(Statevector(h.n_qubits), tc);
        std::vector<double> clean_cum = cumulative_distribution(clean);

        ++term_index;
        long long sum = 0;
        for (std::int64_t s = 0; s < shots_per_term; ++s) {
            Rng rng = Rng::for_stream(
                seed, Rng::mix(Rng::mix(eval_index + 1, term_index),
                               static_cast<std::uint64_t>(s)));
            std::size_t basis;
            if (p_l == 0.0) {
                basis = sample_basis(clean_cum, rng.uniform());
            } else {
                std::vector<std::pair<std::size_t, char>> injections;
                std::uint64_t pos = 0;
                std::uint64_t n_rz = rz_targets.size();
                while (pos < n_rz) {
                    std::uint64_t skip = rng.geometric_skip(p_l, n_rz - pos);
                    pos += skip;
                    if (pos >= n_rz) break;
                    char op = 'Z';
                    if (noise->channel == NoiseChannel::Depolarizing) {
                        double u = rng.uniform();
                        op = u < 1.0 / 3.0 ? 'X' : (u < 2.0 / 3.0 ? 'Y' : 'Z');
                    }
                    injections.emplace_back(pos, op);
                    ++pos;
                }
                if (injections.empty()) {
                    basis = sample_basis(clean_cum, rng.uniform());
                } else {
                    Statevector st(h.n_qubits);
                    std::size_t rz_seen = 0, next = 0;
                    for (std::size_t gi = 0; gi < tc.gates.size(); ++gi) {
                        const Gate& g = tc.gates[gi];
                        if (g.kind == GateKind::H) {
                            st.apply_h(g.q0);
                        } else if (g.kind == GateKind::Cnot) {
                            st.apply_cnot(g.q0, g.q1);
                        } else {
                            st.apply_rz(g.q0, g.angle);
                            if (next < injections.size() &&
                                injections[next].first == rz_seen) {
                                st.apply_pauli(g.q0, injections[next].second);
                                ++next;
                            }
                            ++rz_seen;
                        }
                    }
                    basis = sample_basis(cumulative_distribution(st), rng.uniform());
                }
            }
            sum += parity_outcome(basis, term.string);
        }
        energy += term.coefficient * static_cast<double>(sum) /
                  static_cast<double>(shots_per_term);
    }
    return energy;
}

namespace {

std::int64_t measured_terms(const PauliHamiltonian& h) {
    std::int64_t n = 0;
    for (const auto& t : h.terms)
        if (!t.string.is_identity()) ++n;
    return n;
}

}  // namespace

VqeRunLedger optimize(const PauliHamiltonian& h, const Ansatz& ansatz,
                      std::vector<double> initial_params, const VqeOptimizerConfig& cfg,
                      const std::optional<NoiseModel>& noise, std::uint64_t seed) {
    const std::int64_t eval_cost = cfg.shots_per_term * measured_terms(h);
    if (cfg.total_shot_budget > 0 && eval_cost > cfg.total_shot_budget)
        throw std::invalid_argument("optimize: budget below one energy evaluation");

    VqeRunLedger ledger;
    std::uint64_t eval_counter = 0;
    auto energy = [&](const Eigen::VectorXd& x) {
        std::vector<double> p(x.data(), x.data() + x.size());
        double e = estimate_energy(h, ansatz, p, cfg.shots_per_term, noise, seed,
                                   eval_counter++);
        ledger.total_shots += eval_cost;
        ++ledger.energy_evaluations;
        return e;
    };
    auto budget_left = [&](std::int64_t evals) {
        return cfg.total_shot_budget == 0 ||
               ledger.total_shots + evals * eval_cost <= cfg.total_shot_budget;
    };

    const int n = static_cast<int>(initial_params.size());
    double fd = cfg.fd_scale *
                (cfg.shots_per_term > 0
                     ? std::pow(static_cast<double>(cfg.shots_per_term), -0.25)
                     : 2e-5);
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(initial_params.data(), n);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

    auto gradient = [&](const Eigen::VectorXd& pt) {
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = pt, xm = pt;
            xp(i) += fd;
            xm(i) -= fd;
            g(i) = (energy(xp) - energy(xm)) / (2.0 * fd);
        }
        return g;
    };

    double f = energy(x);
    ledger.termination = "max_iterations";
    Eigen::VectorXd g(n);
    bool have_g = false;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        if (!budget_left(2 * n)) {
            ledger.termination = "budget";
            break;
        }
        if (!have_g) g = gradient(x);
        if (g.norm() < cfg.gradient_tolerance) {
            ledger.termination = "gradient";
            break;
        }
        Eigen::VectorXd dir = -h_inv * g;
        if (dir.dot(g) >= 0.0) {
            h_inv.setIdentity();
            dir = -g;
        }
        double alpha = 1.0;
        double f_new = f;
        Eigen::VectorXd x_new = x;
        bool accepted = false;
        for (int ls = 0; ls < 10; ++ls) {
            if (!budget_left(1)) break;
            Eigen::VectorXd cand = x + alpha * dir;
            double fc = energy(cand);
            if (fc <= f + 1e-4 * alpha * g.dot(dir) ||
                (cfg.shots_per_term > 0 && ls == 9)) {
                x_new = cand;
                f_new = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!budget_left(1)) {
                ledger.termination = "budget";
            } else {
                ledger.termination = "stalled";
            }
            break;
        }
        if (!budget_left(2 * n)) {
            x = x_new;
            f = f_new;
            ledger.iterations.push_back(
                {std::vector<double>(x.data(), x.data() + n), f, ledger.total_shots});
            ledger.termination = "budget";
            break;
        }
        Eigen::VectorXd g_new = gradient(x_new);
        Eigen::VectorXd s = x_new - x;
        Eigen::VectorXd yv = g_new - g;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            double rho = 1.0 / sy;
            h_inv = (eye - rho * s * yv.transpose()) * h_inv *
                        (eye - rho * yv * s.transpose()) +
                    rho * s * s.transpose();
        } else {
            h_inv.setIdentity();
        }
        x = x_new;
        f = f_new;
        g = g_new;
        have_g = true;
        ledger.iterations.push_back(
            {std::vector<double>(x.data(), x.data() + n), f, ledger.total_shots});
    }

    ledger.final_energy = f;
    ledger.final_params.assign(x.data(), x.data() + n);
    return ledger;
}

std::string vqe_ledger_csv(const VqeRunLedger& ledger) {
    std::ostringstream out;
    out << "iteration,energy,cumulative_shots\n";
    char buf[40];
    for (std::size_t i = 0; i < ledger.iterations.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", ledger.iterations[i].energy);
        out << i << "," << buf << "," << ledger.iterations[i].cumulative_shots << "\n";
    }
    return out.str();
}

}  // namespace spe
