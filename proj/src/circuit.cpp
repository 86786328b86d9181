#include "spe/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace spe {

Gate Gate::h(int q) {
    Gate g;
    g.kind = GateKind::H;
    g.q0 = q;
    return g;
}

Gate Gate::cnot(int control, int target) {
    Gate g;
    g.kind = GateKind::Cnot;
    g.q0 = control;
    g.q1 = target;
    return g;
}

Gate Gate::rz(int q, double angle) {
    Gate g;
    g.kind = GateKind::Rz;
    g.q0 = q;
    g.angle = angle;
    return g;
}

Gate Gate::pauli_rot(std::vector<int> support, std::string paulis, double angle) {
    if (support.size() != paulis.size() || support.empty())
        throw std::invalid_argument("pauli_rot: support/paulis mismatch");
    Gate g;
    g.kind = GateKind::PauliRot;
    g.support = std::move(support);
    g.paulis = std::move(paulis);
    g.angle = angle;
    return g;
}

Gate Gate::controlled_pauli_rot(int control, std::vector<int> support,
                                std::string paulis, double angle) {
    Gate g = pauli_rot(std::move(support), std::move(paulis), angle);
    g.kind = GateKind::ControlledPauliRot;
    g.q0 = control;
    return g;
}

void Circuit::add(Gate g) { gates.push_back(std::move(g)); }

std::size_t Circuit::rz_count() const {
    std::size_t n = 0;
    for (const auto& g : gates)
        if (g.kind == GateKind::Rz) ++n;
    return n;
}

bool Circuit::is_transpiled() const {
    for (const auto& g : gates)
        if (g.kind != GateKind::H && g.kind != GateKind::Cnot && g.kind != GateKind::Rz)
            return false;
    return true;
}

void Circuit::validate() const {
    auto check = [&](int q) {
        if (q < 0 || q >= n_qubits)
            throw std::out_of_range("gate qubit index " + std::to_string(q) +
                                    " out of range for " + std::to_string(n_qubits) +
                                    " qubits");
    };
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateKind::H:
            case GateKind::Rz:
                check(g.q0);
                break;
            case GateKind::Cnot:
                check(g.q0);
                check(g.q1);
                if (g.q0 == g.q1) throw std::invalid_argument("cnot control == target");
                break;
            case GateKind::ControlledPauliRot:
                check(g.q0);
                [[fallthrough]];
            case GateKind::PauliRot:
                for (int q : g.support) check(q);
                break;
        }
    }
}

namespace {

constexpr double kHalfPi = M_PI / 2.0;

// Basis-change wings for one Pauli rotation. `pre` maps the operator into a
// Z-string (applied before the CNOT ladder), `post` undoes it. Y uses
// Rz(-pi/2) H ... H Rz(pi/2); the two quarter-turn phases cancel exactly.
void emit_basis_change(Circuit& out, const Gate& g, bool pre) {
    for (std::size_t i = 0; i < g.support.size(); ++i) {
        int q = g.support[i];
        char p = g.paulis[i];
        if (p == 'X') {
            out.add(Gate::h(q));
        } else if (p == 'Y') {
            if (pre) {
                out.add(Gate::rz(q, -kHalfPi));
                out.add(Gate::h(q));
            } else {
                out.add(Gate::h(q));
                out.add(Gate::rz(q, kHalfPi));
            }
        }
    }
}

void emit_pauli_rot(Circuit& out, const Gate& g, bool controlled) {
    int pivot = g.support.back();
    emit_basis_change(out, g, true);
    for (std::size_t i = 0; i + 1 < g.support.size(); ++i)
        out.add(Gate::cnot(g.support[i], pivot));
    if (controlled) {
        out.add(Gate::rz(pivot, 0.5 * g.angle));
        out.add(Gate::cnot(g.q0, pivot));
        out.add(Gate::rz(pivot, -0.5 * g.angle));
        out.add(Gate::cnot(g.q0, pivot));
    } else {
        out.add(Gate::rz(pivot, g.angle));
    }
    for (std::size_t i = g.support.size() - 1; i-- > 0;)
        out.add(Gate::cnot(g.support[i], pivot));
    emit_basis_change(out, g, false);
}

}  // namespace

Circuit transpile(const Circuit& c) {
    Circuit out;
    out.n_qubits = c.n_qubits;
    out.global_phase = c.global_phase;
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case GateKind::H:
            case GateKind::Cnot:
            case GateKind::Rz:
                out.add(g);
                break;
            case GateKind::PauliRot:
                emit_pauli_rot(out, g, false);
                break;
            case GateKind::ControlledPauliRot:
                emit_pauli_rot(out, g, true);
                break;
        }
    }
    return out;
}

std::string serialize_circuit(const Circuit& c) {
    std::ostringstream out;
    char buf[64];
    out << "QUBITS " << c.n_qubits << "\n";
    if (c.global_phase != 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", c.global_phase);
        out << "PHASE " << buf << "\n";
    }
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case GateKind::H:
                out << "H " << g.q0 << "\n";
                break;
            case GateKind::Cnot:
                out << "CNOT " << g.q0 << " " << g.q1 << "\n";
                break;
            case GateKind::Rz:
                std::snprintf(buf, sizeof buf, "%.17g", g.angle);
                out << "RZ " << g.q0 << " " << buf << "\n";
                break;
            case GateKind::PauliRot:
            case GateKind::ControlledPauliRot:
                out << (g.kind == GateKind::PauliRot ? "PROT" : "CPROT");
                if (g.kind == GateKind::ControlledPauliRot) out << " " << g.q0;
                out << " " << g.paulis;
                for (int q : g.support) out << " " << q;
                std::snprintf(buf, sizeof buf, "%.17g", g.angle);
                out << " " << buf << "\n";
                break;
        }
    }
    return out.str();
}

Circuit parse_circuit(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        if (op == "QUBITS") {
            ls >> c.n_qubits;
        } else if (op == "PHASE") {
            ls >> c.global_phase;
        } else if (op == "H") {
            int q;
            ls >> q;
            c.add(Gate::h(q));
        } else if (op == "CNOT") {
            int a, b;
            ls >> a >> b;
            c.add(Gate::cnot(a, b));
        } else if (op == "RZ") {
            int q;
            double angle;
            ls >> q >> angle;
            c.add(Gate::rz(q, angle));
        } else if (op == "PROT" || op == "CPROT") {
            int control = 0;
            if (op == "CPROT") ls >> control;
            std::string paulis;
            ls >> paulis;
            std::vector<int> support(paulis.size());
            for (auto& q : support) ls >> q;
            double angle;
            ls >> angle;
            if (op == "CPROT")
                c.add(Gate::controlled_pauli_rot(control, support, paulis, angle));
            else
                c.add(Gate::pauli_rot(support, paulis, angle));
        } else {
            throw std::invalid_argument("unknown gate line: " + line);
        }
        if (ls.fail()) throw std::invalid_argument("malformed gate line: " + line);
    }
    c.validate();
    return c;
}

}  // namespace spe
