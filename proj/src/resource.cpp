#include "spe/resource.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spe/noise.hpp"

namespace spe {

void TimingTable::validate() const {
    if (cnot_seconds <= 0.0 || h_seconds <= 0.0 || rz_seconds <= 0.0)
        throw std::invalid_argument("timing table entries must be positive");
}

TimingTable load_timing_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open timing table: " + path);
    nlohmann::json doc;
    in >> doc;
    TimingTable t;
    if (!doc.contains("cnot_seconds") || !doc.contains("h_seconds") ||
        !doc.contains("rz_seconds"))
        throw std::invalid_argument("timing table: missing instruction entry");
    t.cnot_seconds = doc["cnot_seconds"].get<double>();
    t.h_seconds = doc["h_seconds"].get<double>();
    t.rz_seconds = doc["rz_seconds"].get<double>();
    t.validate();
    return t;
}

std::pair<double, double> accumulate(std::span<const double> times) {
    double t_max = 0.0, t_total = 0.0;
    for (double t : times) {
        double a = std::abs(t);
        t_max = std::max(t_max, a);
        t_total += a;
    }
    return {t_max, t_total};
}

double fidelity_from_rz_count(std::int64_t rz_count, double p_phys) {
    NoiseModel nm{p_phys, NoiseChannel::ZFlip};
    double pl = nm.logical_rz_error_rate();
    return std::pow(1.0 - pl, static_cast<double>(rz_count));
}

double circuit_fidelity(const Circuit& c, double p_phys) {
    if (!c.is_transpiled())
        throw std::invalid_argument(
            "circuit_fidelity: circuit contains untranspiled gates");
    return fidelity_from_rz_count(static_cast<std::int64_t>(c.rz_count()), p_phys);
}

double execution_time(const Circuit& c, const TimingTable& timing) {
    timing.validate();
    double total = 0.0;
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case GateKind::H:
                total += timing.h_seconds;
                break;
            case GateKind::Cnot:
                total += timing.cnot_seconds;
                break;
            case GateKind::Rz:
                total += timing.rz_seconds;
                break;
            default:
                throw std::invalid_argument(
                    "execution_time: circuit contains untranspiled gates");
        }
    }
    return total;
}

double implied_rz_count(double fidelity, double p_phys) {
    if (fidelity <= 0.0 || fidelity > 1.0)
        throw std::invalid_argument("implied_rz_count: fidelity must be in (0, 1]");
    NoiseModel nm{p_phys, NoiseChannel::ZFlip};
    double pl = nm.logical_rz_error_rate();
    if (pl <= 0.0) throw std::invalid_argument("implied_rz_count: P_L is zero");
    return std::log(fidelity) / std::log1p(-pl);
}

}  // namespace spe
