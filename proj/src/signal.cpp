#include "spe/signal.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace spe {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) return {lo};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

std::vector<ShotRecord> collect_shot_records(HadamardTestSampler& sampler,
                                             const FourierSampler& fourier, double tau,
                                             std::int64_t n_sample, std::uint64_t seed) {
    if (n_sample < 1) throw std::invalid_argument("collect: n_sample must be >= 1");
    std::vector<ShotRecord> records;
    records.reserve(static_cast<std::size_t>(n_sample));
    for (std::int64_t m = 0; m < n_sample; ++m) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(m));
        std::size_t n = fourier.sample_index(rng.uniform());
        ShotRecord rec;
        rec.sample_index = m;
        rec.k = fourier.k_values[n];
        rec.phi = fourier.phases[n];
        rec.t = rec.k * tau;
        rec.x_outcome = sampler.shot(rec.t, HadamardPart::Real, rng);
        rec.y_outcome = sampler.shot(rec.t, HadamardPart::Imaginary, rng);
        records.push_back(rec);
    }
    return records;
}

ExactSignalEvaluator::ExactSignalEvaluator(const SpectralData& spec,
                                           const Statevector& psi,
                                           const FourierSampler& fourier, double tau)
    : k_values_(fourier.k_values), tau_(tau) {
    std::vector<double> p = overlaps(psi, spec);
    weighted_.resize(fourier.n_modes());
    for (std::size_t n = 0; n < fourier.n_modes(); ++n) {
        cplx expectation{0.0, 0.0};
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0) continue;
            expectation +=
                p[i] * std::polar(1.0, -spec.eigenvalues(static_cast<Eigen::Index>(i)) *
                                           k_values_[n] * tau);
        }
        weighted_[n] = fourier.coefficients[n] * expectation;
    }
}

cplx ExactSignalEvaluator::operator()(double x) const {
    cplx z{0.0, 0.0};
    for (std::size_t n = 0; n < k_values_.size(); ++n)
        z += weighted_[n] * std::polar(1.0, k_values_[n] * x);
    return z;
}

Signal exact_signal(const SpectralData& spec, const Statevector& psi,
                    const FourierSampler& fourier, double tau,
                    const std::vector<double>& x_grid) {
    ExactSignalEvaluator eval(spec, psi, fourier, tau);
    Signal s;
    s.x_grid = x_grid;
    s.tau = tau;
    s.z_values.reserve(x_grid.size());
    for (double x : x_grid) s.z_values.push_back(eval(x));
    return s;
}

ModeAggregate aggregate_records(const std::vector<ShotRecord>& records,
                                const FourierSampler& fourier) {
    if (records.empty()) throw std::invalid_argument("evaluate_signal: no records");
    ModeAggregate agg;
    agg.n_records = records.size();
    agg.total_weight = fourier.total_weight;
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(1024);
    for (const auto& rec : records) {
        std::uint64_t key = std::bit_cast<std::uint64_t>(rec.k);
        auto [it, inserted] = index.try_emplace(key, agg.k_values.size());
        if (inserted) {
            agg.k_values.push_back(rec.k);
            agg.summed.emplace_back(0.0, 0.0);
        }
        cplx outcome{static_cast<double>(rec.x_outcome),
                     static_cast<double>(rec.y_outcome)};
        agg.summed[it->second] += std::polar(1.0, rec.phi) * outcome;
    }
    return agg;
}

cplx ModeAggregate::at(double x) const {
    cplx z{0.0, 0.0};
    for (std::size_t i = 0; i < k_values.size(); ++i)
        z += summed[i] * std::polar(1.0, k_values[i] * x);
    return z * (total_weight / static_cast<double>(n_records));
}

Signal evaluate_signal(const std::vector<ShotRecord>& records,
                       const FourierSampler& fourier, double tau,
                       const std::vector<double>& x_grid) {
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (x_grid[i] <= x_grid[i - 1])
            throw std::invalid_argument("evaluate_signal: x_grid not increasing");
    ModeAggregate agg = aggregate_records(records, fourier);
    Signal s;
    s.x_grid = x_grid;
    s.tau = tau;
    s.z_values.reserve(x_grid.size());
    for (double x : x_grid) s.z_values.push_back(agg.at(x));
    return s;
}

cplx evaluate_signal_at(const std::vector<ShotRecord>& records,
                        const FourierSampler& fourier, double x) {
    return aggregate_records(records, fourier).at(x);
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string records_to_csv(const std::vector<ShotRecord>& records) {
    std::ostringstream out;
    out << "sample_index,k,phi,t,X,Y\n";
    for (const auto& r : records)
        out << r.sample_index << "," << fmt(r.k) << "," << fmt(r.phi) << ","
            << fmt(r.t) << "," << r.x_outcome << "," << r.y_outcome << "\n";
    return out.str();
}

std::vector<ShotRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ShotRecord> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        ShotRecord r;
        long long idx = 0;
        if (std::sscanf(line.c_str(), "%lld,%lg,%lg,%lg,%d,%d", &idx, &r.k, &r.phi,
                        &r.t, &r.x_outcome, &r.y_outcome) != 6)
            throw std::invalid_argument("bad record line: " + line);
        r.sample_index = idx;
        out.push_back(r);
    }
    return out;
}

std::string signal_to_csv(const Signal& s) {
    std::ostringstream out;
    std::istringstream meta(s.metadata);
    std::string line;
    while (std::getline(meta, line)) out << "# " << line << "\n";
    out << "# tau=" << fmt(s.tau) << "\n";
    out << "x,re_z,im_z\n";
    for (std::size_t i = 0; i < s.x_grid.size(); ++i)
        out << fmt(s.x_grid[i]) << "," << fmt(s.z_values[i].real()) << ","
            << fmt(s.z_values[i].imag()) << "\n";
    return out.str();
}

Signal signal_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Signal s;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("tau=");
            if (pos != std::string::npos) s.tau = std::stod(line.substr(pos + 4));
            continue;
        }
        if (!header_done) {
            header_done = true;
            continue;
        }
        double x, re, im;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &x, &re, &im) != 3)
            throw std::invalid_argument("bad signal line: " + line);
        s.x_grid.push_back(x);
        s.z_values.emplace_back(re, im);
    }
    return s;
}

}  // namespace spe
