#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spe/filter.hpp"
#include "spe/noise.hpp"
#include "spe/pauli.hpp"
#include "spe/rng.hpp"
#include "spe/simulator.hpp"

namespace spe {

// One Monte-Carlo sample of the signal: mode k_m drawn from P(n), phase of
// its coefficient, and the two Hadamard-test outcomes at t_m = k_m * tau.
struct ShotRecord {
    std::int64_t sample_index = 0;
    double k = 0.0;
    double phi = 0.0;
    double t = 0.0;
    int x_outcome = 0;  // +-1
    int y_outcome = 0;  // +-1
};

struct Signal {
    std::vector<double> x_grid;
    std::vector<cplx> z_values;
    double tau = 0.0;
    std::string metadata;  // filter / sample-count / noise / seed provenance
};

// Shot backend of Algorithm "signal collection": draws n_sample modes from
// the sampler and runs one real-part and one imaginary-part Hadamard test
// per draw. Sample m uses the stream (seed, m).
std::vector<ShotRecord> collect_shot_records(HadamardTestSampler& sampler,
                                             const FourierSampler& fourier, double tau,
                                             std::int64_t n_sample, std::uint64_t seed);

// Exact backend: Z(x) = sum_n coeff_n exp(i k_n x) <exp(-i k_n tau H)> with
// expectation values from the eigensystem; no sampling noise.
class ExactSignalEvaluator {
  public:
    ExactSignalEvaluator(const SpectralData& spec, const Statevector& psi,
                         const FourierSampler& fourier, double tau);
    cplx operator()(double x) const;
    double tau() const { return tau_; }

  private:
    std::vector<double> k_values_;
    std::vector<cplx> weighted_;  // coeff_n * <exp(-i k_n tau H)>
    double tau_;
};

Signal exact_signal(const SpectralData& spec, const Statevector& psi,
                    const FourierSampler& fourier, double tau,
                    const std::vector<double>& x_grid);

// Records grouped by mode: summed_m = sum over that mode's records of
// exp(i phi_m) (X + i Y). Z(x) = (F / N) sum_m exp(i k_m x) summed_m.
// Collapsing records first makes re-evaluation cost independent of the
// record count.
struct ModeAggregate {
    std::vector<double> k_values;
    std::vector<cplx> summed;
    std::size_t n_records = 0;
    double total_weight = 0.0;

    cplx at(double x) const;
};

ModeAggregate aggregate_records(const std::vector<ShotRecord>& records,
                                const FourierSampler& fourier);

// Reconstructs Z on a grid from persisted records:
//   Z(x) = (F / N) sum_m exp(i k_m x) exp(i phi_m) (X_m + i Y_m).
// Re-evaluating on a new grid needs no new quantum shots.
Signal evaluate_signal(const std::vector<ShotRecord>& records,
                       const FourierSampler& fourier, double tau,
                       const std::vector<double>& x_grid);
cplx evaluate_signal_at(const std::vector<ShotRecord>& records,
                        const FourierSampler& fourier, double x);

std::string records_to_csv(const std::vector<ShotRecord>& records);
std::vector<ShotRecord> records_from_csv(const std::string& text);
std::string signal_to_csv(const Signal& s);
Signal signal_from_csv(const std::string& text);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace spe
