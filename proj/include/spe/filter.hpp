#pragma once

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

namespace spe {

// Periodic step filter: hard square wave, Fourier modes at integers
// j in [-d, d] (2d+1 modes), coefficient 1/2 at j=0 and 1/(i pi j) for odd j.
struct PeriodicStepFilter {
    int d = 100;
};

// Gaussian filter exp(-x^2 / 2 sigma^2) / (sqrt(2 pi) sigma); coefficients
// (1/2pi) exp(-sigma^2 k^2 / 2) on a uniform grid over [-t_cut, t_cut] with
// the Riemann weight dk folded in. The derivative variant multiplies each
// coefficient by i k (eigenvalues become zeros of the signal).
struct GaussianFilter {
    double sigma = 0.1;
    double t_cut = 50.0;
    int n_modes = 1000;
    bool derivative = false;
};

using FilterSpec = std::variant<PeriodicStepFilter, GaussianFilter>;

// Discretized Fourier representation of a filter plus the induced sampling
// distribution: coefficient_n = total_weight * probability(n) * exp(i phase_n).
struct FourierSampler {
    std::vector<double> k_values;
    std::vector<std::complex<double>> coefficients;
    double total_weight = 0.0;  // script-F, sum of |coefficients|
    std::vector<double> probabilities;
    std::vector<double> phases;
    std::vector<double> cumulative;

    std::size_t n_modes() const { return k_values.size(); }
    std::size_t sample_index(double u) const;  // inverse CDF
    double max_abs_k() const;
    double mean_abs_k() const;
    // Largest |k| a draw of n_sample samples is expected to reach (smallest
    // k with n_sample * P(|k| >= k) >= 1/2). Used for exact-mode ledgers.
    double expected_max_abs_k(double n_sample) const;
};

FourierSampler fourier_coefficients(const FilterSpec& spec);

struct GaussianSchedule {
    double sigma = 0.0;
    double t_cut = 0.0;
    std::int64_t m_points = 0;
    double n_sample = 0.0;  // suggested count; may exceed practical budgets
    double total_weight = 0.0;
};

// Parameter schedule for the Gaussian filter at accuracy epsilon (all
// quantities dimensionless, x = E*tau space):
//   sigma = min(0.9 delta / sqrt(2 ln(9 delta / (eps eta))), 0.2 delta)
//   t_cut = sqrt(2 ln(8 / (pi eps_tilde^2 eta))) / sigma,
//           eps_tilde = 0.1 eps eta / (sqrt(2 pi) sigma^3)
//   M = max(ceil(sigma/eps) + 1, 1000)
//   N_sample = ceil(F^2 ln(4 M / delta_fail) / eps^2)
// Throws when a logarithm argument is <= 1.
GaussianSchedule gaussian_parameters(double epsilon, double eta, double delta_gap,
                                     double delta_fail, int n_modes = 1000,
                                     bool derivative = false);

// N_sample = ceil(C eta^-2 log^2(d) (log log(1/(eps tau)) + log(1/vartheta))),
// floor 1. The default constant reproduces the 1e4-sample operating point
// (d = 1e6, eta = 0.385, vartheta = 1e-12, tau = 1/20, eps = 1/(d tau)).
constexpr double kLt22DefaultConstant = 0.25666;
std::int64_t lt22_sample_count(std::int64_t d, double eta, double vartheta,
                               double epsilon, double tau,
                               double constant = kLt22DefaultConstant);

}  // namespace spe
