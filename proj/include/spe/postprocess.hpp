#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spe {

// Re-evaluated signal at x for one of N_batch independently collected
// signals (batch index ignored in the single-signal default).
using SignalOracle = std::function<double(double x, int batch)>;

struct Lt22SearchResult {
    double energy = 0.0;            // midpoint / tau, Hartree
    double bracket_lo = 0.0;        // final bracket, x-space
    double bracket_hi = 0.0;
    int iterations = 0;
    // Signal never exceeded 3 eta / 4: every vote moved L up, so the search
    // drifts to the right bracket edge. Degenerate outcome, flagged.
    bool degenerate = false;
    std::vector<double> midpoints;  // x_m visited
    std::vector<bool> votes;
};

// Majority vote over N_batch comparisons Re Z(x_m) > 3 eta / 4.
bool lt22_certify(const SignalOracle& oracle, double x_m, double eta, int n_batch);

// Bisection on [L0, R0]: a true vote moves R to x_m, a false vote moves L.
// Stops when the bracket is at most `tolerance` wide (x-space).
Lt22SearchResult lt22_search(const SignalOracle& oracle, double lo, double hi,
                             double eta, double tolerance, double tau,
                             int n_batch = 1);

// Root of Re Z' by bisection inside [e_rough*tau - sigma/4, + sigma/4].
// Throws when the interval contains no sign change (the rough estimate was
// not sigma/4-close).
double gaussian_zero_search(const std::function<double(double)>& re_derivative,
                            double e_rough, double sigma, double tau,
                            int scan_points = 257, double x_tolerance = 1e-13);

struct GaussianFitResult {
    double p_star = 0.0;       // recovered overlap
    double lambda_star = 0.0;  // Hartree
    double residual = 0.0;     // mean squared, over the refit window
    std::string provenance;    // structured text, full parameter record
};

// Least-squares fit of Re Z to P/(sqrt(2 pi) sigma) exp(-(x - Lambda tau)^2
// / 2 sigma^2). The model is linear in P, so the fit is a 1-D search over
// Lambda: coarse scan over the full grid, then golden-section refinement
// restricted to points within `core_half_width_sigmas` * sigma of the coarse
// peak (the Gaussian model only holds locally; distant grid points belong to
// other eigenvalues).
GaussianFitResult gaussian_fit(const std::vector<double>& x_grid,
                               const std::vector<double>& re_z, double sigma,
                               double tau, double core_half_width_sigmas = 1.5);

// Default fit-window half width n_sigma * sigma / 4 with n_sigma = 4 * delta
// / sigma, i.e. the supplied gap bound itself.
double default_n_sigma(double delta_gap, double sigma);

}  // namespace spe
