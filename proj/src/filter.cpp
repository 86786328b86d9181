#include "spe/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace spe {

using cplx = std::complex<double>;

namespace {

void finalize(FourierSampler& s) {
    s.total_weight = 0.0;
    for (const auto& c : s.coefficients) s.total_weight += std::abs(c);
    if (s.total_weight <= 0.0)
        throw std::invalid_argument("filter has zero total weight");
    s.probabilities.resize(s.coefficients.size());
    s.phases.resize(s.coefficients.size());
    s.cumulative.resize(s.coefficients.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
        s.probabilities[i] = std::abs(s.coefficients[i]) / s.total_weight;
        s.phases[i] = std::arg(s.coefficients[i]);
        acc += s.probabilities[i];
        s.cumulative[i] = acc;
    }
    s.cumulative.back() = 1.0;
}

}  // namespace

std::size_t FourierSampler::sample_index(double u) const {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return cumulative.size() - 1;
    return static_cast<std::size_t>(it - cumulative.begin());
}

double FourierSampler::max_abs_k() const {
    double m = 0.0;
    for (std::size_t i = 0; i < k_values.size(); ++i)
        if (probabilities[i] > 0.0) m = std::max(m, std::abs(k_values[i]));
    return m;
}

double FourierSampler::mean_abs_k() const {
    double m = 0.0;
    for (std::size_t i = 0; i < k_values.size(); ++i)
        m += probabilities[i] * std::abs(k_values[i]);
    return m;
}

double FourierSampler::expected_max_abs_k(double n_sample) const {
    if (n_sample <= 0.0) return 0.0;
    // sort |k| descending by accumulating tail probability
    std::vector<std::size_t> order(k_values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(k_values[a]) > std::abs(k_values[b]);
    });
    double tail = 0.0;
    for (std::size_t idx : order) {
        tail += probabilities[idx];
        if (n_sample * tail >= 0.5) return std::abs(k_values[idx]);
    }
    return max_abs_k();
}

FourierSampler fourier_coefficients(const FilterSpec& spec) {
    FourierSampler s;
    if (std::holds_alternative<PeriodicStepFilter>(spec)) {
        const auto& f = std::get<PeriodicStepFilter>(spec);
        if (f.d < 0) throw std::invalid_argument("step filter: d must be >= 0");
        s.k_values.reserve(2 * f.d + 1);
        s.coefficients.reserve(2 * f.d + 1);
        for (int j = -f.d; j <= f.d; ++j) {
            s.k_values.push_back(j);
            if (j == 0)
                s.coefficients.emplace_back(0.5, 0.0);
            else if (j % 2 != 0)
                s.coefficients.push_back(1.0 / (cplx{0.0, M_PI * j}));
            else
                s.coefficients.emplace_back(0.0, 0.0);
        }
    } else {
        const auto& f = std::get<GaussianFilter>(spec);
        if (f.sigma <= 0.0) throw std::invalid_argument("gaussian filter: sigma must be > 0");
        if (f.t_cut <= 0.0) throw std::invalid_argument("gaussian filter: t_cut must be > 0");
        if (f.n_modes < 2) throw std::invalid_argument("gaussian filter: n_modes must be >= 2");
        double dk = 2.0 * f.t_cut / f.n_modes;
        s.k_values.reserve(f.n_modes);
        s.coefficients.reserve(f.n_modes);
        for (int n = 0; n < f.n_modes; ++n) {
            double k = -f.t_cut + dk * n;
            cplx c = dk / (2.0 * M_PI) * std::exp(-0.5 * f.sigma * f.sigma * k * k);
            if (f.derivative) c *= cplx{0.0, k};
            s.k_values.push_back(k);
            s.coefficients.push_back(c);
        }
    }
    finalize(s);
    return s;
}

GaussianSchedule gaussian_parameters(double epsilon, double eta, double delta_gap,
                                     double delta_fail, int n_modes, bool derivative) {
    if (epsilon <= 0.0) throw std::invalid_argument("gaussian_parameters: epsilon must be > 0");
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("gaussian_parameters: eta must be in (0, 1)");
    if (delta_gap <= 0.0) throw std::invalid_argument("gaussian_parameters: delta_gap must be > 0");
    if (delta_fail <= 0.0 || delta_fail >= 1.0)
        throw std::invalid_argument("gaussian_parameters: delta_fail must be in (0, 1)");

    GaussianSchedule out;
    double arg1 = 9.0 * delta_gap / (epsilon * eta);
    if (arg1 <= 1.0)
        throw std::invalid_argument(
            "gaussian_parameters: log argument 9*delta/(eps*eta) <= 1 (got " +
            std::to_string(arg1) + "); decrease epsilon or eta");
    out.sigma = std::min(0.9 * delta_gap / std::sqrt(2.0 * std::log(arg1)),
                         0.2 * delta_gap);

    double eps_tilde = 0.1 * epsilon * eta / (std::sqrt(2.0 * M_PI) * std::pow(out.sigma, 3));
    double arg2 = 8.0 / (M_PI * eps_tilde * eps_tilde * eta);
    if (arg2 <= 1.0)
        throw std::invalid_argument(
            "gaussian_parameters: log argument 8/(pi*eps_tilde^2*eta) <= 1 (got " +
            std::to_string(arg2) +
            "); the discretization target eps_tilde exceeds 1 - use a larger tau "
            "or smaller epsilon");
    out.t_cut = std::sqrt(2.0 * std::log(arg2)) / out.sigma;

    out.m_points = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(out.sigma / epsilon)) + 1, 1000);

    FourierSampler s = fourier_coefficients(
        GaussianFilter{out.sigma, out.t_cut, n_modes, derivative});
    out.total_weight = s.total_weight;
    out.n_sample = std::ceil(s.total_weight * s.total_weight *
                             std::log(4.0 * static_cast<double>(out.m_points) / delta_fail) /
                             (epsilon * epsilon));
    return out;
}

std::int64_t lt22_sample_count(std::int64_t d, double eta, double vartheta,
                               double epsilon, double tau, double constant) {
    if (d < 1) throw std::invalid_argument("lt22_sample_count: d must be >= 1");
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("lt22_sample_count: eta must be in (0, 1)");
    if (vartheta <= 0.0 || vartheta >= 1.0)
        throw std::invalid_argument("lt22_sample_count: vartheta must be in (0, 1)");
    if (epsilon <= 0.0 || tau <= 0.0)
        throw std::invalid_argument("lt22_sample_count: epsilon and tau must be > 0");
    double logd = std::log(static_cast<double>(d));
    double inner = std::log(1.0 / (epsilon * tau));
    double loglog = inner > 1.0 ? std::log(inner) : 0.0;
    double n = constant / (eta * eta) * logd * logd * (loglog + std::log(1.0 / vartheta));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

}  // namespace spe
