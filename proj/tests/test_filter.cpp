#include "spe/filter.hpp"

#include <cmath>

#include "doctest.h"
#include "spe/rng.hpp"
#include "support/oracles.hpp"

using namespace spe;

TEST_CASE("step filter d = 1 analytic coefficients") {
    auto s = fourier_coefficients(PeriodicStepFilter{1});
    REQUIRE(s.n_modes() == 3);
    CHECK(s.k_values[0] == doctest::Approx(-1.0));
    CHECK(s.k_values[1] == doctest::Approx(0.0));
    CHECK(s.k_values[2] == doctest::Approx(1.0));
    CHECK(std::abs(s.coefficients[0] - cplx(0.0, 1.0 / M_PI)) < 1e-15);  // 1/(-i pi)
    CHECK(std::abs(s.coefficients[1] - cplx(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(s.coefficients[2] - cplx(0.0, -1.0 / M_PI)) < 1e-15);  // 1/(i pi)
}

TEST_CASE("step filter mode count and even-mode zeros") {
    auto s = fourier_coefficients(PeriodicStepFilter{10});
    CHECK(s.n_modes() == 21);
    for (std::size_t i = 0; i < s.n_modes(); ++i) {
        int j = static_cast<int>(std::lround(s.k_values[i]));
        if (j != 0 && j % 2 == 0) CHECK(std::abs(s.coefficients[i]) == 0.0);
    }
}

TEST_CASE("sampler invariants") {
    for (FilterSpec spec :
         {FilterSpec(PeriodicStepFilter{50}),
          FilterSpec(GaussianFilter{0.1, 40.0, 1000, false}),
          FilterSpec(GaussianFilter{0.1, 40.0, 1000, true})}) {
        auto s = fourier_coefficients(spec);
        double psum = 0.0;
        for (std::size_t n = 0; n < s.n_modes(); ++n) {
            CHECK(s.probabilities[n] >= 0.0);
            psum += s.probabilities[n];
            cplx recon = s.total_weight * s.probabilities[n] *
                         std::polar(1.0, s.phases[n]);
            CHECK(std::abs(recon - s.coefficients[n]) < 1e-12 * s.total_weight);
        }
        CHECK(std::abs(psum - 1.0) < 1e-12);
    }
}

TEST_CASE("derivative filter vanishes at k = 0") {
    // grid with an exact zero: even mode count covers k=0 when t_cut/n aligns
    auto s = fourier_coefficients(GaussianFilter{0.2, 10.0, 20, true});
    bool found_zero_mode = false;
    for (std::size_t n = 0; n < s.n_modes(); ++n) {
        if (s.k_values[n] == 0.0) {
            found_zero_mode = true;
            CHECK(std::abs(s.coefficients[n]) == 0.0);
            CHECK(s.probabilities[n] == 0.0);
        }
    }
    CHECK(found_zero_mode);
}

TEST_CASE("gaussian reconstruction matches the density at the peak") {
    // schedule reproducing sigma = 0.2 Delta exactly
    auto sched = gaussian_parameters(1e-3, 0.5, 0.5, 0.1);
    CHECK(sched.sigma == doctest::Approx(0.1));
    auto s = fourier_coefficients(GaussianFilter{sched.sigma, sched.t_cut, 1000, false});
    cplx sum{0.0, 0.0};
    for (std::size_t n = 0; n < s.n_modes(); ++n) sum += s.coefficients[n];
    CHECK(std::abs(sum.real() - oracles::gaussian_density(0.0, sched.sigma)) < 1e-4);
    CHECK(std::abs(sum.imag()) < 1e-6);
}

TEST_CASE("gaussian schedule closed form") {
    // sigma = min(0.9 / sqrt(2 ln 1800), 0.2) = 0.2 for delta = 1
    auto sched = gaussian_parameters(1e-2, 0.5, 1.0, 0.1);
    double log_branch = 0.9 / std::sqrt(2.0 * std::log(9.0 * 1.0 / (1e-2 * 0.5)));
    CHECK(log_branch > 0.2);
    CHECK(sched.sigma == doctest::Approx(0.2));
}

TEST_CASE("gaussian schedule M floor") {
    auto sched = gaussian_parameters(1e-2, 0.5, 1.0, 0.1);
    // ceil(sigma/eps) + 1 = 21 << 1000
    CHECK(sched.m_points == 1000);
    auto fine = gaussian_parameters(1e-5, 0.5, 1.0, 0.1);
    CHECK(fine.m_points == static_cast<std::int64_t>(std::ceil(fine.sigma / 1e-5)) + 1);
    CHECK(fine.m_points > 1000);
}

TEST_CASE("gaussian sample count quadruples when epsilon halves") {
    auto a = gaussian_parameters(1e-3, 0.5, 0.5, 0.1);
    auto b = gaussian_parameters(5e-4, 0.5, 0.5, 0.1);
    CHECK(b.n_sample / a.n_sample >= 4.0 * 0.95);
}

TEST_CASE("gaussian schedule rejects degenerate logs") {
    // epsilon so large that 9 delta / (eps eta) <= 1
    CHECK_THROWS_AS(gaussian_parameters(0.9, 0.9, 0.05, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_parameters(-1.0, 0.5, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_parameters(1e-3, 1.5, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("lt22 sample count reproduces the operating point") {
    double p0 = 0.77;
    double eta = 0.5 * p0;
    double tau = 1.0 / 20.0;
    std::int64_t d = 1000000;
    double eps = 1.0 / (static_cast<double>(d) * tau);
    CHECK(lt22_sample_count(d, eta, 1e-12, eps, tau) == 10000);
}

TEST_CASE("lt22 sample count eta scaling") {
    double tau = 1.0 / 20.0;
    auto n1 = lt22_sample_count(10000, 0.2, 1e-12, 1e-3, tau);
    auto n2 = lt22_sample_count(10000, 0.4, 1e-12, 1e-3, tau);
    CHECK(std::abs(static_cast<double>(n1) / static_cast<double>(n2) - 4.0) < 0.01);
}

TEST_CASE("lt22 sample count floors at one for d = 1") {
    CHECK(lt22_sample_count(1, 0.4, 1e-12, 1e-3, 0.05) == 1);
}

TEST_CASE("sampled distribution matches P(n) by chi-square") {
    auto s = fourier_coefficients(PeriodicStepFilter{25});
    Rng rng(31);
    const std::size_t draws = 1000000;
    std::vector<std::size_t> counts(s.n_modes(), 0);
    for (std::size_t i = 0; i < draws; ++i) ++counts[s.sample_index(rng.uniform())];

    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t n = 0; n < s.n_modes(); ++n) {
        double expected = s.probabilities[n] * static_cast<double>(draws);
        if (expected < 5.0) {
            CHECK(counts[n] == (expected == 0.0 ? 0u : counts[n]));
            continue;
        }
        chi2 += (counts[n] - expected) * (counts[n] - expected) / expected;
        ++dof;
    }
    --dof;
    // Wilson-Hilferty approximation of the 99% chi-square quantile
    double k = dof;
    double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + 2.3263 * std::sqrt(2.0 / (9.0 * k)), 3.0);
    CHECK(chi2 < crit);
}

TEST_CASE("expected max |k| grows with sample count and respects the cutoff") {
    auto s = fourier_coefficients(GaussianFilter{0.1, 60.0, 2000, false});
    double m3 = s.expected_max_abs_k(1e3);
    double m6 = s.expected_max_abs_k(1e6);
    double m12 = s.expected_max_abs_k(1e12);
    CHECK(m3 < m6);
    CHECK(m6 <= m12);
    CHECK(m12 <= s.max_abs_k());
    CHECK(s.expected_max_abs_k(0.0) == 0.0);
}
