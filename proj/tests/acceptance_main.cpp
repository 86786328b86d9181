// Acceptance suite: one pass/fail line per criterion. Quantitative trend
// reproduction plus oracle/property checks on the bundled 4-qubit system.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spe/experiment.hpp"
#include "spe/filter.hpp"
#include "spe/pauli.hpp"
#include "spe/postprocess.hpp"
#include "spe/resource.hpp"
#include "spe/signal.hpp"
#include "spe/simulator.hpp"
#include "spe/vqe.hpp"
#include "support/oracles.hpp"

using namespace spe;

namespace {

const char* kH2Path = SPE_DATA_DIR "/h2_sto3g_1.0A.ham";
const char* kAnsatzPath = SPE_DATA_DIR "/ucj1_h2.ans";

struct H2System {
    PauliHamiltonian h;
    SpectralData spec;
    Statevector psi;
    double lambda0;
    double p0 = 0.77;
    double gap;
};

H2System load_h2() {
    H2System sys{load_hamiltonian(kH2Path), {}, Statevector(4), 0.0, 0.77, 0.0};
    sys.spec = eigensystem(sys.h);
    double theta = calibrate_theta(sys.h, "1100", "0110", 0.77);
    sys.psi[0] = 0.0;
    sys.psi[bitstring_index("1100")] = std::cos(theta);
    sys.psi[bitstring_index("0110")] = std::sin(theta);
    sys.lambda0 = sys.spec.ground_energy();
    sys.gap = sys.spec.gap_above_ground(sys.psi, 1e-8);
    return sys;
}

ExperimentConfig base_h2_config(const std::string& algo) {
    ExperimentConfig cfg;
    cfg.hamiltonian_path = kH2Path;
    cfg.basis_a = "1100";
    cfg.basis_b = "0110";
    cfg.target_p0 = 0.77;
    cfg.algorithm = algo;
    cfg.persist_artifacts = false;
    cfg.jobs = 2;
    return cfg;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// physical error rate at which an rz_count-gate circuit has the target
// fidelity: P_L = 1 - f^(1/n), p = (15/2)(1 - sqrt(1 - P_L))
double p_phys_for_fidelity(double fidelity, double rz_count) {
    double pl = 1.0 - std::exp(std::log(fidelity) / rz_count);
    return 7.5 * (1.0 - std::sqrt(1.0 - pl));
}

// ---------------------------------------------------------------------------

bool criterion1_oracle_equivalence(std::ostream& log) {
    std::mt19937_64 rng(101);
    double worst_gauss = 0.0, worst_step = 0.0;
    const double sigma = 0.1;
    auto fourier_g = fourier_coefficients(GaussianFilter{sigma, 60.0, 4000, false});
    const int step_d = 2000;
    auto fourier_s = fourier_coefficients(PeriodicStepFilter{step_d});

    for (int rep = 0; rep < 100; ++rep) {
        int n = 1 + static_cast<int>(rng() % 2);
        PauliHamiltonian h = oracles::random_hamiltonian(n, 3, rng);
        SpectralData spec = eigensystem(h);
        if (spec.spectral_norm() < 1e-6) continue;
        double tau = default_tau(spec);
        Statevector psi = oracles::random_state(n, rng);
        std::vector<double> p = overlaps(psi, spec);

        ExactSignalEvaluator zg(spec, psi, fourier_g, tau);
        ExactSignalEvaluator zs(spec, psi, fourier_s, tau);
        std::uniform_real_distribution<double> grid(-M_PI / 4 - 0.3, M_PI / 4 + 0.3);
        int placed = 0;
        while (placed < 50) {
            double x = grid(rng);
            double direct_g = 0.0, direct_s = 0.0;
            double min_dist = 1e9;
            for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
                double u = x - spec.eigenvalues(i) * tau;
                direct_g += p[i] * oracles::gaussian_density(u, sigma);
                direct_s += p[i] * oracles::step_function(u);
                if (p[i] > 1e-9) min_dist = std::min(min_dist, std::abs(u));
            }
            ++placed;
            worst_gauss = std::max(worst_gauss, std::abs(zg(x).real() - direct_g));
            // step comparison only away from jumps; near a jump the
            // truncated series swings through its Gibbs lobes
            if (min_dist > 0.05)
                worst_step = std::max(worst_step, std::abs(zs(x).real() - direct_s));
        }
    }
    log << "gaussian max |Z - (F*rho)| = " << worst_gauss
        << " (tol 1e-4), step max away from jumps = " << worst_step
        << " (Gibbs bound 0.1)";
    return worst_gauss < 1e-4 && worst_step < 0.1;
}

bool criterion2_unbiasedness(std::ostream& log) {
    H2System sys = load_h2();
    bool ok = true;
    double worst_ratio = 0.0;

    // step filter at d = 500, tau = 1/20 keeps |t| <= 25 where r = 50 has
    // fidelity ~0.999, so the Trotter bias is well inside the shot noise
    {
        double tau = 1.0 / 20.0;
        auto fourier = fourier_coefficients(PeriodicStepFilter{500});
        HadamardTestSampler sampler(sys.h, sys.psi, 50, std::nullopt);
        auto records = collect_shot_records(sampler, fourier, tau, 10000, 202);
        auto grid = linspace(-M_PI / 4, M_PI / 4, 20);
        Signal shot = evaluate_signal(records, fourier, tau, grid);
        Signal exact = exact_signal(sys.spec, sys.psi, fourier, tau, grid);
        double bound =
            3.0 * fourier.total_weight * std::sqrt(2.0 / 10000.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double dev = std::abs(shot.z_values[i] - exact.z_values[i]);
            worst_ratio = std::max(worst_ratio, dev / bound);
            if (dev >= bound) ok = false;
        }
    }

    // gaussian filter from the epsilon = 1e-2 schedule at the default tau
    {
        double tau = default_tau(sys.spec);
        double eta = 0.7 * sys.p0;
        auto sched = gaussian_parameters(1e-2 * tau, eta,
                                         std::pow(sys.gap, 0.8) * tau, 0.1);
        auto fourier =
            fourier_coefficients(GaussianFilter{sched.sigma, sched.t_cut, 1000, false});
        HadamardTestSampler sampler(sys.h, sys.psi, 50, std::nullopt);
        auto records = collect_shot_records(sampler, fourier, tau, 10000, 203);
        auto grid = linspace(sys.lambda0 * tau - 3 * sched.sigma,
                             sys.lambda0 * tau + 3 * sched.sigma, 20);
        Signal shot = evaluate_signal(records, fourier, tau, grid);
        Signal exact = exact_signal(sys.spec, sys.psi, fourier, tau, grid);
        double bound =
            3.0 * fourier.total_weight * std::sqrt(2.0 / 10000.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double dev = std::abs(shot.z_values[i] - exact.z_values[i]);
            worst_ratio = std::max(worst_ratio, dev / bound);
            if (dev >= bound) ok = false;
        }
    }
    log << "worst pointwise |shot - exact| = " << worst_ratio
        << " of the 3-sigma bound, both filters, r = 50, 1e4 samples";
    return ok;
}

bool criterion3_heisenberg_trend(std::ostream& log) {
    // LT22 ideal sweep over the full d grid at the operating point
    ExperimentConfig lt = base_h2_config("lt22");
    lt.backend = "exact";
    lt.tau = 1.0 / 20.0;
    lt.n_sample = 10000;
    auto lt_rows = run_experiment(lt);
    std::vector<double> err, t_total;
    for (const auto& r : lt_rows) {
        if (r.status != "ok") return false;
        err.push_back(r.abs_error);
        t_total.push_back(r.resources.t_total);
    }
    auto slope = loglog_slope(t_total, err);
    if (!slope) return false;

    // gaussian sweep: T_max confined to under a decade while T_total moves
    // more than three
    ExperimentConfig gs = base_h2_config("gaussian_fit");
    gs.backend = "exact";
    auto gs_rows = run_experiment(gs);
    double tmax_lo = 1e300, tmax_hi = 0, ttot_lo = 1e300, ttot_hi = 0;
    for (const auto& r : gs_rows) {
        if (r.status != "ok") return false;
        tmax_lo = std::min(tmax_lo, r.resources.t_max);
        tmax_hi = std::max(tmax_hi, r.resources.t_max);
        ttot_lo = std::min(ttot_lo, r.resources.t_total);
        ttot_hi = std::max(ttot_hi, r.resources.t_total);
    }
    log << "lt22 slope |dE| vs T_total = " << *slope
        << " (window [-1.3, -0.7]); gaussian T_max spread x" << tmax_hi / tmax_lo
        << ", T_total spread x" << ttot_hi / ttot_lo;
    return *slope > -1.3 && *slope < -0.7 && tmax_hi / tmax_lo < 10.0 &&
           ttot_hi / ttot_lo > 1000.0;
}

bool criterion4_trotter_degradation(std::ostream& log) {
    H2System sys = load_h2();
    // fidelity curve: high at short times, degraded somewhere beyond
    for (double t : {1.0, 10.0, 25.0, 50.0})
        if (trotter_state_fidelity(sys.h, sys.psi, t, 50) <= 0.95) {
            log << "fidelity fell below 0.95 at t = " << t;
            return false;
        }
    double min_late = 1.0;
    for (double t = 100.0; t <= 1000.0; t += 45.0)
        min_late = std::min(min_late, trotter_state_fidelity(sys.h, sys.psi, t, 50));
    if (min_late >= 0.9) {
        log << "late-time fidelity never degraded (min " << min_late << ")";
        return false;
    }

    ExperimentConfig ex = base_h2_config("lt22");
    ex.backend = "exact";
    ex.tau = 1.0 / 20.0;
    ex.d_list = {1000000};
    ex.n_sample = 10000;
    double err_exact = run_experiment(ex)[0].abs_error;

    ExperimentConfig sh = ex;
    sh.backend = "shots";
    sh.trotter_steps = 50;
    sh.seeds = {401};
    double err_trotter = run_experiment(sh)[0].abs_error;

    log << "d=1e6: exact-mode error " << err_exact << " Ha, 50-step trotter error "
        << err_trotter << " Ha, ratio " << err_trotter / err_exact
        << " (needs > 10), late-time min fidelity " << min_late;
    return err_trotter > 10.0 * err_exact;
}

bool criterion5_noise_calibration(std::ostream& log) {
    Circuit c;
    c.n_qubits = 1;
    c.add(Gate::rz(0, 0.4));
    std::ostringstream detail;
    for (double p : {1e-3, 1e-4}) {
        NoiseModel nm{p, NoiseChannel::ZFlip};
        double pl = nm.logical_rz_error_rate();
        NoiseStats stats;
        Rng rng(501);
        Statevector psi(1);
        for (int i = 0; i < 100000; ++i) apply_circuit(psi, c, &nm, &rng, &stats);
        double rate = static_cast<double>(stats.injections) /
                      static_cast<double>(stats.rz_applications);
        double bound = 4.0 * std::sqrt(pl * (1 - pl) / 100000.0);
        detail << "p=" << p << ": rate " << rate << " vs P_L " << pl << " (bound "
               << bound << "); ";
        if (std::abs(rate - pl) >= bound) {
            log << detail.str();
            return false;
        }
    }
    log << detail.str() << "1e5 trials each";
    return true;
}

bool criterion6_fidelity_table(std::ostream& log) {
    // published triplet passes the log-linearity ratio test
    double f3 = 0.03427, f4 = 0.7137, f5 = 0.9668;
    double r34 = std::log(f3) / std::log(f4);
    double r45 = std::log(f4) / std::log(f5);
    if (std::abs(r34 - 10.0) > 0.2 || std::abs(r45 - 10.0) > 0.2) {
        log << "published triplet ratios " << r34 << ", " << r45;
        return false;
    }
    // our formula obeys ln f proportional to p within 2 percent across the rates
    H2System sys = load_h2();
    Circuit c = hadamard_test_circuit(sys.h, 1.0, HadamardPart::Real, 50);
    double l3 = std::log(circuit_fidelity(c, 1e-3));
    double l4 = std::log(circuit_fidelity(c, 1e-4));
    double l5 = std::log(circuit_fidelity(c, 1e-5));
    double implied = implied_rz_count(f4, 1e-4);
    log << "our ln f ratios " << l3 / l4 << ", " << l4 / l5
        << "; published-implied N_Rz = " << implied << " (calibration constant), ours = "
        << c.rz_count() << ", factor " << implied / static_cast<double>(c.rz_count());
    return std::abs(l3 / l4 - 10.0) < 0.2 && std::abs(l4 / l5 - 10.0) < 0.2 &&
           std::abs(implied - 1.265e4) < 0.01 * 1.265e4;
}

bool criterion7_noisy_crossover(std::ostream& log) {
    H2System sys = load_h2();
    // The published fidelity table is the operating-point contract: our
    // transpiler uses ~5.6x fewer Rz per circuit than the published-implied
    // count, so the nominal rates are rescaled to reproduce the published
    // circuit fidelities (3.427% / 96.68% for the 50-step Hadamard test,
    // 97.52% / 99.97% for the ansatz circuit).
    Circuit spe_circuit = hadamard_test_circuit(sys.h, 1.0, HadamardPart::Real, 50);
    double spe_rz = static_cast<double>(spe_circuit.rz_count());
    Ansatz ansatz = load_ansatz(kAnsatzPath);
    double vqe_rz = static_cast<double>(
        transpile(ansatz_circuit(ansatz, std::vector<double>(ansatz.n_params, 0.0)))
            .rz_count());

    double p_spe_high = p_phys_for_fidelity(0.03427, spe_rz);
    double p_spe_low = p_phys_for_fidelity(0.9668, spe_rz);
    double p_vqe_high = p_phys_for_fidelity(0.9752, vqe_rz);
    double p_vqe_low = p_phys_for_fidelity(0.9997, vqe_rz);

    auto vqe_errors = [&](double p) {
        ExperimentConfig cfg = base_h2_config("vqe");
        cfg.ansatz_path = kAnsatzPath;
        cfg.backend = "shots";
        cfg.shots_per_term = 3000;
        cfg.total_shot_budget = 10000000;
        cfg.p_phys_list = {p};
        cfg.seeds.clear();
        for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
        std::vector<double> err;
        for (const auto& r : run_experiment(cfg))
            if (r.status == "ok") err.push_back(r.abs_error);
        return err;
    };
    auto spe_errors = [&](double p, std::int64_t n_sample) {
        ExperimentConfig cfg = base_h2_config("gaussian_fit");
        cfg.backend = "shots";
        cfg.epsilon_list = {1e-3};
        cfg.trotter_steps = 50;
        cfg.n_sample = n_sample;
        cfg.p_phys_list = {p};
        cfg.seeds = {1, 2, 3, 4, 5};
        std::vector<double> err;
        for (const auto& r : run_experiment(cfg))
            err.push_back(r.status == "ok" ? r.abs_error : 1e6);
        return err;
    };

    auto vqe_high = vqe_errors(p_vqe_high);
    auto vqe_low = vqe_errors(p_vqe_low);
    if (vqe_high.size() < 10 || vqe_low.size() < 10) {
        log << "vqe runs failed";
        return false;
    }
    // equal shot budget 1e7 in the low-noise comparison: 2 * 4.99e6 Hadamard
    // tests plus the 2e4-shot rough-estimate stage. The high-noise point is
    // bias-dominated (3.4% circuit fidelity), so a 1e5-sample signal
    // suffices to exhibit it.
    auto spe_high = spe_errors(p_spe_high, 100000);
    auto spe_low = spe_errors(p_spe_low, 4990000);

    double mv_high = median(vqe_high), mv_low = median(vqe_low);
    double ms_high = median(spe_high), ms_low = median(spe_low);
    log << "high-noise (fidelity 3.4%/97.5%): SPE " << ms_high << " vs VQE " << mv_high
        << " Ha (SPE must not beat); low-noise (96.7%/99.97%): SPE " << ms_low
        << " vs VQE " << mv_low << " Ha (SPE must beat); p_spe = {" << p_spe_high
        << ", " << p_spe_low << "}, p_vqe = {" << p_vqe_high << ", " << p_vqe_low
        << "}";
    return ms_high >= mv_high && ms_low < mv_low;
}

bool criterion8_gaussian_fit_recovery(std::ostream& log) {
    ExperimentConfig cfg = base_h2_config("gaussian_fit");
    cfg.backend = "exact";
    cfg.epsilon_list = {1e-4};
    auto rows = run_experiment(cfg);
    if (rows.size() != 1 || rows[0].status != "ok") {
        log << "run failed: " << rows[0].detail;
        return false;
    }
    // P_star is carried in the detail field
    double p_star = 0.0;
    auto pos = rows[0].detail.find("P_star=");
    if (pos != std::string::npos)
        p_star = std::stod(rows[0].detail.substr(pos + 7));
    log << "|Lambda* - lambda0| = " << rows[0].abs_error
        << " Ha (tol 1e-4), P* = " << p_star << " (target 0.77 +- 0.05)";
    return rows[0].abs_error <= 1e-4 && std::abs(p_star - 0.77) <= 0.05;
}

bool criterion9_property_suites(std::ostream& log) {
    std::mt19937_64 rng(901);
    // normalization of P(n) for random filters
    for (int rep = 0; rep < 20; ++rep) {
        double sigma = 0.02 + 0.3 * (rng() % 1000) / 1000.0;
        auto s = fourier_coefficients(
            GaussianFilter{sigma, 4.0 / sigma, 500 + static_cast<int>(rng() % 500),
                           rep % 2 == 0});
        double sum = 0.0;
        for (double pn : s.probabilities) sum += pn;
        if (std::abs(sum - 1.0) > 1e-12) {
            log << "P(n) normalization violated";
            return false;
        }
    }
    // linearity of evaluate_signal on random record sets
    auto fourier = fourier_coefficients(PeriodicStepFilter{15});
    Rng r2(902);
    std::vector<ShotRecord> a, b;
    for (int i = 0; i < 60; ++i) {
        std::size_t mode = fourier.sample_index(r2.uniform());
        ShotRecord rec{i, fourier.k_values[mode], fourier.phases[mode], 0.0,
                       r2.uniform() < 0.5 ? 1 : -1, r2.uniform() < 0.5 ? 1 : -1};
        (i < 20 ? a : b).push_back(rec);
    }
    std::vector<ShotRecord> both = a;
    both.insert(both.end(), b.begin(), b.end());
    auto grid = linspace(-1.0, 1.0, 13);
    Signal sa = evaluate_signal(a, fourier, 1.0, grid);
    Signal sb = evaluate_signal(b, fourier, 1.0, grid);
    Signal su = evaluate_signal(both, fourier, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx w = (20.0 * sa.z_values[i] + 40.0 * sb.z_values[i]) / 60.0;
        if (std::abs(su.z_values[i] - w) > 1e-12) {
            log << "evaluate_signal linearity violated";
            return false;
        }
    }
    // shift covariance of the fit on a synthetic gaussian
    {
        double sigma = 0.06, tau = 0.8, dx = 0.21;
        auto g = linspace(-0.3, 0.3, 600);
        std::vector<double> y(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            y[i] = 0.5 * oracles::gaussian_density(g[i], sigma);
        auto base = gaussian_fit(g, y, sigma, tau);
        auto g2 = g;
        for (auto& x : g2) x += dx;
        auto shifted = gaussian_fit(g2, y, sigma, tau);
        if (std::abs(shifted.lambda_star - base.lambda_star - dx / tau) > 1e-7) {
            log << "fit shift covariance violated";
            return false;
        }
    }
    // determinism of seeded shot streams on a random 2-qubit instance
    {
        auto h = oracles::random_hamiltonian(2, 4, rng);
        if (eigensystem(h).spectral_norm() > 1e-9) {
            HadamardTestSampler s1(h, oracles::random_state(2, rng), 10,
                                   NoiseModel{1e-3, NoiseChannel::ZFlip});
            auto fr = fourier_coefficients(PeriodicStepFilter{20});
            auto rec1 = collect_shot_records(s1, fr, 0.3, 500, 903);
            auto rec2 = collect_shot_records(s1, fr, 0.3, 500, 903);
            for (std::size_t i = 0; i < rec1.size(); ++i)
                if (rec1[i].k != rec2[i].k || rec1[i].x_outcome != rec2[i].x_outcome) {
                    log << "seeded stream determinism violated";
                    return false;
                }
        }
    }
    // permutation invariance and scale covariance of accumulate
    {
        std::vector<double> times(50);
        for (auto& t : times) t = -3.0 + 6.0 * (rng() % 1000) / 1000.0;
        auto [m0, t0] = accumulate(times);
        std::shuffle(times.begin(), times.end(), rng);
        auto [m1, t1] = accumulate(times);
        std::vector<double> scaled = times;
        for (auto& t : scaled) t *= -1.7;
        auto [m2, t2] = accumulate(scaled);
        if (std::abs(m0 - m1) > 1e-12 || std::abs(t0 - t1) > 1e-9 ||
            std::abs(m2 - 1.7 * m0) > 1e-9 || std::abs(t2 - 1.7 * t0) > 1e-6) {
            log << "accumulate invariance violated";
            return false;
        }
    }
    log << "normalization, linearity, shift covariance, determinism, "
           "permutation invariance on generated instances";
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    std::vector<Criterion> criteria = {
        {1, "oracle equivalence on random small instances", criterion1_oracle_equivalence},
        {2, "shot estimator unbiasedness vs exact signal", criterion2_unbiasedness},
        {3, "Heisenberg-limit trend across sweeps", criterion3_heisenberg_trend},
        {4, "Trotter degradation at large T_max", criterion4_trotter_degradation},
        {5, "noise model calibration", criterion5_noise_calibration},
        {6, "fidelity table internal consistency", criterion6_fidelity_table},
        {7, "noisy crossover against VQE", criterion7_noisy_crossover},
        {8, "gaussian-fit recovery at epsilon = 1e-4", criterion8_gaussian_fit_recovery},
        {9, "module property suites on generated instances", criterion9_property_suites},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream log;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(log);
        } catch (const std::exception& e) {
            log << "exception: " << e.what();
        }
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        std::printf("[%s] criterion %d: %s (%.1fs) - %s\n", ok ? "PASS" : "FAIL",
                    c.id, c.name, secs, log.str().c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0) {
        std::printf("all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
