#include "spe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spe/filter.hpp"
#include "spe/pauli.hpp"
#include "spe/postprocess.hpp"
#include "spe/signal.hpp"
#include "spe/simulator.hpp"
#include "spe/vqe.hpp"

namespace spe {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::int64_t> kDefaultDGrid = {50,    100,    500,    1000,  5000,
                                                 10000, 50000,  100000, 500000, 1000000};
const std::vector<double> kDefaultEpsGrid = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config field '" + field + "': " + why);
    };
    if (hamiltonian_path.empty()) fail("hamiltonian_path", "required");
    if (algorithm != "lt22" && algorithm != "gaussian_filter" &&
        algorithm != "gaussian_fit" && algorithm != "vqe")
        fail("algorithm", "must be lt22 | gaussian_filter | gaussian_fit | vqe");
    if (backend != "exact" && backend != "shots")
        fail("backend", "must be exact | shots");
    if (algorithm == "vqe") {
        if (ansatz_path.empty()) fail("ansatz_path", "required for vqe");
        if (shots_per_term < 0) fail("shots_per_term", "must be >= 0");
        if (total_shot_budget < 0) fail("total_shot_budget", "must be >= 0");
    } else {
        if (basis_a.empty()) fail("basis_a", "required for SPE algorithms");
    }
    if (eta && (*eta <= 0.0 || *eta >= 1.0)) fail("eta", "must be in (0, 1)");
    if (target_p0 && (*target_p0 <= 0.0 || *target_p0 > 1.0))
        fail("target_p0", "must be in (0, 1]");
    if (delta_gap && *delta_gap <= 0.0) fail("delta_gap", "must be > 0");
    if (delta_fail <= 0.0 || delta_fail >= 1.0) fail("delta_fail", "must be in (0, 1)");
    if (vartheta <= 0.0 || vartheta >= 1.0) fail("vartheta", "must be in (0, 1)");
    if (tau && *tau <= 0.0) fail("tau", "must be > 0");
    if (n_sample && *n_sample < 1) fail("n_sample", "must be >= 1");
    if (trotter_steps < 1) fail("trotter_steps", "must be >= 1");
    if (gaussian_modes < 2) fail("gaussian_modes", "must be >= 2");
    if (lt22_n_batch < 1 || lt22_n_batch % 2 == 0)
        fail("lt22_n_batch", "must be odd and >= 1");
    for (double p : p_phys_list)
        if (p < 0.0) fail("p_phys_list", "entries must be >= 0");
    if (channel != "zflip" && channel != "depolarizing")
        fail("channel", "must be zflip | depolarizing");
    if (seeds.empty()) fail("seeds", "must not be empty");
    for (double e : epsilon_list)
        if (e <= 0.0) fail("epsilon_list", "entries must be > 0");
    for (auto d : d_list)
        if (d < 1) fail("d_list", "entries must be >= 1");
    if (max_iterations < 1) fail("max_iterations", "must be >= 1");
    if (jobs < 1) fail("jobs", "must be >= 1");
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}
template <typename T>
void read_val(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    read_val(j, "hamiltonian_path", c.hamiltonian_path);
    read_val(j, "ansatz_path", c.ansatz_path);
    read_val(j, "basis_a", c.basis_a);
    read_val(j, "basis_b", c.basis_b);
    read_opt(j, "theta", c.theta);
    read_opt(j, "target_p0", c.target_p0);
    read_val(j, "algorithm", c.algorithm);
    read_val(j, "backend", c.backend);
    read_val(j, "d_list", c.d_list);
    read_val(j, "epsilon_list", c.epsilon_list);
    read_opt(j, "eta", c.eta);
    read_opt(j, "delta_gap", c.delta_gap);
    read_val(j, "delta_fail", c.delta_fail);
    read_val(j, "vartheta", c.vartheta);
    read_opt(j, "n_sigma", c.n_sigma);
    read_opt(j, "n_sample", c.n_sample);
    read_opt(j, "tau", c.tau);
    read_opt(j, "e_rough", c.e_rough);
    read_val(j, "gaussian_modes", c.gaussian_modes);
    read_val(j, "lt22_n_batch", c.lt22_n_batch);
    read_val(j, "trotter_steps", c.trotter_steps);
    read_val(j, "p_phys_list", c.p_phys_list);
    read_val(j, "channel", c.channel);
    read_val(j, "seeds", c.seeds);
    read_val(j, "shots_per_term", c.shots_per_term);
    read_val(j, "total_shot_budget", c.total_shot_budget);
    read_val(j, "max_iterations", c.max_iterations);
    read_val(j, "timing_path", c.timing_path);
    read_val(j, "out_dir", c.out_dir);
    read_val(j, "persist_artifacts", c.persist_artifacts);
    read_val(j, "jobs", c.jobs);
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["hamiltonian_path"] = hamiltonian_path;
    j["ansatz_path"] = ansatz_path;
    j["basis_a"] = basis_a;
    j["basis_b"] = basis_b;
    if (theta) j["theta"] = *theta;
    if (target_p0) j["target_p0"] = *target_p0;
    j["algorithm"] = algorithm;
    j["backend"] = backend;
    j["d_list"] = d_list;
    j["epsilon_list"] = epsilon_list;
    if (eta) j["eta"] = *eta;
    if (delta_gap) j["delta_gap"] = *delta_gap;
    j["delta_fail"] = delta_fail;
    j["vartheta"] = vartheta;
    if (n_sigma) j["n_sigma"] = *n_sigma;
    if (n_sample) j["n_sample"] = *n_sample;
    if (tau) j["tau"] = *tau;
    if (e_rough) j["e_rough"] = *e_rough;
    j["gaussian_modes"] = gaussian_modes;
    j["lt22_n_batch"] = lt22_n_batch;
    j["trotter_steps"] = trotter_steps;
    j["p_phys_list"] = p_phys_list;
    j["channel"] = channel;
    j["seeds"] = seeds;
    j["shots_per_term"] = shots_per_term;
    j["total_shot_budget"] = total_shot_budget;
    j["max_iterations"] = max_iterations;
    j["timing_path"] = timing_path;
    j["out_dir"] = out_dir;
    j["persist_artifacts"] = persist_artifacts;
    j["jobs"] = jobs;
    return j.dump(1);
}

namespace {

struct RunContext {
    const ExperimentConfig* cfg;
    PauliHamiltonian h;
    SpectralData spec;
    Statevector psi;
    double tau = 0.0;
    double lambda0 = 0.0;
    double p0 = 0.0;
    double delta_gap = 0.0;  // Hartree
    TimingTable timing;
};

Statevector build_input_state(const ExperimentConfig& cfg, const PauliHamiltonian& h) {
    if (cfg.basis_b.empty())
        return Statevector::from_bitstring(cfg.basis_a);
    double th;
    if (cfg.theta)
        th = *cfg.theta;
    else if (cfg.target_p0)
        th = calibrate_theta(h, cfg.basis_a, cfg.basis_b, *cfg.target_p0);
    else
        throw std::invalid_argument(
            "config: two basis states given but neither theta nor target_p0");
    Statevector psi(h.n_qubits);
    psi[0] = 0.0;
    psi[bitstring_index(cfg.basis_a)] = std::cos(th);
    psi[bitstring_index(cfg.basis_b)] = std::sin(th);
    return psi;
}

RunContext make_context(const ExperimentConfig& cfg) {
    RunContext ctx;
    ctx.cfg = &cfg;
    ctx.h = load_hamiltonian(cfg.hamiltonian_path);
    ctx.spec = eigensystem(ctx.h);
    if (cfg.algorithm == "vqe") {
        ctx.psi = Statevector(ctx.h.n_qubits);
    } else {
        ctx.psi = build_input_state(cfg, ctx.h);
    }
    ctx.tau = cfg.tau ? *cfg.tau : default_tau(ctx.spec);
    ctx.lambda0 = ctx.spec.ground_energy();
    ctx.p0 = overlaps(ctx.psi, ctx.spec)[0];
    double gap_true = 0.0;
    try {
        gap_true = ctx.spec.gap_above_ground(ctx.psi, 1e-8);
    } catch (const std::exception&) {
        gap_true = ctx.spec.eigenvalues(ctx.spec.eigenvalues.size() - 1) - ctx.lambda0;
    }
    ctx.delta_gap = cfg.delta_gap ? *cfg.delta_gap : std::pow(gap_true, 0.8);
    ctx.timing = cfg.timing_path.empty() ? TimingTable{} : load_timing_table(cfg.timing_path);
    return ctx;
}

struct SpeBackend {
    // exact-mode evaluator or shot records; both can re-evaluate at any x
    std::optional<ExactSignalEvaluator> exact;
    std::vector<ShotRecord> records;
    std::optional<ModeAggregate> aggregate;
    FourierSampler fourier;
    std::int64_t n_sample = 0;
    double t_max = 0.0, t_total = 0.0;
    std::int64_t n_shots = 0;

    double re_at(double x) const {
        if (exact) return (*exact)(x).real();
        return aggregate->at(x).real();
    }
};

SpeBackend run_signal_collection(const RunContext& ctx, const FilterSpec& filter,
                                 std::int64_t n_sample, std::uint64_t seed,
                                 HadamardTestSampler* shared_sampler) {
    const ExperimentConfig& cfg = *ctx.cfg;
    SpeBackend out;
    out.fourier = fourier_coefficients(filter);
    out.n_sample = n_sample;
    if (cfg.backend == "exact") {
        out.exact.emplace(ctx.spec, ctx.psi, out.fourier, ctx.tau);
        out.n_shots = 2 * n_sample;
        out.t_max = ctx.tau * out.fourier.expected_max_abs_k(
                                  static_cast<double>(n_sample));
        out.t_total = 2.0 * static_cast<double>(n_sample) * ctx.tau *
                      out.fourier.mean_abs_k();
    } else {
        out.records =
            collect_shot_records(*shared_sampler, out.fourier, ctx.tau, n_sample, seed);
        out.aggregate = aggregate_records(out.records, out.fourier);
        out.n_shots = 2 * n_sample;
        for (const auto& r : out.records) {
            double a = std::abs(r.t);
            out.t_max = std::max(out.t_max, a);
            out.t_total += 2.0 * a;
        }
    }
    return out;
}

// Rough ground-state estimate: LT22 with d=100 and 1e4 samples.
double rough_estimate(const RunContext& ctx, std::uint64_t seed,
                      SpeBackend* cost_sink, HadamardTestSampler* sampler) {
    const ExperimentConfig& cfg = *ctx.cfg;
    if (cfg.e_rough) return *cfg.e_rough;
    constexpr int kRoughD = 100;
    constexpr std::int64_t kRoughSamples = 10000;
    FilterSpec filter = PeriodicStepFilter{kRoughD};
    SpeBackend backend = run_signal_collection(ctx, filter, kRoughSamples,
                                               Rng::mix(seed, 0xA001), sampler);
    double eta = cfg.eta ? *cfg.eta : 0.5 * ctx.p0;
    double lo = -M_PI / 4.0 - 0.1, hi = M_PI / 4.0 + 0.1;
    auto oracle = [&](double x, int) { return backend.re_at(x); };
    Lt22SearchResult res = lt22_search(oracle, lo, hi, eta, 1.0 / (8.0 * kRoughD),
                                       ctx.tau);
    if (cost_sink) {
        cost_sink->t_max = std::max(cost_sink->t_max, backend.t_max);
        cost_sink->t_total += backend.t_total;
        cost_sink->n_shots += backend.n_shots;
    }
    return res.energy;
}

ResultRow base_row(const RunContext& ctx, double p_phys, std::uint64_t seed) {
    const ExperimentConfig& cfg = *ctx.cfg;
    ResultRow row;
    row.algorithm = cfg.algorithm;
    row.backend = cfg.backend;
    row.tau = ctx.tau;
    row.seed = seed;
    row.p_phys = p_phys;
    row.channel = cfg.channel;
    row.trotter_steps = cfg.trotter_steps;
    row.status = "ok";
    return row;
}

std::optional<NoiseModel> make_noise(const ExperimentConfig& cfg, double p_phys) {
    if (p_phys <= 0.0) return std::nullopt;
    return NoiseModel{p_phys, cfg.channel == "zflip" ? NoiseChannel::ZFlip
                                                     : NoiseChannel::Depolarizing};
}

void fill_spe_resources(const RunContext& ctx, const SpeBackend& backend,
                        HadamardTestSampler* sampler, ResultRow& row, double p_phys) {
    row.resources.t_max = backend.t_max;
    row.resources.t_total = backend.t_total;
    row.resources.n_shots = backend.n_shots;
    if (sampler) {
        row.resources.rz_per_circuit =
            static_cast<std::int64_t>(sampler->rz_count(HadamardPart::Real));
        double per_real =
            execution_time(sampler->template_circuit(HadamardPart::Real), ctx.timing);
        double per_imag =
            execution_time(sampler->template_circuit(HadamardPart::Imaginary), ctx.timing);
        row.resources.est_execution_seconds =
            0.5 * (per_real + per_imag) * static_cast<double>(row.resources.n_shots);
    } else {
        // exact backend: account the circuits the samples stand for
        HadamardTestSampler tmpl(ctx.h, ctx.psi, ctx.cfg->trotter_steps, std::nullopt);
        row.resources.rz_per_circuit =
            static_cast<std::int64_t>(tmpl.rz_count(HadamardPart::Real));
        double per_real =
            execution_time(tmpl.template_circuit(HadamardPart::Real), ctx.timing);
        double per_imag =
            execution_time(tmpl.template_circuit(HadamardPart::Imaginary), ctx.timing);
        row.resources.est_execution_seconds =
            0.5 * (per_real + per_imag) * static_cast<double>(row.resources.n_shots);
    }
    row.resources.circuit_fidelity =
        fidelity_from_rz_count(row.resources.rz_per_circuit, p_phys);
}

void persist(const RunContext& ctx, const ResultRow& row, const SpeBackend& backend,
             const Signal* signal, const std::string& extra_name,
             const std::string& extra_content) {
    const ExperimentConfig& cfg = *ctx.cfg;
    if (!cfg.persist_artifacts || cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    std::string prefix = cfg.out_dir + "/" + row.artifact_prefix;
    if (!backend.records.empty()) {
        std::ofstream f(prefix + "_records.csv");
        f << records_to_csv(backend.records);
    }
    if (signal) {
        std::ofstream f(prefix + "_signal.csv");
        f << signal_to_csv(*signal);
    }
    if (!extra_name.empty()) {
        std::ofstream f(prefix + "_" + extra_name);
        f << extra_content;
    }
}

ResultRow run_lt22_row(const RunContext& ctx, std::int64_t d, double p_phys,
                       std::uint64_t seed) {
    const ExperimentConfig& cfg = *ctx.cfg;
    ResultRow row = base_row(ctx, p_phys, seed);
    row.d = d;
    row.artifact_prefix = "lt22_d" + std::to_string(d) + "_p" + fmt(p_phys) + "_s" +
                          std::to_string(seed);
    double eta = cfg.eta ? *cfg.eta : 0.5 * ctx.p0;
    double epsilon = 1.0 / (static_cast<double>(d) * ctx.tau);
    row.epsilon = epsilon;
    std::int64_t n_sample =
        cfg.n_sample ? *cfg.n_sample
                     : lt22_sample_count(d, eta, cfg.vartheta, epsilon, ctx.tau);
    row.n_sample = n_sample;

    std::optional<HadamardTestSampler> sampler;
    if (cfg.backend == "shots")
        sampler.emplace(ctx.h, ctx.psi, cfg.trotter_steps, make_noise(cfg, p_phys));
    FilterSpec filter = PeriodicStepFilter{static_cast<int>(d)};
    SpeBackend backend = run_signal_collection(ctx, filter, n_sample, seed,
                                               sampler ? &*sampler : nullptr);

    // batch voting splits the records into n_batch interleaved signals
    std::vector<ModeAggregate> batches;
    if (cfg.lt22_n_batch > 1 && !backend.records.empty()) {
        std::vector<std::vector<ShotRecord>> parts(cfg.lt22_n_batch);
        for (const auto& rec : backend.records)
            parts[static_cast<std::size_t>(rec.sample_index) %
                  static_cast<std::size_t>(cfg.lt22_n_batch)]
                .push_back(rec);
        for (const auto& part : parts)
            batches.push_back(aggregate_records(part, backend.fourier));
    }

    double lo = -M_PI / 4.0 - 0.1, hi = M_PI / 4.0 + 0.1;
    auto oracle = [&](double x, int b) {
        if (!batches.empty())
            return batches[static_cast<std::size_t>(b)].at(x).real();
        return backend.re_at(x);
    };
    Lt22SearchResult res = lt22_search(oracle, lo, hi, eta, epsilon * ctx.tau,
                                       ctx.tau, batches.empty() ? 1 : cfg.lt22_n_batch);
    row.energy = res.energy;
    row.abs_error = std::abs(res.energy - ctx.lambda0);
    if (res.degenerate) row.detail = "degenerate: signal below 3eta/4 everywhere";
    fill_spe_resources(ctx, backend, sampler ? &*sampler : nullptr, row, p_phys);
    persist(ctx, row, backend, nullptr, "", "");
    return row;
}

ResultRow run_gaussian_row(const RunContext& ctx, double epsilon_ha, double p_phys,
                           std::uint64_t seed, bool fit_variant) {
    const ExperimentConfig& cfg = *ctx.cfg;
    ResultRow row = base_row(ctx, p_phys, seed);
    row.epsilon = epsilon_ha;
    row.artifact_prefix = (fit_variant ? "gfit_eps" : "gzero_eps") + fmt(epsilon_ha) +
                          "_p" + fmt(p_phys) + "_s" + std::to_string(seed);
    double eta = cfg.eta ? *cfg.eta : 0.7 * ctx.p0;
    double eps_x = epsilon_ha * ctx.tau;
    double delta_x = ctx.delta_gap * ctx.tau;
    GaussianSchedule sched = gaussian_parameters(eps_x, eta, delta_x, cfg.delta_fail,
                                                 cfg.gaussian_modes, !fit_variant);
    row.sigma = sched.sigma;
    std::int64_t n_sample =
        cfg.n_sample ? *cfg.n_sample
                     : static_cast<std::int64_t>(std::min(sched.n_sample, 9.0e18));
    row.n_sample = n_sample;

    std::optional<HadamardTestSampler> sampler;
    if (cfg.backend == "shots")
        sampler.emplace(ctx.h, ctx.psi, cfg.trotter_steps, make_noise(cfg, p_phys));
    FilterSpec filter =
        GaussianFilter{sched.sigma, sched.t_cut, cfg.gaussian_modes, !fit_variant};
    SpeBackend backend = run_signal_collection(ctx, filter, n_sample, seed,
                                               sampler ? &*sampler : nullptr);

    double e_rough =
        rough_estimate(ctx, seed, &backend, sampler ? &*sampler : nullptr);

    Signal signal;
    std::string fit_json;
    if (fit_variant) {
        double n_sigma = cfg.n_sigma ? *cfg.n_sigma
                                     : default_n_sigma(delta_x, sched.sigma);
        double half = n_sigma * sched.sigma / 4.0;
        std::vector<double> grid =
            linspace(e_rough * ctx.tau - half, e_rough * ctx.tau + half,
                     static_cast<std::size_t>(sched.m_points));
        if (backend.exact)
            signal = exact_signal(ctx.spec, ctx.psi, backend.fourier, ctx.tau, grid);
        else
            signal = evaluate_signal(backend.records, backend.fourier, ctx.tau, grid);
        signal.metadata = "filter=gaussian sigma=" + fmt(sched.sigma) +
                          " t_cut=" + fmt(sched.t_cut) +
                          " n_sample=" + std::to_string(n_sample) +
                          " p_phys=" + fmt(p_phys) + " channel=" + cfg.channel +
                          " seed=" + std::to_string(seed);
        std::vector<double> re(signal.z_values.size());
        for (std::size_t i = 0; i < re.size(); ++i) re[i] = signal.z_values[i].real();
        GaussianFitResult fit = gaussian_fit(grid, re, sched.sigma, ctx.tau);
        row.energy = fit.lambda_star;
        row.detail = "P_star=" + fmt(fit.p_star);
        fit_json = "{\"p_star\": " + fmt(fit.p_star) +
                   ", \"lambda_star\": " + fmt(fit.lambda_star) +
                   ", \"residual\": " + fmt(fit.residual) +
                   ", \"e_rough\": " + fmt(e_rough) + ",\n \"fit\": " + fit.provenance +
                   "}\n";
    } else {
        auto deriv = [&](double x) { return backend.re_at(x); };
        row.energy = gaussian_zero_search(deriv, e_rough, sched.sigma, ctx.tau);
    }
    row.abs_error = std::abs(row.energy - ctx.lambda0);
    fill_spe_resources(ctx, backend, sampler ? &*sampler : nullptr, row, p_phys);
    persist(ctx, row, backend, fit_variant ? &signal : nullptr,
            fit_variant ? "fit.json" : "", fit_json);
    return row;
}

ResultRow run_vqe_row(const RunContext& ctx, double p_phys, std::uint64_t seed) {
    const ExperimentConfig& cfg = *ctx.cfg;
    ResultRow row = base_row(ctx, p_phys, seed);
    row.artifact_prefix = "vqe_p" + fmt(p_phys) + "_s" + std::to_string(seed);
    Ansatz ansatz = load_ansatz(cfg.ansatz_path);
    Rng init_rng(Rng::mix(seed, 0xF17));
    std::vector<double> init(ansatz.n_params);
    for (auto& v : init) v = 0.2 * (init_rng.uniform() - 0.5);

    VqeOptimizerConfig ocfg;
    ocfg.shots_per_term = cfg.shots_per_term;
    ocfg.total_shot_budget = cfg.total_shot_budget;
    ocfg.max_iterations = cfg.max_iterations;
    VqeRunLedger ledger =
        optimize(ctx.h, ansatz, init, ocfg, make_noise(cfg, p_phys), seed);

    row.energy = ledger.final_energy;
    row.abs_error = std::abs(ledger.final_energy - ctx.lambda0);
    row.n_sample = ledger.total_shots;
    row.resources.n_shots = ledger.total_shots;
    row.detail = "evals=" + std::to_string(ledger.energy_evaluations) + ";" +
                 ledger.termination;

    Circuit base = transpile(ansatz_circuit(ansatz, ledger.final_params));
    row.resources.rz_per_circuit = static_cast<std::int64_t>(base.rz_count());
    row.resources.circuit_fidelity =
        fidelity_from_rz_count(row.resources.rz_per_circuit, p_phys);
    // average measured-term circuit time (base + basis rotations)
    double avg = 0.0;
    int measured = 0;
    for (const auto& term : ctx.h.terms) {
        if (term.string.is_identity()) continue;
        double extra = 0.0;
        for (char op : term.string.ops) {
            if (op == 'X') extra += ctx.timing.h_seconds;
            if (op == 'Y') extra += ctx.timing.h_seconds + ctx.timing.rz_seconds;
        }
        avg += execution_time(base, ctx.timing) + extra;
        ++measured;
    }
    if (measured > 0) avg /= measured;
    row.resources.est_execution_seconds =
        avg * static_cast<double>(ledger.total_shots);

    if (cfg.persist_artifacts && !cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream f(cfg.out_dir + "/" + row.artifact_prefix + "_iters.csv");
        f << vqe_ledger_csv(ledger);
    }
    return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    RunContext ctx = make_context(config);

    struct Point {
        std::int64_t d = 0;
        double epsilon = 0.0;
    };
    std::vector<Point> points;
    if (config.algorithm == "lt22") {
        auto ds = config.d_list.empty() ? kDefaultDGrid : config.d_list;
        for (auto d : ds) points.push_back({d, 0.0});
    } else if (config.algorithm == "vqe") {
        points.push_back({});
    } else {
        auto eps = config.epsilon_list.empty() ? kDefaultEpsGrid : config.epsilon_list;
        for (double e : eps) points.push_back({0, e});
    }

    struct Task {
        Point point;
        double p_phys;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& pt : points)
        for (double p : config.p_phys_list)
            for (auto seed : config.seeds) tasks.push_back({pt, p, seed});

    auto run_task = [&](const Task& t) -> ResultRow {
        try {
            if (config.algorithm == "lt22")
                return run_lt22_row(ctx, t.point.d, t.p_phys, t.seed);
            if (config.algorithm == "vqe") return run_vqe_row(ctx, t.p_phys, t.seed);
            return run_gaussian_row(ctx, t.point.epsilon, t.p_phys, t.seed,
                                    config.algorithm == "gaussian_fit");
        } catch (const std::exception& e) {
            ResultRow row = base_row(ctx, t.p_phys, t.seed);
            row.d = t.point.d;
            row.epsilon = t.point.epsilon;
            row.status = "failed";
            row.detail = e.what();
            return row;
        }
    };

    std::vector<ResultRow> rows(tasks.size());
    if (config.jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) rows[i] = run_task(tasks[i]);
    } else {
        std::size_t next = 0;
        while (next < tasks.size()) {
            std::size_t batch = std::min<std::size_t>(config.jobs, tasks.size() - next);
            std::vector<std::future<ResultRow>> futs;
            for (std::size_t b = 0; b < batch; ++b)
                futs.push_back(std::async(std::launch::async, run_task,
                                          std::cref(tasks[next + b])));
            for (std::size_t b = 0; b < batch; ++b) rows[next + b] = futs[b].get();
            next += batch;
        }
    }
    return rows;
}

std::string csv_header() {
    return "algorithm,backend,d,epsilon,sigma,tau,n_sample,seed,p_phys,channel,"
           "trotter_steps,energy,abs_error,n_shots,t_max,t_total,rz_per_circuit,"
           "circuit_fidelity,est_execution_seconds,status,detail";
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << csv_header() << "\n";
    for (const auto& r : rows) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        std::replace(detail.begin(), detail.end(), '\n', ' ');
        out << r.algorithm << "," << r.backend << "," << r.d << "," << fmt(r.epsilon)
            << "," << fmt(r.sigma) << "," << fmt(r.tau) << "," << r.n_sample << ","
            << r.seed << "," << fmt(r.p_phys) << "," << r.channel << ","
            << r.trotter_steps << "," << fmt(r.energy) << "," << fmt(r.abs_error)
            << "," << r.resources.n_shots << "," << fmt(r.resources.t_max) << ","
            << fmt(r.resources.t_total) << "," << r.resources.rz_per_circuit << ","
            << fmt(r.resources.circuit_fidelity) << ","
            << fmt(r.resources.est_execution_seconds) << "," << r.status << ","
            << detail << "\n";
    }
    return out.str();
}

std::optional<double> loglog_slope(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(y[i]));
        }
    }
    if (lx.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

Report emit_report(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
    Report rep;
    rep.csv = rows_to_csv(rows);
    std::ostringstream s;
    std::vector<std::string> algos;
    for (const auto& r : rows) {
        if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
            algos.push_back(r.algorithm);
        if (r.status != "ok") rep.all_ok = false;
    }
    for (const auto& algo : algos) {
        std::vector<double> err, t_total, t_max;
        int ok = 0, failed = 0;
        for (const auto& r : rows) {
            if (r.algorithm != algo) continue;
            if (r.status != "ok") {
                ++failed;
                continue;
            }
            ++ok;
            err.push_back(r.abs_error);
            t_total.push_back(r.resources.t_total);
            t_max.push_back(r.resources.t_max);
        }
        s << "[" << algo << "] rows=" << ok + failed << " ok=" << ok
          << " failed=" << failed << "\n";
        auto st = loglog_slope(t_total, err);
        auto sm = loglog_slope(t_max, err);
        char buf[64];
        if (st) {
            std::snprintf(buf, sizeof buf, "%.3f", *st);
            s << "  slope |dE| vs T_total: " << buf << "\n";
        }
        if (sm) {
            std::snprintf(buf, sizeof buf, "%.3f", *sm);
            s << "  slope |dE| vs T_max:   " << buf << "\n";
        }
    }
    rep.summary = s.str();
    return rep;
}

}  // namespace spe
