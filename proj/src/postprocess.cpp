#include "spe/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spe {

bool lt22_certify(const SignalOracle& oracle, double x_m, double eta, int n_batch) {
    if (n_batch < 1 || n_batch % 2 == 0)
        throw std::invalid_argument("lt22_certify: n_batch must be odd and >= 1");
    int above = 0;
    for (int b = 0; b < n_batch; ++b)
        if (oracle(x_m, b) > 0.75 * eta) ++above;
    return 2 * above > n_batch;
}

Lt22SearchResult lt22_search(const SignalOracle& oracle, double lo, double hi,
                             double eta, double tolerance, double tau, int n_batch) {
    if (lo >= hi) throw std::invalid_argument("lt22_search: invalid bracket");
    if (tolerance <= 0.0) throw std::invalid_argument("lt22_search: tolerance must be > 0");
    Lt22SearchResult res;
    res.degenerate = true;
    while (hi - lo > tolerance) {
        double mid = 0.5 * (lo + hi);
        bool vote = lt22_certify(oracle, mid, eta, n_batch);
        res.midpoints.push_back(mid);
        res.votes.push_back(vote);
        if (vote) {
            hi = mid;
            res.degenerate = false;
        } else {
            lo = mid;
        }
        ++res.iterations;
    }
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.energy = 0.5 * (lo + hi) / tau;
    return res;
}

double gaussian_zero_search(const std::function<double(double)>& re_derivative,
                            double e_rough, double sigma, double tau, int scan_points,
                            double x_tolerance) {
    double center = e_rough * tau;
    double lo = center - sigma / 4.0;
    double hi = center + sigma / 4.0;
    double step = (hi - lo) / (scan_points - 1);
    double prev_x = lo;
    double prev_v = re_derivative(lo);
    double root_lo = 0.0, root_hi = 0.0;
    bool found = false;
    for (int i = 1; i < scan_points; ++i) {
        double x = lo + step * i;
        double v = re_derivative(x);
        if (prev_v == 0.0) return prev_x / tau;
        if ((v > 0) != (prev_v > 0)) {
            root_lo = prev_x;
            root_hi = x;
            found = true;
            break;
        }
        prev_x = x;
        prev_v = v;
    }
    if (!found)
        throw std::runtime_error(
            "gaussian_zero_search: no sign change of Re Z' in "
            "[E_rough - sigma/4, E_rough + sigma/4]; the rough estimate is not "
            "sigma/4-close to the eigenvalue");
    double flo = re_derivative(root_lo);
    while (root_hi - root_lo > x_tolerance) {
        double mid = 0.5 * (root_lo + root_hi);
        double fm = re_derivative(mid);
        if (fm == 0.0) return mid / tau;
        if ((fm > 0) == (flo > 0)) {
            root_lo = mid;
            flo = fm;
        } else {
            root_hi = mid;
        }
    }
    return 0.5 * (root_lo + root_hi) / tau;
}

namespace {

struct LinearFit {
    double p = 0.0;
    double cost = 0.0;
};

// Model P g(x), g = exp(-(x - L tau)^2 / 2 sigma^2) / (sqrt(2 pi) sigma);
// linear in P, so P has a closed form per candidate Lambda.
LinearFit fit_p_at(const std::vector<double>& xs, const std::vector<double>& ys,
                   std::size_t begin, std::size_t end, double lambda, double sigma,
                   double tau) {
    double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sigma);
    double gy = 0.0, gg = 0.0, yy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double u = (xs[i] - lambda * tau) / sigma;
        double g = norm * std::exp(-0.5 * u * u);
        gy += g * ys[i];
        gg += g * g;
        yy += ys[i] * ys[i];
    }
    LinearFit out;
    out.p = gg > 0.0 ? gy / gg : 0.0;
    out.cost = (yy - out.p * gy) / static_cast<double>(end - begin);
    return out;
}

}  // namespace

double default_n_sigma(double delta_gap, double sigma) {
    return 4.0 * delta_gap / sigma;
}

GaussianFitResult gaussian_fit(const std::vector<double>& x_grid,
                               const std::vector<double>& re_z, double sigma,
                               double tau, double core_half_width_sigmas) {
    if (x_grid.size() != re_z.size())
        throw std::invalid_argument("gaussian_fit: grid/value size mismatch");
    if (x_grid.size() < 5)
        throw std::invalid_argument("gaussian_fit: too few grid points to fit");
    if (sigma <= 0.0 || tau <= 0.0)
        throw std::invalid_argument("gaussian_fit: sigma and tau must be > 0");

    // Stage 1: coarse scan of Lambda over the grid, full window.
    double best_cost = std::numeric_limits<double>::infinity();
    double best_lambda = x_grid.front() / tau;
    for (double x : x_grid) {
        double lam = x / tau;
        LinearFit f = fit_p_at(x_grid, re_z, 0, x_grid.size(), lam, sigma, tau);
        if (f.cost < best_cost) {
            best_cost = f.cost;
            best_lambda = lam;
        }
    }

    // Stage 2: restrict to the peak core. The Gaussian model only holds
    // locally around one eigenvalue; distant grid points carry other peaks.
    double half = core_half_width_sigmas * sigma;
    double center_x = best_lambda * tau;
    std::size_t begin = 0, end = x_grid.size();
    while (begin < end && x_grid[begin] < center_x - half) ++begin;
    while (end > begin && x_grid[end - 1] > center_x + half) --end;
    if (end - begin < 5) {
        begin = 0;
        end = x_grid.size();
    }
    auto core_cost = [&](double lam) {
        return fit_p_at(x_grid, re_z, begin, end, lam, sigma, tau).cost;
    };

    // Stage 3: golden-section refinement of Lambda on the core window.
    double grid_step = x_grid.size() > 1 ? x_grid[1] - x_grid[0] : sigma;
    double a = best_lambda - 2.0 * grid_step / tau;
    double b = best_lambda + 2.0 * grid_step / tau;
    constexpr double kGolden = 0.6180339887498949;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = core_cost(c), fd = core_cost(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = core_cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = core_cost(d);
        }
    }
    double lambda = 0.5 * (a + b);
    LinearFit f = fit_p_at(x_grid, re_z, begin, end, lambda, sigma, tau);

    GaussianFitResult res;
    res.p_star = f.p;
    res.lambda_star = lambda;
    res.residual = f.cost;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"sigma\": %.17g, \"tau\": %.17g, \"core_half_width_sigmas\": %.17g, "
                  "\"window\": [%.17g, %.17g], \"core_points\": %zu, \"grid_points\": %zu}",
                  sigma, tau, core_half_width_sigmas, x_grid.front(), x_grid.back(),
                  end - begin, x_grid.size());
    res.provenance = buf;
    return res;
}

}  // namespace spe
