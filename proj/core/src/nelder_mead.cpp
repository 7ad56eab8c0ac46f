#include "hab/calibrate/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hab::calib {

namespace {

constexpr double kAlpha = 1.0;  // reflection
constexpr double kGamma = 2.0;  // expansion
constexpr double kRho = 0.5;    // contraction
constexpr double kSigma = 0.5;  // shrink

struct Simplex {
    std::vector<std::vector<double>> vertices;
    std::vector<double> values;

    std::size_t worst_index() const {
        return static_cast<std::size_t>(
            std::max_element(values.begin(), values.end()) - values.begin());
    }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             const NelderMeadOptions& options) {
    if (x0.empty()) throw InputError("nelder_mead requires at least one dimension");
    const std::size_t d = x0.size();

    auto eval = [&](const std::vector<double>& x) { return f(x); };

    Simplex s;
    s.vertices.emplace_back(x0.begin(), x0.end());
    s.values.push_back(eval(s.vertices[0]));
    if (!std::isfinite(s.values[0]))
        throw InputError("objective is not finite at the initial point");

    NelderMeadResult best;
    best.x = s.vertices[0];
    best.fx = s.values[0];
    auto observe = [&](const std::vector<double>& x, double fx) {
        if (std::isfinite(fx) && fx < best.fx) {
            best.x = x;
            best.fx = fx;
        }
    };

    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> v = s.vertices[0];
        double step = v[i] != 0.0 ? 0.05 * std::abs(v[i]) : 0.00025;
        v[i] += step;
        double fv = eval(v);
        observe(v, fv);
        s.vertices.push_back(std::move(v));
        s.values.push_back(fv);
    }

    for (const auto& seed : options.seed_points) {
        if (seed.size() != d)
            throw InputError("seed point dimension mismatch in nelder_mead");
        double fseed = eval(seed);
        observe(seed, fseed);
        std::size_t worst = s.worst_index();
        if (fseed < s.values[worst]) {
            s.vertices[worst] = seed;
            s.values[worst] = fseed;
        }
    }

    std::vector<std::size_t> order(d + 1);
    NelderMeadResult result;
    for (result.iterations = 0; result.iterations < options.max_iter;
         ++result.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (s.values[a] != s.values[b]) return s.values[a] < s.values[b];
            return a < b;
        });
        const auto& best_v = s.vertices[order[0]];
        double f_best = s.values[order[0]];
        double f_second_worst = s.values[order[d - 1]];
        std::size_t worst = order[d];
        double f_worst = s.values[worst];

        double x_spread = 0.0, f_spread = 0.0;
        for (std::size_t k = 1; k <= d; ++k) {
            f_spread = std::max(f_spread, std::abs(s.values[order[k]] - f_best));
            for (std::size_t i = 0; i < d; ++i)
                x_spread =
                    std::max(x_spread, std::abs(s.vertices[order[k]][i] - best_v[i]));
        }
        if (x_spread <= options.xatol && f_spread <= options.fatol) {
            result.converged = true;
            break;
        }

        // Centroid of everything but the worst vertex.
        std::vector<double> centroid(d, 0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < d; ++i) centroid[i] += s.vertices[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t i = 0; i < d; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - s.vertices[worst][i]);
            return x;
        };

        std::vector<double> reflected = blend(kAlpha);
        double f_reflected = eval(reflected);
        observe(reflected, f_reflected);

        if (f_reflected < f_best) {
            std::vector<double> expanded = blend(kAlpha * kGamma);
            double f_expanded = eval(expanded);
            observe(expanded, f_expanded);
            if (f_expanded < f_reflected) {
                s.vertices[worst] = std::move(expanded);
                s.values[worst] = f_expanded;
            } else {
                s.vertices[worst] = std::move(reflected);
                s.values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < f_second_worst) {
            s.vertices[worst] = std::move(reflected);
            s.values[worst] = f_reflected;
            continue;
        }

        bool outside = f_reflected < f_worst;
        std::vector<double> contracted = blend(outside ? kAlpha * kRho : -kRho);
        double f_contracted = eval(contracted);
        observe(contracted, f_contracted);
        bool accept = outside ? f_contracted <= f_reflected : f_contracted < f_worst;
        if (accept) {
            s.vertices[worst] = std::move(contracted);
            s.values[worst] = f_contracted;
            continue;
        }

        // Shrink everything toward the best vertex.
        std::vector<double> anchor = s.vertices[order[0]];
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == order[0]) continue;
            for (std::size_t i = 0; i < d; ++i)
                s.vertices[k][i] = anchor[i] + kSigma * (s.vertices[k][i] - anchor[i]);
            s.values[k] = eval(s.vertices[k]);
            observe(s.vertices[k], s.values[k]);
        }
    }

    result.x = best.x;
    result.fx = best.fx;
    return result;
}

}  // namespace hab::calib
