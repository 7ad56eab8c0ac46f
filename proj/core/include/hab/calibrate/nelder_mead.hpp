#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hab/common.hpp"

namespace hab::calib {

struct NelderMeadOptions {
    std::size_t max_iter = 2000;
    double xatol = 1e-4;
    double fatol = 1e-4;
    /// Extra candidates injected into the initial simplex: each replaces the
    /// current worst vertex when it scores better, so the result can never be
    /// worse than any of them.
    std::vector<std::vector<double>> seed_points;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Downhill simplex with the standard coefficients (reflection 1, expansion
/// 2, contraction 0.5, shrink 0.5). The initial simplex steps coordinate i
/// by 0.05 * |x0_i| (0.00025 when x0_i is zero). Terminates when both the
/// vertex coordinate spread and the value spread against the best vertex are
/// within xatol/fatol, or at max_iter. The returned value never exceeds
/// f(x0); non-finite f(x0) is an error.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace hab::calib
