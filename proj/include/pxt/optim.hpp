#pragma once

#include <functional>
#include <vector>

namespace pxt {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;       // minimized objective
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
};

struct OptimOptions {
    int max_iterations = 500;
    double rel_tolerance = 1e-8;   // on objective change
    double initial_step = 0.25;    // simplex edge length
};

// Derivative-free simplex minimization.
OptimResult nelder_mead(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt = {});

// Quasi-Newton (BFGS) with central-difference gradients and backtracking
// line search. Used to polish a simplex solution.
OptimResult bfgs(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt = {});

// nelder_mead followed by bfgs from its solution; keeps whichever is lower.
OptimResult minimize(const ObjectiveFn& f, std::vector<double> start, const OptimOptions& opt = {});

}  // namespace pxt
