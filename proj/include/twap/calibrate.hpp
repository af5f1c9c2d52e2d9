#pragma once

#include "twap/model.hpp"

#include <istream>

namespace twap {

struct EquilibriumSolution;

struct CalibrationResult {
    TimeFunction mu1;
    double phi1;
};

/// mu1 = 2 kappa - M lambda' / eta and phi1 = lambda(1) / eta.
///
/// Throws NonzeroPi, GridMismatch, InvalidArgument (eta <= 0) and
/// CalibrationError when lambda' <= kappa eta / M somewhere.
CalibrationResult implied_mu1(const LambdaCurve& curve, const ModelParams& params, const TimeFunction& kappa);

/// lambda = eta sigma_w of a solved equilibrium, slope from the sigma_w ODE.
LambdaCurve lambda_from_solution(const EquilibriumSolution& sol);

/// Reads a two-column (t, lambda) CSV with a header row and resamples it
/// linearly onto the N-grid. Lines starting with '#' are skipped.
LambdaCurve read_lambda_csv(std::istream& in, int n);

} // namespace twap
