#pragma once

#include "twap/equilibrium.hpp"
#include "twap/vwap.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace twap {

struct SimConfig {
    int n_steps = 0;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    /// Statistics are recorded at every stride-th node (and always at t = 1).
    int stride = 1;
    /// 0 uses the hardware concurrency. Results do not depend on it.
    int threads = 0;
    /// Also accumulate wealth, penalty and realized welfare per investor.
    bool track_wealth = false;
    /// Number of leading paths stored in full.
    int keep_paths = 0;
};

/// Sample moments per recorded node.
struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> variance; ///< unbiased
    std::int64_t count = 0;

    double sd(std::size_t j) const;
    double stderr_mean(std::size_t j) const;
};

struct StoredPath {
    std::vector<double> w, D, S, gamma;
    std::vector<std::vector<double>> theta, X, L; ///< [investor][node]
};

struct PathBundle {
    int grid = 0;
    std::int64_t paths = 0;
    std::vector<int> nodes;     ///< recorded grid indices
    std::vector<double> times;  ///< t at the recorded nodes

    SeriesStats supply;
    SeriesStats premium;             ///< S - D
    std::vector<SeriesStats> theta;  ///< per investor
    std::vector<SeriesStats> wealth; ///< X_i, empty unless tracked
    std::vector<SeriesStats> penalty;
    SeriesStats welfare;             ///< sum_i (X_{i,1} - L_{i,1}), one node

    /// sum_k (dS - E_k dS)^2 over [0, t]
    SeriesStats qv;
    /// sum_k dS^2 over [0, t]
    SeriesStats qv_raw;

    /// Gamma bridge, empty for deterministic targets.
    SeriesStats gamma;
    SeriesStats gamma_drift; ///< gamma_t - int (1 - gamma) psi0
    SeriesStats gamma_qv;    ///< [gamma]_t - int (1 - gamma)^2 psi1

    double max_clearing_error = 0.0;
    std::vector<StoredPath> kept;
};

/// Throws GridMismatch when cfg.n_steps differs from the solution grid.
PathBundle simulate(const EquilibriumSolution& sol, const SimConfig& cfg);
PathBundle simulate(const VwapSolution& sol, const SimConfig& cfg);

/// One row of long-format output.
struct StatRow {
    std::string stat;
    double t;
    double value;
    double stderr_value;
};

/// Empirical and analytic mean and standard deviation of S - D.
std::vector<StatRow> liquidity_premium_stats(const PathBundle& b, const EquilibriumSolution& sol);

/// Per-investor expected deviation from the target path, empirical and
/// analytic, plus the cross-sectional average.
std::vector<StatRow> twap_deviation_stats(const PathBundle& b, const EquilibriumSolution& sol);

/// Holdings mean and variance per investor with the analytic values.
std::vector<StatRow> holdings_stats(const PathBundle& b, const EquilibriumSolution& sol);

/// Mean realized quadratic variation per unit time over [0,1] against
/// int_0^1 (sigma_w^2 eta^2 + 1).
std::vector<StatRow> quadratic_variation_stats(const PathBundle& b, const EquilibriumSolution& sol);

double expected_quadratic_variation(const EquilibriumSolution& sol);

/// Realized welfare sum_i E[X_{i,1} - L_{i,1}] given the realized targets.
StatRow monte_carlo_welfare(const PathBundle& b);

void write_long_csv(std::ostream& out, const std::vector<StatRow>& rows, const std::string& comment = {});

} // namespace twap
