#include "twap/calibrate.hpp"

#include "twap/equilibrium.hpp"
#include "twap/errors.hpp"
#include "twap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace twap {

CalibrationResult implied_mu1(const LambdaCurve& curve, const ModelParams& params, const TimeFunction& kappa)
{
    if (params.pi != 0.0)
        throw Error(ErrorCode::NonzeroPi, "calibration is only defined for pi = 0");
    if (!(params.eta > 0.0))
        throw Error(ErrorCode::InvalidArgument, "calibration needs eta > 0");
    const int n = kappa.grid();
    if (curve.lambda.grid() != n || (curve.slope && curve.slope->grid() != n))
        throw Error(ErrorCode::GridMismatch, "lambda and kappa live on different grids");

    const std::vector<double> slope = curve.slope
                                          ? std::vector<double>(curve.slope->values().begin(),
                                                                curve.slope->values().end())
                                          : quad::derivative(curve.lambda.values());
    const double M = params.investors;
    const double eta = params.eta;

    std::vector<double> mu(n + 1);
    double worst = 0.0;
    int worst_k = -1;
    for (int k = 0; k <= n; ++k) {
        mu[k] = 2.0 * kappa[k] - M * slope[k] / eta;
        const double shortfall = kappa[k] * eta / M - slope[k];
        if (shortfall >= 0.0 && (worst_k < 0 || shortfall > worst)) {
            worst = shortfall;
            worst_k = k;
        }
    }
    if (worst_k >= 0) {
        std::ostringstream os;
        os << "lambda slope falls short of kappa eta / M by " << worst << " at t = " << kappa.time(worst_k);
        throw CalibrationError(kappa.time(worst_k), worst, os.str());
    }
    return {TimeFunction::sampled(std::move(mu), kappa.singular_at_one(), kappa.tail_exponent()),
            curve.lambda.back() / eta};
}

LambdaCurve lambda_from_solution(const EquilibriumSolution& sol)
{
    const auto& in = sol.inputs;
    const double eta = in.params.eta;
    const double M = in.params.investors;
    const int n = sol.grid();
    std::vector<double> lam(n + 1), slope(n + 1);
    for (int k = 0; k <= n; ++k) {
        lam[k] = eta * sol.sigma_w[k];
        slope[k] = eta * ((2.0 * in.kappa[k] - in.mu1[k]) / M + in.params.pi * sol.sigma_w[k]);
    }
    return {TimeFunction::sampled(std::move(lam)),
            TimeFunction::sampled(std::move(slope), in.kappa.singular_at_one(), in.kappa.tail_exponent())};
}

LambdaCurve read_lambda_csv(std::istream& in, int n)
{
    std::vector<double> ts, ls;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header) {
            header = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t = 0.0, l = 0.0;
        if (!(row >> t >> l))
            throw Error(ErrorCode::ConfigError, "malformed lambda row: " + line);
        if (!ts.empty() && t <= ts.back())
            throw Error(ErrorCode::ConfigError, "lambda times must increase");
        ts.push_back(t);
        ls.push_back(l);
    }
    if (!header)
        throw Error(ErrorCode::ConfigError, "lambda file needs a header row");
    if (ts.size() < 2 || std::abs(ts.front()) > 1e-12 || std::abs(ts.back() - 1.0) > 1e-12)
        throw Error(ErrorCode::ConfigError, "lambda samples must span t = 0 to t = 1");

    std::vector<double> grid(n + 1);
    std::size_t j = 0;
    for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        while (j + 2 < ts.size() && ts[j + 1] < t)
            ++j;
        const double w = (t - ts[j]) / (ts[j + 1] - ts[j]);
        grid[k] = (1.0 - w) * ls[j] + w * ls[j + 1];
    }
    return {TimeFunction::sampled(std::move(grid)), std::nullopt};
}

} // namespace twap
