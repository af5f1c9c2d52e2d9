#pragma once

#include "twap/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace twap::cli {

/// section -> key -> raw value
using IniTable = std::map<std::string, std::map<std::string, std::string>>;

/// Parses `[section]` headers and `key = value` lines. '#' and ';' start
/// comments. Throws ConfigError on malformed lines, duplicate keys, keys
/// outside a section and unknown sections or keys.
IniTable parse_ini(std::istream& in);

/// FNV-1a over the canonical `section.key=value` lines of the table.
std::uint64_t config_hash(const IniTable& table);

struct PenaltySpec {
    std::optional<PenaltyProfile> profile;
    std::vector<double> values; ///< equally spaced samples on [0,1]
};

struct Scenario {
    ModelParams model;
    std::optional<PenaltySpec> penalty;
    double gamma_level = 0.1;
    double gamma_slope = 0.9;

    std::string selector = "radner";
    double mu1_ratio = 0.0;
    std::filesystem::path lambda_file;

    int grid = 1000;
    std::int64_t paths = 10000;
    std::uint64_t seed = 1;
    int stride = 10;
    int threads = 0;

    double rho = 0.0;
    double tau = 1.0;

    std::filesystem::path out_dir = "out";
    std::uint64_t hash = 0;
};

/// Reads a scenario. Relative file names are taken relative to `base_dir`.
Scenario scenario_from_table(const IniTable& table, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& file);

/// Throws MissingPenalty when the scenario has no penalty block.
TimeFunction scenario_kappa(const Scenario& s, int n);
TimeFunction scenario_gamma(const Scenario& s, int n);

/// Builds the selector; a calibrated selector reads `lambda_file`.
EquilibriumSelector scenario_selector(const Scenario& s, const TimeFunction& kappa);

PenaltyProfile parse_profile(const std::string& id);
std::vector<double> parse_list(const std::string& raw);

} // namespace twap::cli
