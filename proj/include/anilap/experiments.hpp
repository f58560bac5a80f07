#pragma once

#include "anilap/geometry.hpp"
#include "anilap/grid.hpp"
#include "anilap/kernels.hpp"
#include "anilap/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace anilap {

struct CoefficientSpec {
    std::string kind = "constant";  // constant | checkerboard | bump
    double value = 1.0;             // constant
    double cell = 0.25;             // checkerboard
    Point center;                   // bump
    double width = 0.5;             // bump
    bool operator==(const CoefficientSpec&) const = default;
};

struct KernelSpec {
    std::string variant = "axes";  // axes | modulated-axes | isotropic
    CoefficientSpec coefficient;
    bool operator==(const KernelSpec&) const = default;
};

struct GridSpec {
    std::vector<std::size_t> cells;  // per axis across the domain; empty means the experiment default
    std::size_t padding = 1;         // extra node layers beyond the domain
    std::string layout = "vertex";   // vertex: nodes on the domain boundary; cell-centred
    bool operator==(const GridSpec&) const = default;
};

struct DomainSpec {
    Point center;  // empty means the origin
    double r = 1.0;
    double lambda = 2.0;
    double theta = 8.0;
    double sigma = 1.25;
    bool operator==(const DomainSpec&) const = default;
};

struct DataFunction {
    std::string kind = "zero";  // zero | constant | bump, oscillatory (exterior only)
    double value = 0.0;
    std::size_t axis = 0;
    double lo = 0.0;
    std::optional<double> hi;  // absent: unbounded
    double height = 1.0;
    Point center;
    std::vector<double> half_width;
    bool operator==(const DataFunction&) const = default;
};

struct DataSpec {
    DataFunction f, g;
    std::optional<double> q;  // default max{2, beta} + 0.5
    double slack = 0.0;
    bool operator==(const DataSpec&) const = default;
};

struct McSpec {
    std::size_t paths = 100000;
    double dt = 1e-3;
    bool operator==(const McSpec&) const = default;
};

struct ExperimentConfig {
    std::string experiment;
    std::vector<double> alpha;
    KernelSpec kernel;
    GridSpec grid;
    DomainSpec domain;
    DataSpec data;
    std::uint64_t seed = 1;
    double tolerance = 1e-10;
    std::size_t family = 20;  // members of randomised families
    McSpec mc;
    std::string output = "out";
    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError naming the offending field; unknown keys are errors.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& j);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& c);
// Semantic checks: known experiment, alpha in (0,2)^d, q > max{2, beta} when f != 0, ...
void validate(const ExperimentConfig& c);

[[nodiscard]] KernelFamily make_kernel(const ExperimentConfig& c);
[[nodiscard]] ExteriorPolicy make_exterior(const DataFunction& g);
[[nodiscard]] double effective_q(const ExperimentConfig& c);

using ExperimentFn = std::function<ExperimentReport(const ExperimentConfig&)>;

struct ExperimentInfo {
    std::string name;
    std::string summary;
    ExperimentFn run;
};

[[nodiscard]] const std::vector<ExperimentInfo>& experiment_registry();

// Validates, runs and fills the verdict; numeric failures become verdict
// "error" with the module error name as the reason.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& c);
[[nodiscard]] nlohmann::json manifest(const ExperimentConfig& c);

} // namespace anilap
