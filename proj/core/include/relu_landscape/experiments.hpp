#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relu_landscape/measures.hpp"
#include "relu_landscape/networks.hpp"
#include "relu_landscape/responses.hpp"

namespace relu_landscape {

struct CheckResult {
    std::string name;
    double value = 0.0;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::uint64_t>> input_hashes;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::string> artifacts;
    std::vector<CheckResult> checks;

    bool passed() const;
    std::string to_json_string() const;
};

// Shipped problem instances and reference configurations.

/// 1D interval [-l-1, l+1] with Lebesgue density, absolute loss against the
/// tent target. The tent needs three ReLU neurons; for l >= 13 nothing with
/// two or fewer beats the zero function.
ProblemInstance make_ex48_instance(double l = 13.0);
/// (x+1)^+ - 2(x)^+ + (x-1)^+ as a width-3 network.
NetworkConfig make_tent_network();

/// 2D three-disk instance: squared loss against the plateau target, density
/// vanishing on the line x_2 = 0. The step response attains error zero but no
/// network does.
ProblemInstance make_ex45_instance();
/// The indicator of {x_2 > 0} as a jump term (multiplicity 2, dimension 2).
GeneralizedResponse make_ex45_step_response();

/// Improvement-demo instances: strictly positive density on a box, squared
/// loss against zero, with one discontinuous term in normalized position.
ProblemInstance make_improve_casea_instance();  // 2D, jump slope orthogonal to the gate
GeneralizedResponse make_improve_casea_response();
ProblemInstance make_improve_caseb_instance();  // 1D, jump in the intercept
GeneralizedResponse make_improve_caseb_response();

// Experiment drivers. Each reads its JSON config text, writes CSV artifacts
// plus a report JSON under out_dir, and returns the report.
ExperimentReport run_ex48(const std::string& config_json, std::uint64_t seed,
                          const std::string& out_dir);
ExperimentReport run_ex45(const std::string& config_json, std::uint64_t seed,
                          const std::string& out_dir);
ExperimentReport run_improve_demo(const std::string& config_json, std::uint64_t seed,
                                  const std::string& out_dir);

}  // namespace relu_landscape
