#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "relu_landscape/measures.hpp"
#include "relu_landscape/networks.hpp"
#include "relu_landscape/responses.hpp"
#include "relu_landscape/training.hpp"

namespace relu_landscape {

// JSON payloads. Schema violations throw std::runtime_error with the
// offending key in the message.
std::string to_json(const NetworkConfig& w);
std::string to_json(const EffectiveTuple& t);
std::string to_json(const GeneralizedResponse& r);
NetworkConfig network_from_json(const std::string& text);
EffectiveTuple tuple_from_json(const std::string& text);
GeneralizedResponse genresponse_from_json(const std::string& text);

/// Builds a problem instance from its declarative JSON (built-in density,
/// loss, and target ids plus parameters); validates the result.
ProblemInstance instance_from_json(const std::string& text);

/// A response file holds either a network ("w1" present) or a generalized
/// response ("terms" present).
using LoadedResponse = std::variant<NetworkConfig, GeneralizedResponse>;
LoadedResponse response_from_json(const std::string& text);
double eval_loaded(const LoadedResponse& r, const Vec& x);
std::size_t loaded_d_in(const LoadedResponse& r);

/// CSV trace with header iter,err,norm_inf,step_size.
std::string train_record_csv(const TrainRecord& rec);
/// Sidecar metadata for a training run.
std::string train_metadata_json(const TrainConfig& config, const QuadratureGrid& grid,
                                const TrainRecord& rec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// FNV-1a, used for the input hashes in experiment reports.
std::uint64_t fnv1a(const std::string& bytes);

std::string format_double(double v);  // deterministic shortest round-trip

}  // namespace relu_landscape
