#pragma once

#include <string>

#include "gricci/algebra.hpp"
#include "gricci/diagrams.hpp"
#include "gricci/flow.hpp"
#include "gricci/verify.hpp"

namespace gricci {

/// JSON serialization. Doubles are emitted with shortest round-trip
/// precision, so identical runs produce identical bytes.
std::string matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const std::string& text);

std::string graph_to_json(const SignedGraph& g);
SignedGraph graph_from_json(const std::string& text);

std::string estimate_to_json(const MCEstimate& est);

std::string scan_to_json(const ScanResult& scan);

/// CSV trajectory: header s,residual,tau_0_0,...; one row per state.
std::string trajectory_to_csv(const FlowTrajectory& traj);

/// Stable hex hash of a parameter string (FNV-1a), for run manifests.
std::string params_hash(const std::string& params);

/// Run manifest: {command, params, params_hash, seed, wall_time, version}.
std::string make_manifest(const std::string& command, const std::string& params_json,
                          std::uint64_t seed, double wall_time);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace gricci
