#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "finwalk/generator.hpp"

namespace finwalk {

// Comment header prepended to every output file: tool version, resolved
// config, master seed, timestamp.
void write_header(std::ostream& out, const std::string& config_echo, std::uint64_t seed);

void write_paths_csv(std::ostream& out, const std::vector<WalkPath>& paths,
                     const std::string& config_echo, std::uint64_t seed);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const FinslerMetric& fm,
                          const std::string& config_echo, std::uint64_t seed);

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study,
                           const std::string& config_echo, std::uint64_t seed);

void write_exit_time_csv(std::ostream& out, const ExitTimeStudy& study,
                         const std::string& config_echo, std::uint64_t seed);

// Generator estimates (and optionally drifts) as a JSON document.
std::string estimates_json(const std::vector<GeneratorEstimate>& estimates,
                           const std::vector<Vec>& drifts, const std::string& config_echo,
                           std::uint64_t seed);

// Orthographic polyline projection of paths; spherical charts are projected
// through the embedding, flat charts use the first two coordinates.
void write_paths_svg(std::ostream& out, const std::vector<WalkPath>& paths, const Geometry& geo);

}  // namespace finwalk
