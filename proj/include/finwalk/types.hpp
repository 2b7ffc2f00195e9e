#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace finwalk {

// Chart dimensions stay small (m <= 4), so vectors and matrices use
// fixed-capacity storage and never touch the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;
using Vec3 = Eigen::Vector3d;

inline Vec make_vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Error categories surfaced by the numerical kernels. The CLI maps these to
// exit codes, so the set is part of the tool's interface.
enum class Errc {
  singular_direction,
  not_positive_definite,
  ill_conditioned,
  no_covering_chart,
  left_atlas,
  energy_drift_exceeded,
  shooting_diverged,
  rejection_budget_exceeded,
  insufficient_steps,
  out_of_horizon,
  stencil_left_chart,
  navigation_too_fast,
  invalid_config,
  invalid_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

inline const char* tool_version() { return "0.1.0"; }

}  // namespace finwalk
