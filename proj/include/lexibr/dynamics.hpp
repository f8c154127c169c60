#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace lexibr {

// Thrown when a computation meets a non-finite value it cannot recover from.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentState {
  double px = 0.0;       // m
  double py = 0.0;       // m
  double heading = 0.0;  // rad, wrapped to (-pi, pi]
  double speed = 0.0;    // m/s

  bool operator==(const AgentState&) const = default;
};

struct ControlInput {
  double accel = 0.0;     // m/s^2
  double yaw_rate = 0.0;  // rad/s

  bool operator==(const ControlInput&) const = default;
};

// z_t = [x_t, u_t]: the state at step t and the control applied from it.
struct Decision {
  AgentState state;
  ControlInput control;

  bool operator==(const Decision&) const = default;
};

using Trajectory = std::vector<Decision>;

inline constexpr int kStateDim = 4;
inline constexpr int kControlDim = 2;
inline constexpr int kDecisionDim = kStateDim + kControlDim;

// Flat layout of a decision: px, py, heading, speed, accel, yaw_rate.
using DecisionArray = std::array<double, kDecisionDim>;

DecisionArray to_array(const Decision& d);
Decision from_array(std::span<const double, kDecisionDim> values);

// Maps an angle to (-pi, pi].
double wrap_angle(double angle);

bool is_finite(const AgentState& s);
bool is_finite(const ControlInput& u);

// Explicit-Euler kinematic unicycle. Rejects dt <= 0 and non-finite input.
AgentState step(const AgentState& state, const ControlInput& control, double dt);

// Decision 0 pairs `initial` with controls[0]; each later state is the step of
// the previous decision. The result has one decision per control.
Trajectory rollout(const AgentState& initial, std::span<const ControlInput> controls,
                   double dt);

std::vector<ControlInput> controls_of(const Trajectory& traj);

}  // namespace lexibr
