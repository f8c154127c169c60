#include "lexibr/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace lexibr {

DecisionArray to_array(const Decision& d) {
  return {d.state.px,  d.state.py,       d.state.heading,
          d.state.speed, d.control.accel, d.control.yaw_rate};
}

Decision from_array(std::span<const double, kDecisionDim> v) {
  return Decision{AgentState{v[0], v[1], v[2], v[3]}, ControlInput{v[4], v[5]}};
}

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

bool is_finite(const AgentState& s) {
  return std::isfinite(s.px) && std::isfinite(s.py) && std::isfinite(s.heading) &&
         std::isfinite(s.speed);
}

bool is_finite(const ControlInput& u) {
  return std::isfinite(u.accel) && std::isfinite(u.yaw_rate);
}

AgentState step(const AgentState& s, const ControlInput& u, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step: dt must be finite and positive");
  }
  if (!is_finite(s) || !is_finite(u)) {
    throw std::invalid_argument("step: non-finite state or control");
  }
  return AgentState{s.px + dt * s.speed * std::cos(s.heading),
                    s.py + dt * s.speed * std::sin(s.heading),
                    wrap_angle(s.heading + dt * u.yaw_rate), s.speed + dt * u.accel};
}

Trajectory rollout(const AgentState& initial, std::span<const ControlInput> controls,
                   double dt) {
  if (controls.empty()) throw std::invalid_argument("rollout: empty control sequence");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("rollout: dt must be finite and positive");
  }
  if (!is_finite(initial)) throw std::invalid_argument("rollout: non-finite initial state");
  Trajectory out;
  out.reserve(controls.size());
  AgentState x = initial;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    if (t > 0) x = step(out.back().state, out.back().control, dt);
    out.push_back(Decision{x, controls[t]});
  }
  if (!is_finite(out.back().control)) throw std::invalid_argument("rollout: non-finite control");
  return out;
}

std::vector<ControlInput> controls_of(const Trajectory& traj) {
  std::vector<ControlInput> out;
  out.reserve(traj.size());
  for (const auto& d : traj) out.push_back(d.control);
  return out;
}

}  // namespace lexibr
