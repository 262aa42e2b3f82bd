#include "shockctl/history.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shockctl/errors.hpp"

namespace shockctl {

InputHistory::InputHistory(double horizon) : horizon_(horizon) {
  if (!(horizon > 0.0)) {
    throw ConfigError("history horizon must be positive");
  }
}

void InputHistory::push(double t, double value) {
  if (samples_.empty()) {
    samples_.push_back({t, value, 0.0});
    return;
  }
  const Node& last = samples_.back();
  if (!(t > last.t)) {
    throw ConfigError("history timestamps must be strictly increasing");
  }
  samples_.push_back({t, value, last.cumulative + 0.5 * (t - last.t) * (last.value + value)});
  // Keep exactly one sample at or before the horizon edge.
  const double edge = t - horizon_;
  while (samples_.size() > 2 && samples_[1].t <= edge) {
    samples_.pop_front();
  }
}

InputHistory::Sample InputHistory::oldest() const {
  if (samples_.empty()) {
    throw ConfigError("history is empty");
  }
  return {samples_.front().t, samples_.front().value};
}

InputHistory::Sample InputHistory::newest() const {
  if (samples_.empty()) {
    throw ConfigError("history is empty");
  }
  return {samples_.back().t, samples_.back().value};
}

void InputHistory::check_lookback(double t) const {
  if (samples_.empty()) {
    throw ConfigError("history is empty");
  }
  const double first = samples_.front().t;
  if (t < first - 1e-9 * std::max(1.0, std::abs(first))) {
    throw ConfigError("history underflow: requested t = " + std::to_string(t) +
                      " s, oldest stored sample at " + std::to_string(first) + " s");
  }
}

double InputHistory::value_at(double t, const std::optional<Sample>& pending) const {
  check_lookback(t);
  const Node& last = samples_.back();
  if (t >= last.t) {
    if (pending && pending->t > last.t) {
      if (t >= pending->t) {
        return pending->value;
      }
      const double theta = (t - last.t) / (pending->t - last.t);
      return last.value + theta * (pending->value - last.value);
    }
    return last.value;
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double x, const Node& n) { return x < n.t; });
  if (it == samples_.begin()) {
    return samples_.front().value;
  }
  const Node& hi = *it;
  const Node& lo = *(it - 1);
  const double theta = (t - lo.t) / (hi.t - lo.t);
  return lo.value + theta * (hi.value - lo.value);
}

double InputHistory::primitive(double t, const std::optional<Sample>& pending) const {
  check_lookback(t);
  const Node& last = samples_.back();
  if (t >= last.t) {
    if (pending && pending->t > last.t) {
      const double tp = std::min(t, pending->t);
      const double vp = value_at(tp, pending);
      double acc = last.cumulative + 0.5 * (tp - last.t) * (last.value + vp);
      if (t > pending->t) {
        acc += (t - pending->t) * pending->value;
      }
      return acc;
    }
    return last.cumulative + (t - last.t) * last.value;
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double x, const Node& n) { return x < n.t; });
  if (it == samples_.begin()) {
    return samples_.front().cumulative;
  }
  const Node& hi = *it;
  const Node& lo = *(it - 1);
  const double theta = (t - lo.t) / (hi.t - lo.t);
  const double v = lo.value + theta * (hi.value - lo.value);
  return lo.cumulative + 0.5 * (t - lo.t) * (lo.value + v);
}

double InputHistory::at(double t) const { return value_at(t, std::nullopt); }

double InputHistory::at(double t, Sample pending) const { return value_at(t, pending); }

double InputHistory::integral(double t0, double t1) const {
  return primitive(t1, std::nullopt) - primitive(t0, std::nullopt);
}

double InputHistory::integral(double t0, double t1, Sample pending) const {
  return primitive(t1, pending) - primitive(t0, pending);
}

} // namespace shockctl
