#pragma once

#include <cstddef>
#include <deque>
#include <optional>

namespace shockctl {

/// Timestamped boundary-input record. Values between samples are linearly
/// interpolated; after the newest sample the newest value is held. Samples older
/// than `horizon` behind the newest one are discarded (one is kept for
/// interpolation at the horizon edge).
class InputHistory {
public:
  struct Sample {
    double t;
    double value;
  };

  explicit InputHistory(double horizon);

  /// Requires t strictly greater than the newest stored time.
  void push(double t, double value);

  double at(double t) const;
  /// Exact integral of the interpolant over [t0, t1], t0 <= t1.
  double integral(double t0, double t1) const;

  /// Same queries with an extra provisional sample appended after the newest one.
  double at(double t, Sample pending) const;
  double integral(double t0, double t1, Sample pending) const;

  double horizon() const { return horizon_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  Sample oldest() const;
  Sample newest() const;

private:
  struct Node {
    double t;
    double value;
    double cumulative; // integral from an arbitrary origin up to t
  };

  double primitive(double t, const std::optional<Sample>& pending) const;
  double value_at(double t, const std::optional<Sample>& pending) const;
  void check_lookback(double t) const;

  double horizon_;
  std::deque<Node> samples_;
};

} // namespace shockctl
