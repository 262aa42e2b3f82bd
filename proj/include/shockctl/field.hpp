#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shockctl {

struct Interval {
  double left;
  double right;
  double length() const { return right - left; }
};

/// Samples on a uniform lattice of n_cells + 1 nodes spanning a closed interval,
/// including both endpoints. Point values and integrals use the piecewise-linear
/// interpolant through the nodes.
class NodalField {
public:
  NodalField() = default;
  NodalField(Interval domain, std::vector<double> values);

  static NodalField constant(Interval domain, std::size_t n_cells, double value);

  template <class F>
  static NodalField sample(Interval domain, std::size_t n_cells, F&& f) {
    std::vector<double> v(n_cells + 1);
    const double h = domain.length() / static_cast<double>(n_cells);
    for (std::size_t i = 0; i <= n_cells; ++i) {
      v[i] = f(i == n_cells ? domain.right : domain.left + static_cast<double>(i) * h);
    }
    return NodalField(domain, std::move(v));
  }

  const Interval& domain() const { return domain_; }
  std::size_t n_cells() const { return values_.size() - 1; }
  std::size_t n_nodes() const { return values_.size(); }
  double spacing() const { return domain_.length() / static_cast<double>(n_cells()); }
  double node(std::size_t i) const;

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Linear interpolation. Throws DomainError outside the domain (beyond a
  /// rounding-level slack).
  double at(double x) const;
  /// Exact integral of the interpolant over [a, b] (a may exceed b).
  double integral(double a, double b) const;

  /// Same lattice, values shifted by -offset (density -> deviation and back).
  NodalField minus(double offset) const;

private:
  Interval domain_{0.0, 1.0};
  std::vector<double> values_;
};

/// Running integral of a NodalField's interpolant from the left end, O(1) per query.
class FieldPrimitive {
public:
  explicit FieldPrimitive(const NodalField& field);
  double operator()(double x) const;
  double integral(double a, double b) const { return (*this)(b) - (*this)(a); }

private:
  const NodalField* field_;
  std::vector<double> cumulative_;
};

/// Adds scale * (node weights of the functional f -> integral of interpolant over
/// [a, b]) into weights (size n_cells + 1).
void add_integral_weights(Interval domain, std::size_t n_cells, double a, double b,
                          double scale, std::span<double> weights);

/// d/dx at nodes: centred differences inside, one-sided second order at the ends.
std::vector<double> nodal_derivative(const NodalField& field);

/// Locates x: returns cell index in [0, n-1] and local coordinate theta in [0, 1].
struct CellLocation {
  std::size_t cell;
  double theta;
};
CellLocation locate(Interval domain, std::size_t n_cells, double x);

} // namespace shockctl
