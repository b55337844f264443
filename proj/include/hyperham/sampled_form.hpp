#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hyperham/exterior.hpp"

namespace hyperham {

/// Coefficient sample; `reduced_accuracy` is set when a finite-difference
/// stencil had to fall back to one-sided differences at the domain boundary.
struct Sample {
  double value = 0.0;
  bool reduced_accuracy = false;
};

using ScalarFunction = std::function<double(std::span<const double>)>;
using SampledCoefficient = std::function<Sample(std::span<const double>)>;

/// Axis-aligned box on which sampled coefficients may be evaluated.
struct Domain {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Constant-coefficient snapshot of a sampled form at one point.
struct SampledValues {
  Form<double> form;
  bool reduced_accuracy = false;

  double max_abs() const;
};

/// Exterior form whose coefficients are callables. The exterior derivative
/// uses central differences with step `step()`; everything else is exact in
/// the callables.
class SampledForm {
 public:
  static constexpr double kDefaultStep = 1e-5;

  SampledForm(int dimension, int degree, double step = kDefaultStep, std::optional<Domain> domain = {});

  static SampledForm from_form(const Form<double>& form, double step = kDefaultStep,
                               std::optional<Domain> domain = {});
  static SampledForm from_function(int dimension, ScalarFunction f, double step = kDefaultStep,
                                   std::optional<Domain> domain = {});

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  double step() const { return step_; }
  const std::optional<Domain>& domain() const { return domain_; }
  const std::map<MultiIndex, SampledCoefficient>& terms() const { return terms_; }

  /// Adds a coefficient to dx^index (summing with any existing one).
  void add(MultiIndex index, SampledCoefficient c);

  SampledValues evaluate(std::span<const double> x) const;

  /// Same metadata (dimension, step, domain) with a different degree.
  SampledForm sibling(int degree) const { return SampledForm(dimension_, degree, step_, domain_); }

 private:
  int dimension_;
  int degree_;
  double step_;
  std::optional<Domain> domain_;
  std::map<MultiIndex, SampledCoefficient> terms_;
};

using SampledField = std::vector<ScalarFunction>;

SampledForm wedge(const SampledForm& a, const SampledForm& b);
SampledForm interior(const SampledField& v, const SampledForm& a);
SampledForm exterior_derivative(const SampledForm& a);
SampledForm lie_derivative(const SampledField& v, const SampledForm& a);

/// Central (or, at the domain edge, one-sided) difference of `f` along `axis`.
Sample partial_difference(const SampledCoefficient& f, std::span<const double> x, int axis, double step,
                          const std::optional<Domain>& domain);

}  // namespace hyperham
