#include "hyperham/sampled_form.hpp"

#include <cmath>
#include <utility>

namespace hyperham {

double SampledValues::max_abs() const {
  std::vector<double> origin(form.dimension(), 0.0);
  return form.max_abs_at<double>(origin);
}

SampledForm::SampledForm(int dimension, int degree, double step, std::optional<Domain> domain)
    : dimension_(dimension), degree_(degree), step_(step), domain_(std::move(domain)) {
  if (dimension < 0 || dimension > kMaxVariables) throw StructuralError("sampled form: bad dimension");
  if (degree < 0) throw StructuralError("sampled form: negative degree");
  if (!(step > 0.0)) throw StructuralError("sampled form: step must be positive");
  if (domain_ && (static_cast<int>(domain_->lower.size()) != dimension ||
                  static_cast<int>(domain_->upper.size()) != dimension)) {
    throw StructuralError("sampled form: domain box dimension mismatch");
  }
}

SampledForm SampledForm::from_form(const Form<double>& form, double step, std::optional<Domain> domain) {
  SampledForm out(form.dimension(), form.degree(), step, std::move(domain));
  for (const auto& [index, c] : form.terms()) {
    out.add(index, [c](std::span<const double> x) { return Sample{c.evaluate<double>(x), false}; });
  }
  return out;
}

SampledForm SampledForm::from_function(int dimension, ScalarFunction f, double step, std::optional<Domain> domain) {
  SampledForm out(dimension, 0, step, std::move(domain));
  out.add(MultiIndex{}, [f = std::move(f)](std::span<const double> x) { return Sample{f(x), false}; });
  return out;
}

void SampledForm::add(MultiIndex index, SampledCoefficient c) {
  if (index.degree() != degree_) throw StructuralError("sampled form: term degree mismatch");
  auto it = terms_.find(index);
  if (it == terms_.end()) {
    terms_.emplace(index, std::move(c));
    return;
  }
  it->second = [a = std::move(it->second), b = std::move(c)](std::span<const double> x) {
    Sample sa = a(x);
    Sample sb = b(x);
    return Sample{sa.value + sb.value, sa.reduced_accuracy || sb.reduced_accuracy};
  };
}

SampledValues SampledForm::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) throw StructuralError("sampled form: point dimension mismatch");
  SampledValues out{Form<double>(dimension_, degree_), false};
  for (const auto& [index, c] : terms_) {
    Sample s = c(x);
    if (!std::isfinite(s.value)) throw NumericError("sampled form: non-finite coefficient at " + index.to_string());
    out.reduced_accuracy = out.reduced_accuracy || s.reduced_accuracy;
    out.form.add(index, Polynomial<double>::constant(dimension_, s.value));
  }
  return out;
}

Sample partial_difference(const SampledCoefficient& f, std::span<const double> x, int axis, double step,
                          const std::optional<Domain>& domain) {
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](double offset) {
    p[axis] = x[axis] + offset;
    return f(p);
  };
  const bool low_ok = !domain || x[axis] - step >= domain->lower[axis];
  const bool high_ok = !domain || x[axis] + step <= domain->upper[axis];
  if (low_ok && high_ok) {
    Sample a = at(step);
    Sample b = at(-step);
    return {(a.value - b.value) / (2.0 * step), a.reduced_accuracy || b.reduced_accuracy};
  }
  // Second-order one-sided stencil pointing into the domain.
  const double dir = high_ok ? 1.0 : -1.0;
  Sample f0 = at(0.0);
  Sample f1 = at(dir * step);
  Sample f2 = at(dir * 2.0 * step);
  double d = dir * (-3.0 * f0.value + 4.0 * f1.value - f2.value) / (2.0 * step);
  return {d, true};
}

SampledForm wedge(const SampledForm& a, const SampledForm& b) {
  if (a.dimension() != b.dimension()) throw StructuralError("wedge: dimension mismatch");
  SampledForm out = a.sibling(a.degree() + b.degree());
  if (a.degree() + b.degree() > a.dimension()) return out;
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      if (!ia.disjoint(ib)) continue;
      const double sign = wedge_sign(ia, ib);
      out.add(ia | ib, [ca, cb, sign](std::span<const double> x) {
        Sample sa = ca(x);
        Sample sb = cb(x);
        return Sample{sign * sa.value * sb.value, sa.reduced_accuracy || sb.reduced_accuracy};
      });
    }
  }
  return out;
}

SampledForm interior(const SampledField& v, const SampledForm& a) {
  if (static_cast<int>(v.size()) != a.dimension()) throw StructuralError("interior: dimension mismatch");
  if (a.degree() == 0) return a.sibling(0);
  SampledForm out = a.sibling(a.degree() - 1);
  for (const auto& [index, c] : a.terms()) {
    for (int axis : index.indices()) {
      if (!v[axis]) continue;
      const double sign = (index.rank_below(axis) & 1) ? -1.0 : 1.0;
      out.add(index.without(axis), [c, vi = v[axis], sign](std::span<const double> x) {
        Sample s = c(x);
        return Sample{sign * vi(x) * s.value, s.reduced_accuracy};
      });
    }
  }
  return out;
}

SampledForm exterior_derivative(const SampledForm& a) {
  SampledForm out = a.sibling(a.degree() + 1);
  if (a.degree() >= a.dimension()) return out;
  const double step = a.step();
  const auto domain = a.domain();
  for (const auto& [index, c] : a.terms()) {
    for (int j = 0; j < a.dimension(); ++j) {
      if (index.contains(j)) continue;
      const double sign = (index.rank_below(j) & 1) ? -1.0 : 1.0;
      out.add(index.with(j), [c, j, sign, step, domain](std::span<const double> x) {
        Sample s = partial_difference(c, x, j, step, domain);
        return Sample{sign * s.value, s.reduced_accuracy};
      });
    }
  }
  return out;
}

SampledForm lie_derivative(const SampledField& v, const SampledForm& a) {
  SampledForm second = interior(v, exterior_derivative(a));
  if (a.degree() == 0) return second;
  SampledForm out = exterior_derivative(interior(v, a));
  for (const auto& [index, c] : second.terms()) out.add(index, c);
  return out;
}

}  // namespace hyperham
