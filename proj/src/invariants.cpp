#include "hyperham/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "hyperham/errors.hpp"
#include "hyperham/sampled_form.hpp"

namespace hyperham {
namespace {

constexpr const char* kMixedSign = "mixed-sign structure: s undefined";

template <class C>
Polynomial<C> constant(int m, const C& c) {
  return Polynomial<C>::constant(m, c);
}

template <class C>
Form<C> differential_of(const Polynomial<C>& f, int m) {
  return exterior_derivative(Form<C>::scalar(m, f.extended(m)));
}

}  // namespace

template <class C>
Form<C> omega(const BasicStructure<C>& s, int alpha) {
  const int m = s.dimension();
  const Matrix<C>& J = s.J(alpha);
  Form<C> out(m, 2);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (!is_zero(C(J(i, j)))) out.add(MultiIndex{i, j}, constant(m, C(J(i, j))));
    }
  }
  return out;
}

template <class C>
std::array<Form<C>, 3> build_zeta(const BasicStructure<C>& s, int cap) {
  check_dimension_cap(s.dimension(), cap);
  const int factors = 2 * s.n() - 1;
  std::array<Form<C>, 3> out{Form<C>(s.dimension(), 0), Form<C>(s.dimension(), 0), Form<C>(s.dimension(), 0)};
  for (int a = 0; a < 3; ++a) out[a] = wedge_power(omega(s, a), factors);
  return out;
}

template <class C>
PolynomialField<C> polynomial_hyperfield(const BasicStructure<C>& s, const PolynomialTriple<C>& H) {
  const int m = s.dimension();
  PolynomialField<C> X(m, Polynomial<C>(m));
  for (int a = 0; a < 3; ++a) {
    if (H[a].variables() > m) throw StructuralError("hyperfield: Hamiltonian has too many variables");
    const Polynomial<C> h = H[a].extended(m);
    const Matrix<C> M = s.field_map(a);
    for (int j = 0; j < m; ++j) {
      Polynomial<C> dj = h.derivative(j);
      if (dj.is_zero()) continue;
      for (int i = 0; i < m; ++i) {
        if (!is_zero(C(M(i, j)))) X[i] += dj * C(M(i, j));
      }
    }
  }
  return X;
}

template <class C>
PolynomialField<C> equation_field(const BasicStructure<C>& s, const PolynomialTriple<C>& H) {
  PolynomialField<C> X = polynomial_hyperfield(s, H);
  if (s.orientation() < 0) {
    for (auto& c : X) c = -c;
  }
  return X;
}

template <class C>
Form<C> build_theta(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap) {
  const auto zeta = build_zeta(s, cap);
  const int m = s.dimension();
  Form<C> theta(m, m - 1);
  for (int a = 0; a < 3; ++a) {
    if (H[a].variables() > m) throw StructuralError("theta: Hamiltonian has too many variables");
    theta += wedge(differential_of(H[a], m), zeta[a]);
  }
  return theta;
}

template <class C>
Form<C> field_to_form(const PolynomialField<C>& X) {
  const int m = static_cast<int>(X.size());
  return interior(X, Form<C>::volume(m));
}

template <class C>
PolynomialField<C> form_to_field(const Form<C>& chi) {
  const int m = chi.dimension();
  if (chi.degree() != m - 1) {
    throw StructuralError("form_to_field: expected degree " + std::to_string(m - 1) + ", got " +
                          std::to_string(chi.degree()));
  }
  const MultiIndex all = MultiIndex::full(m);
  PolynomialField<C> X;
  X.reserve(m);
  for (int i = 0; i < m; ++i) {
    Polynomial<C> c = chi.coefficient(all.without(i));
    X.push_back((i & 1) ? -c : c);
  }
  return X;
}

template <class C>
PolynomialField<C> commutator(const PolynomialField<C>& v, const PolynomialField<C>& w) {
  if (v.size() != w.size()) throw StructuralError("commutator: dimension mismatch");
  const int m = static_cast<int>(v.size());
  PolynomialField<C> out(m, Polynomial<C>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (!v[j].is_zero()) out[i] += v[j] * w[i].derivative(j);
      if (!w[j].is_zero()) out[i] -= w[j] * v[i].derivative(j);
    }
  }
  return out;
}

template <class C>
Form<C> bracket(const Form<C>& chi, const Form<C>& psi) {
  if (chi.dimension() != psi.dimension()) throw StructuralError("bracket: dimension mismatch");
  return field_to_form(commutator(form_to_field(chi), form_to_field(psi)));
}

template <class C>
Form<C> sigma(const BasicStructure<C>& s, int alpha) {
  const int m = s.dimension();
  const Matrix<C>& J = s.J(alpha);
  Form<C> out(m, 1);
  const C half = C(1) / C(2);
  for (int j = 0; j < m; ++j) {
    Polynomial<C> c(m);
    for (int i = 0; i < m; ++i) {
      if (!is_zero(C(J(i, j)))) c += Polynomial<C>::variable(m, i) * (half * C(J(i, j)));
    }
    out.add(MultiIndex{j}, c);
  }
  return out;
}

template <class C>
Form<C> build_phi(const BasicStructure<C>& s, int cap) {
  if (s.mixed()) throw StructuralError(kMixedSign);
  const int m = s.dimension() + 1;
  check_dimension_cap(m, cap);
  const auto zeta = build_zeta(s, cap);
  Form<C> phi(m, s.dimension() - 1);
  for (int a = 0; a < 3; ++a) phi += wedge(sigma(s, a).extended(m), zeta[a].extended(m));
  return phi;
}

template <class C>
Form<C> build_vartheta(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap) {
  Form<C> out = build_phi(s, cap);
  const int m = s.dimension() + 1;
  const auto zeta = build_zeta(s, cap);
  const Form<C> dt = Form<C>::differential(m, m - 1);
  const C factor = C(6 * s.orientation() * s.n());
  for (int a = 0; a < 3; ++a) {
    if (H[a].variables() > s.dimension()) throw StructuralError("vartheta: Hamiltonian has too many variables");
    if (H[a].is_zero()) continue;
    out += (H[a].extended(m) * factor) * wedge(zeta[a].extended(m), dt);
  }
  return out;
}

template <class C>
PolynomialField<C> extended_field(const PolynomialField<C>& X) {
  const int m = static_cast<int>(X.size()) + 1;
  PolynomialField<C> Z;
  Z.reserve(m);
  for (const auto& c : X) Z.push_back(c.extended(m));
  Z.push_back(constant(m, C(1)));
  return Z;
}

template <class C>
Form<C> theorem1_form(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap) {
  const Form<C> dv = exterior_derivative(build_vartheta(s, H, cap));
  return interior(extended_field(equation_field(s, H)), dv);
}

template <class C>
Form<C> theorem2_form(const BasicStructure<C>& s, const PolynomialTriple<C>& H, int cap) {
  return lie_derivative(polynomial_hyperfield(s, H), build_theta(s, H, cap));
}

template <class C>
PolynomialTriple<C> polynomial_triple(const HamiltonianTriple& H) {
  auto polys = H.polynomials();
  if (!polys) {
    throw UnsupportedError("form-level checks need a polynomial triple, got " + to_string(H.kind()) +
                           " (use sampled mode)");
  }
  PolynomialTriple<C> out{Polynomial<C>(H.dimension()), Polynomial<C>(H.dimension()),
                          Polynomial<C>(H.dimension())};
  for (int a = 0; a < 3; ++a) out[a] = (*polys)[a].template cast<C>().extended(H.dimension());
  return out;
}

#define HYPERHAM_INSTANTIATE(C)                                                                  \
  template Form<C> omega(const BasicStructure<C>&, int);                                         \
  template std::array<Form<C>, 3> build_zeta(const BasicStructure<C>&, int);                     \
  template PolynomialField<C> polynomial_hyperfield(const BasicStructure<C>&, const PolynomialTriple<C>&); \
  template PolynomialField<C> equation_field(const BasicStructure<C>&, const PolynomialTriple<C>&);      \
  template Form<C> build_theta(const BasicStructure<C>&, const PolynomialTriple<C>&, int);       \
  template Form<C> field_to_form(const PolynomialField<C>&);                                     \
  template PolynomialField<C> form_to_field(const Form<C>&);                                     \
  template PolynomialField<C> commutator(const PolynomialField<C>&, const PolynomialField<C>&);  \
  template Form<C> bracket(const Form<C>&, const Form<C>&);                                      \
  template Form<C> sigma(const BasicStructure<C>&, int);                                         \
  template Form<C> build_phi(const BasicStructure<C>&, int);                                     \
  template Form<C> build_vartheta(const BasicStructure<C>&, const PolynomialTriple<C>&, int);    \
  template PolynomialField<C> extended_field(const PolynomialField<C>&);                         \
  template Form<C> theorem1_form(const BasicStructure<C>&, const PolynomialTriple<C>&, int);     \
  template Form<C> theorem2_form(const BasicStructure<C>&, const PolynomialTriple<C>&, int);     \
  template PolynomialTriple<C> polynomial_triple(const HamiltonianTriple&);

HYPERHAM_INSTANTIATE(Rational)
HYPERHAM_INSTANTIATE(double)

#undef HYPERHAM_INSTANTIATE

std::string to_string(ResidualMode mode) {
  switch (mode) {
    case ResidualMode::Exact:
      return "rational";
    case ResidualMode::Float:
      return "float";
    case ResidualMode::Sampled:
      return "sampled";
  }
  return "?";
}

ResidualMode parse_residual_mode(const std::string& text) {
  if (text == "rational" || text == "exact") return ResidualMode::Exact;
  if (text == "float") return ResidualMode::Float;
  if (text == "sampled") return ResidualMode::Sampled;
  throw StructuralError("unknown residual mode '" + text + "' (expected rational, float or sampled)");
}

double default_residual_tolerance(ResidualMode mode) {
  switch (mode) {
    case ResidualMode::Exact:
      return 0.0;
    case ResidualMode::Float:
      return kFloatResidualTolerance;
    case ResidualMode::Sampled:
      return kSampledResidualTolerance;
  }
  return 0.0;
}

// Polynomial residual forms for Exact (C = Rational) and Float (C = double).
template <class C>
struct PolynomialResiduals {
  std::optional<Form<C>> t1;
  std::string t1_error;
  Form<C> t2;
  Form<C> dtheta;

  PolynomialResiduals(const Structure& s, const HamiltonianTriple& H, int cap)
      : t2(s.dimension(), 0), dtheta(s.dimension(), 0) {
    const BasicStructure<C> S = s.template cast<C>();
    const auto P = polynomial_triple<C>(H);
    const Form<C> theta = build_theta(S, P, cap);
    dtheta = exterior_derivative(theta);
    t2 = lie_derivative(polynomial_hyperfield(S, P), theta);
    try {
      t1 = theorem1_form(S, P, cap);
    } catch (const StructuralError& e) {
      t1_error = e.what();
    }
  }

  static double at(const Form<C>& f, const std::vector<double>& x) {
    if (f.is_zero()) return 0.0;
    std::vector<C> pt(x.begin(), x.end());
    if constexpr (is_rational_v<C>) {
      for (std::size_t i = 0; i < x.size(); ++i) pt[i] = Rational(x[i]);
    }
    return to_double(f.template max_abs_at<C>(std::span<const C>(pt)));
  }
};

// Pointwise checks for any triple, built from gradient oracles.
struct SampledResiduals {
  Structure s;
  HamiltonianTriple H;
  FiniteDifferenceOptions fd;
  VectorField X;
  std::array<Form<double>, 3> zeta;
  std::optional<Form<double>> dphi;
  std::string t1_error;
  std::optional<SampledForm> t2;
  std::optional<SampledForm> dtheta;

  static FiniteDifferenceOptions options_for(const HamiltonianTriple& H) {
    FiniteDifferenceOptions fd;
    if (!H.exact_gradients()) {
      fd.step = 1e-4;
      fd.richardson = true;
    }
    return fd;
  }

  SampledResiduals(const Structure& s_, const HamiltonianTriple& H_, int cap)
      : s(s_), H(H_), fd(options_for(H_)), X(hyperfield(s_, H_, fd)), zeta(build_zeta(s_, cap)) {
    const int m = s.dimension();
    try {
      dphi = exterior_derivative(build_phi(s, cap));
    } catch (const StructuralError& e) {
      t1_error = e.what();
    }
    // Outer differences sit on top of differenced gradients when no oracle exists.
    const double step = H.exact_gradients() ? SampledForm::kDefaultStep : 1e-3;
    SampledForm theta(m, m - 1, step);
    auto gradient_at = [this](int a, std::span<const double> x) {
      return H.gradient(a, Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())), fd);
    };
    for (int a = 0; a < 3; ++a) {
      for (const auto& [index, c] : zeta[a].terms()) {
        const double z = c.constant_term();
        for (int j = 0; j < m; ++j) {
          if (index.contains(j)) continue;
          const double w = z * wedge_sign(MultiIndex{j}, index);
          theta.add(MultiIndex{j} | index, [gradient_at, a, j, w](std::span<const double> x) {
            return Sample{w * gradient_at(a, x)[j], false};
          });
        }
      }
    }
    SampledField field;
    for (int i = 0; i < m; ++i) {
      field.push_back([this, i](std::span<const double> x) {
        return X(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())))[i];
      });
    }
    t2 = lie_derivative(field, theta);
    dtheta = exterior_derivative(theta);
  }

  double theorem1(const Eigen::VectorXd& x, double t) const {
    const int dim = s.dimension();
    const int m = dim + 1;
    Form<double> r = dphi->extended(m);
    const Form<double> dt = Form<double>::differential(m, m - 1);
    const double factor = 6.0 * s.orientation() * s.n();
    for (int a = 0; a < 3; ++a) {
      const Eigen::VectorXd g = H.gradient(a, x, fd);
      Form<double> dH(m, 1);
      for (int i = 0; i < dim; ++i) dH.add(MultiIndex{i}, Polynomial<double>::constant(m, g[i]));
      r += factor * wedge(wedge(dH, zeta[a].extended(m)), dt);
    }
    const Eigen::VectorXd f = static_cast<double>(s.orientation()) * X(x);
    std::vector<double> z(f.data(), f.data() + dim);
    z.push_back(1.0);
    std::vector<double> pt(x.data(), x.data() + dim);
    pt.push_back(t);
    const Form<double> res = interior(constant_field<double>(m, z), r);
    return res.max_abs_at<double>(std::span<const double>(pt));
  }
};

struct TheoremChecker::Impl {
  std::optional<PolynomialResiduals<Rational>> exact;
  std::optional<PolynomialResiduals<double>> floating;
  std::optional<SampledResiduals> sampled;
};

TheoremChecker::TheoremChecker(const Structure& s, const HamiltonianTriple& H, ResidualMode mode, int cap)
    : mode_(mode), dimension_(s.dimension()), impl_(std::make_unique<Impl>()) {
  if (H.dimension() != s.dimension()) throw StructuralError("theorem checks: triple/structure dimension mismatch");
  switch (mode) {
    case ResidualMode::Exact:
      impl_->exact.emplace(s, H, cap);
      break;
    case ResidualMode::Float:
      impl_->floating.emplace(s, H, cap);
      break;
    case ResidualMode::Sampled:
      impl_->sampled.emplace(s, H, cap);
      break;
  }
}

TheoremChecker::~TheoremChecker() = default;
TheoremChecker::TheoremChecker(TheoremChecker&&) noexcept = default;
TheoremChecker& TheoremChecker::operator=(TheoremChecker&&) noexcept = default;

namespace {

void check_point(const Eigen::VectorXd& x, int dim) {
  if (x.size() != dim) throw StructuralError("theorem checks: point has wrong dimension");
  if (!x.allFinite()) throw NumericError("theorem checks: non-finite point");
}

}  // namespace

double TheoremChecker::theorem1(const Eigen::VectorXd& x, double t) const {
  check_point(x, dimension_);
  std::vector<double> pt(x.data(), x.data() + x.size());
  pt.push_back(t);
  if (impl_->exact) {
    if (!impl_->exact->t1) throw StructuralError(impl_->exact->t1_error);
    return PolynomialResiduals<Rational>::at(*impl_->exact->t1, pt);
  }
  if (impl_->floating) {
    if (!impl_->floating->t1) throw StructuralError(impl_->floating->t1_error);
    return PolynomialResiduals<double>::at(*impl_->floating->t1, pt);
  }
  if (!impl_->sampled->dphi) throw StructuralError(impl_->sampled->t1_error);
  return impl_->sampled->theorem1(x, t);
}

double TheoremChecker::theorem2(const Eigen::VectorXd& x) const {
  check_point(x, dimension_);
  std::vector<double> pt(x.data(), x.data() + x.size());
  if (impl_->exact) return PolynomialResiduals<Rational>::at(impl_->exact->t2, pt);
  if (impl_->floating) return PolynomialResiduals<double>::at(impl_->floating->t2, pt);
  return impl_->sampled->t2->evaluate(pt).max_abs();
}

double TheoremChecker::closedness(const Eigen::VectorXd& x) const {
  check_point(x, dimension_);
  std::vector<double> pt(x.data(), x.data() + x.size());
  if (impl_->exact) return PolynomialResiduals<Rational>::at(impl_->exact->dtheta, pt);
  if (impl_->floating) return PolynomialResiduals<double>::at(impl_->floating->dtheta, pt);
  return impl_->sampled->dtheta->evaluate(pt).max_abs();
}

bool TheoremChecker::theorem1_vanishes() const {
  if (impl_->exact) return impl_->exact->t1 && impl_->exact->t1->is_zero();
  if (impl_->floating) return impl_->floating->t1 && impl_->floating->t1->is_zero();
  return false;
}

bool TheoremChecker::theorem2_vanishes() const {
  if (impl_->exact) return impl_->exact->t2.is_zero();
  if (impl_->floating) return impl_->floating->t2.is_zero();
  return false;
}

bool TheoremChecker::theta_closed() const {
  if (impl_->exact) return impl_->exact->dtheta.is_zero();
  if (impl_->floating) return impl_->floating->dtheta.is_zero();
  return false;
}

double theorem1_residual(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x, double t,
                         ResidualMode mode) {
  return TheoremChecker(s, H, mode).theorem1(x, t);
}

double theorem2_residual(const Structure& s, const HamiltonianTriple& H, const Eigen::VectorXd& x,
                         ResidualMode mode) {
  return TheoremChecker(s, H, mode).theorem2(x);
}

std::vector<Eigen::VectorXd> suite_points(int dimension, int count, std::uint64_t seed, double box) {
  if (count < 0) throw StructuralError("suite: negative point count");
  if (!(box > 0.0)) throw StructuralError("suite: box must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box, box);
  std::uniform_real_distribution<double> time(0.0, box);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd p(dimension + 1);
    for (int i = 0; i < dimension; ++i) p[i] = coord(rng);
    p[dimension] = time(rng);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ResidualCheck> run_theorem_suite(const Structure& s, const HamiltonianTriple& H,
                                             const SuiteOptions& options) {
  if (options.points < 1) throw StructuralError("suite: need at least one point");
  TheoremChecker checker(s, H, options.mode, options.cap);
  const double tol = options.mode == ResidualMode::Exact
                         ? 0.0
                         : (options.tolerance < 0.0 ? default_residual_tolerance(options.mode) : options.tolerance);
  const int dim = s.dimension();
  std::vector<ResidualCheck> out;
  auto make = [&](const char* name) {
    ResidualCheck c;
    c.check = name;
    c.mode = options.mode;
    c.points = options.points;
    c.tolerance = tol;
    return c;
  };
  ResidualCheck t1 = make("theorem1"), t2 = make("theorem2"), closed = make("dTheta");
  const bool closedness = options.mode != ResidualMode::Sampled;
  for (const auto& p : suite_points(dim, options.points, options.seed, options.box)) {
    const Eigen::VectorXd x = p.head(dim);
    if (options.theorem1) t1.max_residual = std::max(t1.max_residual, checker.theorem1(x, p[dim]));
    if (options.theorem2) t2.max_residual = std::max(t2.max_residual, checker.theorem2(x));
    if (closedness) closed.max_residual = std::max(closed.max_residual, checker.closedness(x));
  }
  for (ResidualCheck* c : {&t1, &t2, &closed}) c->pass = c->max_residual <= tol;
  if (options.mode == ResidualMode::Exact) {
    // Exactness is a statement about the whole form, not just the sampled points.
    t1.pass = t1.pass && checker.theorem1_vanishes();
    t2.pass = t2.pass && checker.theorem2_vanishes();
    closed.pass = closed.pass && checker.theta_closed();
  }
  if (options.theorem1) out.push_back(t1);
  if (options.theorem2) out.push_back(t2);
  if (closedness) out.push_back(closed);
  return out;
}

}  // namespace hyperham
