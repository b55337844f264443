#include "hyperham/fields.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "hyperham/errors.hpp"

namespace hyperham {
namespace {

std::string point_text(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

void require_finite(const Eigen::VectorXd& v, const char* what, int alpha, const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericError(std::string(what) + ": non-finite component " + std::to_string(i + 1) + " of H^" +
                         std::to_string(alpha + 1) + " at x = " + point_text(x));
    }
  }
}

void check_alpha(int alpha) {
  if (alpha < 0 || alpha > 2) throw StructuralError("triple index must be 0, 1 or 2");
}

void check_point(const Eigen::VectorXd& x, int dimension) {
  if (x.size() != dimension) {
    throw StructuralError("point has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(dimension));
  }
}

double fd_scale(double xi, double step) { return step * std::max(1.0, std::abs(xi)); }

// Central difference of a scalar function; optional Richardson extrapolation.
template <class F>
Eigen::VectorXd central_gradient(const F& f, const Eigen::VectorXd& x, const FiniteDifferenceOptions& fd) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto diff = [&](double h) {
      p[i] = x[i] + h;
      double up = f(p);
      p[i] = x[i] - h;
      double down = f(p);
      p[i] = x[i];
      return (up - down) / (2.0 * h);
    };
    const double h = fd_scale(x[i], fd.step);
    g[i] = fd.richardson ? (4.0 * diff(h / 2.0) - diff(h)) / 3.0 : diff(h);
  }
  return g;
}

// Symmetrized central-difference Jacobian of a vector function.
template <class F>
Eigen::MatrixXd central_jacobian(const F& f, const Eigen::VectorXd& x, double step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd p = x;
  Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = fd_scale(x[j], step);
    p[j] = x[j] + h;
    Eigen::VectorXd up = f(p);
    p[j] = x[j] - h;
    Eigen::VectorXd down = f(p);
    p[j] = x[j];
    J.col(j) = (up - down) / (2.0 * h);
  }
  return J;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

RationalPolynomial quadratic_polynomial(const Eigen::MatrixXd& D) {
  const int dim = static_cast<int>(D.rows());
  RationalPolynomial p(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (D(i, j) == 0.0) continue;
      Exponents e{};
      e[i] = static_cast<std::uint8_t>(e[i] + 1);
      e[j] = static_cast<std::uint8_t>(e[j] + 1);
      p.add_term(e, Rational(D(i, j)) / 2);
    }
  }
  return p;
}

// rho_p as polynomials in x.
std::vector<RationalPolynomial> radius_polynomials(int blocks) {
  const int dim = 4 * blocks;
  std::vector<RationalPolynomial> rho;
  for (int p = 0; p < blocks; ++p) {
    RationalPolynomial r(dim);
    for (int i = 0; i < 4; ++i) {
      Exponents e{};
      e[4 * p + i] = 2;
      r.add_term(e, Rational(1, 2));
    }
    rho.push_back(std::move(r));
  }
  return rho;
}

void check_radial_consistency(int blocks, const std::array<RadialFunction, 3>& H) {
  for (int a = 0; a < 3; ++a) {
    if (!H[a].value || !H[a].partials) {
      throw StructuralError("radial: H^" + std::to_string(a + 1) + " needs both value and partials");
    }
    for (int sample = 0; sample < 3; ++sample) {
      Eigen::VectorXd rho(blocks);
      for (int p = 0; p < blocks; ++p) rho[p] = 0.3 + 0.4 * p + 0.35 * sample;
      Eigen::VectorXd exact = H[a].partials(rho);
      if (exact.size() != blocks) throw StructuralError("radial: partials must have one entry per block");
      Eigen::VectorXd approx = central_gradient([&](const Eigen::VectorXd& r) { return H[a].value(r); }, rho,
                                                FiniteDifferenceOptions{1e-5, true});
      for (int p = 0; p < blocks; ++p) {
        if (std::abs(exact[p] - approx[p]) > 1e-6 * std::max(1.0, std::abs(exact[p]))) {
          throw StructuralError("radial: partial dH^" + std::to_string(a + 1) + "/drho_" + std::to_string(p + 1) +
                                " inconsistent with values (" + std::to_string(exact[p]) + " vs finite difference " +
                                std::to_string(approx[p]) + ")");
        }
      }
    }
  }
}

}  // namespace

std::string to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::Quadratic:
      return "quadratic";
    case HamiltonianKind::Radial:
      return "radial";
    case HamiltonianKind::Polynomial:
      return "polynomial";
    case HamiltonianKind::Generic:
      return "generic";
  }
  return "generic";
}

Eigen::VectorXd block_radii(const Eigen::VectorXd& x) {
  if (x.size() % 4 != 0) throw StructuralError("block_radii: dimension must be a multiple of 4");
  const Eigen::Index n = x.size() / 4;
  Eigen::VectorXd rho(n);
  for (Eigen::Index p = 0; p < n; ++p) rho[p] = 0.5 * x.segment(4 * p, 4).squaredNorm();
  return rho;
}

HamiltonianTriple HamiltonianTriple::quadratic(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2,
                                               const Eigen::MatrixXd& D3) {
  QuadraticHamiltonians q{{D1, D2, D3}};
  const Eigen::Index dim = D1.rows();
  for (int a = 0; a < 3; ++a) {
    const auto& D = q.D[a];
    if (D.rows() != dim || D.cols() != dim) throw StructuralError("quadratic: D matrices must share a square shape");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw StructuralError("quadratic: D" + std::to_string(a + 1) + " is not symmetric");
    }
  }
  return HamiltonianTriple(static_cast<int>(dim), std::move(q));
}

HamiltonianTriple HamiltonianTriple::radial(int blocks, std::array<RadialFunction, 3> H) {
  if (blocks < 1) throw StructuralError("radial: need at least one block");
  check_radial_consistency(blocks, H);
  RadialHamiltonians r;
  r.blocks = blocks;
  r.H = std::move(H);
  return HamiltonianTriple(4 * blocks, std::move(r));
}

HamiltonianTriple HamiltonianTriple::radial_polynomial(int blocks, const std::array<RationalPolynomial, 3>& H) {
  if (blocks < 1) throw StructuralError("radial: need at least one block");
  std::array<RadialFunction, 3> fns;
  std::array<RationalPolynomial, 3> polys;
  for (int a = 0; a < 3; ++a) {
    if (H[a].variables() > blocks) throw StructuralError("radial: polynomial uses more rho variables than blocks");
    polys[a] = H[a].extended(blocks);
    auto value = polys[a].cast<double>();
    std::vector<Polynomial<double>> first;
    std::vector<std::vector<Polynomial<double>>> second;
    for (int p = 0; p < blocks; ++p) {
      first.push_back(value.derivative(p));
      second.emplace_back();
      for (int q = 0; q < blocks; ++q) second.back().push_back(first.back().derivative(q));
    }
    auto eval = [](const Polynomial<double>& poly, const Eigen::VectorXd& rho) {
      return poly.evaluate<double>(std::span<const double>(rho.data(), rho.size()));
    };
    fns[a].value = [value, eval](const Eigen::VectorXd& rho) { return eval(value, rho); };
    fns[a].partials = [first, eval](const Eigen::VectorXd& rho) {
      Eigen::VectorXd out(first.size());
      for (std::size_t p = 0; p < first.size(); ++p) out[p] = eval(first[p], rho);
      return out;
    };
    fns[a].second_partials = [second, eval](const Eigen::VectorXd& rho) {
      const auto n = static_cast<Eigen::Index>(second.size());
      Eigen::MatrixXd out(n, n);
      for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) out(p, q) = eval(second[p][q], rho);
      }
      return out;
    };
  }
  RadialHamiltonians r;
  r.blocks = blocks;
  r.H = std::move(fns);
  r.polynomials = std::move(polys);
  return HamiltonianTriple(4 * blocks, std::move(r));
}

HamiltonianTriple HamiltonianTriple::polynomial(int dimension, const std::array<RationalPolynomial, 3>& H) {
  if (dimension < 1) throw StructuralError("polynomial: dimension must be positive");
  PolynomialHamiltonians p;
  for (int a = 0; a < 3; ++a) {
    if (H[a].variables() > dimension) throw StructuralError("polynomial: H uses more variables than the dimension");
    p.H[a] = H[a].extended(dimension);
    p.values[a] = p.H[a].cast<double>();
    p.gradients[a] = p.values[a].gradient();
  }
  return HamiltonianTriple(dimension, std::move(p));
}

HamiltonianTriple HamiltonianTriple::generic(int dimension, std::array<ScalarFunction, 3> H,
                                             std::array<GradientFunction, 3> gradients) {
  if (dimension < 1) throw StructuralError("generic: dimension must be positive");
  for (int a = 0; a < 3; ++a) {
    if (!H[a]) throw StructuralError("generic: H^" + std::to_string(a + 1) + " is empty");
  }
  return HamiltonianTriple(dimension, GenericHamiltonians{std::move(H), std::move(gradients)});
}

HamiltonianKind HamiltonianTriple::kind() const {
  return static_cast<HamiltonianKind>(data_.index());
}

bool HamiltonianTriple::exact_gradients() const {
  if (const auto* g = std::get_if<GenericHamiltonians>(&data_)) {
    for (const auto& grad : g->gradients) {
      if (!grad) return false;
    }
  }
  return true;
}

double HamiltonianTriple::value(int alpha, const Eigen::VectorXd& x) const {
  check_alpha(alpha);
  check_point(x, dimension_);
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, QuadraticHamiltonians>) {
          return 0.5 * x.dot(d.D[alpha] * x);
        } else if constexpr (std::is_same_v<D, RadialHamiltonians>) {
          return d.H[alpha].value(block_radii(x));
        } else if constexpr (std::is_same_v<D, PolynomialHamiltonians>) {
          return d.values[alpha].template evaluate<double>(std::span<const double>(x.data(), x.size()));
        } else {
          return d.H[alpha](std::span<const double>(x.data(), x.size()));
        }
      },
      data_);
}

Eigen::VectorXd HamiltonianTriple::gradient(int alpha, const Eigen::VectorXd& x,
                                            const FiniteDifferenceOptions& fd) const {
  check_alpha(alpha);
  check_point(x, dimension_);
  Eigen::VectorXd g = std::visit(
      [&](const auto& d) -> Eigen::VectorXd {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, QuadraticHamiltonians>) {
          return d.D[alpha] * x;
        } else if constexpr (std::is_same_v<D, RadialHamiltonians>) {
          Eigen::VectorXd A = d.H[alpha].partials(block_radii(x));
          Eigen::VectorXd out(x.size());
          for (int p = 0; p < d.blocks; ++p) out.segment(4 * p, 4) = A[p] * x.segment(4 * p, 4);
          return out;
        } else if constexpr (std::is_same_v<D, PolynomialHamiltonians>) {
          Eigen::VectorXd out(x.size());
          std::span<const double> pt(x.data(), x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = d.gradients[alpha][i].template evaluate<double>(pt);
          return out;
        } else {
          if (d.gradients[alpha]) return d.gradients[alpha](x);
          const auto& f = d.H[alpha];
          return central_gradient(
              [&f](const Eigen::VectorXd& p) { return f(std::span<const double>(p.data(), p.size())); }, x, fd);
        }
      },
      data_);
  if (g.size() != x.size()) throw StructuralError("gradient: oracle returned wrong dimension");
  require_finite(g, "gradient", alpha, x);
  return g;
}

Eigen::MatrixXd HamiltonianTriple::hessian(int alpha, const Eigen::VectorXd& x,
                                           const FiniteDifferenceOptions& fd) const {
  check_alpha(alpha);
  check_point(x, dimension_);
  return std::visit(
      [&](const auto& d) -> Eigen::MatrixXd {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, QuadraticHamiltonians>) {
          return d.D[alpha];
        } else if constexpr (std::is_same_v<D, RadialHamiltonians>) {
          // d_i d_j H = B_{p(i) p(j)} x_i x_j + A_{p(i)} delta_ij with B = d^2 H / drho^2.
          const Eigen::VectorXd rho = block_radii(x);
          const auto& fn = d.H[alpha];
          Eigen::VectorXd A = fn.partials(rho);
          Eigen::MatrixXd B = fn.second_partials
                                  ? fn.second_partials(rho)
                                  : symmetrized(central_jacobian(fn.partials, rho, 1e-5));
          Eigen::MatrixXd out(x.size(), x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            for (Eigen::Index j = 0; j < x.size(); ++j) out(i, j) = B(i / 4, j / 4) * x[i] * x[j];
            out(i, i) += A[i / 4];
          }
          return out;
        } else if constexpr (std::is_same_v<D, PolynomialHamiltonians>) {
          Eigen::MatrixXd out(x.size(), x.size());
          std::span<const double> pt(x.data(), x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            for (Eigen::Index j = 0; j < x.size(); ++j) {
              out(i, j) = d.gradients[alpha][i].derivative(static_cast<int>(j)).template evaluate<double>(pt);
            }
          }
          return out;
        } else {
          auto grad = [&](const Eigen::VectorXd& p) { return gradient(alpha, p, fd); };
          // Differencing a differenced gradient needs a coarser step.
          const double step = d.gradients[alpha] ? fd.step : std::sqrt(fd.step) * 1e-1;
          return symmetrized(central_jacobian(grad, x, step));
        }
      },
      data_);
}

std::optional<std::array<RationalPolynomial, 3>> HamiltonianTriple::polynomials() const {
  if (const auto* q = std::get_if<QuadraticHamiltonians>(&data_)) {
    return std::array<RationalPolynomial, 3>{quadratic_polynomial(q->D[0]), quadratic_polynomial(q->D[1]),
                                             quadratic_polynomial(q->D[2])};
  }
  if (const auto* p = std::get_if<PolynomialHamiltonians>(&data_)) return p->H;
  if (const auto* r = std::get_if<RadialHamiltonians>(&data_)) {
    if (!r->polynomials) return std::nullopt;
    const auto rho = radius_polynomials(r->blocks);
    std::array<RationalPolynomial, 3> out;
    for (int a = 0; a < 3; ++a) out[a] = (*r->polynomials)[a].compose(rho).extended(dimension_);
    return out;
  }
  return std::nullopt;
}

VectorField::VectorField(int dimension, Map f, JacobianMap jacobian, bool exact_jacobian)
    : dimension_(dimension), f_(std::move(f)), jacobian_(std::move(jacobian)), exact_jacobian_(exact_jacobian) {
  if (dimension < 1) throw StructuralError("vector field: dimension must be positive");
  if (!f_) throw StructuralError("vector field: empty map");
}

VectorField VectorField::linear(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw StructuralError("linear field: matrix must be square");
  return VectorField(
      static_cast<int>(A.rows()), [A](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; },
      [A](const Eigen::VectorXd&) { return A; }, true);
}

VectorField VectorField::zero(int dimension) {
  return VectorField(
      dimension, [dimension](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(dimension); },
      [dimension](const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(dimension, dimension); },
      true);
}

Eigen::VectorXd VectorField::operator()(const Eigen::VectorXd& x) const {
  check_point(x, dimension_);
  return f_(x);
}

Eigen::MatrixXd VectorField::jacobian(const Eigen::VectorXd& x, double step) const {
  check_point(x, dimension_);
  if (jacobian_) return jacobian_(x);
  return central_jacobian(f_, x, step);
}

VectorField hyperfield(const Structure& s, const HamiltonianTriple& H, const FiniteDifferenceOptions& fd) {
  if (s.dimension() != H.dimension()) {
    throw StructuralError("hyperfield: structure dimension " + std::to_string(s.dimension()) +
                          " does not match Hamiltonian dimension " + std::to_string(H.dimension()));
  }
  std::array<Eigen::MatrixXd, 3> P{s.field_map(0), s.field_map(1), s.field_map(2)};
  auto f = [P, H, fd](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    for (int a = 0; a < 3; ++a) out += P[a] * H.gradient(a, x, fd);
    return out;
  };
  auto jac = [P, H, fd](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.size(), x.size());
    for (int a = 0; a < 3; ++a) out += P[a] * H.hessian(a, x, fd);
    return out;
  };
  const bool exact = H.kind() != HamiltonianKind::Generic;
  return VectorField(s.dimension(), std::move(f), std::move(jac), exact);
}

double divergence(const VectorField& X, const Eigen::VectorXd& x) { return X.jacobian(x).trace(); }

Eigen::MatrixXd linearize(const Structure& s, const HamiltonianTriple& H) {
  const auto* q = H.quadratic_data();
  if (!q) throw StructuralError("linearize: requires a quadratic triple, got " + to_string(H.kind()));
  if (s.dimension() != H.dimension()) throw StructuralError("linearize: dimension mismatch");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s.dimension(), s.dimension());
  for (int a = 0; a < 3; ++a) A += s.field_map(a) * q->D[a];
  return A;
}

std::string HamiltonianityCertificate::summary() const {
  if (non_hamiltonian()) {
    std::ostringstream os;
    os.precision(17);
    os << "NonHamiltonian(k=" << k << ", Tr(A^" << 2 * k + 1 << ")=" << trace_value
       << "): the linear field is Hamiltonian for no symplectic structure";
    return os.str();
  }
  return "Inconclusive: all odd-power traces up to k=" + std::to_string(k_max) +
         " vanish; this does not establish that the field is Hamiltonian";
}

HamiltonianityCertificate hamiltonianity_certificate(const Eigen::MatrixXd& A, int k_max, double tol) {
  if (A.rows() != A.cols()) throw StructuralError("certificate: matrix must be square");
  HamiltonianityCertificate cert;
  cert.k_max = k_max > 0 ? k_max : 2 * static_cast<int>(A.rows());
  cert.tolerance = tol;
  const double norm = A.norm();
  if (norm == 0.0) {
    for (int k = 0; k <= cert.k_max; ++k) cert.traces.push_back({k, 0.0});
    return cert;
  }
  // Work with B = A/|A| so that |Tr(B^p)| > tol is the scaled test and
  // nothing overflows; report unscaled traces.
  const Eigen::MatrixXd B = A / norm;
  const Eigen::MatrixXd B2 = B * B;
  Eigen::MatrixXd power = B;
  for (int k = 0; k <= cert.k_max; ++k) {
    const double scaled = power.trace();
    const double trace = scaled * std::pow(norm, 2 * k + 1);
    cert.traces.push_back({k, trace});
    if (!cert.non_hamiltonian() && std::abs(scaled) > tol) {
      cert.verdict = HamiltonianityCertificate::Verdict::NonHamiltonian;
      cert.k = k;
      cert.trace_value = trace;
    }
    power = power * B2;
  }
  return cert;
}

Rational odd_power_trace(const MatrixXr& A, int k) {
  if (A.rows() != A.cols()) throw StructuralError("odd_power_trace: matrix must be square");
  if (k < 0) throw StructuralError("odd_power_trace: k must be non-negative");
  MatrixXr power = A;
  const MatrixXr A2 = A * A;
  for (int i = 0; i < k; ++i) power = MatrixXr(power * A2);
  return power.trace();
}

}  // namespace hyperham
