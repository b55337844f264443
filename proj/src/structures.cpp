#include "hyperham/structures.hpp"

#include <cmath>
#include <utility>

#include "hyperham/errors.hpp"

namespace hyperham {
namespace {

template <class T>
Matrix<T> from_rows(const int (&rows)[4][4]) {
  Matrix<T> m(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = T(rows[i][j]);
  }
  return m;
}

constexpr int kK[3][4][4] = {
    {{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}},
    {{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}},
    {{0, 0, 1, 0}, {0, 0, 0, -1}, {-1, 0, 0, 0}, {0, 1, 0, 0}},
};

constexpr int kH[3][4][4] = {
    {{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}},
    {{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}},
    {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}},
};

// Levi-Civita on 0-based indices.
int epsilon(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((a + 1) % 3 == b) ? 1 : -1;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& g) {
  if constexpr (is_rational_v<T>) {
    return g.fullPivLu().inverse();
  } else {
    return g.inverse();
  }
}

template <class T>
Matrix<T> embed_block(const Matrix<T>& block, int n, int p) {
  Matrix<T> m = Matrix<T>::Zero(4 * n, 4 * n);
  m.block(4 * p, 4 * p, 4, 4) = block;
  return m;
}

template <class T>
int sign_of(const T& v) {
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

}  // namespace

template <class T>
Matrix<T> self_dual_generator(int alpha) {
  if (alpha < 0 || alpha > 2) throw StructuralError("generator index must be 0, 1 or 2");
  return from_rows<T>(kK[alpha]);
}

template <class T>
Matrix<T> anti_self_dual_generator(int alpha) {
  if (alpha < 0 || alpha > 2) throw StructuralError("generator index must be 0, 1 or 2");
  return from_rows<T>(kH[alpha]);
}

template <class T>
Matrix<T> block_generator(int sign, int alpha) {
  if (sign == 1) return self_dual_generator<T>(alpha);
  if (sign == -1) return anti_self_dual_generator<T>(alpha);
  throw StructuralError("block sign must be +1 or -1");
}

template <class T>
double max_abs(const Matrix<T>& A) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) best = std::max(best, std::abs(to_double(A(i, j))));
  }
  return best;
}

template <class T>
T pfaffian(Matrix<T> A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw StructuralError("pfaffian: matrix not square");
  if (n % 2 == 1) return T(0);
  T pf(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp = k + 1;
    for (Eigen::Index r = k + 2; r < n; ++r) {
      if (abs_value(T(A(r, k))) > abs_value(T(A(kp, k)))) kp = r;
    }
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      pf = -pf;
    }
    if (is_zero(T(A(k + 1, k)))) return T(0);
    pf *= A(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index rest = n - k - 2;
      Matrix<T> tau = A.block(k, k + 2, 1, rest) / A(k, k + 1);
      Matrix<T> col = A.block(k + 2, k + 1, rest, 1);
      Matrix<T> update = tau.transpose() * col.transpose() - col * tau;
      A.block(k + 2, k + 2, rest, rest) += update;
    }
  }
  return pf;
}

template <class T>
BasicStructure<T> BasicStructure<T>::from_matrices(std::array<Matrix<T>, 3> J, Matrix<T> metric,
                                                   std::vector<int> block_signs) {
  const Eigen::Index dim = metric.rows();
  if (dim == 0 || dim % 4 != 0 || metric.cols() != dim) {
    throw StructuralError("structure: metric must be square of dimension 4n, n >= 1");
  }
  for (const auto& j : J) {
    if (j.rows() != dim || j.cols() != dim) throw StructuralError("structure: J dimension does not match metric");
  }
  if (!block_signs.empty() && static_cast<Eigen::Index>(block_signs.size()) * 4 != dim) {
    throw StructuralError("structure: block sign count does not match dimension");
  }
  for (int s : block_signs) {
    if (s != 1 && s != -1) throw StructuralError("structure: block signs must be +1 or -1");
  }
  BasicStructure out;
  out.dimension_ = static_cast<int>(dim);
  out.block_signs_ = std::move(block_signs);
  Matrix<T> g_inv = inverse(metric);
  out.metric_ = std::move(metric);
  for (int a = 0; a < 3; ++a) {
    out.Y_[a] = g_inv * J[a];
    out.J_[a] = std::move(J[a]);
  }
  return out;
}

template <class T>
bool BasicStructure<T>::euclidean() const {
  return metric_ == Matrix<T>::Identity(dimension_, dimension_);
}

template <class T>
int BasicStructure<T>::orientation() const {
  if (has_block_layout()) {
    int s = 1;
    for (int b : block_signs_) s *= b;
    return s;
  }
  return sign_of(pfaffian(J_[0]));
}

template <class T>
std::optional<int> BasicStructure<T>::uniform_type() const {
  if (block_signs_.empty()) return std::nullopt;
  for (int b : block_signs_) {
    if (b != block_signs_.front()) return std::nullopt;
  }
  return block_signs_.front();
}

template <class T>
Matrix<T> BasicStructure<T>::field_map(int alpha) const {
  return Y_.at(alpha) * inverse(metric_);
}

template <class T>
BasicStructure<T> standard_structure(int n, const std::vector<int>& block_signs) {
  if (n < 1) throw StructuralError("standard_structure: n must be >= 1");
  if (static_cast<int>(block_signs.size()) != n) {
    throw StructuralError("standard_structure: expected " + std::to_string(n) + " block signs");
  }
  std::array<Matrix<T>, 3> J;
  for (int a = 0; a < 3; ++a) {
    J[a] = Matrix<T>::Zero(4 * n, 4 * n);
    for (int p = 0; p < n; ++p) J[a].block(4 * p, 4 * p, 4, 4) = block_generator<T>(block_signs[p], a);
  }
  return BasicStructure<T>::from_matrices(std::move(J), Matrix<T>::Identity(4 * n, 4 * n), block_signs);
}

std::vector<int> parse_block_signs(const std::string& signs) {
  std::vector<int> out;
  for (char c : signs) {
    if (c == '+') {
      out.push_back(1);
    } else if (c == '-') {
      out.push_back(-1);
    } else {
      throw StructuralError(std::string("block signs: unexpected character '") + c + "'");
    }
  }
  return out;
}

Structure standard_structure(int n, const std::string& signs) {
  return standard_structure<double>(n, parse_block_signs(signs));
}

bool ValidationReport::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

template <class T>
ValidationReport validate(const BasicStructure<T>& s, double tol) {
  ValidationReport report;
  report.tolerance = tol;
  auto record = [&](std::string name, double residual) {
    report.checks.push_back({std::move(name), residual <= tol, residual});
  };
  const int dim = s.dimension();
  const Matrix<T> I = Matrix<T>::Identity(dim, dim);
  const Matrix<T>& g = s.metric();

  record("metric_symmetric", max_abs<T>(g - g.transpose()));
  {
    Eigen::MatrixXd gd = g.unaryExpr([](const T& v) { return to_double(v); });
    Eigen::LLT<Eigen::MatrixXd> llt(gd);
    record("metric_positive_definite", llt.info() == Eigen::Success ? 0.0 : 1.0);
  }

  double antisym = 0.0, complex = 0.0, quaternion = 0.0, compatible = 0.0;
  for (int a = 0; a < 3; ++a) {
    antisym = std::max(antisym, max_abs<T>(s.J(a) + s.J(a).transpose()));
    complex = std::max(complex, max_abs<T>(Matrix<T>(s.Y(a) * s.Y(a) + I)));
    compatible = std::max(compatible, max_abs<T>(Matrix<T>(s.Y(a).transpose() * g * s.Y(a) - g)));
    for (int b = 0; b < 3; ++b) {
      Matrix<T> expected = (a == b) ? Matrix<T>(-I) : Matrix<T>::Zero(dim, dim);
      for (int c = 0; c < 3; ++c) {
        int e = epsilon(a, b, c);
        if (e != 0) expected += T(e) * s.Y(c);
      }
      quaternion = std::max(quaternion, max_abs<T>(Matrix<T>(s.Y(a) * s.Y(b) - expected)));
    }
  }
  record("antisymmetric", antisym);
  record("complex_structure", complex);
  record("quaternionic_relations", quaternion);
  record("metric_compatible", compatible);

  // Unimodularity: w^{2n}/(2n)! = Pf(J) dx^1..dx^{4n} = (Pf(J)/sqrt(det g)) Omega_g.
  const T det_g = g.determinant();
  double unimodular = 0.0, same_type = 0.0;
  int first_sign = 0;
  for (int a = 0; a < 3; ++a) {
    T pf = pfaffian<T>(s.J(a));
    if (is_zero(det_g)) {
      unimodular = std::max(unimodular, 1.0);
    } else {
      unimodular = std::max(unimodular, std::abs(to_double(T(pf * pf / det_g - T(1)))));
    }
    int sgn = sign_of(pf);
    if (a == 0) {
      first_sign = sgn;
    } else {
      same_type = std::max(same_type, static_cast<double>(std::abs(sgn - first_sign)));
    }
  }
  record("unimodular", unimodular);
  record("same_type", same_type);

  // Each block's triple commutes with the opposite-type generators on that block.
  if (s.has_block_layout()) {
    double commutation = 0.0;
    const int n = s.n();
    for (int p = 0; p < n; ++p) {
      for (int b = 0; b < 3; ++b) {
        Matrix<T> other = embed_block<T>(block_generator<T>(-s.block_signs()[p], b), n, p);
        for (int a = 0; a < 3; ++a) {
          commutation = std::max(commutation, max_abs<T>(Matrix<T>(s.Y(a) * other - other * s.Y(a))));
        }
      }
    }
    record("block_commutation", commutation);
  }
  return report;
}

std::string to_string(UnimodularClass c) {
  switch (c) {
    case UnimodularClass::PositiveType:
      return "PositiveType";
    case UnimodularClass::NegativeType:
      return "NegativeType";
    case UnimodularClass::NotUnimodular:
      return "NotUnimodular";
  }
  return "NotUnimodular";
}

UnimodularClass classify_unimodular(const std::array<double, 3>& a, const std::array<double, 3>& b, double tol) {
  const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
  if (nb <= tol && std::abs(na - 1.0) <= tol) return UnimodularClass::PositiveType;
  if (na <= tol && std::abs(nb - 1.0) <= tol) return UnimodularClass::NegativeType;
  return UnimodularClass::NotUnimodular;
}

template <class T>
BasicStructure<T> rotate_basis(const BasicStructure<T>& s, const Matrix<T>& R, double tol) {
  if (R.rows() != 3 || R.cols() != 3) throw StructuralError("rotate_basis: R must be 3x3");
  const double orth = max_abs<T>(Matrix<T>(R.transpose() * R - Matrix<T>::Identity(3, 3)));
  const double det = to_double(T(R.determinant()));
  if (orth > tol || std::abs(det - 1.0) > tol) {
    throw StructuralError("rotate_basis: R is not a rotation (orthogonality residual " + std::to_string(orth) +
                          ", det " + std::to_string(det) + ")");
  }
  std::array<Matrix<T>, 3> J;
  for (int a = 0; a < 3; ++a) {
    J[a] = Matrix<T>::Zero(s.dimension(), s.dimension());
    for (int b = 0; b < 3; ++b) J[a] += R(a, b) * s.J(b);
  }
  return BasicStructure<T>::from_matrices(std::move(J), s.metric(), s.block_signs());
}

template <class T>
T scalar_product(const QuaternionElement<T>& q1, const QuaternionElement<T>& q2, const BasicStructure<T>&) {
  T sum(0);
  for (int a = 0; a < 3; ++a) sum += q1.coefficients[a] * q2.coefficients[a];
  return sum;
}

template <class T>
Matrix<T> element_matrix(const QuaternionElement<T>& q, const BasicStructure<T>& s) {
  Matrix<T> m = Matrix<T>::Zero(s.dimension(), s.dimension());
  for (int a = 0; a < 3; ++a) m += q.coefficients[a] * s.Y(a);
  return m;
}

template <class T>
T trace_product(const Matrix<T>& q1, const Matrix<T>& q2) {
  if (q1.rows() != q2.rows() || q1.cols() != q2.cols()) throw StructuralError("trace_product: shape mismatch");
  return T((q1.transpose() * q2).trace()) / T(static_cast<int>(q1.rows()));
}

template <class T>
So4Coordinates<T> decompose_so4(const Matrix<T>& A) {
  if (A.rows() != 4 || A.cols() != 4) throw StructuralError("decompose_so4: expected a 4x4 matrix");
  So4Coordinates<T> c;
  for (int a = 0; a < 3; ++a) {
    c.self_dual[a] = trace_product<T>(self_dual_generator<T>(a), A);
    c.anti_self_dual[a] = trace_product<T>(anti_self_dual_generator<T>(a), A);
  }
  return c;
}

template <class T>
Matrix<T> assemble_so4(const So4Coordinates<T>& c) {
  Matrix<T> m = Matrix<T>::Zero(4, 4);
  for (int a = 0; a < 3; ++a) {
    m += c.self_dual[a] * self_dual_generator<T>(a);
    m += c.anti_self_dual[a] * anti_self_dual_generator<T>(a);
  }
  return m;
}

#define HYPERHAM_INSTANTIATE_STRUCTURES(T)                                                              \
  template Matrix<T> self_dual_generator<T>(int);                                                       \
  template Matrix<T> anti_self_dual_generator<T>(int);                                                  \
  template Matrix<T> block_generator<T>(int, int);                                                      \
  template double max_abs<T>(const Matrix<T>&);                                                        \
  template T pfaffian<T>(Matrix<T>);                                                                    \
  template class BasicStructure<T>;                                                                     \
  template BasicStructure<T> standard_structure<T>(int, const std::vector<int>&);                       \
  template ValidationReport validate<T>(const BasicStructure<T>&, double);                              \
  template BasicStructure<T> rotate_basis<T>(const BasicStructure<T>&, const Matrix<T>&, double);       \
  template T scalar_product<T>(const QuaternionElement<T>&, const QuaternionElement<T>&,                \
                               const BasicStructure<T>&);                                               \
  template Matrix<T> element_matrix<T>(const QuaternionElement<T>&, const BasicStructure<T>&);          \
  template T trace_product<T>(const Matrix<T>&, const Matrix<T>&);                                      \
  template So4Coordinates<T> decompose_so4<T>(const Matrix<T>&);                                        \
  template Matrix<T> assemble_so4<T>(const So4Coordinates<T>&);

HYPERHAM_INSTANTIATE_STRUCTURES(double)
HYPERHAM_INSTANTIATE_STRUCTURES(Rational)

}  // namespace hyperham
