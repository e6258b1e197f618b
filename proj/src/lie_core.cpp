#include "paracurves/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <utility>

#include "paracurves/errors.hpp"

namespace paracurves::lie {

namespace {

using cd = std::complex<double>;
const cd kI{0.0, 1.0};

Matrix unit_matrix(int size, int i, int j, cd value = 1.0) {
  Matrix m = Matrix::Zero(size, size);
  m(i, j) = value;
  return m;
}

// Weights of the grading element diag(1, 0, ..., 0, -1).
int weight(int index, int size) {
  if (index == 0) return 1;
  if (index == size - 1) return -1;
  return 0;
}

Matrix form_j(int size) {
  Matrix j = Matrix::Zero(size, size);
  j(0, size - 1) = 1.0;
  j(size - 1, 0) = 1.0;
  for (int i = 1; i < size - 1; ++i) j(i, i) = 1.0;
  return j;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::SO: return "so";
    case Family::SL: return "sl";
    case Family::SU: return "su";
  }
  return "?";
}

// -- AlgebraElement ---------------------------------------------------------

AlgebraElement::AlgebraElement(SpecPtr spec, Matrix entries)
    : spec_(std::move(spec)), entries_(std::move(entries)) {
  const int size = spec_->matrix_size();
  if (entries_.rows() != size || entries_.cols() != size)
    throw PreconditionError("algebra element has wrong matrix size");
}

Eigen::VectorXd AlgebraElement::vec() const {
  const Eigen::Index size = entries_.rows();
  Eigen::VectorXd out(2 * size * size);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j) out(k++) = entries_(i, j).real();
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j) out(k++) = entries_(i, j).imag();
  return out;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
  if (!spec_->same_algebra(other.spec())) throw SpecMismatchError("adding elements of different algebras");
  return AlgebraElement(spec_, entries_ + other.entries_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const {
  if (!spec_->same_algebra(other.spec())) throw SpecMismatchError("subtracting elements of different algebras");
  return AlgebraElement(spec_, entries_ - other.entries_);
}

AlgebraElement AlgebraElement::operator*(double s) const { return AlgebraElement(spec_, entries_ * s); }

// -- AlgebraSpec --------------------------------------------------------------

namespace {

std::mutex g_registry_mutex;
std::map<std::pair<Family, int>, SpecPtr>& registry() {
  static std::map<std::pair<Family, int>, SpecPtr> r;
  return r;
}

}  // namespace

SpecPtr AlgebraSpec::conformal(int n) {
  if (n < 1) throw PreconditionError("conformal algebra needs n >= 1");
  std::lock_guard lock(g_registry_mutex);
  auto& slot = registry()[{Family::SO, n}];
  if (slot) return slot;
  std::shared_ptr<AlgebraSpec> spec(new AlgebraSpec(Family::SO, n));
  const int size = n + 2;
  auto add = [&](const Matrix& m) { spec->basis_.emplace_back(spec, m); };
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd zf = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) add(conformal_matrix(Eigen::VectorXd::Unit(n, i), zf, 0.0, zero));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd f = zf;
      f(i, j) = 1.0;
      f(j, i) = -1.0;
      add(conformal_matrix(zero, f, 0.0, zero));
    }
  add(conformal_matrix(zero, zf, 1.0, zero));
  for (int i = 0; i < n; ++i) add(conformal_matrix(zero, zf, 0.0, Eigen::VectorXd::Unit(n, i)));
  (void)size;
  spec->finalize();
  slot = spec;
  return slot;
}

SpecPtr AlgebraSpec::contact_legendrean(int n) {
  if (n < 1) throw PreconditionError("contact Legendrean algebra needs n >= 1");
  std::lock_guard lock(g_registry_mutex);
  auto& slot = registry()[{Family::SL, n}];
  if (slot) return slot;
  std::shared_ptr<AlgebraSpec> spec(new AlgebraSpec(Family::SL, n));
  const int size = n + 2;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (i != j) spec->basis_.emplace_back(spec, unit_matrix(size, i, j));
  for (int k = 0; k + 1 < size; ++k) {
    Matrix h = Matrix::Zero(size, size);
    h(k, k) = 1.0;
    h(k + 1, k + 1) = -1.0;
    spec->basis_.emplace_back(spec, h);
  }
  spec->finalize();
  slot = spec;
  return slot;
}

SpecPtr AlgebraSpec::cr(int n) {
  if (n < 1) throw PreconditionError("CR algebra needs n >= 1");
  std::lock_guard lock(g_registry_mutex);
  auto& slot = registry()[{Family::SU, n}];
  if (slot) return slot;
  std::shared_ptr<AlgebraSpec> spec(new AlgebraSpec(Family::SU, n));
  const int size = n + 2;
  const int last = size - 1;
  auto add = [&](const Matrix& m) { spec->basis_.emplace_back(spec, m); };
  // s-column and its partner -conj(s)^T in the last row
  for (int k = 0; k < n; ++k) {
    for (cd z : {cd(1.0), kI}) {
      Matrix m = Matrix::Zero(size, size);
      m(k + 1, 0) = z;
      m(last, k + 1) = -std::conj(z);
      add(m);
    }
  }
  // i p in the corner (last, 0)
  add(unit_matrix(size, last, 0, kI));
  // lambda = x real: diag(x, 0, -x)
  {
    Matrix m = Matrix::Zero(size, size);
    m(0, 0) = 1.0;
    m(last, last) = -1.0;
    add(m);
  }
  // lambda = i theta, balanced by the trace of C
  {
    Matrix m = Matrix::Zero(size, size);
    m(0, 0) = kI;
    m(last, last) = kI;
    m(1, 1) = -2.0 * kI;
    add(m);
  }
  // skew-Hermitian trace-free C
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Matrix a = Matrix::Zero(size, size);
      a(j + 1, k + 1) = 1.0;
      a(k + 1, j + 1) = -1.0;
      add(a);
      Matrix b = Matrix::Zero(size, size);
      b(j + 1, k + 1) = kI;
      b(k + 1, j + 1) = kI;
      add(b);
    }
  for (int j = 0; j + 1 < n; ++j) {
    Matrix m = Matrix::Zero(size, size);
    m(j + 1, j + 1) = kI;
    m(j + 2, j + 2) = -kI;
    add(m);
  }
  // r-column and its partner -conj(r)^T in the first row
  for (int k = 0; k < n; ++k) {
    for (cd z : {cd(1.0), kI}) {
      Matrix m = Matrix::Zero(size, size);
      m(k + 1, last) = z;
      m(0, k + 1) = -std::conj(z);
      add(m);
    }
  }
  // i q in the corner (0, last)
  add(unit_matrix(size, 0, last, kI));
  spec->finalize();
  slot = spec;
  return slot;
}

void AlgebraSpec::finalize() {
  grading_.clear();
  for (const auto& b : basis_) {
    auto g = grade_of(b.entries());
    if (!g) throw Error("internal: basis element is not homogeneous");
    grading_.push_back(*g);
  }
}

int AlgebraSpec::classical_dimension() const {
  const int size = n_ + 2;
  if (family_ == Family::SO) return size * (size - 1) / 2;
  return size * size - 1;
}

double AlgebraSpec::defining_residual(const Matrix& m) const {
  const int size = matrix_size();
  switch (family_) {
    case Family::SO: {
      Matrix j = form_j(size);
      return (m.transpose() * j + j * m).norm() + m.imag().norm();
    }
    case Family::SL:
      return std::abs(m.trace()) + m.imag().norm();
    case Family::SU: {
      Matrix j = form_j(size);
      return (m.adjoint() * j + j * m).norm() + std::abs(m.trace());
    }
  }
  return 0.0;
}

std::optional<int> AlgebraSpec::grade_of(const Matrix& m, double tol) const {
  const int size = matrix_size();
  std::optional<int> grade;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      if (std::abs(m(i, j)) <= tol) continue;
      int g = weight(i, size) - weight(j, size);
      if (grade && *grade != g) return std::nullopt;
      grade = g;
    }
  return grade ? grade : std::optional<int>(0);
}

Subspace AlgebraSpec::whole() const { return Subspace(shared_from_this(), basis_); }

Subspace AlgebraSpec::parabolic() const {
  std::vector<AlgebraElement> out;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (grading_[i] >= 0) out.push_back(basis_[i]);
  return Subspace(shared_from_this(), std::move(out));
}

Subspace AlgebraSpec::graded_component(int grade) const {
  std::vector<AlgebraElement> out;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (grading_[i] == grade) out.push_back(basis_[i]);
  return Subspace(shared_from_this(), std::move(out));
}

Subspace AlgebraSpec::grades_above(int grade) const {
  std::vector<AlgebraElement> out;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (grading_[i] > grade) out.push_back(basis_[i]);
  return Subspace(shared_from_this(), std::move(out));
}

AlgebraElement AlgebraSpec::element(Matrix m) const { return AlgebraElement(shared_from_this(), std::move(m)); }

AlgebraElement AlgebraSpec::from_vec(const Eigen::VectorXd& v) const {
  const int size = matrix_size();
  if (v.size() != 2 * size * size) throw PreconditionError("coordinate vector has wrong length");
  Matrix m(size, size);
  Eigen::Index k = 0;
  const Eigen::Index half = size * size;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j, ++k) m(i, j) = cd(v(k), v(k + half));
  return element(std::move(m));
}

AlgebraElement AlgebraSpec::zero() const {
  return element(Matrix::Zero(matrix_size(), matrix_size()));
}

// -- Subspace -----------------------------------------------------------------

Subspace::Subspace(SpecPtr ambient, std::vector<AlgebraElement> basis)
    : ambient_(std::move(ambient)), basis_(std::move(basis)) {
  for (const auto& b : basis_)
    if (!ambient_->same_algebra(b.spec())) throw SpecMismatchError("subspace element from a different algebra");
  Eigen::MatrixXd cols = basis_matrix();
  frame_ = linalg::orthonormal_basis(cols);
  if (frame_.cols() != static_cast<Eigen::Index>(basis_.size()))
    throw PreconditionError("subspace basis is linearly dependent");
}

Subspace Subspace::span_of(SpecPtr ambient, const std::vector<AlgebraElement>& elements) {
  const int size = ambient->matrix_size();
  Eigen::MatrixXd cols(2 * size * size, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!ambient->same_algebra(elements[i].spec())) throw SpecMismatchError("span of elements from a different algebra");
    cols.col(static_cast<Eigen::Index>(i)) = elements[i].vec();
  }
  double reference = 0.0;
  for (Eigen::Index i = 0; i < cols.cols(); ++i) reference = std::max(reference, cols.col(i).norm());
  Eigen::MatrixXd q = linalg::orthonormal_basis(cols, linalg::kRankTolerance, reference);
  std::vector<AlgebraElement> basis;
  for (Eigen::Index i = 0; i < q.cols(); ++i) basis.push_back(ambient->from_vec(q.col(i)));
  return Subspace(std::move(ambient), std::move(basis));
}

Eigen::MatrixXd Subspace::basis_matrix() const {
  const int size = ambient_->matrix_size();
  Eigen::MatrixXd cols(2 * size * size, static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = basis_[i].vec();
  return cols;
}

// -- operations ---------------------------------------------------------------

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  if (!x.spec().same_algebra(y.spec())) throw SpecMismatchError("bracket of elements from different algebras");
  return AlgebraElement(x.spec_ptr(), x.entries() * y.entries() - y.entries() * x.entries());
}

Membership membership(const AlgebraElement& x, const Subspace& s, double tol) {
  if (!x.spec().same_algebra(s.ambient())) throw SpecMismatchError("membership test across algebras");
  Membership out;
  Eigen::VectorXd v = x.vec();
  out.residual = linalg::residual(s.orthonormal(), v).norm();
  out.member = out.residual < tol;
  if (out.member) {
    if (s.dim() == 0) {
      out.coefficients = Eigen::VectorXd(0);
    } else {
      out.coefficients = s.basis_matrix().colPivHouseholderQr().solve(v);
    }
  }
  return out;
}

bool contained_in(const Subspace& inner, const Subspace& outer, double tol) {
  for (const auto& b : inner.basis()) {
    double scale = std::max(1.0, b.vec().norm());
    if (!membership(b, outer, tol * scale).member) return false;
  }
  return true;
}

Filtration dkr_filtration(const SpecPtr& spec, const AlgebraElement& v) {
  if (!spec->same_algebra(v.spec())) throw SpecMismatchError("generator from a different algebra");
  const double vnorm = v.vec().norm();
  Subspace p0 = spec->parabolic();
  if (vnorm == 0.0 || membership(v, p0, linalg::kRankTolerance * std::max(1.0, vnorm)).member)
    throw DegenerateDirectionError("generator lies in the parabolic subalgebra");

  // Work with orthonormal bases throughout so that the rank cutoff is meaningful.
  Eigen::MatrixXd current = p0.orthonormal();
  std::vector<Subspace> chain;
  auto as_subspace = [&](const Eigen::MatrixXd& cols) {
    std::vector<AlgebraElement> basis;
    for (Eigen::Index i = 0; i < cols.cols(); ++i) basis.push_back(spec->from_vec(cols.col(i)));
    return Subspace(spec, std::move(basis));
  };
  chain.push_back(as_subspace(current));

  const Eigen::VectorXd vv = v.vec();
  const int max_steps = spec->dimension() + 2;
  int stable = -1;
  for (int step = 0; step < max_steps; ++step) {
    const Eigen::Index m = current.cols();
    if (m == 0) {
      stable = step;
      break;
    }
    Eigen::MatrixXd target(current.rows(), m + 1);
    target << current, vv;
    Eigen::MatrixXd q = linalg::orthonormal_basis(target, linalg::kRankTolerance, 1.0);
    Eigen::MatrixXd image(current.rows(), m);
    for (Eigen::Index i = 0; i < m; ++i) {
      AlgebraElement b = spec->from_vec(current.col(i));
      image.col(i) = linalg::residual(q, bracket(b, v).vec());
    }
    // |[b, V]| <= 2 |b| |V| for unit b, so 2|V| is the natural scale of this map.
    Eigen::MatrixXd kernel = linalg::null_space(image, linalg::kRankTolerance, 2.0 * vnorm);
    if (kernel.cols() == m) {
      stable = step;
      break;
    }
    Eigen::MatrixXd next = current * kernel;
    current = linalg::orthonormal_basis(next, linalg::kRankTolerance, 1.0);
    chain.push_back(as_subspace(current));
  }
  if (stable < 0) throw NumericalBreakdown("filtration did not stabilise");

  std::vector<AlgebraElement> sym_basis = chain.back().basis();
  sym_basis.push_back(v);
  Filtration out{std::move(chain), Subspace(spec, std::move(sym_basis)), stable};
  return out;
}

// -- generators ---------------------------------------------------------------

Matrix conformal_matrix(const Eigen::VectorXd& x, const Eigen::MatrixXd& f, double lambda,
                        const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  const Eigen::Index size = n + 2;
  Matrix m = Matrix::Zero(size, size);
  m(0, 0) = lambda;
  m(size - 1, size - 1) = -lambda;
  for (Eigen::Index b = 0; b < n; ++b) {
    m(0, b + 1) = -y(b);
    m(b + 1, 0) = -x(b);
    m(b + 1, size - 1) = y(b);
    m(size - 1, b + 1) = x(b);
    for (Eigen::Index c = 0; c < n; ++c) m(b + 1, c + 1) = f(b, c);
  }
  return m;
}

AlgebraElement conformal_line_generator(const SpecPtr& spec, const Eigen::VectorXd& u) {
  const int n = spec->n();
  return spec->element(conformal_matrix(u, Eigen::MatrixXd::Zero(n, n), 0.0, Eigen::VectorXd::Zero(n)));
}

AlgebraElement conformal_circle_generator(const SpecPtr& spec, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& c) {
  // f = 1, lambda = 0, h = 0: F = U C^T - C U^T gives F U = -C, and Y = F C = |C|^2 U.
  Eigen::MatrixXd f = u * c.transpose() - c * u.transpose();
  Eigen::VectorXd y = f * c;
  return spec->element(conformal_matrix(u, f, 0.0, y));
}

AlgebraElement legendrean_generator(const SpecPtr& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int n = spec->n();
  const int size = n + 2;
  Matrix m = Matrix::Zero(size, size);
  for (int a = 0; a < n; ++a) {
    m(a + 1, 0) = u(a);
    m(size - 1, a + 1) = v(a);
  }
  return spec->element(std::move(m));
}

AlgebraElement cr_generator(const SpecPtr& spec, const Eigen::VectorXcd& u) {
  const int n = spec->n();
  const int size = n + 2;
  Matrix m = Matrix::Zero(size, size);
  for (int a = 0; a < n; ++a) {
    m(a + 1, 0) = u(a);
    m(size - 1, a + 1) = -std::conj(u(a));
  }
  return spec->element(std::move(m));
}

// -- symmetry read-off --------------------------------------------------------

std::optional<SymModel> parse_sym_model(std::string_view tag) {
  if (tag == "conf_line") return SymModel::ConfLine;
  if (tag == "conf_circle") return SymModel::ConfCircle;
  if (tag == "legendrean") return SymModel::Legendrean;
  if (tag == "cr") return SymModel::CR;
  return std::nullopt;
}

std::string_view to_string(SymModel model) {
  switch (model) {
    case SymModel::ConfLine: return "conf_line";
    case SymModel::ConfCircle: return "conf_circle";
    case SymModel::Legendrean: return "legendrean";
    case SymModel::CR: return "cr";
  }
  return "?";
}

namespace {

Family family_for(SymModel model) {
  switch (model) {
    case SymModel::ConfLine:
    case SymModel::ConfCircle: return Family::SO;
    case SymModel::Legendrean: return Family::SL;
    case SymModel::CR: return Family::SU;
  }
  return Family::SO;
}

double conformal_residual(const Matrix& m, SymModel model, const SymModelData& data) {
  const Eigen::Index size = m.rows();
  const Eigen::Index n = size - 2;
  Eigen::VectorXd u = data.u.real();
  Eigen::VectorXd c = data.c.size() == n ? Eigen::VectorXd(data.c.real()) : Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd mr = m.real();
  double lambda = mr(0, 0);
  Eigen::VectorXd x = -mr.block(1, 0, n, 1);
  Eigen::VectorXd y = mr.block(1, size - 1, n, 1);
  Eigen::MatrixXd f = mr.block(1, 1, n, n);
  double fcoef = x.dot(u);
  double r = (x - fcoef * u).norm();
  if (model == SymModel::ConfLine) {
    double h = y.dot(u);
    r += (f * u).norm() + (y - h * u).norm();
  } else {
    Eigen::VectorXd rest = y - lambda * c - f * c;
    double h = rest.dot(u);
    r += (f * u + fcoef * c).norm() + (rest - h * u).norm();
  }
  return r;
}

double legendrean_residual(const Matrix& m, const SymModelData& data) {
  const Eigen::Index size = m.rows();
  const Eigen::Index n = size - 2;
  const Eigen::Index last = size - 1;
  Eigen::VectorXd u = data.u.real();
  Eigen::VectorXd v = data.v.real();
  Eigen::MatrixXd mr = m.real();
  double a = mr(0, 0), e = mr(last, last), b = mr(0, last), d = mr(last, 0);
  Eigen::VectorXd z = mr.block(0, 1, 1, n).transpose();
  Eigen::VectorXd x = mr.block(1, 0, n, 1);
  Eigen::VectorXd w = mr.block(1, last, n, 1);
  Eigen::VectorXd y = mr.block(last, 1, 1, n).transpose();
  Eigen::MatrixXd c = mr.block(1, 1, n, n);
  double f = x.dot(v);
  double h = z.dot(u);
  double half = 0.5 * (a + e);
  return (x - f * u).norm() + (y - f * v).norm() + (z - h * v).norm() + (w - h * u).norm() + std::abs(b) +
         std::abs(d) + (c * u - half * u).norm() + (c.transpose() * v - half * v).norm() + m.imag().norm();
}

double cr_residual(const Matrix& m, const SymModelData& data) {
  using cd = std::complex<double>;
  const Eigen::Index size = m.rows();
  const Eigen::Index n = size - 2;
  const Eigen::Index last = size - 1;
  const Eigen::VectorXcd& u = data.u;
  cd lam = m(0, 0);
  double x = lam.real(), theta = lam.imag();
  Eigen::VectorXcd s = m.block(1, 0, n, 1);
  Eigen::VectorXcd r = m.block(1, last, n, 1);
  cd fz = u.dot(s);  // conj(u)^T s
  cd hz = u.dot(r);
  double res = 0.0;
  res += std::abs(fz.imag()) + std::abs(hz.imag());
  double f = fz.real(), h = hz.real();
  res += (s - f * u).norm() + (r - h * u).norm();
  res += std::abs(m(last, last) - cd(-x, theta));
  res += std::abs(m(0, last)) + std::abs(m(last, 0));
  Eigen::VectorXcd top = m.block(0, 1, 1, n).transpose();
  Eigen::VectorXcd bottom = m.block(last, 1, 1, n).transpose();
  res += (top + h * u.conjugate()).norm() + (bottom + f * u.conjugate()).norm();
  Eigen::MatrixXcd mm = m.block(1, 1, n, n) - cd(0.0, theta) * Eigen::MatrixXcd::Identity(n, n);
  res += (mm + mm.adjoint()).norm();
  res += (mm * u).norm();
  res += std::abs(mm.trace() + cd(0.0, static_cast<double>(n + 2) * theta));
  return res;
}

}  // namespace

double sym_constraint_residual(const AlgebraElement& x, SymModel model, const SymModelData& data) {
  if (x.spec().family() != family_for(model))
    throw SpecMismatchError("symmetry model does not match the algebra family");
  switch (model) {
    case SymModel::ConfLine:
    case SymModel::ConfCircle: return conformal_residual(x.entries(), model, data);
    case SymModel::Legendrean: return legendrean_residual(x.entries(), data);
    case SymModel::CR: return cr_residual(x.entries(), data);
  }
  return 0.0;
}

SymCheck verify_sym_constraints(const Subspace& sym, SymModel model, const SymModelData& data, double tol) {
  SymCheck out;
  out.ok = true;
  for (const auto& b : sym.basis()) {
    double scale = std::max(1.0, b.vec().norm());
    double r = sym_constraint_residual(b, model, data) / scale;
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
    if (!(r < tol)) out.ok = false;
  }
  return out;
}

// -- tangency oracle ----------------------------------------------------------

FlatCurve FlatCurve::line(const Eigen::VectorXd& u) {
  if (std::abs(u.norm() - 1.0) > 1e-12) throw PreconditionError("line direction must have unit length");
  FlatCurve out;
  out.kind = Kind::Line;
  out.n = static_cast<int>(u.size());
  out.u = u;
  out.c = Eigen::VectorXd::Zero(u.size());
  return out;
}

FlatCurve FlatCurve::circle(const Eigen::VectorXd& u, const Eigen::VectorXd& c) {
  if (std::abs(u.norm() - 1.0) > 1e-12) throw PreconditionError("circle velocity must have unit length");
  if (u.size() != c.size()) throw PreconditionError("circle data of mismatched dimension");
  if (std::abs(u.dot(c)) > 1e-12) throw PreconditionError("circle acceleration must be orthogonal to velocity");
  FlatCurve out;
  out.kind = Kind::Circle;
  out.n = static_cast<int>(u.size());
  out.u = u;
  out.c = c;
  return out;
}

FlatCurve FlatCurve::sampled(std::vector<Eigen::VectorXd> points, std::vector<Eigen::VectorXd> tangents) {
  if (points.empty() || points.size() != tangents.size())
    throw PreconditionError("sampled curve needs matching, non-empty point and tangent lists");
  FlatCurve out;
  out.kind = Kind::Sampled;
  out.n = static_cast<int>(points.front().size());
  out.points = std::move(points);
  out.tangents = std::move(tangents);
  return out;
}

Eigen::VectorXd FlatCurve::point_at(double t) const {
  switch (kind) {
    case Kind::Line: return 2.0 * t * u;
    case Kind::Circle: return 2.0 / (1.0 + t * t * c.squaredNorm()) * (t * u + t * t * c);
    case Kind::Sampled: break;
  }
  throw PreconditionError("sampled curves have no parameterisation");
}

Eigen::VectorXd FlatCurve::tangent_at(double t) const {
  switch (kind) {
    case Kind::Line: return 2.0 * u;
    case Kind::Circle: {
      double c2 = c.squaredNorm();
      double den = 1.0 + t * t * c2;
      Eigen::VectorXd num = t * u + t * t * c;
      Eigen::VectorXd dnum = u + 2.0 * t * c;
      return 2.0 * dnum / den - 2.0 * num * (2.0 * t * c2) / (den * den);
    }
    case Kind::Sampled: break;
  }
  throw PreconditionError("sampled curves have no parameterisation");
}

int killing_parameter_count(int n) { return (n + 2) * (n + 1) / 2; }

namespace {

struct KillingParts {
  Eigen::VectorXd x;
  Eigen::MatrixXd f;
  double lambda;
  Eigen::VectorXd y;
};

KillingParts unpack(int n, const Eigen::VectorXd& p) {
  KillingParts k{p.head(n), Eigen::MatrixXd::Zero(n, n), 0.0, Eigen::VectorXd::Zero(n)};
  Eigen::Index idx = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++idx) {
      k.f(i, j) = p(idx);
      k.f(j, i) = -p(idx);
    }
  k.lambda = p(idx++);
  k.y = p.segment(idx, n);
  return k;
}

}  // namespace

Eigen::VectorXd killing_field(int n, const Eigen::VectorXd& params, const Eigen::VectorXd& x) {
  KillingParts k = unpack(n, params);
  return k.x - k.f * x + k.lambda * x - k.y.dot(x) * x + 0.5 * x.squaredNorm() * k.y;
}

Eigen::MatrixXd killing_field_jacobian(int n, const Eigen::VectorXd& params, const Eigen::VectorXd& x) {
  KillingParts k = unpack(n, params);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  return -k.f + k.lambda * id - x * k.y.transpose() - k.y.dot(x) * id + k.y * x.transpose();
}

Subspace TangencyResult::as_subspace(const SpecPtr& conformal) const {
  if (conformal->family() != Family::SO || conformal->n() != n)
    throw SpecMismatchError("tangency parameters need the matching conformal algebra");
  std::vector<AlgebraElement> elements;
  for (Eigen::Index col = 0; col < parameters.cols(); ++col) {
    Matrix m = Matrix::Zero(n + 2, n + 2);
    for (Eigen::Index i = 0; i < parameters.rows(); ++i) m += parameters(i, col) * conformal->basis()[i].entries();
    elements.push_back(conformal->element(std::move(m)));
  }
  return Subspace(conformal, std::move(elements));
}

namespace {

Eigen::MatrixXd tangency_system(int n, const std::vector<Eigen::VectorXd>& pts,
                                const std::vector<Eigen::VectorXd>& tans) {
  const int d = killing_parameter_count(n);
  Eigen::MatrixXd sys(static_cast<Eigen::Index>(pts.size()) * n, d);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    Eigen::VectorXd t = tans[s];
    double tn = t.norm();
    if (tn == 0.0) throw DegenerateSamplingError("curve has a vanishing tangent at a sample");
    t /= tn;
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - t * t.transpose();
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd field = killing_field(n, Eigen::VectorXd::Unit(d, j), pts[s]);
      sys.block(static_cast<Eigen::Index>(s) * n, j, n, 1) = proj * field;
    }
  }
  return sys;
}

}  // namespace

TangencyResult tangency_oracle(const FlatCurve& curve, int samples) {
  const int n = curve.n;
  const int d = killing_parameter_count(n);
  if (samples < d) throw PreconditionError("tangency oracle needs at least as many samples as parameters");

  std::vector<Eigen::VectorXd> pts, tans, pts2, tans2;
  if (curve.kind == FlatCurve::Kind::Sampled) {
    if (static_cast<int>(curve.points.size()) < samples)
      throw PreconditionError("sampled curve has fewer points than requested");
    // the plateau check compares every other sample against all of them
    for (int i = 0; i < samples; ++i) {
      pts2.push_back(curve.points[i]);
      tans2.push_back(curve.tangents[i]);
      if (i % 2 == 0) {
        pts.push_back(curve.points[i]);
        tans.push_back(curve.tangents[i]);
      }
    }
  } else {
    auto fill = [&](int count, std::vector<Eigen::VectorXd>& p, std::vector<Eigen::VectorXd>& t) {
      for (int i = 0; i < count; ++i) {
        double s = -1.0 + 2.0 * (i + 0.5) / count;
        p.push_back(curve.point_at(s));
        t.push_back(curve.tangent_at(s));
      }
    };
    fill(samples, pts, tans);
    fill(2 * samples, pts2, tans2);
  }

  Eigen::MatrixXd sys = tangency_system(n, pts, tans);
  Eigen::MatrixXd sys2 = tangency_system(n, pts2, tans2);
  Eigen::MatrixXd kernel = linalg::null_space(sys);
  Eigen::MatrixXd kernel2 = linalg::null_space(sys2);
  if (kernel.cols() != kernel2.cols())
    throw DegenerateSamplingError("tangency system rank has not plateaued; resample the curve");

  TangencyResult out;
  out.n = n;
  out.parameters = kernel2;
  out.dim = static_cast<int>(kernel2.cols());
  out.rows = static_cast<int>(sys2.rows());
  return out;
}

}  // namespace paracurves::lie
