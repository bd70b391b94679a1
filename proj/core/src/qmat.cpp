#include "qcap/qmat.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

namespace qcap {

namespace {

std::atomic<int> g_dim_cap{4096};

long long total_dim(const std::vector<SystemLabel>& systems) {
  long long d = 1;
  for (const auto& s : systems) {
    if (s.dim < 1) throw InputError("system '" + s.name + "' has dimension " + std::to_string(s.dim));
    d *= s.dim;
  }
  return d;
}

void check_unique_names(const std::vector<SystemLabel>& systems) {
  std::unordered_set<std::string> seen;
  for (const auto& s : systems) {
    if (!seen.insert(s.name).second) {
      throw InputError("duplicate system label '" + s.name + "'");
    }
  }
}

// Decompose a flat index into per-system digits (first system most significant).
void decompose(long long idx, const std::vector<int>& dims, std::vector<int>& digits) {
  for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
    digits[j] = static_cast<int>(idx % dims[j]);
    idx /= dims[j];
  }
}

std::vector<int> dims_of(const std::vector<SystemLabel>& systems) {
  std::vector<int> d(systems.size());
  for (size_t i = 0; i < systems.size(); ++i) d[i] = systems[i].dim;
  return d;
}

} // namespace

int dim_cap() { return g_dim_cap.load(); }

void set_dim_cap(int cap) {
  if (cap < 1) throw InputError("dimension cap must be positive");
  g_dim_cap.store(cap);
}

Op::Op(std::vector<SystemLabel> systems, Matrix m) : systems_(std::move(systems)) {
  check_unique_names(systems_);
  const long long d = total_dim(systems_);
  if (d > dim_cap()) {
    throw CapError("composite dimension " + std::to_string(d) + " exceeds cap " +
                   std::to_string(dim_cap()));
  }
  if (m.rows() != m.cols() || m.rows() != d) {
    throw InputError("matrix shape does not match labeled dimension " + std::to_string(d));
  }
  require_hermitian(m, "operator");
  mat_ = 0.5 * (m + m.adjoint().eval());
}

Op Op::from_matrix(const Matrix& m, const std::string& name) {
  return Op({{name, static_cast<int>(m.rows())}}, m);
}

bool Op::has_system(const std::string& name) const {
  for (const auto& s : systems_)
    if (s.name == name) return true;
  return false;
}

int Op::system_index(const std::string& name) const {
  for (size_t i = 0; i < systems_.size(); ++i)
    if (systems_[i].name == name) return static_cast<int>(i);
  throw InputError("unknown system label '" + name + "'");
}

int Op::system_dim(const std::string& name) const { return systems_[system_index(name)].dim; }

Op Op::relabeled(const std::vector<SystemLabel>& systems) const {
  if (total_dim(systems) != dim()) throw InputError("relabel changes total dimension");
  return Op(systems, mat_);
}

Op tensor(const Op& a, const Op& b) {
  std::vector<SystemLabel> systems = a.systems();
  for (const auto& s : b.systems()) {
    if (a.has_system(s.name)) throw InputError("label collision on '" + s.name + "' in tensor");
    systems.push_back(s);
  }
  const long long d = static_cast<long long>(a.dim()) * b.dim();
  if (d > dim_cap()) {
    throw CapError("tensor dimension " + std::to_string(d) + " exceeds cap " +
                   std::to_string(dim_cap()));
  }
  Matrix m(d, d);
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      m.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) = a.mat()(i, j) * b.mat();
  return Op(std::move(systems), std::move(m));
}

Op partial_trace(const Op& op, const std::vector<std::string>& discard) {
  if (discard.empty()) return op;
  std::vector<bool> drop(op.systems().size(), false);
  for (const auto& name : discard) drop[op.system_index(name)] = true;

  std::vector<SystemLabel> kept;
  std::vector<int> kept_pos, drop_pos;
  for (size_t i = 0; i < op.systems().size(); ++i) {
    if (drop[i]) {
      drop_pos.push_back(static_cast<int>(i));
    } else {
      kept.push_back(op.systems()[i]);
      kept_pos.push_back(static_cast<int>(i));
    }
  }
  const auto dims = dims_of(op.systems());
  long long dk = 1, dd = 1;
  for (int p : kept_pos) dk *= dims[p];
  for (int p : drop_pos) dd *= dims[p];

  // Strides of the full index.
  std::vector<long long> stride(dims.size(), 1);
  for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) stride[j] = stride[j + 1] * dims[j + 1];

  std::vector<int> kd(kept_pos.size()), dg(drop_pos.size());
  std::vector<int> kept_dims, drop_dims;
  for (int p : kept_pos) kept_dims.push_back(dims[p]);
  for (int p : drop_pos) drop_dims.push_back(dims[p]);

  Matrix out = Matrix::Zero(dk, dk);
  for (long long r = 0; r < dk; ++r) {
    decompose(r, kept_dims, kd);
    long long base_r = 0;
    for (size_t j = 0; j < kept_pos.size(); ++j) base_r += kd[j] * stride[kept_pos[j]];
    for (long long c = 0; c < dk; ++c) {
      decompose(c, kept_dims, kd);
      long long base_c = 0;
      for (size_t j = 0; j < kept_pos.size(); ++j) base_c += kd[j] * stride[kept_pos[j]];
      Complex sum = 0.0;
      for (long long s = 0; s < dd; ++s) {
        decompose(s, drop_dims, dg);
        long long off = 0;
        for (size_t j = 0; j < drop_pos.size(); ++j) off += dg[j] * stride[drop_pos[j]];
        sum += op.mat()(base_r + off, base_c + off);
      }
      out(r, c) = sum;
    }
  }
  if (kept.empty()) {
    // Scalar remainder: keep a trivial one-dimensional system.
    return Op({{"1", 1}}, out);
  }
  return Op(std::move(kept), std::move(out));
}

Op permute_systems(const Op& op, const std::vector<std::string>& order) {
  if (order.size() != op.systems().size()) throw InputError("permutation must list every label");
  std::vector<int> src(order.size());
  std::vector<SystemLabel> systems;
  for (size_t i = 0; i < order.size(); ++i) {
    src[i] = op.system_index(order[i]);
    systems.push_back(op.systems()[src[i]]);
  }
  const auto dims = dims_of(op.systems());
  std::vector<long long> stride(dims.size(), 1);
  for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) stride[j] = stride[j + 1] * dims[j + 1];

  const long long d = op.dim();
  std::vector<long long> map(d);
  std::vector<int> digits(dims.size());
  std::vector<int> new_dims;
  for (size_t i = 0; i < order.size(); ++i) new_dims.push_back(dims[src[i]]);
  for (long long i = 0; i < d; ++i) {
    decompose(i, new_dims, digits);  // digits in new order
    long long full = 0;
    for (size_t j = 0; j < digits.size(); ++j) full += static_cast<long long>(digits[j]) * stride[src[j]];
    map[i] = full;
  }
  Matrix out(d, d);
  for (long long r = 0; r < d; ++r)
    for (long long c = 0; c < d; ++c) out(r, c) = op.mat()(map[r], map[c]);
  return Op(std::move(systems), std::move(out));
}

Eigh eigh(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double trace_distance(const Op& rho, const Op& sigma) {
  require_same_systems(rho, sigma, "trace_distance");
  return 0.5 * trace_norm(rho.mat() - sigma.mat());
}

double fidelity(const Op& rho, const Op& sigma) {
  require_same_systems(rho, sigma, "fidelity");
  // ‖√ρ √σ‖₁ via singular values; better conditioned near F = 1 than the
  // eigenvalue form of √ρ σ √ρ.
  const Matrix cross = sqrt_psd(rho.mat()) * sqrt_psd(sigma.mat());
  Eigen::JacobiSVD<Matrix> svd(cross);
  return std::min(1.0, svd.singularValues().sum());
}

double purified_distance(const Op& rho, const Op& sigma) {
  const double f = fidelity(rho, sigma);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

Op positive_part_projector(const Op& h) {
  const Eigh e = eigh(h.mat());
  Matrix p = Matrix::Zero(h.dim(), h.dim());
  for (int i = 0; i < e.values.size(); ++i) {
    if (e.values[i] > kSupportTol) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return Op(h.systems(), std::move(p));
}

Op purify(const Op& rho, const std::string& ref_name) {
  require_density(rho, "purify");
  if (rho.has_system(ref_name)) throw InputError("reference label '" + ref_name + "' already in use");
  const Eigh e = eigh(rho.mat());
  const int d = rho.dim();
  Vector psi = Vector::Zero(static_cast<long long>(d) * d);
  for (int i = 0; i < d; ++i) {
    const double lam = std::max(0.0, e.values[i]);
    if (lam <= 0.0) continue;
    const double c = std::sqrt(lam);
    for (int a = 0; a < d; ++a) psi[static_cast<long long>(a) * d + i] += c * e.vectors(a, i);
  }
  std::vector<SystemLabel> systems = rho.systems();
  systems.push_back({ref_name, d});
  return Op(std::move(systems), psi * psi.adjoint());
}

Matrix support_projector(const Matrix& h, double tol) {
  const Eigh e = eigh(h);
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (int i = 0; i < e.values.size(); ++i) {
    if (std::abs(e.values[i]) > tol) p += e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return p;
}

Matrix sqrt_psd(const Matrix& h) {
  const Eigh e = eigh(h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (int i = 0; i < e.values.size(); ++i) {
    const double lam = std::max(0.0, e.values[i]);
    if (lam > 0.0) out += std::sqrt(lam) * e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return out;
}

Matrix inv_sqrt_on_support(const Matrix& h, double tol) {
  const Eigh e = eigh(h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (int i = 0; i < e.values.size(); ++i) {
    if (e.values[i] > tol) {
      out += (1.0 / std::sqrt(e.values[i])) * e.vectors.col(i) * e.vectors.col(i).adjoint();
    }
  }
  return out;
}

double trace_norm(const Matrix& m) {
  // Hermitian inputs only: sum of absolute eigenvalues.
  const Eigh e = eigh(m);
  double n = 0.0;
  for (int i = 0; i < e.values.size(); ++i) n += std::abs(e.values[i]);
  return n;
}

double min_eigenvalue(const Matrix& h) {
  const Eigh e = eigh(h);
  return e.values[0];
}

void require_hermitian(const Matrix& m, const std::string& what) {
  const double dev = (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol) {
    throw InputError(what + " is not Hermitian (max deviation " + std::to_string(dev) + ")");
  }
}

bool is_density(const Op& op, double tol) {
  if (std::abs(op.trace() - 1.0) > tol) return false;
  return min_eigenvalue(op.mat()) >= -tol;
}

void require_density(const Op& op, const std::string& what) {
  if (std::abs(op.trace() - 1.0) > kStateTol) {
    throw InputError(what + ": trace " + std::to_string(op.trace()) + " is not 1");
  }
  const double mn = min_eigenvalue(op.mat());
  if (mn < -kStateTol) {
    throw InputError(what + ": not positive semidefinite (min eigenvalue " + std::to_string(mn) + ")");
  }
}

void require_measurement(const Op& op, const std::string& what) {
  const Eigh e = eigh(op.mat());
  if (e.values[0] < -kStateTol || e.values[e.values.size() - 1] > 1.0 + kStateTol) {
    throw InputError(what + ": eigenvalues outside [0, 1]");
  }
}

void require_same_systems(const Op& a, const Op& b, const std::string& what) {
  if (a.systems().size() != b.systems().size() || a.dim() != b.dim()) {
    throw InputError(what + ": operands live on different systems");
  }
  for (size_t i = 0; i < a.systems().size(); ++i) {
    if (!(a.systems()[i] == b.systems()[i])) {
      throw InputError(what + ": operands live on different systems");
    }
  }
}

Matrix random_unitary(Rng& rng, int d) {
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase ambiguity so results are deterministic.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

Matrix random_isometry(Rng& rng, int d_out, int d_in) {
  if (d_in > d_out) throw InputError("isometry needs d_out >= d_in");
  return random_unitary(rng, d_out).leftCols(d_in);
}

Op random_density(Rng& rng, std::vector<SystemLabel> systems, int rank) {
  const long long d = [&] {
    long long x = 1;
    for (auto& s : systems) x *= s.dim;
    return x;
  }();
  const int r = rank > 0 ? rank : static_cast<int>(d);
  Matrix g(d, r);
  for (long long i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return Op(std::move(systems), std::move(rho));
}

Vector random_pure_vector(Rng& rng, int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = Complex(rng.gaussian(), rng.gaussian());
  v.normalize();
  return v;
}

} // namespace qcap
