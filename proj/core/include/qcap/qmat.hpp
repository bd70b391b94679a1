#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcap/rng.hpp"

namespace qcap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
// Eigenvalues below this magnitude count as zero for support/rank decisions.
inline constexpr double kSupportTol = 1e-10;
inline constexpr double kStateTol = 1e-10;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Invalid or inconsistent input (bad labels, dimension mismatch, malformed
// documents). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Composite dimension exceeds the configured cap. CLI exit code 3.
class CapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Maximum composite dimension for dense operators (default 4096). The CLI
// overrides it from --dim-cap or ONESHOT_QCAP_DIM_CAP.
int dim_cap();
void set_dim_cap(int cap);

struct SystemLabel {
  std::string name;
  int dim = 0;

  friend bool operator==(const SystemLabel& a, const SystemLabel& b) {
    return a.name == b.name && a.dim == b.dim;
  }
};

// Hermitian operator on a labeled tensor factorization. The first label is
// the most significant index (Kronecker order). Construction symmetrizes and
// rejects matrices whose anti-Hermitian part exceeds kHermitianTol.
class Op {
public:
  Op() = default;
  Op(std::vector<SystemLabel> systems, Matrix m);

  // Single unnamed system of the matrix dimension.
  static Op from_matrix(const Matrix& m, const std::string& name = "A");

  const std::vector<SystemLabel>& systems() const { return systems_; }
  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  double trace() const { return mat_.trace().real(); }

  bool has_system(const std::string& name) const;
  int system_index(const std::string& name) const;  // throws on miss
  int system_dim(const std::string& name) const;

  Op relabeled(const std::vector<SystemLabel>& systems) const;

private:
  std::vector<SystemLabel> systems_;
  Matrix mat_;
};

// ---- composition and reduction ----

Op tensor(const Op& a, const Op& b);
// Marginal on the remaining labels; order of kept labels preserved.
Op partial_trace(const Op& op, const std::vector<std::string>& discard);
// Reorder tensor factors to the given complete label order.
Op permute_systems(const Op& op, const std::vector<std::string>& order);

// ---- distance measures ----

double trace_distance(const Op& rho, const Op& sigma);
double fidelity(const Op& rho, const Op& sigma);
double purified_distance(const Op& rho, const Op& sigma);

// ---- spectral helpers ----

struct Eigh {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};
Eigh eigh(const Matrix& h);

// Projector onto eigenspaces with eigenvalue > kSupportTol.
Op positive_part_projector(const Op& h);

// Rank-1 purification on system ⊗ reference; the reference label gets the
// same dimension as the input.
Op purify(const Op& rho, const std::string& ref_name = "R");

// Matrix-level utilities shared by the upper layers. All assume Hermitian
// input; "on support" means the pseudo-inverse convention with kSupportTol.
Matrix support_projector(const Matrix& h, double tol = kSupportTol);
Matrix sqrt_psd(const Matrix& h);
Matrix inv_sqrt_on_support(const Matrix& h, double tol = kSupportTol);
double trace_norm(const Matrix& m);
double min_eigenvalue(const Matrix& h);

// ---- validation ----

void require_hermitian(const Matrix& m, const std::string& what);
bool is_density(const Op& op, double tol = kStateTol);
void require_density(const Op& op, const std::string& what);
void require_measurement(const Op& op, const std::string& what);
void require_same_systems(const Op& a, const Op& b, const std::string& what);

// ---- seeded generators (property suites and fixtures) ----

Matrix random_unitary(Rng& rng, int d);
// Haar-ish isometry with rows ⊗ cols = (d_out, d_in), d_out ≥ d_in.
Matrix random_isometry(Rng& rng, int d_out, int d_in);
Op random_density(Rng& rng, std::vector<SystemLabel> systems, int rank = 0);
Vector random_pure_vector(Rng& rng, int d);

} // namespace qcap
