#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcap/qmat.hpp"

namespace qcap {

// All divergences are in bits (base-2 logarithms throughout).

struct SlackParams {
  double eps = 0.1;
  double epsPrime = 0.1;
  double delta = 0.05;
  double deltaPrime = 0.05;
  double gamma = 0.05;

  // eps, epsPrime in (0,1); delta in (0,eps); deltaPrime in (0,√epsPrime);
  // gamma in (0, √epsPrime − deltaPrime). Throws InputError otherwise.
  void validate() const;
};

// Result of the quantum Neyman-Pearson optimization. The test operator is
// {rho − threshold·sigma > 0} plus `boundary_weight` spread uniformly over the
// near-zero eigenspace, so typeI == eps up to the solver tolerance.
struct OptimalTest {
  double threshold = 0.0;
  double boundary_weight = 0.0;
  Op test;
  double typeI = 0.0;   // Tr{(1−T)ρ}
  double typeII = 0.0;  // Tr{Tσ}
};

struct DhResult {
  double bits = 0.0;  // −log2 typeII; +inf when a zero-typeII test is feasible
  OptimalTest test;
};

// Smoothed quantities are reported as an interval, never a point value: the
// upper endpoint is the unsmoothed feasible point, the lower endpoint the
// spectrum-clipping refinement. Rate formulas state which endpoint they use.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// CQ(Q) state: classical register with per-symbol blocks on shared labels.
struct CQQState {
  std::vector<std::string> symbols;
  std::vector<double> weights;
  std::vector<Op> blocks;

  void validate() const;
  size_t size() const { return weights.size(); }
};

double von_neumann_entropy(const Op& rho);

// Tr{ρ(log₂ρ − log₂σ)} on supp(ρ); +inf when supp(ρ) ⊄ supp(σ).
double relative_entropy(const Op& rho, const Op& sigma);

// Tr{ρ[log₂ρ − log₂σ − D(ρ‖σ)]²}; throws InputError on support violation.
double relative_entropy_variance(const Op& rho, const Op& sigma);

// log₂ λmax(σ^{−1/2} ρ σ^{−1/2}) on supp(σ); +inf on support violation.
double dmax(const Op& rho, const Op& sigma);

// Exact hypothesis-testing relative entropy at type-I level eps ∈ [0,1).
DhResult dh_eps(const Op& rho, const Op& sigma, double eps);

// Smooth max-relative entropy bounds over the purified-distance eps-ball.
Interval dmax_smooth(const Op& rho, const Op& sigma, double eps);

// Mutual-information variants. part_a lists the labels of the first argument;
// the complement of part_a is the second (whose marginal the alternate
// definition re-derives from the smoothed candidate).
double mutual_info(const Op& rho, const std::vector<std::string>& part_a);
double i_h_eps(const Op& rho, const std::vector<std::string>& part_a, double eps);
double i_max(const Op& rho, const std::vector<std::string>& part_a);
Interval i_max_smooth(const Op& rho, const std::vector<std::string>& part_a, double eps);
Interval i_max_alt_smooth(const Op& rho, const std::vector<std::string>& part_a, double eps);

// Conditional variants with a classical conditioning register. The nearby
// distributions are the renormalized restrictions to sub-alphabets whose
// purified distance to the original weights is at most the ball radius; the
// search is exact and limited to alphabets of at most 12 symbols. The radius
// of the distribution ball defaults to the per-block eps (pass ball_eps ≥ 0
// to decouple the two).
inline constexpr size_t kMaxCondAlphabet = 12;
double cond_mutual_info(const CQQState& state, const std::vector<std::string>& part_a);
double cond_i_h_eps(const CQQState& state, const std::vector<std::string>& part_a, double eps,
                    double ball_eps = -1.0);
Interval cond_i_max_smooth(const CQQState& state, const std::vector<std::string>& part_a, double eps);
Interval cond_i_max_alt_smooth(const CQQState& state, const std::vector<std::string>& part_a,
                               double eps);

// H(B) − H(AB) with part_a the "A" side.
double coherent_info(const Op& rho, const std::vector<std::string>& part_a);
double cond_coherent_info(const CQQState& state, const std::vector<std::string>& part_a);

// Gaussian-approximation expansions of the n-fold quantities, without the
// unspecified O(log n) term.
double second_order_dh(double d, double v, double eps, long long n);
double second_order_dmax(double d, double v, double eps, long long n);

double binary_entropy(double eps);
double inv_gaussian_cdf(double q);  // bisection, absolute tolerance 1e-10

} // namespace qcap
