#pragma once

#include <string>
#include <vector>

#include "qcap/channels.hpp"
#include "qcap/divergences.hpp"

namespace qcap {

struct CodeSizes {
  int M = 1;  // public messages
  int L = 1;  // private messages
  int K = 1;  // local key values
};

// Classical branch of the shared resource state: one codebook realization
// (x per copy, y per slot) together with its probability.
struct SharedBranch {
  std::vector<int> x;                // per public copy
  std::vector<std::vector<int>> y;   // per public copy, per (ℓ,k) slot
  double weight = 0.0;
};

// The shared state in block-sparse classical form: classical registers are
// weighted basis branches, each carrying a product of signal states on the A
// slots. Exact simulation scales with the number of branches rather than the
// full tensor dimension.
struct SharedState {
  CQWiretapEnsemble ensemble;
  CodeSizes sizes;
  std::vector<SharedBranch> branches;

  // Full dense operator with explicit classical registers, ordered per copy
  // as X, X', then per slot (A, Y, Y'). Subject to the dimension cap.
  Op materialize() const;
};

SharedState build_shared_state(const CQWiretapEnsemble& ens, const CodeSizes& sizes);

// Λ_m = S^{−1/2} Γ_m S^{−1/2} with S = ΣΓ_m (inverse on supp(S)), plus the
// completion element 1 − ΣΛ_m appended as the final entry.
std::vector<Op> square_root_measurement(const std::vector<Op>& positives);

enum class DecodeMode { Exact, Reduced };

struct PublicDecodeDetail {
  double error = 0.0;                 // exact SRM error, uniform over messages
  double bound = 0.0;                 // Hayashi-Nagaoka reduced bound
  double per_message_spread = 0.0;    // max |err_m − err| over messages
  std::vector<double> branch_weights; // per deterministic public codebook
  std::vector<double> branch_errors;
};

PublicDecodeDetail public_decode_detail(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                                        const CodeSizes& sizes, const SlackParams& s,
                                        double c_override = -1.0);

// mode Exact: average square-root-measurement error over branches and
// messages. mode Reduced: (1+c)α + (2+c+1/c)(M−1)β at the Neyman-Pearson
// optimal test with c = δ/(2ε−δ) unless overridden.
double public_decode_error(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                           const CodeSizes& sizes, DecodeMode mode, const SlackParams& s,
                           double c_override = -1.0);

struct SecrecyRow {
  int m = 0;
  int l = 0;
  double distance = 0.0;  // ½‖σ^{m,ℓ} − σ̂‖₁ against the K-averaged product reference
  bool pass = false;      // distance ≤ √ε′ + 1e-9
};

struct ProtocolReport {
  CodeSizes sizes;
  SlackParams slacks;

  double public_error = 0.0;
  double public_bound = 0.0;
  bool public_pass = false;

  double private_error = 0.0;  // Bob's private-message error, K-averaged
  double privacy_error = 0.0;  // merged criterion
  double privacy_bound = 0.0;  // 2(ε+√ε)+√ε′
  bool privacy_pass = false;

  double secrecy_bound = 0.0;  // √ε′
  std::vector<SecrecyRow> secrecy;

  // Size conditions behind the bounds.
  double log2_lk = 0.0;
  double lk_limit = 0.0;       // I_H^{ε−δ}(Y;B|X) − log₂(4ε/δ²)
  double log2_k = 0.0;
  double k_requirement = 0.0;  // Ĩ_max^{√ε′−δ′}(E;Y|X) + 2log₂(1/δ′), upper endpoint
  bool sizes_ok = false;

  std::vector<double> privacy_branch_weights;  // per private codebook realization
  std::vector<double> privacy_branch_errors;
};

// Exact protocol evaluation: per-x conditional square-root measurements,
// Bob's private-message error averaged over the key, Eve's secrecy distance
// per (m,ℓ), and the merged privacy criterion.
ProtocolReport privacy_error(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                             const CodeSizes& sizes, const SlackParams& s);

struct ConvexSplitResult {
  double distance = 0.0;  // exact P(τ_{A₁…A_K B}, ρ_A^{⊗K} ⊗ ρ_B)
  double bound = 0.0;     // √ε from the size condition; 1 when infeasible
};

ConvexSplitResult convex_split_check(const Op& rho_ab, const std::vector<std::string>& part_a,
                                     int k);

// λmin[(1+c)(1−S) + (2+c+1/c)T − (1 − (S+T)^{−1/2} S (S+T)^{−1/2})].
double hayashi_nagaoka_verify(const Op& s, const Op& t, double c);

// (‖ρ − √Λ ρ √Λ‖₁, 2√(1 − Tr{Λρ})).
std::pair<double, double> gentle_measurement_verify(const Op& rho, const Op& lambda);

struct DerandResult {
  size_t index = 0;
  double error = 0.0;
};

// Index of a deterministic codebook whose error does not exceed the ensemble
// average; ties break to the smallest index.
DerandResult derandomize_search(const std::vector<double>& weights,
                                const std::vector<double>& errors);

} // namespace qcap
