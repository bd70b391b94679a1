#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcap/divergences.hpp"
#include "qcap/qmat.hpp"

namespace qcap {

// Wiretap channel A → B⊗E given as an isometry (Stinespring dilation). The
// B output goes to the receiver, the complementary E output to the
// eavesdropper.
struct WiretapChannel {
  int input_dim = 0;
  Matrix isometry;  // (dimB·dimE) × dimA, V†V = 1
  SystemLabel out_b{"B", 0};
  SystemLabel out_e{"E", 0};

  void validate() const;
  int dim_b() const { return out_b.dim; }
  int dim_e() const { return out_e.dim; }
};

enum class ChannelKind { AmplitudeDamping, Depolarizing, Dephasing, Erasure };

ChannelKind channel_kind_from_string(const std::string& s);
std::string to_string(ChannelKind kind);

// Qubit channels as explicit isometries with minimal environment dimension
// (2 for amplitude damping and dephasing, 4 for depolarizing, 3 for erasure).
WiretapChannel standard_channel(ChannelKind kind, double param);

// Identity channel with a one-dimensional (trivial) environment.
WiretapChannel identity_channel(int dim);

WiretapChannel channel_from_isometry(const Matrix& v, int dim_b, int dim_e);

// Kraus operators K_k = (⟨k|_E ⊗ 1_B) V, indexed by the environment basis.
std::vector<Matrix> kraus_operators(const WiretapChannel& ch);

enum class KeepOutput { B, E, BE };

// VρV† followed by a partial trace onto the kept outputs. keep = E gives the
// complementary channel.
Op apply_channel(const WiretapChannel& ch, const Op& rho, KeepOutput keep);

// Applies the channel to one subsystem of a composite state; the target label
// is replaced by the kept output labels.
Op apply_channel_to(const WiretapChannel& ch, const Op& state, const std::string& target,
                    KeepOutput keep);

// Classical-quantum input ensemble {p(x,y), ρ_A^{x,y}}.
struct CQWiretapEnsemble {
  std::vector<std::string> x_alphabet;
  std::vector<std::string> y_alphabet;
  Eigen::MatrixXd p_xy;             // |X| × |Y|
  std::vector<std::vector<Op>> signals;  // [x][y] states on A

  void validate() const;
  int input_dim() const { return signals.at(0).at(0).dim(); }
  double px(size_t x) const;
  double py_given_x(size_t y, size_t x) const;
};

// ρ_XYBE with classical X, Y registers kept implicit: weights p(x,y) plus
// per-symbol channel outputs on B⊗E.
struct JointWiretapState {
  std::vector<std::string> x_alphabet;
  std::vector<std::string> y_alphabet;
  Eigen::MatrixXd p_xy;
  std::vector<std::vector<Op>> blocks_be;  // [x][y]

  double px(size_t x) const;
  double py_given_x(size_t y, size_t x) const;
  // Marginal block states used by the rate formulas.
  Op block_b(size_t x, size_t y) const;
  Op block_e(size_t x, size_t y) const;
};

JointWiretapState build_joint_state(const CQWiretapEnsemble& ens, const WiretapChannel& ch);

// σ_XRBE of a pure-signal ensemble: per-symbol purifications |φ^x⟩ on R⊗A
// pushed through the channel.
struct CoherentEnsembleState {
  std::vector<double> weights;      // p(x)
  std::vector<Vector> blocks_rbe;   // pure states on R⊗B⊗E, R-major
  int dim_r = 0;
  int dim_b = 0;
  int dim_e = 0;

  Op block_op(size_t x) const;  // labeled density operator R⊗B⊗E
};

CoherentEnsembleState coherent_ensemble_state(const std::vector<double>& weights,
                                              const std::vector<Vector>& purifications_ra,
                                              int dim_r, const WiretapChannel& ch);

// Per-symbol Schmidt decomposition across R | BE; the reference is measured in
// its Schmidt basis, producing a classical Y register with weights given by
// the squared Schmidt coefficients. Degenerate Schmidt values fall back to the
// eigensolver's basis choice.
JointWiretapState decohere_reference(const CoherentEnsembleState& state);

} // namespace qcap
