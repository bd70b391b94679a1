#pragma once

#include <string>
#include <vector>

#include "qcap/channels.hpp"
#include "qcap/divergences.hpp"

namespace qcap {

enum class RateProvenance { Achievable, Converse, Asymptotic };

// One (public, private) rate pair in bits, together with the slack parameters
// that produced it. Negative bounds are reported as-is; clamping to zero is a
// plotting concern only.
struct RatePair {
  double public_rate = 0.0;
  double private_rate = 0.0;
  SlackParams slacks;
  RateProvenance provenance = RateProvenance::Achievable;
};

// One-shot inner bound:
//   r ≤ I_H^{ε−δ}(X;B) − log₂(4ε/δ²)
//   R ≤ I_H^{ε−δ}(Y;B|X) − Ĩ_max^{√ε′−δ′}(Y;E|X) − log₂(4ε/δ²) − 2log₂(1/δ′)
// The Eve penalty consumes the upper smoothing endpoint so the reported pair
// stays achievable.
RatePair achievable_pair(const JointWiretapState& state, const SlackParams& s);

// One-shot outer bound:
//   r ≤ I_H^{ε}(X;B)
//   R ≤ I_H^{√ε}(Y;B|X) − I_max^{√(2ε′)}(Y;E|X)
// The Eve term consumes the lower smoothing endpoint so the reported pair
// stays an outer bound.
RatePair converse_pair(const JointWiretapState& state, const SlackParams& s);

// Asymptotic corner point r ≤ I(X;B), R ≤ I(R⟩BX).
RatePair ds_region_point(const CoherentEnsembleState& state);

// |I(R⟩BX)_σ − (I(Y;B|X) − I(Y;E|X))_σ̄| with σ̄ the decohered state.
double private_to_coherent_check(const CoherentEnsembleState& state);

struct EncoderGridSpec {
  int prob_points = 3;   // marginal and conditional probability grids
  int bloch_points = 3;  // polar-angle grid for the qubit signals
  long long budget = 200000;
};

struct RegionSample {
  std::vector<double> encoder_params;  // px0, py0_given_x0, py0_given_x1, θ00, θ01, θ10, θ11
  RatePair achievable;
  RatePair converse;
  RatePair asymptotic;
};

// Enumerates binary-alphabet ensembles with pure qubit signals over the grid,
// evaluates all three rate pairs and keeps the samples that are
// Pareto-optimal in at least one series.
std::vector<RegionSample> sweep_region(const WiretapChannel& ch, const EncoderGridSpec& grid,
                                       const SlackParams& s);

// Conditional CQQ views of ρ_XYBE used by the rate formulas (supported x
// symbols only); exposed for tests and the protocol simulator.
Op cq_state_xb(const JointWiretapState& state);
CQQState cond_state_yb(const JointWiretapState& state);
CQQState cond_state_ye(const JointWiretapState& state);

} // namespace qcap
