#include "qcap/rates.hpp"

#include <algorithm>
#include <cmath>

namespace qcap {

namespace {

constexpr double kWeightFloor = 1e-15;

std::vector<size_t> supported_x(const JointWiretapState& state) {
  std::vector<size_t> out;
  for (size_t x = 0; x < state.x_alphabet.size(); ++x) {
    if (state.px(x) > kWeightFloor) out.push_back(x);
  }
  if (out.empty()) throw InputError("joint state has empty X support");
  return out;
}

// Per-x CQ block Σ_y p(y|x) |y⟩⟨y| ⊗ W(x,y) for W one of the BE marginals.
template <typename BlockFn>
Op cq_block_y(const JointWiretapState& state, size_t x, const std::string& quantum_label,
              int quantum_dim, BlockFn&& block) {
  const int ny = static_cast<int>(state.y_alphabet.size());
  const long long d = static_cast<long long>(ny) * quantum_dim;
  Matrix m = Matrix::Zero(d, d);
  for (int y = 0; y < ny; ++y) {
    const double w = state.py_given_x(y, x);
    if (w <= kWeightFloor) continue;
    m.block(static_cast<long long>(y) * quantum_dim, static_cast<long long>(y) * quantum_dim,
            quantum_dim, quantum_dim) = w * block(x, y).mat();
  }
  return Op({{"Y", ny}, {quantum_label, quantum_dim}}, m);
}

} // namespace

Op cq_state_xb(const JointWiretapState& state) {
  const int nx = static_cast<int>(state.x_alphabet.size());
  const int db = state.blocks_be[0][0].system_dim("B");
  const long long d = static_cast<long long>(nx) * db;
  Matrix m = Matrix::Zero(d, d);
  for (int x = 0; x < nx; ++x) {
    Matrix bx = Matrix::Zero(db, db);
    for (size_t y = 0; y < state.y_alphabet.size(); ++y) {
      if (state.p_xy(x, y) <= kWeightFloor) continue;
      bx += state.p_xy(x, y) * state.block_b(x, y).mat();
    }
    m.block(static_cast<long long>(x) * db, static_cast<long long>(x) * db, db, db) = bx;
  }
  return Op({{"X", nx}, {"B", db}}, m);
}

CQQState cond_state_yb(const JointWiretapState& state) {
  const int db = state.blocks_be[0][0].system_dim("B");
  CQQState out;
  for (size_t x : supported_x(state)) {
    out.symbols.push_back(state.x_alphabet[x]);
    out.weights.push_back(state.px(x));
    out.blocks.push_back(cq_block_y(state, x, "B", db,
                                    [&](size_t xx, size_t yy) { return state.block_b(xx, yy); }));
  }
  return out;
}

CQQState cond_state_ye(const JointWiretapState& state) {
  const int de = state.blocks_be[0][0].system_dim("E");
  CQQState out;
  for (size_t x : supported_x(state)) {
    out.symbols.push_back(state.x_alphabet[x]);
    out.weights.push_back(state.px(x));
    out.blocks.push_back(cq_block_y(state, x, "E", de,
                                    [&](size_t xx, size_t yy) { return state.block_e(xx, yy); }));
  }
  return out;
}

RatePair achievable_pair(const JointWiretapState& state, const SlackParams& s) {
  s.validate();
  const double level = s.eps - s.delta;
  const double penalty = std::log2(4.0 * s.eps / (s.delta * s.delta));
  const double smoothing = std::sqrt(s.epsPrime) - s.deltaPrime;

  RatePair out;
  out.slacks = s;
  out.provenance = RateProvenance::Achievable;
  out.public_rate = i_h_eps(cq_state_xb(state), {"X"}, level) - penalty;

  const double bob = cond_i_h_eps(cond_state_yb(state), {"Y"}, level);
  const double eve = cond_i_max_alt_smooth(cond_state_ye(state), {"Y"}, smoothing).upper;
  out.private_rate = bob - eve - penalty - 2.0 * std::log2(1.0 / s.deltaPrime);
  return out;
}

RatePair converse_pair(const JointWiretapState& state, const SlackParams& s) {
  s.validate();
  RatePair out;
  out.slacks = s;
  out.provenance = RateProvenance::Converse;
  out.public_rate = i_h_eps(cq_state_xb(state), {"X"}, s.eps);

  const double bob = cond_i_h_eps(cond_state_yb(state), {"Y"}, std::sqrt(s.eps));
  // √(2ε′) can leave (0,1) for large ε′; the smoothing ball saturates there.
  const double smoothing = std::min(std::sqrt(2.0 * s.epsPrime), 1.0 - 1e-12);
  const double eve = cond_i_max_smooth(cond_state_ye(state), {"Y"}, smoothing).lower;
  out.private_rate = bob - eve;
  return out;
}

RatePair ds_region_point(const CoherentEnsembleState& state) {
  // CQ state on X ⊗ B for the public rate.
  const int nx = static_cast<int>(state.weights.size());
  const int db = state.dim_b;
  Matrix m = Matrix::Zero(static_cast<long long>(nx) * db, static_cast<long long>(nx) * db);
  double coh = 0.0;
  for (int x = 0; x < nx; ++x) {
    const Op block = state.block_op(x);
    const Op b = partial_trace(block, {"R", "E"});
    m.block(static_cast<long long>(x) * db, static_cast<long long>(x) * db, db, db) =
        state.weights[x] * b.mat();
    if (state.weights[x] > kWeightFloor) {
      const Op rb = partial_trace(block, {"E"});
      coh += state.weights[x] * coherent_info(rb, {"R"});
    }
  }
  RatePair out;
  out.provenance = RateProvenance::Asymptotic;
  out.public_rate = mutual_info(Op({{"X", nx}, {"B", db}}, m), {"X"});
  out.private_rate = coh;
  return out;
}

double private_to_coherent_check(const CoherentEnsembleState& state) {
  double lhs = 0.0;
  for (size_t x = 0; x < state.weights.size(); ++x) {
    if (state.weights[x] <= kWeightFloor) continue;
    const Op rb = partial_trace(state.block_op(x), {"E"});
    lhs += state.weights[x] * coherent_info(rb, {"R"});
  }

  const JointWiretapState bar = decohere_reference(state);
  double rhs = 0.0;
  for (size_t x = 0; x < bar.x_alphabet.size(); ++x) {
    const double px = bar.px(x);
    if (px <= kWeightFloor) continue;
    const Op yb = cq_block_y(bar, x, "B", state.dim_b,
                             [&](size_t xx, size_t yy) { return bar.block_b(xx, yy); });
    const Op ye = cq_block_y(bar, x, "E", state.dim_e,
                             [&](size_t xx, size_t yy) { return bar.block_e(xx, yy); });
    rhs += px * (mutual_info(yb, {"Y"}) - mutual_info(ye, {"Y"}));
  }
  return std::abs(lhs - rhs);
}

namespace {

std::vector<double> prob_grid(int n) {
  if (n <= 1) return {0.5};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / (n - 1);
  return g;
}

std::vector<double> angle_grid(int n) {
  if (n <= 1) return {0.0};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = M_PI * static_cast<double>(i) / (n - 1);
  return g;
}

Op pure_signal(double theta) {
  Vector v(2);
  v[0] = std::cos(theta / 2.0);
  v[1] = std::sin(theta / 2.0);
  return Op({{"A", 2}}, v * v.adjoint());
}

Vector purification_ra(double py0, double theta0, double theta1) {
  // |φ⟩ = Σ_y √p(y) |y⟩_R |ψ(θ_y)⟩_A, R-major layout.
  Vector phi = Vector::Zero(4);
  const double w[2] = {py0, 1.0 - py0};
  const double th[2] = {theta0, theta1};
  for (int y = 0; y < 2; ++y) {
    phi[2 * y + 0] += std::sqrt(w[y]) * std::cos(th[y] / 2.0);
    phi[2 * y + 1] += std::sqrt(w[y]) * std::sin(th[y] / 2.0);
  }
  return phi;
}

bool dominates(double r1, double p1, double r2, double p2) {
  return r1 >= r2 - 1e-12 && p1 >= p2 - 1e-12 && (r1 > r2 + 1e-12 || p1 > p2 + 1e-12);
}

} // namespace

std::vector<RegionSample> sweep_region(const WiretapChannel& ch, const EncoderGridSpec& grid,
                                       const SlackParams& s) {
  s.validate();
  ch.validate();
  if (ch.input_dim != 2) throw InputError("sweep_region enumerates qubit-input encoders only");

  const auto probs = prob_grid(grid.prob_points);
  const auto angles = angle_grid(grid.bloch_points);
  const long long np = static_cast<long long>(probs.size());
  const long long na = static_cast<long long>(angles.size());
  const long long combos = np * np * np * na * na * na * na;
  if (combos > grid.budget) {
    throw CapError("encoder grid of " + std::to_string(combos) + " points exceeds budget " +
                   std::to_string(grid.budget));
  }

  std::vector<RegionSample> samples;
  for (double a : probs) {
    for (double b : probs) {
      for (double c : probs) {
        for (double t00 : angles) {
          for (double t01 : angles) {
            for (double t10 : angles) {
              for (double t11 : angles) {
                CQWiretapEnsemble ens;
                ens.x_alphabet = {"0", "1"};
                ens.y_alphabet = {"0", "1"};
                ens.p_xy = Eigen::MatrixXd(2, 2);
                ens.p_xy << a * b, a * (1.0 - b), (1.0 - a) * c, (1.0 - a) * (1.0 - c);
                ens.signals = {{pure_signal(t00), pure_signal(t01)},
                               {pure_signal(t10), pure_signal(t11)}};

                const JointWiretapState joint = build_joint_state(ens, ch);
                RegionSample sample;
                sample.encoder_params = {a, b, c, t00, t01, t10, t11};
                sample.achievable = achievable_pair(joint, s);
                sample.converse = converse_pair(joint, s);
                const CoherentEnsembleState coh = coherent_ensemble_state(
                    {a, 1.0 - a},
                    {purification_ra(b, t00, t01), purification_ra(c, t10, t11)}, 2, ch);
                sample.asymptotic = ds_region_point(coh);
                samples.push_back(std::move(sample));
              }
            }
          }
        }
      }
    }
  }

  // Keep samples that are Pareto-optimal in at least one series.
  auto pair_of = [](const RegionSample& s, int series) {
    const RatePair& p = series == 0 ? s.achievable : (series == 1 ? s.converse : s.asymptotic);
    return std::make_pair(p.public_rate, p.private_rate);
  };
  std::vector<RegionSample> kept;
  for (size_t i = 0; i < samples.size(); ++i) {
    bool keep = false;
    for (int series = 0; series < 3 && !keep; ++series) {
      const auto [ri, pi] = pair_of(samples[i], series);
      bool dominated = false;
      for (size_t j = 0; j < samples.size() && !dominated; ++j) {
        if (j == i) continue;
        const auto [rj, pj] = pair_of(samples[j], series);
        if (dominates(rj, pj, ri, pi)) dominated = true;
      }
      if (!dominated) keep = true;
    }
    if (keep) kept.push_back(samples[i]);
  }
  return kept;
}

} // namespace qcap
