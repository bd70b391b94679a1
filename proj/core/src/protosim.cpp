#include "qcap/protosim.hpp"

#include "qcap/rates.hpp"

#include <algorithm>
#include <cmath>

namespace qcap {

namespace {

constexpr double kWeightFloor = 1e-15;
constexpr long long kBranchBudget = 500000;

void validate_sizes(const CodeSizes& sizes) {
  if (sizes.M < 1 || sizes.L < 1 || sizes.K < 1) {
    throw InputError("code sizes must be positive");
  }
}

// Enumerate index vectors in {0..base−1}^len, first entry most significant.
bool next_tuple(std::vector<int>& t, int base) {
  for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) {
    if (++t[i] < base) return true;
    t[i] = 0;
  }
  return false;
}

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

} // namespace

SharedState build_shared_state(const CQWiretapEnsemble& ens, const CodeSizes& sizes) {
  ens.validate();
  validate_sizes(sizes);
  const int nx = static_cast<int>(ens.x_alphabet.size());
  const int ny = static_cast<int>(ens.y_alphabet.size());
  const int slots = sizes.L * sizes.K;

  const long long branch_count = ipow(nx, sizes.M) * ipow(ny, sizes.M * slots);
  if (branch_count > kBranchBudget) {
    throw CapError("shared state needs " + std::to_string(branch_count) +
                   " classical branches, budget is " + std::to_string(kBranchBudget));
  }
  const long long qdim = ipow(ens.input_dim(), sizes.M * slots);
  if (qdim > dim_cap()) {
    throw CapError("shared state quantum dimension " + std::to_string(qdim) + " exceeds cap");
  }

  SharedState out;
  out.ensemble = ens;
  out.sizes = sizes;

  std::vector<int> xv(sizes.M, 0);
  do {
    double wx = 1.0;
    for (int m = 0; m < sizes.M; ++m) wx *= ens.px(xv[m]);
    if (wx <= kWeightFloor) continue;
    std::vector<int> yv(static_cast<size_t>(sizes.M) * slots, 0);
    do {
      double w = wx;
      for (int m = 0; m < sizes.M && w > kWeightFloor; ++m) {
        for (int j = 0; j < slots; ++j) {
          w *= ens.py_given_x(yv[static_cast<size_t>(m) * slots + j], xv[m]);
          if (w <= kWeightFloor) break;
        }
      }
      if (w <= kWeightFloor) continue;
      SharedBranch branch;
      branch.x = xv;
      branch.weight = w;
      branch.y.resize(sizes.M);
      for (int m = 0; m < sizes.M; ++m) {
        branch.y[m].assign(yv.begin() + static_cast<long long>(m) * slots,
                           yv.begin() + static_cast<long long>(m + 1) * slots);
      }
      out.branches.push_back(std::move(branch));
    } while (next_tuple(yv, ny));
  } while (next_tuple(xv, nx));
  return out;
}

Op SharedState::materialize() const {
  const int nx = static_cast<int>(ensemble.x_alphabet.size());
  const int ny = static_cast<int>(ensemble.y_alphabet.size());
  const int da = ensemble.input_dim();
  const int slots = sizes.L * sizes.K;

  auto basis = [](int dim, int value) {
    Matrix m = Matrix::Zero(dim, dim);
    m(value, value) = 1.0;
    return m;
  };

  Op total;
  bool first = true;
  for (const auto& branch : branches) {
    Op term;
    bool term_first = true;
    for (int m = 0; m < sizes.M; ++m) {
      const std::string suffix = std::to_string(m + 1);
      Op copy = tensor(Op({{"X" + suffix, nx}}, basis(nx, branch.x[m])),
                       Op({{"X'" + suffix, nx}}, basis(nx, branch.x[m])));
      for (int j = 0; j < slots; ++j) {
        const std::string slot = suffix + "." + std::to_string(j + 1);
        const int y = branch.y[m][j];
        Op block = ensemble.signals[branch.x[m]][y].relabeled({{"A" + slot, da}});
        block = tensor(block, Op({{"Y" + slot, ny}}, basis(ny, y)));
        block = tensor(block, Op({{"Y'" + slot, ny}}, basis(ny, y)));
        copy = tensor(copy, block);
      }
      term = term_first ? copy : tensor(term, copy);
      term_first = false;
    }
    if (first) {
      total = Op(term.systems(), branch.weight * term.mat());
      first = false;
    } else {
      total = Op(total.systems(), total.mat() + branch.weight * term.mat());
    }
  }
  if (first) throw InputError("shared state has no supported branches");
  return total;
}

std::vector<Op> square_root_measurement(const std::vector<Op>& positives) {
  if (positives.empty()) throw InputError("square_root_measurement: empty input");
  Matrix s = Matrix::Zero(positives[0].dim(), positives[0].dim());
  for (const auto& g : positives) {
    require_same_systems(positives[0], g, "square_root_measurement");
    if (min_eigenvalue(g.mat()) < -kStateTol) {
      throw InputError("square_root_measurement: element is not positive semidefinite");
    }
    s += g.mat();
  }
  if (s.cwiseAbs().maxCoeff() < kWeightFloor) {
    throw InputError("square_root_measurement: all elements vanish");
  }
  const Matrix isq = inv_sqrt_on_support(s);
  std::vector<Op> out;
  Matrix sum = Matrix::Zero(s.rows(), s.cols());
  for (const auto& g : positives) {
    Matrix lam = isq * g.mat() * isq;
    lam = 0.5 * (lam + lam.adjoint().eval());
    sum += lam;
    out.emplace_back(g.systems(), std::move(lam));
  }
  out.emplace_back(positives[0].systems(), Matrix::Identity(s.rows(), s.cols()) - sum);
  return out;
}

namespace {

// Shared machinery: NP tests for the public (X;B) and private (Y;B|X) stages.

struct PublicStage {
  std::vector<Matrix> rho_b;   // per x, dB × dB
  std::vector<Matrix> w;       // per x, diagonal blocks of the optimal test
  double type1 = 0.0;
  double type2 = 0.0;
  int db = 0;
};

PublicStage public_stage(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                         const SlackParams& s) {
  s.validate();
  const JointWiretapState joint = build_joint_state(ens, ch);
  const Op rho_xb = cq_state_xb(joint);
  const int nx = static_cast<int>(ens.x_alphabet.size());
  const int db = ch.dim_b();

  const DhResult np = dh_eps(
      rho_xb, [&] {
        const Op a = partial_trace(rho_xb, {"B"});
        const Op b = partial_trace(rho_xb, {"X"});
        return tensor(a, b);
      }(),
      s.eps - s.delta);

  PublicStage out;
  out.db = db;
  out.type1 = np.test.typeI;
  out.type2 = np.test.typeII;
  for (int x = 0; x < nx; ++x) {
    Matrix bx = Matrix::Zero(db, db);
    for (size_t y = 0; y < ens.y_alphabet.size(); ++y) {
      if (ens.p_xy(x, y) <= kWeightFloor) continue;
      bx += ens.py_given_x(y, x) *
            apply_channel(ch, ens.signals[x][y], KeepOutput::B).mat();
    }
    out.rho_b.push_back(std::move(bx));
    Matrix wx = np.test.test.mat().block(static_cast<long long>(x) * db,
                                         static_cast<long long>(x) * db, db, db);
    out.w.push_back(0.5 * (wx + wx.adjoint().eval()));
  }
  return out;
}

struct PrivateStage {
  // Indexed [x][y].
  std::vector<std::vector<Matrix>> sigma_be;
  std::vector<std::vector<Matrix>> sigma_b;
  std::vector<std::vector<Matrix>> sigma_e;
  std::vector<std::vector<Matrix>> g;  // test blocks ⟨y|Z^x|y⟩
  std::vector<Matrix> sigma_e_avg;     // per x
  int db = 0;
  int de = 0;
};

PrivateStage private_stage(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                           const SlackParams& s) {
  const JointWiretapState joint = build_joint_state(ens, ch);
  const int nx = static_cast<int>(ens.x_alphabet.size());
  const int ny = static_cast<int>(ens.y_alphabet.size());
  const int db = ch.dim_b();
  const int de = ch.dim_e();

  PrivateStage out;
  out.db = db;
  out.de = de;
  out.sigma_be.resize(nx);
  out.sigma_b.resize(nx);
  out.sigma_e.resize(nx);
  out.g.resize(nx);
  out.sigma_e_avg.assign(nx, Matrix::Zero(de, de));

  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const Op be = joint.blocks_be[x][y];
      out.sigma_be[x].push_back(be.mat());
      out.sigma_b[x].push_back(partial_trace(be, {"E"}).mat());
      out.sigma_e[x].push_back(partial_trace(be, {"B"}).mat());
      out.sigma_e_avg[x] += joint.py_given_x(y, x) * out.sigma_e[x].back();
    }
    if (joint.px(x) <= kWeightFloor) {
      out.g[x].assign(ny, Matrix::Zero(db, db));
      continue;
    }
    // Optimal test for σ_YB^x against σ_Y^x ⊗ σ_B^x at level ε−δ.
    Matrix yb = Matrix::Zero(static_cast<long long>(ny) * db, static_cast<long long>(ny) * db);
    for (int y = 0; y < ny; ++y) {
      yb.block(static_cast<long long>(y) * db, static_cast<long long>(y) * db, db, db) =
          joint.py_given_x(y, x) * out.sigma_b[x][y];
    }
    const Op rho_yb({{"Y", ny}, {"B", db}}, yb);
    const Op prod = [&] {
      const Op a = partial_trace(rho_yb, {"B"});
      const Op b = partial_trace(rho_yb, {"Y"});
      return tensor(a, b);
    }();
    const DhResult np = dh_eps(rho_yb, prod, s.eps - s.delta);
    for (int y = 0; y < ny; ++y) {
      Matrix gx = np.test.test.mat().block(static_cast<long long>(y) * db,
                                           static_cast<long long>(y) * db, db, db);
      out.g[x].push_back(0.5 * (gx + gx.adjoint().eval()));
    }
  }
  return out;
}

// SRM over a list of raw PSD matrices; returns the POVM elements plus the
// completion element at the end.
std::vector<Matrix> srm_raw(const std::vector<Matrix>& gs) {
  Matrix s = Matrix::Zero(gs[0].rows(), gs[0].cols());
  for (const auto& g : gs) s += g;
  const Matrix isq = inv_sqrt_on_support(s);
  std::vector<Matrix> out;
  Matrix sum = Matrix::Zero(s.rows(), s.cols());
  for (const auto& g : gs) {
    Matrix lam = isq * g * isq;
    lam = 0.5 * (lam + lam.adjoint().eval());
    sum += lam;
    out.push_back(std::move(lam));
  }
  out.push_back(Matrix::Identity(s.rows(), s.cols()) - sum);
  return out;
}

// Partial trace over B of (ω_B ⊗ 1_E) · σ_BE, for σ on B⊗E with B major.
Matrix trace_out_b(const Matrix& omega_b, const Matrix& sigma_be, int db, int de) {
  Matrix out = Matrix::Zero(de, de);
  for (int b1 = 0; b1 < db; ++b1) {
    for (int b2 = 0; b2 < db; ++b2) {
      if (std::abs(omega_b(b1, b2)) < 1e-300) continue;
      // (ω⊗1 σ) block (b1·de.., b1·de..) picks σ block rows from b2.
      out += omega_b(b1, b2) *
             sigma_be.block(static_cast<long long>(b2) * de, static_cast<long long>(b1) * de, de, de);
    }
  }
  return out;
}

double hermitian_trace_norm(const Matrix& m) { return trace_norm(0.5 * (m + m.adjoint().eval())); }

} // namespace

PublicDecodeDetail public_decode_detail(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                                        const CodeSizes& sizes, const SlackParams& s,
                                        double c_override) {
  ens.validate();
  ch.validate();
  validate_sizes(sizes);
  const PublicStage stage = public_stage(ens, ch, s);
  const int nx = static_cast<int>(ens.x_alphabet.size());
  const int m_count = sizes.M;

  const long long branch_count = ipow(nx, m_count);
  if (branch_count > kBranchBudget) {
    throw CapError("public decoding would enumerate " + std::to_string(branch_count) +
                   " codebooks, budget is " + std::to_string(kBranchBudget));
  }

  const double c = c_override > 0.0 ? c_override : s.delta / (2.0 * s.eps - s.delta);
  PublicDecodeDetail out;
  out.bound = (1.0 + c) * stage.type1 +
              (2.0 + c + 1.0 / c) * static_cast<double>(m_count - 1) * stage.type2;

  if (m_count == 1) {
    // Single hypothesis: the decoder declares the only message.
    out.error = 0.0;
    out.branch_weights.assign(nx, 0.0);
    for (int x = 0; x < nx; ++x) out.branch_weights[x] = ens.px(x);
    out.branch_errors.assign(nx, 0.0);
    return out;
  }

  std::vector<double> per_message(m_count, 0.0);
  std::vector<int> xv(m_count, 0);
  double total_weight = 0.0;
  do {
    double w = 1.0;
    for (int m = 0; m < m_count; ++m) w *= ens.px(xv[m]);
    std::vector<Matrix> gs;
    for (int m = 0; m < m_count; ++m) gs.push_back(stage.w[xv[m]]);
    double branch_err = 0.0;
    if (w > kWeightFloor) {
      const std::vector<Matrix> povm = srm_raw(gs);
      for (int m = 0; m < m_count; ++m) {
        const double succ = std::real((povm[m] * stage.rho_b[xv[m]]).trace());
        const double err = std::clamp(1.0 - succ, 0.0, 1.0);
        per_message[m] += w * err;
        branch_err += err / m_count;
      }
    }
    out.branch_weights.push_back(w);
    out.branch_errors.push_back(branch_err);
    total_weight += w;
  } while (next_tuple(xv, nx));

  double avg = 0.0;
  for (double e : per_message) avg += e;
  avg /= m_count;
  out.error = avg;
  out.per_message_spread = 0.0;
  for (double e : per_message) out.per_message_spread = std::max(out.per_message_spread, std::abs(e - avg));
  if (out.per_message_spread > 1e-10) {
    throw std::runtime_error("public decoding lost permutation symmetry across messages");
  }
  (void)total_weight;
  return out;
}

double public_decode_error(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                           const CodeSizes& sizes, DecodeMode mode, const SlackParams& s,
                           double c_override) {
  const PublicDecodeDetail detail = public_decode_detail(ens, ch, sizes, s, c_override);
  return mode == DecodeMode::Exact ? detail.error : detail.bound;
}

ProtocolReport privacy_error(const CQWiretapEnsemble& ens, const WiretapChannel& ch,
                             const CodeSizes& sizes, const SlackParams& s) {
  ens.validate();
  ch.validate();
  validate_sizes(sizes);
  s.validate();

  ProtocolReport report;
  report.sizes = sizes;
  report.slacks = s;

  const PublicDecodeDetail pub = public_decode_detail(ens, ch, sizes, s);
  report.public_error = pub.error;
  report.public_bound = pub.bound;
  report.public_pass = pub.error <= pub.bound + 1e-9;

  const PrivateStage stage = private_stage(ens, ch, s);
  const int nx = static_cast<int>(ens.x_alphabet.size());
  const int ny = static_cast<int>(ens.y_alphabet.size());
  const int slots = sizes.L * sizes.K;

  const long long branch_count = static_cast<long long>(nx) * ipow(ny, slots);
  if (branch_count > kBranchBudget) {
    throw CapError("privacy evaluation would enumerate " + std::to_string(branch_count) +
                   " branches, budget is " + std::to_string(kBranchBudget));
  }

  double private_err = 0.0;
  double merged = 0.0;
  std::vector<double> secrecy_per_l(sizes.L, 0.0);

  std::vector<int> yv(slots, 0);
  for (int x = 0; x < nx; ++x) {
    const double px = ens.px(x);
    if (px <= kWeightFloor) continue;
    std::fill(yv.begin(), yv.end(), 0);
    do {
      double w = px;
      for (int j = 0; j < slots && w > kWeightFloor; ++j) w *= ens.py_given_x(yv[j], x);
      if (w <= kWeightFloor) continue;

      std::vector<Matrix> povm;  // slots entries + completion
      if (sizes.L > 1) {
        std::vector<Matrix> gs;
        for (int j = 0; j < slots; ++j) gs.push_back(stage.g[x][yv[j]]);
        povm = srm_raw(gs);
      }

      double branch_priv = 0.0;
      double branch_merged = 0.0;
      for (int l = 0; l < sizes.L; ++l) {
        // Decoder output blocks on E for true message l, key-averaged.
        std::vector<Matrix> a_blocks;  // per decoded l' plus fail at the end
        if (sizes.L == 1) {
          Matrix a1 = Matrix::Zero(stage.de, stage.de);
          for (int k = 0; k < sizes.K; ++k) {
            a1 += stage.sigma_e[x][yv[l * sizes.K + k]] / sizes.K;
          }
          a_blocks.push_back(std::move(a1));
        } else {
          a_blocks.assign(sizes.L + 1, Matrix::Zero(stage.de, stage.de));
          for (int k = 0; k < sizes.K; ++k) {
            const Matrix& sigma = stage.sigma_be[x][yv[l * sizes.K + k]];
            for (int lp = 0; lp < sizes.L; ++lp) {
              Matrix omega = Matrix::Zero(stage.db, stage.db);
              for (int kp = 0; kp < sizes.K; ++kp) omega += povm[lp * sizes.K + kp];
              a_blocks[lp] += trace_out_b(omega, sigma, stage.db, stage.de) / sizes.K;
            }
            a_blocks[sizes.L] += trace_out_b(povm[slots], sigma, stage.db, stage.de) / sizes.K;
          }
        }

        // Bob's private-message error: mass landing outside bin l.
        double err = 0.0;
        if (sizes.L > 1) {
          for (int lp = 0; lp <= sizes.L; ++lp) {
            if (lp == l) continue;
            err += std::real(a_blocks[lp].trace());
          }
        }
        branch_priv += err / sizes.L;

        // Merged criterion against |l⟩⟨l| ⊗ σ̃_E^x.
        double dist = 0.0;
        for (int lp = 0; lp < static_cast<int>(a_blocks.size()); ++lp) {
          if (lp == l || (sizes.L == 1 && lp == 0)) {
            dist += hermitian_trace_norm(a_blocks[lp] - stage.sigma_e_avg[x]);
          } else {
            dist += hermitian_trace_norm(a_blocks[lp]);
          }
        }
        branch_merged += 0.5 * dist / sizes.L;

        // Secrecy distance of Eve's key-averaged state from the product
        // reference; only the bin-l slots matter.
        Matrix eve = Matrix::Zero(stage.de, stage.de);
        for (int k = 0; k < sizes.K; ++k) eve += stage.sigma_e[x][yv[l * sizes.K + k]] / sizes.K;
        secrecy_per_l[l] += w * 0.5 * hermitian_trace_norm(eve - stage.sigma_e_avg[x]);
      }
      private_err += w * branch_priv;
      merged += w * branch_merged;
      report.privacy_branch_weights.push_back(w);
      report.privacy_branch_errors.push_back(branch_merged);
    } while (next_tuple(yv, ny));
  }

  report.private_error = private_err;
  report.privacy_error = merged;
  report.privacy_bound = 2.0 * (s.eps + std::sqrt(s.eps)) + std::sqrt(s.epsPrime);
  report.privacy_pass = merged <= report.privacy_bound + 1e-9;
  report.secrecy_bound = std::sqrt(s.epsPrime);
  for (int m = 0; m < sizes.M; ++m) {
    for (int l = 0; l < sizes.L; ++l) {
      SecrecyRow row;
      row.m = m + 1;
      row.l = l + 1;
      row.distance = secrecy_per_l[l];
      row.pass = row.distance <= report.secrecy_bound + 1e-9;
      report.secrecy.push_back(row);
    }
  }

  // Size conditions of the one-shot bounds.
  const JointWiretapState joint = build_joint_state(ens, ch);
  const double level = s.eps - s.delta;
  const double penalty = std::log2(4.0 * s.eps / (s.delta * s.delta));
  report.log2_lk = std::log2(static_cast<double>(sizes.L) * sizes.K);
  report.lk_limit = cond_i_h_eps(cond_state_yb(joint), {"Y"}, level) - penalty;
  report.log2_k = std::log2(static_cast<double>(sizes.K));
  const double smoothing = std::sqrt(s.epsPrime) - s.deltaPrime;
  report.k_requirement = cond_i_max_alt_smooth(cond_state_ye(joint), {"Y"}, smoothing).upper +
                         2.0 * std::log2(1.0 / s.deltaPrime);
  report.sizes_ok = report.log2_lk <= report.lk_limit + 1e-9 &&
                    report.log2_k >= report.k_requirement - 1e-9;
  return report;
}

ConvexSplitResult convex_split_check(const Op& rho_ab, const std::vector<std::string>& part_a,
                                     int k) {
  if (k < 1) throw InputError("convex_split_check: K must be positive");
  require_density(rho_ab, "convex_split_check");

  std::vector<std::string> part_b;
  for (const auto& sys : rho_ab.systems()) {
    if (std::find(part_a.begin(), part_a.end(), sys.name) == part_a.end()) {
      part_b.push_back(sys.name);
    }
  }
  const Op rho_a = partial_trace(rho_ab, part_b);
  const Op rho_b = partial_trace(rho_ab, part_a);

  long long total = rho_b.dim();
  for (int i = 0; i < k; ++i) {
    total *= rho_a.dim();
    if (total > dim_cap()) {
      throw CapError("convex split dimension exceeds cap at K=" + std::to_string(k));
    }
  }

  auto a_label = [&](int slot) {
    std::vector<SystemLabel> labels;
    for (const auto& sys : rho_a.systems()) {
      labels.push_back({sys.name + "_" + std::to_string(slot + 1), sys.dim});
    }
    return labels;
  };
  auto ab_label = [&](int slot) {
    std::vector<SystemLabel> labels;
    for (const auto& sys : rho_ab.systems()) {
      const bool in_a =
          std::find(part_a.begin(), part_a.end(), sys.name) != part_a.end();
      labels.push_back({in_a ? sys.name + "_" + std::to_string(slot + 1) : sys.name, sys.dim});
    }
    return labels;
  };

  // Canonical system order A_1 … A_K, B.
  std::vector<std::string> order;
  for (int slot = 0; slot < k; ++slot) {
    for (const auto& l : a_label(slot)) order.push_back(l.name);
  }
  for (const auto& name : part_b) order.push_back(name);

  Matrix tau;
  for (int slot = 0; slot < k; ++slot) {
    Op term = rho_ab.relabeled(ab_label(slot));
    for (int other = 0; other < k; ++other) {
      if (other == slot) continue;
      term = tensor(term, rho_a.relabeled(a_label(other)));
    }
    term = permute_systems(term, order);
    if (slot == 0) {
      tau = term.mat() / k;
    } else {
      tau += term.mat() / k;
    }
  }
  Op prod = rho_a.relabeled(a_label(0));
  for (int slot = 1; slot < k; ++slot) prod = tensor(prod, rho_a.relabeled(a_label(slot)));
  prod = permute_systems(tensor(prod, rho_b), order);

  ConvexSplitResult out;
  out.distance = purified_distance(Op(prod.systems(), tau), prod);
  const double imax = dmax(rho_ab, permute_systems(tensor(rho_a, rho_b), [&] {
                             std::vector<std::string> names;
                             for (const auto& sys : rho_ab.systems()) names.push_back(sys.name);
                             return names;
                           }()));
  const double ratio = std::pow(2.0, imax) / static_cast<double>(k);
  out.bound = ratio <= 1.0 ? std::sqrt(ratio) : 1.0;
  return out;
}

double hayashi_nagaoka_verify(const Op& s, const Op& t, double c) {
  if (c <= 0.0) throw InputError("hayashi_nagaoka_verify: c must be positive");
  require_same_systems(s, t, "hayashi_nagaoka_verify");
  require_measurement(s, "hayashi_nagaoka_verify S");
  if (min_eigenvalue(t.mat()) < -kStateTol) {
    throw InputError("hayashi_nagaoka_verify: T is not positive semidefinite");
  }
  const int n = s.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix sum = s.mat() + t.mat();
  const Matrix isq = inv_sqrt_on_support(sum);
  const Matrix lhs = id - isq * s.mat() * isq;
  const Matrix rhs = (1.0 + c) * (id - s.mat()) + (2.0 + c + 1.0 / c) * t.mat();
  return min_eigenvalue(0.5 * ((rhs - lhs) + (rhs - lhs).adjoint().eval()));
}

std::pair<double, double> gentle_measurement_verify(const Op& rho, const Op& lambda) {
  require_same_systems(rho, lambda, "gentle_measurement_verify");
  require_density(rho, "gentle_measurement_verify rho");
  require_measurement(lambda, "gentle_measurement_verify lambda");
  const Matrix sq = sqrt_psd(lambda.mat());
  const double lhs = hermitian_trace_norm(rho.mat() - sq * rho.mat() * sq);
  const double keep = std::real((lambda.mat() * rho.mat()).trace());
  const double rhs = 2.0 * std::sqrt(std::max(0.0, 1.0 - keep));
  return {lhs, rhs};
}

DerandResult derandomize_search(const std::vector<double>& weights,
                                const std::vector<double>& errors) {
  if (weights.empty() || weights.size() != errors.size()) {
    throw InputError("derandomize_search: empty or mismatched table");
  }
  double total = 0.0;
  double avg = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InputError("derandomize_search: negative weight");
    total += weights[i];
    avg += weights[i] * errors[i];
  }
  if (total <= 0.0) throw InputError("derandomize_search: zero total weight");
  avg /= total;

  size_t best = 0;
  for (size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] < errors[best]) best = i;
  }
  DerandResult out{best, errors[best]};
  if (out.error > avg + 1e-12) {
    throw std::runtime_error("derandomize_search: minimum exceeds the ensemble average");
  }
  return out;
}

} // namespace qcap
