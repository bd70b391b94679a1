#include "qcap/channels.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace qcap {

namespace {

constexpr double kIsometryTol = 1e-10;

Matrix isometry_from_kraus(const std::vector<Matrix>& kraus, int dim_b, int dim_e) {
  const int dim_a = static_cast<int>(kraus.at(0).cols());
  Matrix v = Matrix::Zero(static_cast<long long>(dim_b) * dim_e, dim_a);
  for (int e = 0; e < dim_e; ++e) {
    for (int b = 0; b < dim_b; ++b) {
      for (int a = 0; a < dim_a; ++a) {
        // Row index is B-major: (b, e) ↦ b·dimE + e.
        v(static_cast<long long>(b) * dim_e + e, a) = kraus[e](b, a);
      }
    }
  }
  return v;
}

} // namespace

void WiretapChannel::validate() const {
  if (input_dim < 1 || out_b.dim < 1 || out_e.dim < 1) {
    throw InputError("channel dimensions must be positive");
  }
  if (isometry.rows() != static_cast<long long>(out_b.dim) * out_e.dim ||
      isometry.cols() != input_dim) {
    throw InputError("isometry shape does not match declared dimensions");
  }
  const Matrix gram = isometry.adjoint() * isometry;
  const double dev = (gram - Matrix::Identity(input_dim, input_dim)).cwiseAbs().maxCoeff();
  if (dev > kIsometryTol) {
    throw InputError("isometry condition violated (max deviation " + std::to_string(dev) + ")");
  }
}

ChannelKind channel_kind_from_string(const std::string& s) {
  if (s == "amplitude_damping") return ChannelKind::AmplitudeDamping;
  if (s == "depolarizing") return ChannelKind::Depolarizing;
  if (s == "dephasing") return ChannelKind::Dephasing;
  if (s == "erasure") return ChannelKind::Erasure;
  throw InputError("unknown channel kind '" + s + "'");
}

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::AmplitudeDamping: return "amplitude_damping";
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::Dephasing: return "dephasing";
    case ChannelKind::Erasure: return "erasure";
  }
  return "?";
}

WiretapChannel standard_channel(ChannelKind kind, double param) {
  if (!(param >= 0.0 && param <= 1.0)) {
    throw InputError("channel parameter " + std::to_string(param) + " outside [0,1]");
  }
  WiretapChannel ch;
  ch.input_dim = 2;
  switch (kind) {
    case ChannelKind::AmplitudeDamping: {
      Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
      k0(0, 0) = 1.0;
      k0(1, 1) = std::sqrt(1.0 - param);
      k1(0, 1) = std::sqrt(param);
      ch.out_b = {"B", 2};
      ch.out_e = {"E", 2};
      ch.isometry = isometry_from_kraus({k0, k1}, 2, 2);
      break;
    }
    case ChannelKind::Dephasing: {
      // Phase damping: the environment records the basis value with
      // probability param; at param = 1 both outputs are classical copies.
      Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
      k0(0, 0) = 1.0;
      k0(1, 1) = std::sqrt(1.0 - param);
      k1(1, 1) = std::sqrt(param);
      ch.out_b = {"B", 2};
      ch.out_e = {"E", 2};
      ch.isometry = isometry_from_kraus({k0, k1}, 2, 2);
      break;
    }
    case ChannelKind::Depolarizing: {
      Matrix id = Matrix::Identity(2, 2);
      Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
      x(0, 1) = x(1, 0) = 1.0;
      y(0, 1) = Complex(0, -1);
      y(1, 0) = Complex(0, 1);
      z(0, 0) = 1.0;
      z(1, 1) = -1.0;
      const double w0 = std::sqrt(1.0 - 3.0 * param / 4.0);
      const double w1 = std::sqrt(param / 4.0);
      ch.out_b = {"B", 2};
      ch.out_e = {"E", 4};
      ch.isometry = isometry_from_kraus({w0 * id, w1 * x, w1 * y, w1 * z}, 2, 4);
      break;
    }
    case ChannelKind::Erasure: {
      // Output index 2 is the erasure flag on both sides.
      Matrix v = Matrix::Zero(9, 2);
      for (int a = 0; a < 2; ++a) {
        v(static_cast<long long>(a) * 3 + 2, a) = std::sqrt(1.0 - param);  // B keeps, E flagged
        v(static_cast<long long>(2) * 3 + a, a) = std::sqrt(param);        // E keeps, B flagged
      }
      ch.out_b = {"B", 3};
      ch.out_e = {"E", 3};
      ch.isometry = v;
      break;
    }
  }
  ch.validate();
  return ch;
}

WiretapChannel identity_channel(int dim) {
  WiretapChannel ch;
  ch.input_dim = dim;
  ch.out_b = {"B", dim};
  ch.out_e = {"E", 1};
  ch.isometry = Matrix::Identity(dim, dim);
  ch.validate();
  return ch;
}

WiretapChannel channel_from_isometry(const Matrix& v, int dim_b, int dim_e) {
  WiretapChannel ch;
  ch.input_dim = static_cast<int>(v.cols());
  ch.out_b = {"B", dim_b};
  ch.out_e = {"E", dim_e};
  ch.isometry = v;
  ch.validate();
  return ch;
}

std::vector<Matrix> kraus_operators(const WiretapChannel& ch) {
  std::vector<Matrix> out;
  for (int e = 0; e < ch.dim_e(); ++e) {
    Matrix k(ch.dim_b(), ch.input_dim);
    for (int b = 0; b < ch.dim_b(); ++b) {
      for (int a = 0; a < ch.input_dim; ++a) {
        k(b, a) = ch.isometry(static_cast<long long>(b) * ch.dim_e() + e, a);
      }
    }
    out.push_back(std::move(k));
  }
  return out;
}

Op apply_channel(const WiretapChannel& ch, const Op& rho, KeepOutput keep) {
  ch.validate();
  if (rho.dim() != ch.input_dim) {
    throw InputError("channel input dimension " + std::to_string(ch.input_dim) +
                     " does not match state dimension " + std::to_string(rho.dim()));
  }
  const Matrix out = ch.isometry * rho.mat() * ch.isometry.adjoint();
  Op full({ch.out_b, ch.out_e}, out);
  switch (keep) {
    case KeepOutput::BE: return full;
    case KeepOutput::B: return partial_trace(full, {ch.out_e.name});
    case KeepOutput::E: return partial_trace(full, {ch.out_b.name});
  }
  throw InputError("invalid keep selector");
}

Op apply_channel_to(const WiretapChannel& ch, const Op& state, const std::string& target,
                    KeepOutput keep) {
  ch.validate();
  const int idx = state.system_index(target);
  if (state.systems()[idx].dim != ch.input_dim) {
    throw InputError("channel input dimension does not match system '" + target + "'");
  }
  // Move the target to the last slot, apply 1 ⊗ V, then trace as requested.
  std::vector<std::string> order;
  std::vector<SystemLabel> rest;
  for (const auto& s : state.systems()) {
    if (s.name != target) {
      order.push_back(s.name);
      rest.push_back(s);
    }
  }
  order.push_back(target);
  const Op moved = permute_systems(state, order);

  long long d_rest = 1;
  for (const auto& s : rest) d_rest *= s.dim;
  const long long d_out = static_cast<long long>(ch.dim_b()) * ch.dim_e();
  if (d_rest * d_out > dim_cap()) {
    throw CapError("channel application exceeds the dimension cap");
  }
  Matrix big = Matrix::Zero(d_rest * d_out, d_rest * ch.input_dim);
  for (long long r = 0; r < d_rest; ++r) {
    big.block(r * d_out, r * ch.input_dim, d_out, ch.input_dim) = ch.isometry;
  }
  const Matrix out = big * moved.mat() * big.adjoint();
  std::vector<SystemLabel> systems = rest;
  systems.push_back(ch.out_b);
  systems.push_back(ch.out_e);
  Op full(systems, out);
  switch (keep) {
    case KeepOutput::BE: return full;
    case KeepOutput::B: return partial_trace(full, {ch.out_e.name});
    case KeepOutput::E: return partial_trace(full, {ch.out_b.name});
  }
  throw InputError("invalid keep selector");
}

void CQWiretapEnsemble::validate() const {
  if (x_alphabet.empty() || y_alphabet.empty()) throw InputError("ensemble: empty alphabet");
  if (p_xy.rows() != static_cast<long long>(x_alphabet.size()) ||
      p_xy.cols() != static_cast<long long>(y_alphabet.size())) {
    throw InputError("ensemble: weight matrix shape does not match alphabets");
  }
  double sum = 0.0;
  for (long long i = 0; i < p_xy.rows(); ++i) {
    for (long long j = 0; j < p_xy.cols(); ++j) {
      if (p_xy(i, j) < -kStateTol) throw InputError("ensemble: negative weight");
      sum += p_xy(i, j);
    }
  }
  if (std::abs(sum - 1.0) > kStateTol) throw InputError("ensemble: weights do not sum to 1");
  if (signals.size() != x_alphabet.size()) throw InputError("ensemble: missing signal rows");
  const int d = signals.at(0).at(0).dim();
  for (const auto& row : signals) {
    if (row.size() != y_alphabet.size()) throw InputError("ensemble: missing signal entries");
    for (const auto& s : row) {
      if (s.dim() != d) throw InputError("ensemble: inconsistent signal dimensions");
      require_density(s, "ensemble signal");
    }
  }
}

double CQWiretapEnsemble::px(size_t x) const { return p_xy.row(x).sum(); }

double CQWiretapEnsemble::py_given_x(size_t y, size_t x) const {
  const double p = px(x);
  if (p <= 0.0) return 0.0;
  return p_xy(x, y) / p;
}

double JointWiretapState::px(size_t x) const { return p_xy.row(x).sum(); }

double JointWiretapState::py_given_x(size_t y, size_t x) const {
  const double p = px(x);
  if (p <= 0.0) return 0.0;
  return p_xy(x, y) / p;
}

Op JointWiretapState::block_b(size_t x, size_t y) const {
  return partial_trace(blocks_be[x][y], {"E"});
}

Op JointWiretapState::block_e(size_t x, size_t y) const {
  return partial_trace(blocks_be[x][y], {"B"});
}

JointWiretapState build_joint_state(const CQWiretapEnsemble& ens, const WiretapChannel& ch) {
  ens.validate();
  ch.validate();
  if (ens.input_dim() != ch.input_dim) {
    throw InputError("ensemble signal dimension does not match channel input");
  }
  JointWiretapState out;
  out.x_alphabet = ens.x_alphabet;
  out.y_alphabet = ens.y_alphabet;
  out.p_xy = ens.p_xy;
  out.blocks_be.resize(ens.x_alphabet.size());
  for (size_t x = 0; x < ens.x_alphabet.size(); ++x) {
    for (size_t y = 0; y < ens.y_alphabet.size(); ++y) {
      out.blocks_be[x].push_back(apply_channel(ch, ens.signals[x][y], KeepOutput::BE));
    }
  }
  return out;
}

Op CoherentEnsembleState::block_op(size_t x) const {
  const Vector& psi = blocks_rbe.at(x);
  return Op({{"R", dim_r}, {"B", dim_b}, {"E", dim_e}}, psi * psi.adjoint());
}

CoherentEnsembleState coherent_ensemble_state(const std::vector<double>& weights,
                                              const std::vector<Vector>& purifications_ra,
                                              int dim_r, const WiretapChannel& ch) {
  ch.validate();
  if (weights.size() != purifications_ra.size() || weights.empty()) {
    throw InputError("coherent ensemble: inconsistent inputs");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < -kStateTol) throw InputError("coherent ensemble: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStateTol) throw InputError("coherent ensemble: weights do not sum to 1");

  CoherentEnsembleState out;
  out.weights = weights;
  out.dim_r = dim_r;
  out.dim_b = ch.dim_b();
  out.dim_e = ch.dim_e();
  const long long d_be = static_cast<long long>(ch.dim_b()) * ch.dim_e();
  for (const auto& phi : purifications_ra) {
    if (phi.size() != static_cast<long long>(dim_r) * ch.input_dim) {
      throw InputError("coherent ensemble: purification dimension mismatch");
    }
    if (std::abs(phi.norm() - 1.0) > 1e-9) {
      throw InputError("coherent ensemble: purification is not normalized (non-pure block)");
    }
    Vector psi = Vector::Zero(dim_r * d_be);
    for (int r = 0; r < dim_r; ++r) {
      psi.segment(static_cast<long long>(r) * d_be, d_be) =
          ch.isometry * phi.segment(static_cast<long long>(r) * ch.input_dim, ch.input_dim);
    }
    out.blocks_rbe.push_back(std::move(psi));
  }
  return out;
}

JointWiretapState decohere_reference(const CoherentEnsembleState& state) {
  const long long d_be = static_cast<long long>(state.dim_b) * state.dim_e;
  const int rank_cap = static_cast<int>(std::min<long long>(state.dim_r, d_be));

  JointWiretapState out;
  out.x_alphabet.resize(state.weights.size());
  for (size_t x = 0; x < state.weights.size(); ++x) out.x_alphabet[x] = std::to_string(x);
  out.y_alphabet.resize(rank_cap);
  for (int y = 0; y < rank_cap; ++y) out.y_alphabet[y] = std::to_string(y);
  out.p_xy = Eigen::MatrixXd::Zero(state.weights.size(), rank_cap);
  out.blocks_be.resize(state.weights.size());

  for (size_t x = 0; x < state.weights.size(); ++x) {
    // Coefficient matrix across the R | BE cut.
    Matrix c(state.dim_r, d_be);
    for (int r = 0; r < state.dim_r; ++r) {
      c.row(r) = state.blocks_rbe[x].segment(static_cast<long long>(r) * d_be, d_be).transpose();
    }
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (int y = 0; y < rank_cap; ++y) {
      double w = 0.0;
      Vector psi;
      if (y < sv.size() && sv[y] * sv[y] > 1e-14) {
        w = sv[y] * sv[y];
        psi = svd.matrixV().col(y).conjugate();
      } else {
        psi = Vector::Zero(d_be);
        psi[0] = 1.0;
      }
      out.p_xy(x, y) = state.weights[x] * w;
      out.blocks_be[x].push_back(
          Op({{"B", state.dim_b}, {"E", state.dim_e}}, psi * psi.adjoint()));
    }
  }
  return out;
}

} // namespace qcap
