#include "qcap/divergences.hpp"

#include <algorithm>
#include <cmath>

namespace qcap {

namespace {

// Near-zero eigenspace window used when resolving the Neyman-Pearson boundary.
constexpr double kBoundaryTol = 1e-9;
constexpr double kWeightFloor = 1e-15;

double log2_safe(double x) { return std::log2(x); }

std::vector<std::string> names_of(const std::vector<SystemLabel>& systems) {
  std::vector<std::string> out;
  out.reserve(systems.size());
  for (const auto& s : systems) out.push_back(s.name);
  return out;
}

std::vector<std::string> complement_names(const Op& rho, const std::vector<std::string>& part_a) {
  std::vector<std::string> out;
  for (const auto& s : rho.systems()) {
    if (std::find(part_a.begin(), part_a.end(), s.name) == part_a.end()) out.push_back(s.name);
  }
  if (out.size() + part_a.size() != rho.systems().size()) {
    throw InputError("part_a does not match the state's labels");
  }
  return out;
}

// ρ_A ⊗ ρ_B reordered onto the labels of ρ.
Op product_of_marginals(const Op& rho, const std::vector<std::string>& part_a) {
  const auto part_b = complement_names(rho, part_a);
  const Op a = partial_trace(rho, part_b);
  const Op b = partial_trace(rho, part_a);
  return permute_systems(tensor(a, b), names_of(rho.systems()));
}

struct SigmaSpectrum {
  Eigh eig;
  double kernel_weight(const Matrix& rho) const {
    double w = 0.0;
    for (int i = 0; i < eig.values.size(); ++i) {
      if (eig.values[i] <= kSupportTol) {
        w += std::real(Complex(eig.vectors.col(i).adjoint() * rho * eig.vectors.col(i)));
      }
    }
    return w;
  }
  double min_positive() const {
    double m = kInf;
    for (int i = 0; i < eig.values.size(); ++i) {
      if (eig.values[i] > kSupportTol) m = std::min(m, eig.values[i]);
    }
    return m;
  }
};

// Acceptance and type-II mass of the strict positive part of ρ − tσ.
struct NpEval {
  double accept = 0.0;  // Tr{P_> ρ}
  double beta = 0.0;    // Tr{P_> σ}
};

NpEval np_eval(const Matrix& rho, const Matrix& sigma, double t) {
  const Eigh e = eigh(rho - t * sigma);
  NpEval out;
  for (int i = 0; i < e.values.size(); ++i) {
    if (e.values[i] > 0.0) {
      out.accept += std::real(Complex(e.vectors.col(i).adjoint() * rho * e.vectors.col(i)));
      out.beta += std::real(Complex(e.vectors.col(i).adjoint() * sigma * e.vectors.col(i)));
    }
  }
  return out;
}

} // namespace

void SlackParams::validate() const {
  auto fail = [](const std::string& msg) { throw InputError("slack parameters: " + msg); };
  if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0,1)");
  if (!(epsPrime > 0.0 && epsPrime < 1.0)) fail("epsPrime must lie in (0,1)");
  if (!(delta > 0.0 && delta < eps)) fail("delta must lie in (0, eps)");
  const double sqrtEp = std::sqrt(epsPrime);
  if (!(deltaPrime > 0.0 && deltaPrime < sqrtEp)) fail("deltaPrime must lie in (0, sqrt(epsPrime))");
  if (!(gamma > 0.0 && gamma < sqrtEp - deltaPrime)) {
    fail("gamma must lie in (0, sqrt(epsPrime) - deltaPrime)");
  }
}

void CQQState::validate() const {
  if (weights.size() != blocks.size() || (symbols.size() != 0 && symbols.size() != weights.size())) {
    throw InputError("CQQ state: inconsistent field lengths");
  }
  if (weights.empty()) throw InputError("CQQ state: empty alphabet");
  double sum = 0.0;
  for (double w : weights) {
    if (w < -kStateTol) throw InputError("CQQ state: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStateTol) throw InputError("CQQ state: weights do not sum to 1");
  for (size_t i = 1; i < blocks.size(); ++i) {
    require_same_systems(blocks[0], blocks[i], "CQQ blocks");
  }
  for (const auto& b : blocks) require_density(b, "CQQ block");
}

double von_neumann_entropy(const Op& rho) {
  const Eigh e = eigh(rho.mat());
  double h = 0.0;
  for (int i = 0; i < e.values.size(); ++i) {
    const double lam = e.values[i];
    if (lam > 0.0) h -= lam * log2_safe(lam);
  }
  return h;
}

double relative_entropy(const Op& rho, const Op& sigma) {
  require_same_systems(rho, sigma, "relative_entropy");
  require_density(rho, "relative_entropy rho");
  require_density(sigma, "relative_entropy sigma");
  const SigmaSpectrum ss{eigh(sigma.mat())};
  if (ss.kernel_weight(rho.mat()) > kSupportTol) return kInf;

  double d = 0.0;
  const Eigh er = eigh(rho.mat());
  for (int i = 0; i < er.values.size(); ++i) {
    const double lam = er.values[i];
    if (lam > kSupportTol) d += lam * log2_safe(lam);
  }
  for (int j = 0; j < ss.eig.values.size(); ++j) {
    const double s = ss.eig.values[j];
    if (s > kSupportTol) {
      const double w =
          std::real(Complex(ss.eig.vectors.col(j).adjoint() * rho.mat() * ss.eig.vectors.col(j)));
      d -= w * log2_safe(s);
    }
  }
  return d;
}

double relative_entropy_variance(const Op& rho, const Op& sigma) {
  require_same_systems(rho, sigma, "relative_entropy_variance");
  const double d = relative_entropy(rho, sigma);
  if (std::isinf(d)) {
    throw InputError("relative_entropy_variance: supp(rho) not contained in supp(sigma)");
  }
  const int n = rho.dim();
  const Eigh er = eigh(rho.mat());
  Matrix proj = Matrix::Zero(n, n);
  Matrix log_rho = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (er.values[i] > kSupportTol) {
      const Matrix pi = er.vectors.col(i) * er.vectors.col(i).adjoint();
      proj += pi;
      log_rho += log2_safe(er.values[i]) * pi;
    }
  }
  const Eigh es = eigh(sigma.mat());
  Matrix log_sigma = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (es.values[j] > kSupportTol) {
      log_sigma += log2_safe(es.values[j]) * es.vectors.col(j) * es.vectors.col(j).adjoint();
    }
  }
  const Matrix m = log_rho - proj * log_sigma * proj - d * proj;
  const double v = std::real((rho.mat() * m * m).trace());
  return std::max(0.0, v);
}

double dmax(const Op& rho, const Op& sigma) {
  require_same_systems(rho, sigma, "dmax");
  const SigmaSpectrum ss{eigh(sigma.mat())};
  if (ss.kernel_weight(rho.mat()) > kSupportTol) return kInf;
  const Matrix isq = inv_sqrt_on_support(sigma.mat());
  const Matrix m = isq * rho.mat() * isq;
  const Eigh e = eigh(0.5 * (m + m.adjoint().eval()));
  const double lmax = e.values[e.values.size() - 1];
  return log2_safe(std::max(lmax, 1e-300));
}

DhResult dh_eps(const Op& rho, const Op& sigma, double eps) {
  require_same_systems(rho, sigma, "dh_eps");
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("dh_eps: eps must lie in [0,1)");
  require_density(rho, "dh_eps rho");
  require_density(sigma, "dh_eps sigma");
  const int n = rho.dim();

  // If enough of ρ sits in ker(σ), a zero-type-II test is feasible.
  const SigmaSpectrum ss{eigh(sigma.mat())};
  Matrix pk = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (ss.eig.values[i] <= kSupportTol) pk += ss.eig.vectors.col(i) * ss.eig.vectors.col(i).adjoint();
  }
  const double kernel_mass = std::real((pk * rho.mat()).trace());
  if (1.0 - kernel_mass <= eps + 1e-12) {
    const Matrix t_inf = support_projector(pk * rho.mat() * pk);
    OptimalTest ot;
    ot.threshold = kInf;
    ot.boundary_weight = 0.0;
    ot.test = Op(rho.systems(), t_inf);
    ot.typeI = 1.0 - std::real((t_inf * rho.mat()).trace());
    ot.typeII = std::max(0.0, std::real((t_inf * sigma.mat()).trace()));
    return {kInf, std::move(ot)};
  }

  double lo = 0.0;
  double hi = 1.0 / ss.min_positive() + 1.0;
  NpEval elo = np_eval(rho.mat(), sigma.mat(), lo);
  NpEval ehi = np_eval(rho.mat(), sigma.mat(), hi);
  int growth = 0;
  while (1.0 - ehi.accept <= eps && growth++ < 200) {
    hi *= 2.0;
    ehi = np_eval(rho.mat(), sigma.mat(), hi);
  }

  double t_final = hi;
  bool hit_level = false;
  for (int iter = 0; iter < 120 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const NpEval em = np_eval(rho.mat(), sigma.mat(), mid);
    // The acceptance probability must be monotone along the threshold family.
    if (em.accept > elo.accept + 1e-9 || em.accept < ehi.accept - 1e-9) {
      throw std::runtime_error("dh_eps: acceptance is not monotone in the threshold");
    }
    const double alpha = 1.0 - em.accept;
    if (std::abs(alpha - eps) <= 1e-10) {
      t_final = mid;
      hit_level = true;
      break;
    }
    if (alpha > eps) {
      hi = mid;
      ehi = em;
    } else {
      lo = mid;
      elo = em;
    }
    t_final = 0.5 * (lo + hi);
  }
  if (!hit_level) t_final = 0.5 * (lo + hi);

  // Resolve the boundary at the solved threshold: spread fractional weight
  // uniformly over the near-zero eigenspace so that typeI lands on eps.
  const Eigh e = eigh(rho.mat() - t_final * sigma.mat());
  Matrix p_pos = Matrix::Zero(n, n);
  Matrix p_bnd = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (e.values[i] > kBoundaryTol) {
      p_pos += e.vectors.col(i) * e.vectors.col(i).adjoint();
    } else if (e.values[i] > -kBoundaryTol) {
      p_bnd += e.vectors.col(i) * e.vectors.col(i).adjoint();
    }
  }
  const double acc_pos = std::real((p_pos * rho.mat()).trace());
  const double bnd_rho = std::real((p_bnd * rho.mat()).trace());
  double p = 0.0;
  if (bnd_rho > kWeightFloor) {
    p = std::clamp((1.0 - eps - acc_pos) / bnd_rho, 0.0, 1.0);
  }
  const Matrix test = p_pos + p * p_bnd;
  OptimalTest ot;
  ot.threshold = t_final;
  ot.boundary_weight = p;
  ot.test = Op(rho.systems(), test);
  ot.typeI = std::max(0.0, 1.0 - std::real((test * rho.mat()).trace()));
  ot.typeII = std::max(0.0, std::real((test * sigma.mat()).trace()));
  const double bits = -log2_safe(std::max(ot.typeII, 1e-300));
  return {bits, std::move(ot)};
}

namespace {

// Clipping family behind the smooth-max lower endpoints: cap the spectrum of
// σ^{−1/2}ρσ^{−1/2} at level λ, map back and renormalize.
struct ClipFamily {
  Matrix sqrt_sigma;
  Eigh ratio;      // spectrum of σ^{−1/2} ρ σ^{−1/2}
  double mu_max = 0.0;

  ClipFamily(const Matrix& rho, const Matrix& sigma) {
    sqrt_sigma = sqrt_psd(sigma);
    const Matrix isq = inv_sqrt_on_support(sigma);
    Matrix m = isq * rho * isq;
    ratio = eigh(0.5 * (m + m.adjoint().eval()));
    mu_max = ratio.values[ratio.values.size() - 1];
  }

  Matrix candidate(double lambda) const {
    const int n = static_cast<int>(ratio.values.size());
    Matrix capped = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double mu = std::min(std::max(0.0, ratio.values[i]), lambda);
      if (mu > 0.0) capped += mu * ratio.vectors.col(i) * ratio.vectors.col(i).adjoint();
    }
    Matrix tilde = sqrt_sigma * capped * sqrt_sigma;
    const double tr = std::real(tilde.trace());
    if (tr <= kWeightFloor) return Matrix();
    return tilde / tr;
  }
};

} // namespace

Interval dmax_smooth(const Op& rho, const Op& sigma, double eps) {
  require_same_systems(rho, sigma, "dmax_smooth");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("dmax_smooth: eps must lie in (0,1)");
  const double upper = dmax(rho, sigma);

  const ClipFamily family(rho.mat(), sigma.mat());
  if (family.mu_max <= kSupportTol) return {upper, upper};

  auto distance = [&](double lambda) {
    const Matrix cand = family.candidate(lambda);
    if (cand.size() == 0) return kInf;
    return purified_distance(Op(rho.systems(), cand), rho);
  };

  if (distance(family.mu_max) > eps) return {upper, upper};

  double lo = family.mu_max * 1e-12;
  double hi = family.mu_max;
  if (distance(lo) > eps) {
    for (int iter = 0; iter < 70; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (distance(mid) <= eps) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  } else {
    hi = lo;
  }
  const Matrix best = family.candidate(hi);
  double lower = upper;
  if (best.size() != 0) {
    lower = dmax(Op(rho.systems(), best), sigma);
  }
  return {std::min(lower, upper), upper};
}

double mutual_info(const Op& rho, const std::vector<std::string>& part_a) {
  const auto part_b = complement_names(rho, part_a);
  const Op a = partial_trace(rho, part_b);
  const Op b = partial_trace(rho, part_a);
  return von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(rho);
}

double i_h_eps(const Op& rho, const std::vector<std::string>& part_a, double eps) {
  return dh_eps(rho, product_of_marginals(rho, part_a), eps).bits;
}

double i_max(const Op& rho, const std::vector<std::string>& part_a) {
  return dmax(rho, product_of_marginals(rho, part_a));
}

Interval i_max_smooth(const Op& rho, const std::vector<std::string>& part_a, double eps) {
  return dmax_smooth(rho, product_of_marginals(rho, part_a), eps);
}

Interval i_max_alt_smooth(const Op& rho, const std::vector<std::string>& part_a, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("i_max_alt_smooth: eps must lie in (0,1)");
  const auto part_b = complement_names(rho, part_a);
  const Op marg_a = partial_trace(rho, part_b);
  const Op product = product_of_marginals(rho, part_a);
  const double upper = dmax(rho, product);

  // Candidates come from the same clipping family; the second marginal is
  // re-derived from each candidate before evaluating the objective.
  auto objective = [&](const Matrix& cand) {
    const Op cand_op(rho.systems(), cand);
    const Op cand_b = partial_trace(cand_op, part_a);
    const Op ref = permute_systems(tensor(marg_a, cand_b), names_of(rho.systems()));
    return dmax(cand_op, ref);
  };

  const ClipFamily family(rho.mat(), product.mat());
  if (family.mu_max <= kSupportTol) return {upper, upper};
  auto distance = [&](double lambda) {
    const Matrix cand = family.candidate(lambda);
    if (cand.size() == 0) return kInf;
    return purified_distance(Op(rho.systems(), cand), rho);
  };
  if (distance(family.mu_max) > eps) return {upper, upper};

  double lo = family.mu_max * 1e-12;
  double hi = family.mu_max;
  if (distance(lo) > eps) {
    for (int iter = 0; iter < 70; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (distance(mid) <= eps) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  } else {
    hi = lo;
  }

  double lower = upper;
  const int sweep = 25;
  for (int j = 0; j <= sweep; ++j) {
    const double frac = static_cast<double>(j) / sweep;
    const double lambda = hi * std::pow(family.mu_max / hi, frac);
    const Matrix cand = family.candidate(lambda);
    if (cand.size() == 0) continue;
    if (purified_distance(Op(rho.systems(), cand), rho) > eps + 1e-12) continue;
    lower = std::min(lower, objective(cand));
  }
  return {std::min(lower, upper), upper};
}

namespace {

struct SubAlphabetSearch {
  std::vector<size_t> support;
  std::vector<double> weights;

  SubAlphabetSearch(const CQQState& state) {
    state.validate();
    if (state.size() > kMaxCondAlphabet) {
      throw InputError("conditional search limited to alphabets of at most " +
                       std::to_string(kMaxCondAlphabet) + " symbols, got " +
                       std::to_string(state.size()));
    }
    for (size_t i = 0; i < state.size(); ++i) {
      if (state.weights[i] > kWeightFloor) {
        support.push_back(i);
        weights.push_back(state.weights[i]);
      }
    }
  }

  // Visit every renormalized sub-alphabet within purified distance eps,
  // i.e. kept mass ≥ 1 − eps².
  template <typename F>
  void for_each_feasible(double eps, F&& f) const {
    const size_t n = support.size();
    const double need = 1.0 - eps * eps - 1e-12;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      double kept = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) kept += weights[i];
      }
      if (kept < need) continue;
      f(mask);
    }
  }
};

} // namespace

double cond_mutual_info(const CQQState& state, const std::vector<std::string>& part_a) {
  state.validate();
  double total = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    if (state.weights[i] <= kWeightFloor) continue;
    total += state.weights[i] * relative_entropy(state.blocks[i],
                                                 product_of_marginals(state.blocks[i], part_a));
  }
  return total;
}

double cond_i_h_eps(const CQQState& state, const std::vector<std::string>& part_a, double eps,
                    double ball_eps) {
  const SubAlphabetSearch search(state);
  std::vector<double> vals(search.support.size());
  for (size_t i = 0; i < search.support.size(); ++i) {
    vals[i] = i_h_eps(state.blocks[search.support[i]], part_a, eps);
  }
  double best = -kInf;
  search.for_each_feasible(ball_eps >= 0.0 ? ball_eps : eps, [&](unsigned mask) {
    double worst = kInf;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (mask & (1u << i)) worst = std::min(worst, vals[i]);
    }
    best = std::max(best, worst);
  });
  return best;
}

namespace {

Interval cond_minmax(const CQQState& state, const std::vector<Interval>& vals, double eps) {
  const SubAlphabetSearch search(state);
  double best_lower = kInf;
  double best_upper = kInf;
  search.for_each_feasible(eps, [&](unsigned mask) {
    double lo = -kInf, up = -kInf;
    for (size_t i = 0; i < vals.size(); ++i) {
      if (mask & (1u << i)) {
        lo = std::max(lo, vals[i].lower);
        up = std::max(up, vals[i].upper);
      }
    }
    best_lower = std::min(best_lower, lo);
    best_upper = std::min(best_upper, up);
  });
  return {best_lower, best_upper};
}

} // namespace

Interval cond_i_max_smooth(const CQQState& state, const std::vector<std::string>& part_a,
                           double eps) {
  const SubAlphabetSearch search(state);
  std::vector<Interval> vals(search.support.size());
  for (size_t i = 0; i < search.support.size(); ++i) {
    vals[i] = i_max_smooth(state.blocks[search.support[i]], part_a, eps);
  }
  return cond_minmax(state, vals, eps);
}

Interval cond_i_max_alt_smooth(const CQQState& state, const std::vector<std::string>& part_a,
                               double eps) {
  const SubAlphabetSearch search(state);
  std::vector<Interval> vals(search.support.size());
  for (size_t i = 0; i < search.support.size(); ++i) {
    vals[i] = i_max_alt_smooth(state.blocks[search.support[i]], part_a, eps);
  }
  return cond_minmax(state, vals, eps);
}

double coherent_info(const Op& rho, const std::vector<std::string>& part_a) {
  const Op b = partial_trace(rho, part_a);
  return von_neumann_entropy(b) - von_neumann_entropy(rho);
}

double cond_coherent_info(const CQQState& state, const std::vector<std::string>& part_a) {
  state.validate();
  double total = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    if (state.weights[i] <= kWeightFloor) continue;
    total += state.weights[i] * coherent_info(state.blocks[i], part_a);
  }
  return total;
}

double second_order_dh(double d, double v, double eps, long long n) {
  if (n < 1) throw InputError("second_order_dh: n must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("second_order_dh: eps must lie in (0,1)");
  if (v < 0.0) throw InputError("second_order_dh: negative variance");
  const double nd = static_cast<double>(n);
  if (v == 0.0) return nd * d;
  return nd * d + std::sqrt(nd * v) * inv_gaussian_cdf(eps);
}

double second_order_dmax(double d, double v, double eps, long long n) {
  if (n < 1) throw InputError("second_order_dmax: n must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("second_order_dmax: eps must lie in (0,1)");
  if (v < 0.0) throw InputError("second_order_dmax: negative variance");
  const double nd = static_cast<double>(n);
  if (v == 0.0) return nd * d;
  return nd * d - std::sqrt(nd * v) * inv_gaussian_cdf(eps * eps);
}

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InputError("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (eps > 0.0) h -= eps * std::log2(eps);
  if (eps < 1.0) h -= (1.0 - eps) * std::log2(1.0 - eps);
  return h;
}

double inv_gaussian_cdf(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("inv_gaussian_cdf: argument outside (0,1)");
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) <= q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace qcap
