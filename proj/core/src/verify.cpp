#include "qcap/verify.hpp"

#include "qcap/protosim.hpp"
#include "qcap/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qcap {

namespace {

struct Violation {
  long long count = 0;
  double worst = 0.0;  // most positive excess over the allowed slack

  void record(double excess) {
    worst = std::max(worst, excess);
    if (excess > 0.0) ++count;
  }
};

SuiteResult finish(const std::string& name, long long instances, const Violation& v) {
  SuiteResult r;
  r.name = name;
  r.instances = instances;
  r.violations = v.count;
  r.max_violation = v.worst;
  r.pass = v.count == 0;
  return r;
}

SuiteResult suite_distances(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(3));
    const Op a = random_density(rng, {{"S", d}});
    const Op b = random_density(rng, {{"S", d}});
    const Op c = random_density(rng, {{"S", d}});
    // symmetry and triangle inequality
    v.record(std::abs(trace_distance(a, b) - trace_distance(b, a)) - 1e-9);
    v.record(std::abs(purified_distance(a, b) - purified_distance(b, a)) - 1e-9);
    v.record(trace_distance(a, b) - trace_distance(a, c) - trace_distance(c, b) - 1e-9);
    v.record(purified_distance(a, b) - purified_distance(a, c) - purified_distance(c, b) - 1e-9);
    // trace/purified distance sandwich
    const double td = trace_distance(a, b);
    const double pd = purified_distance(a, b);
    v.record(td - pd - 1e-9);
    v.record(pd - std::sqrt(2.0 * td) - 1e-9);
    n += 6;
  }
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(3));
    const Op a = random_density(rng, {{"S", d}});
    const Op b = random_density(rng, {{"S", d}});
    const Matrix iso = random_isometry(rng, d * 2, d);
    auto act = [&](const Op& x) {
      Op full({{"out", d}, {"env", 2}}, iso * x.mat() * iso.adjoint());
      return partial_trace(full, {"env"});
    };
    v.record(trace_distance(act(a), act(b)) - trace_distance(a, b) - 1e-9);
    const Op tau = random_density(rng, {{"T", 2}});
    v.record(std::abs(trace_distance(tensor(a, tau), tensor(b, tau)) - trace_distance(a, b)) -
             1e-9);
    n += 2;
  }
  return finish("distance-metrics", n, v);
}

SuiteResult suite_entropy_facts(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(3));
    const Op rho = random_density(rng, {{"S", d}});
    const Op sigma = random_density(rng, {{"S", d}});
    const double eps = 0.05 + 0.8 * rng.uniform();
    const double dre = relative_entropy(rho, sigma);
    const double dm = dmax(rho, sigma);
    const double dh = dh_eps(rho, sigma, eps).bits;
    v.record(dh - (dre + binary_entropy(eps)) / (1.0 - eps) - 1e-9);  // D_H vs D
    v.record(dre - dm - 1e-9);                                       // D ≤ D_max
    n += 2;
  }
  return finish("relative-entropy-facts", n, v);
}

SuiteResult suite_dpi(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(2));
    const Op rho = random_density(rng, {{"S", d}});
    const Op sigma = random_density(rng, {{"S", d}});
    const Matrix iso = random_isometry(rng, d * 2, d);
    auto act = [&](const Op& x) {
      Op full({{"out", d}, {"env", 2}}, iso * x.mat() * iso.adjoint());
      return partial_trace(full, {"env"});
    };
    const Op nr = act(rho);
    const Op ns = act(sigma);
    v.record(dmax(nr, ns) - dmax(rho, sigma) - 1e-9);
    const double eps = 0.05 + 0.6 * rng.uniform();
    v.record(dh_eps(nr, ns, eps).bits - dh_eps(rho, sigma, eps).bits - 1e-9);
    n += 2;
  }
  return finish("data-processing", n, v);
}

SuiteResult suite_np_optimality(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(2));
    const Op rho = random_density(rng, {{"S", d}});
    const Op sigma = random_density(rng, {{"S", d}});
    const double eps = 0.05 + 0.5 * rng.uniform();
    const DhResult res = dh_eps(rho, sigma, eps);
    v.record(res.test.typeI - eps - 1e-9);
    // random feasible tests mixed toward the identity
    for (int k = 0; k < 40; ++k) {
      const Matrix u = random_unitary(rng, d);
      Matrix t = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) t += rng.uniform() * u.col(i) * u.col(i).adjoint();
      const double alpha = 1.0 - std::real((t * rho.mat()).trace());
      Matrix feas = t;
      if (alpha > eps) {
        const double theta = eps / alpha;
        feas = (1.0 - theta) * Matrix::Identity(d, d) + theta * t;
      }
      const double beta = std::real((feas * sigma.mat()).trace());
      v.record(res.test.typeII - beta - 1e-9);
      ++n;
    }
  }
  return finish("neyman-pearson-optimality", n, v);
}

SuiteResult suite_smooth_bridge(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Op rho = random_density(rng, {{"A", 2}, {"B", 2}});
    const double eps = 0.15 + 0.5 * rng.uniform();
    const double gamma = 0.3 * eps + 0.3 * eps * rng.uniform();
    const Interval alt = i_max_alt_smooth(rho, {"B"}, eps);
    const Interval plain = i_max_smooth(rho, {"A"}, eps - gamma);
    v.record(alt.upper - plain.upper - std::log2(3.0 / (gamma * gamma)) - 1e-9);
    ++n;
  }
  return finish("smooth-max-bridge", n, v);
}

SuiteResult suite_conditional_bounds(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const size_t nx = 2 + rng.integer(2);
    CQQState state;
    std::vector<double> w(nx);
    double total = 0.0;
    for (auto& x : w) {
      x = 0.1 + rng.uniform();
      total += x;
    }
    for (size_t i = 0; i < nx; ++i) {
      state.symbols.push_back(std::to_string(i));
      state.weights.push_back(w[i] / total);
      state.blocks.push_back(random_density(rng, {{"A", 2}, {"B", 2}}));
    }
    const double eps = 0.1 + 0.4 * rng.uniform();
    const double mi = cond_mutual_info(state, {"A"});
    v.record(cond_i_h_eps(state, {"A"}, eps) - (mi + binary_entropy(eps)) / (1.0 - eps) - 1e-9);
    const double lhs = cond_i_max_smooth(state, {"A"}, eps).lower;
    const double afw = mi - 3.0 * eps * std::log2(2.0) -
                       2.0 * (1.0 + eps) * binary_entropy(eps / (1.0 + eps));
    v.record(afw - lhs - 1e-6);
    n += 2;
  }
  return finish("conditional-bounds", n, v);
}

SuiteResult suite_operator_lemmas(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(5));
    const Eigh basis = eigh(random_density(rng, {{"S", d}}).mat());
    Matrix s = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) s += rng.uniform() * basis.vectors.col(i) * basis.vectors.col(i).adjoint();
    Op t = random_density(rng, {{"S", d}});
    const double scale = 0.2 + 2.0 * rng.uniform();
    const Op t_scaled(t.systems(), scale * t.mat());
    const double c = 0.1 + 3.0 * rng.uniform();
    v.record(-hayashi_nagaoka_verify(Op({{"S", d}}, s), t_scaled, c) - 1e-9);
    ++n;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(7));
    const Op rho = random_density(rng, {{"S", d}});
    const Eigh basis = eigh(random_density(rng, {{"S", d}}).mat());
    Matrix lam = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      lam += rng.uniform() * basis.vectors.col(i) * basis.vectors.col(i).adjoint();
    }
    const auto [lhs, rhs] = gentle_measurement_verify(rho, Op({{"S", d}}, lam));
    v.record(lhs - rhs - 1e-9);
    ++n;
  }
  return finish("operator-lemmas", n, v);
}

SuiteResult suite_convex_split(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const Op rho = random_density(rng, {{"A", 2}, {"B", 2}});
    for (int k = 1; k <= 4; ++k) {
      const ConvexSplitResult res = convex_split_check(rho, {"A"}, k);
      if (res.bound < 1.0) v.record(res.distance - res.bound - 1e-9);
      ++n;
    }
  }
  return finish("convex-split", n, v);
}

SuiteResult suite_povm_completeness(Rng& rng) {
  Violation v;
  long long n = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng.integer(3));
    const int parts = 2 + static_cast<int>(rng.integer(3));
    std::vector<Op> gs;
    for (int i = 0; i < parts; ++i) {
      Op g = random_density(rng, {{"S", d}});
      gs.push_back(Op(g.systems(), (0.2 + rng.uniform()) * g.mat()));
    }
    const auto povm = square_root_measurement(gs);
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : povm) {
      v.record(-min_eigenvalue(e.mat()) - 1e-9);
      sum += e.mat();
    }
    v.record((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() - 1e-9);
    n += static_cast<long long>(povm.size()) + 1;
  }
  return finish("povm-completeness", n, v);
}

SuiteResult suite_coherent_identity(Rng& rng) {
  Violation v;
  long long n = 0;
  const std::vector<WiretapChannel> channels = {
      standard_channel(ChannelKind::AmplitudeDamping, 0.3),
      standard_channel(ChannelKind::Dephasing, 0.5),
      standard_channel(ChannelKind::Depolarizing, 0.25),
  };
  for (const auto& ch : channels) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> weights = {0.5, 0.5};
      std::vector<Vector> blocks;
      blocks.push_back(random_pure_vector(rng, 2 * ch.input_dim));
      blocks.push_back(random_pure_vector(rng, 2 * ch.input_dim));
      const CoherentEnsembleState coh = coherent_ensemble_state(weights, blocks, 2, ch);
      v.record(private_to_coherent_check(coh) - 1e-9);
      ++n;
    }
  }
  return finish("private-to-coherent", n, v);
}

SuiteResult suite_fixture_protocol(const std::vector<FixtureDoc>& fixtures, const SlackParams& s) {
  Violation v;
  long long n = 0;
  for (const auto& doc : fixtures) {
    const CodeSizes sizes{2, 1, 1};
    const ProtocolReport report = privacy_error(doc.ensemble, doc.channel, sizes, s);
    v.record(report.public_error - report.public_bound - 1e-9);
    v.record(report.privacy_error - report.privacy_bound - 1e-9);
    n += 2;
  }
  return finish("fixture-protocol", n, v);
}

} // namespace

std::vector<std::pair<std::string, std::string>> builtin_fixture_documents() {
  const char* amp = R"({
  "name": "amplitude_damping_03",
  "channel": {"kind": "amplitude_damping", "param": 0.3},
  "ensemble": {
    "x_alphabet": [0, 1],
    "y_alphabet": [0, 1],
    "p_xy": [[0.25, 0.25], [0.25, 0.25]],
    "signals": {
      "0,0": {"ket": [1, 0]},
      "0,1": {"ket": [0, 1]},
      "1,0": {"ket": [0.7071067811865476, 0.7071067811865476]},
      "1,1": {"ket": [0.7071067811865476, -0.7071067811865476]}
    }
  }
})";
  const char* deph = R"({
  "name": "dephasing_full",
  "channel": {"kind": "dephasing", "param": 1.0},
  "ensemble": {
    "x_alphabet": [0, 1],
    "y_alphabet": [0, 1],
    "p_xy": [[0.25, 0.25], [0.25, 0.25]],
    "signals": {
      "0,0": {"ket": [1, 0]},
      "0,1": {"ket": [0, 1]},
      "1,0": {"ket": [0.7071067811865476, 0.7071067811865476]},
      "1,1": {"ket": [0.7071067811865476, -0.7071067811865476]}
    }
  }
})";
  return {{"amplitude_damping_03", amp}, {"dephasing_full", deph}};
}

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options) {
  std::vector<FixtureDoc> fixtures;
  for (const auto& [name, text] : builtin_fixture_documents()) {
    fixtures.push_back(parse_fixture(text));
  }
  for (const auto& path : options.fixture_paths) {
    fixtures.push_back(load_fixture(path));
  }

  Rng rng(options.seed);
  std::vector<SuiteResult> results;
  results.push_back(suite_distances(rng));
  results.push_back(suite_entropy_facts(rng));
  results.push_back(suite_dpi(rng));
  results.push_back(suite_np_optimality(rng));
  results.push_back(suite_smooth_bridge(rng));
  results.push_back(suite_conditional_bounds(rng));
  results.push_back(suite_operator_lemmas(rng));
  results.push_back(suite_convex_split(rng));
  results.push_back(suite_povm_completeness(rng));
  results.push_back(suite_coherent_identity(rng));
  results.push_back(suite_fixture_protocol(fixtures, options.slacks));
  return results;
}

std::string format_suite_table(const std::vector<SuiteResult>& results) {
  std::ostringstream out;
  out << "suite,instances,violations,max_violation,status\n";
  for (const auto& r : results) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", r.max_violation);
    out << r.name << "," << r.instances << "," << r.violations << "," << buf << ","
        << (r.pass ? "pass" : "FAIL") << "\n";
  }
  return out.str();
}

} // namespace qcap
