#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qcap/rates.hpp"

using namespace qcap;

namespace {

Op qubit(double a00, double a11, Complex a01 = 0.0, const std::string& name = "A") {
  Matrix m(2, 2);
  m << a00, a01, std::conj(a01), a11;
  return Op({{name, 2}}, m);
}

CQWiretapEnsemble binary_ensemble(const Eigen::MatrixXd& pxy, std::vector<std::vector<Op>> sig) {
  CQWiretapEnsemble ens;
  ens.x_alphabet = {"0", "1"};
  ens.y_alphabet = {"0", "1"};
  ens.p_xy = pxy;
  ens.signals = std::move(sig);
  return ens;
}

SlackParams default_slacks() { return SlackParams{0.2, 0.2, 0.05, 0.2, 0.1}; }

} // namespace

TEST_CASE("achievable pair on a useless channel is negative") {
  // all signals identical: B and E carry no information about (X, Y)
  Eigen::MatrixXd pxy(2, 2);
  pxy << 0.25, 0.25, 0.25, 0.25;
  const auto ens = binary_ensemble(
      pxy, {{qubit(1, 0), qubit(1, 0)}, {qubit(1, 0), qubit(1, 0)}});
  const WiretapChannel ch = standard_channel(ChannelKind::AmplitudeDamping, 0.3);
  const SlackParams s = default_slacks();
  const RatePair pair = achievable_pair(build_joint_state(ens, ch), s);
  const double penalty = std::log2(4.0 * s.eps / (s.delta * s.delta));
  const double level = s.eps - s.delta;
  CHECK(pair.public_rate ==
        doctest::Approx(-std::log2(1.0 - level) - penalty).epsilon(1e-6));
  CHECK(pair.public_rate < 0.0);
  CHECK(pair.private_rate < 0.0);
}

TEST_CASE("achievable public rate matches the classical oracle on a noiseless bit") {
  Eigen::MatrixXd pxy(2, 2);
  pxy << 0.5, 0.0, 0.5, 0.0;  // Y is a constant
  const auto ens = binary_ensemble(
      pxy, {{qubit(1, 0), qubit(1, 0)}, {qubit(0, 1), qubit(0, 1)}});
  const SlackParams s = default_slacks();
  const RatePair pair = achievable_pair(build_joint_state(ens, identity_channel(2)), s);
  // classical Neyman-Pearson on the perfectly correlated X-B state
  const std::vector<oracles::Atom> atoms = {
      {0.5, 0.25}, {0.0, 0.25}, {0.0, 0.25}, {0.5, 0.25}};
  const double want = oracles::classical_dh(atoms, s.eps - s.delta) -
                      std::log2(4.0 * s.eps / (s.delta * s.delta));
  CHECK(pair.public_rate == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("full dephasing makes Bob and Eve terms equal") {
  // At parameter 1 the B and E blocks are identical matrices, so the private
  // bound's positive and negative parts agree before the additive penalties.
  Eigen::MatrixXd pxy(2, 2);
  pxy << 0.3, 0.2, 0.25, 0.25;
  const auto ens = binary_ensemble(pxy, {{qubit(1, 0), qubit(0, 1)},
                                         {qubit(0.5, 0.5, 0.5), qubit(0.5, 0.5, -0.5)}});
  const WiretapChannel ch = standard_channel(ChannelKind::Dephasing, 1.0);
  const JointWiretapState joint = build_joint_state(ens, ch);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      CHECK((joint.block_b(x, y).mat() - joint.block_e(x, y).mat()).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
  const double level = 0.15;
  const double bob = cond_i_h_eps(cond_state_yb(joint), {"Y"}, level);
  const double eve = cond_i_h_eps(cond_state_ye(joint), {"Y"}, level);
  CHECK(bob == doctest::Approx(eve).epsilon(1e-9));
  const Interval bob_max = cond_i_max_smooth(cond_state_yb(joint), {"Y"}, level);
  const Interval eve_max = cond_i_max_smooth(cond_state_ye(joint), {"Y"}, level);
  CHECK(bob_max.upper == doctest::Approx(eve_max.upper).epsilon(1e-9));
}

TEST_CASE("converse pair") {
  const SlackParams s = default_slacks();
  SUBCASE("useless channel") {
    Eigen::MatrixXd pxy(2, 2);
    pxy << 0.25, 0.25, 0.25, 0.25;
    const auto ens = binary_ensemble(
        pxy, {{qubit(1, 0), qubit(1, 0)}, {qubit(1, 0), qubit(1, 0)}});
    const RatePair pair =
        converse_pair(build_joint_state(ens, standard_channel(ChannelKind::Dephasing, 0.3)), s);
    CHECK(pair.public_rate == doctest::Approx(-std::log2(1.0 - s.eps)).epsilon(1e-6));
  }
  SUBCASE("identical Bob and Eve blocks leave only the smoothing gap") {
    Eigen::MatrixXd pxy(2, 2);
    pxy << 0.3, 0.2, 0.25, 0.25;
    const auto ens = binary_ensemble(pxy, {{qubit(1, 0), qubit(0, 1)},
                                           {qubit(0.5, 0.5, 0.5), qubit(0.5, 0.5, -0.5)}});
    const JointWiretapState joint =
        build_joint_state(ens, standard_channel(ChannelKind::Dephasing, 1.0));
    const RatePair pair = converse_pair(joint, s);
    // with equal blocks the private bound is exactly the gap between the
    // hypothesis-testing term and the smoothed max term on the same blocks
    const double bob = cond_i_h_eps(cond_state_yb(joint), {"Y"}, std::sqrt(s.eps));
    const double eve = cond_i_max_smooth(cond_state_yb(joint), {"Y"},
                                         std::min(std::sqrt(2.0 * s.epsPrime), 1.0 - 1e-12))
                           .lower;
    CHECK(pair.private_rate == doctest::Approx(bob - eve).epsilon(1e-9));
  }
  SUBCASE("trivial Eve reduces the private bound to the Bob term") {
    Eigen::MatrixXd pxy(2, 2);
    pxy << 0.25, 0.25, 0.25, 0.25;
    const auto ens = binary_ensemble(
        pxy, {{qubit(1, 0), qubit(0, 1)}, {qubit(1, 0), qubit(0, 1)}});
    const JointWiretapState joint = build_joint_state(ens, identity_channel(2));
    const RatePair pair = converse_pair(joint, s);
    const double bob = cond_i_h_eps(cond_state_yb(joint), {"Y"}, std::sqrt(s.eps));
    CHECK(pair.private_rate == doctest::Approx(bob).epsilon(1e-6));
  }
}

TEST_CASE("achievable stays inside the converse with matched slacks") {
  Rng rng(31);
  const WiretapChannel ch = standard_channel(ChannelKind::AmplitudeDamping, 0.25);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd pxy(2, 2);
    double total = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        pxy(x, y) = 0.1 + rng.uniform();
        total += pxy(x, y);
      }
    pxy /= total;
    std::vector<std::vector<Op>> sig(2);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) sig[x].push_back(random_density(rng, {{"A", 2}}, 1));
    const JointWiretapState joint = build_joint_state(binary_ensemble(pxy, sig), ch);

    const SlackParams sa{0.05, 0.04, 0.02, 0.1, 0.05};
    const RatePair ach = achievable_pair(joint, sa);

    SlackParams sc = sa;
    sc.eps = std::min(3.0 * sa.eps + 2.0 * std::sqrt(sa.eps) + std::sqrt(sa.epsPrime), 0.49);
    sc.epsPrime = std::min(2.0 * (sa.eps + std::sqrt(sa.eps)) + std::sqrt(sa.epsPrime), 0.49);
    sc.delta = sc.eps / 2.0;
    const RatePair con = converse_pair(joint, sc);

    const double smoothing = std::sqrt(sa.epsPrime) - sa.deltaPrime;
    const Interval eve = cond_i_max_alt_smooth(cond_state_ye(joint), {"Y"}, smoothing);
    const double width = eve.upper - eve.lower;
    CHECK(ach.public_rate <= con.public_rate + 1e-6);
    CHECK(ach.private_rate <= con.private_rate + width + 1e-6);
  }
}

TEST_CASE("asymptotic corner points") {
  SUBCASE("identity channel on two qubits reaches (1,1)") {
    // X selects a 2-dimensional sector of a 4-dimensional input; inside each
    // sector the reference is maximally entangled with the signal.
    const WiretapChannel ch = identity_channel(4);
    std::vector<Vector> blocks;
    for (int x = 0; x < 2; ++x) {
      Vector phi = Vector::Zero(2 * 4);
      // |φ⟩ = (|0⟩_R|2x⟩_A + |1⟩_R|2x+1⟩_A)/√2
      phi[0 * 4 + 2 * x] = 1.0 / std::sqrt(2.0);
      phi[1 * 4 + 2 * x + 1] = 1.0 / std::sqrt(2.0);
      blocks.push_back(phi);
    }
    const CoherentEnsembleState coh = coherent_ensemble_state({0.5, 0.5}, blocks, 2, ch);
    const RatePair pair = ds_region_point(coh);
    CHECK(pair.public_rate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pair.private_rate == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("fully depolarizing channel gives nothing") {
    const WiretapChannel ch = standard_channel(ChannelKind::Depolarizing, 1.0);
    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    const RatePair pair = ds_region_point(coherent_ensemble_state({1.0}, {bell}, 2, ch));
    CHECK(pair.public_rate == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pair.private_rate <= 1e-9);
  }
  SUBCASE("amplitude damping maximum matches the closed-form grid") {
    const double gamma = 0.3;
    const WiretapChannel ch = standard_channel(ChannelKind::AmplitudeDamping, gamma);
    double best = -2.0, best_oracle = -2.0;
    for (int step = 0; step <= 40; ++step) {
      const double q = static_cast<double>(step) / 40.0;
      Vector phi = Vector::Zero(4);
      phi[0 * 2 + 0] = std::sqrt(1.0 - q);  // |0⟩_R|0⟩_A
      phi[1 * 2 + 1] = std::sqrt(q);        // |1⟩_R|1⟩_A
      const RatePair pair = ds_region_point(coherent_ensemble_state({1.0}, {phi}, 2, ch));
      best = std::max(best, pair.private_rate);
      // closed form: h((1−γ)q) − h(γq)
      auto h = [](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return -t * std::log2(t) - (1.0 - t) * std::log2(1.0 - t);
      };
      best_oracle = std::max(best_oracle, h((1.0 - gamma) * q) - h(gamma * q));
    }
    CHECK(best == doctest::Approx(best_oracle).epsilon(1e-9));
  }
}

TEST_CASE("private to coherent identity") {
  Rng rng(17);
  SUBCASE("bell block through the identity") {
    Vector bell = Vector::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    const CoherentEnsembleState coh =
        coherent_ensemble_state({1.0}, {bell}, 2, identity_channel(2));
    CHECK(private_to_coherent_check(coh) <= 1e-9);
    CHECK(ds_region_point(coh).private_rate == doctest::Approx(1.0));
  }
  SUBCASE("product block through the identity") {
    Vector phi = Vector::Zero(4);
    phi[0] = 1.0;
    const CoherentEnsembleState coh =
        coherent_ensemble_state({1.0}, {phi}, 2, identity_channel(2));
    CHECK(private_to_coherent_check(coh) <= 1e-9);
    CHECK(ds_region_point(coh).private_rate == doctest::Approx(0.0));
  }
  SUBCASE("random pure blocks through amplitude damping") {
    const WiretapChannel ch = standard_channel(ChannelKind::AmplitudeDamping, 0.3);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<Vector> blocks = {random_pure_vector(rng, 4), random_pure_vector(rng, 4)};
      const CoherentEnsembleState coh =
          coherent_ensemble_state({0.4, 0.6}, blocks, 2, ch);
      CHECK(private_to_coherent_check(coh) <= 1e-9);
    }
  }
}

TEST_CASE("region sweep") {
  const SlackParams s = default_slacks();
  SUBCASE("grid of size one is a single direct evaluation") {
    EncoderGridSpec grid;
    grid.prob_points = 1;
    grid.bloch_points = 1;
    const auto samples = sweep_region(identity_channel(2), grid, s);
    CHECK(samples.size() == 1);
    CHECK(samples[0].encoder_params[0] == doctest::Approx(0.5));
  }
  SUBCASE("identity sweep reaches both asymptotic corners") {
    EncoderGridSpec grid;
    grid.prob_points = 3;
    grid.bloch_points = 3;
    const auto samples = sweep_region(identity_channel(2), grid, s);
    bool has_10 = false, has_01 = false;
    for (const auto& sample : samples) {
      const auto& ds = sample.asymptotic;
      if (std::abs(ds.public_rate - 1.0) < 1e-9 && std::abs(ds.private_rate) < 1e-9)
        has_10 = true;
      if (std::abs(ds.public_rate) < 1e-9 && std::abs(ds.private_rate - 1.0) < 1e-9)
        has_01 = true;
    }
    CHECK(has_10);
    CHECK(has_01);
  }
  SUBCASE("refining the grid never shrinks the asymptotic frontier") {
    EncoderGridSpec coarse{2, 2, 200000};
    EncoderGridSpec fine{3, 3, 200000};
    const WiretapChannel ch = standard_channel(ChannelKind::AmplitudeDamping, 0.2);
    const auto few = sweep_region(ch, coarse, s);
    const auto many = sweep_region(ch, fine, s);
    for (const auto& cs : few) {
      // every coarse asymptotic point is dominated by some fine sample
      bool covered = false;
      for (const auto& fs : many) {
        if (fs.asymptotic.public_rate >= cs.asymptotic.public_rate - 1e-9 &&
            fs.asymptotic.private_rate >= cs.asymptotic.private_rate - 1e-9) {
          covered = true;
          break;
        }
      }
      CHECK(covered);
    }
  }
  SUBCASE("budget violations raise the cap error") {
    EncoderGridSpec grid{20, 20, 1000};
    CHECK_THROWS_AS(sweep_region(identity_channel(2), grid, s), CapError);
  }
}

TEST_CASE("achievable pair approaches the asymptotic point from below (classical fast path)") {
  // classical joint wiretap state built directly: diagonal BE blocks
  const std::vector<double> px = {0.5, 0.5};
  const std::vector<std::vector<double>> pyx = {{0.5, 0.5}, {0.5, 0.5}};
  auto pb = [](int x, int y) {
    static const double table[2][2][2] = {{{0.9, 0.1}, {0.1, 0.9}}, {{0.2, 0.8}, {0.4, 0.6}}};
    return std::vector<double>{table[x][y][0], table[x][y][1]};
  };
  auto pe = [](int x, int y) {
    static const double table[2][2][2] = {{{0.6, 0.4}, {0.4, 0.6}}, {{0.55, 0.45}, {0.45, 0.55}}};
    return std::vector<double>{table[x][y][0], table[x][y][1]};
  };

  auto make_joint = [&](int n) {
    // n-fold product with alphabets X^n, Y^n and tensored diagonal blocks
    JointWiretapState joint;
    const int nx = 1 << n, ny = 1 << n;
    joint.x_alphabet.resize(nx);
    joint.y_alphabet.resize(ny);
    for (int i = 0; i < nx; ++i) joint.x_alphabet[i] = std::to_string(i);
    for (int i = 0; i < ny; ++i) joint.y_alphabet[i] = std::to_string(i);
    joint.p_xy = Eigen::MatrixXd(nx, ny);
    joint.blocks_be.resize(nx);
    const int db = 1 << n, de = 1 << n;
    for (int xv = 0; xv < nx; ++xv) {
      for (int yv = 0; yv < ny; ++yv) {
        double w = 1.0;
        std::vector<double> diag_be(static_cast<size_t>(db) * de, 1.0);
        for (int i = 0; i < n; ++i) {
          const int x = (xv >> (n - 1 - i)) & 1;
          const int y = (yv >> (n - 1 - i)) & 1;
          w *= px[x] * pyx[x][y];
          const auto b = pb(x, y);
          const auto e = pe(x, y);
          for (int idx = 0; idx < db * de; ++idx) {
            const int bbit = (idx / de >> (n - 1 - i)) & 1;
            const int ebit = (idx % de >> (n - 1 - i)) & 1;
            diag_be[idx] *= b[bbit] * e[ebit];
          }
        }
        joint.p_xy(xv, yv) = w;
        Matrix m = Matrix::Zero(static_cast<long long>(db) * de, static_cast<long long>(db) * de);
        for (int idx = 0; idx < db * de; ++idx) m(idx, idx) = diag_be[idx];
        joint.blocks_be[xv].push_back(Op({{"B", db}, {"E", de}}, m));
      }
    }
    return joint;
  };

  const SlackParams s{0.2, 0.25, 0.1, 0.3, 0.1};
  const JointWiretapState base = make_joint(1);

  // asymptotic reference point of the same state
  const double r_ds = mutual_info(cq_state_xb(base), {"X"});
  const double big_r_ds =
      cond_mutual_info(cond_state_yb(base), {"Y"}) - cond_mutual_info(cond_state_ye(base), {"Y"});

  // classical reduction identical in structure to the rate formulas
  const double level = s.eps - s.delta;
  const double pen = std::log2(4.0 * s.eps / (s.delta * s.delta));
  const double pen_p = 2.0 * std::log2(1.0 / s.deltaPrime);
  const double ball = std::pow(std::sqrt(s.epsPrime) - s.deltaPrime, 2.0);

  auto xb_atoms = [&]() {
    std::vector<oracles::Atom> atoms;
    for (int x = 0; x < 2; ++x) {
      std::vector<double> bx = {0.0, 0.0}, ball_b = {0.0, 0.0};
      for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b) bx[b] += pyx[x][y] * pb(x, y)[b];
      for (int b = 0; b < 2; ++b) {
        double pbm = 0.0;
        for (int xx = 0; xx < 2; ++xx) {
          double v = 0.0;
          for (int y = 0; y < 2; ++y) v += pyx[xx][y] * pb(xx, y)[b];
          pbm += px[xx] * v;
        }
        atoms.push_back({px[x] * bx[b], px[x] * pbm});
      }
    }
    return atoms;
  }();

  auto yb_atoms = [&](int x) {
    std::vector<oracles::Atom> atoms;
    std::vector<double> bx = {0.0, 0.0};
    for (int y = 0; y < 2; ++y)
      for (int b = 0; b < 2; ++b) bx[b] += pyx[x][y] * pb(x, y)[b];
    for (int y = 0; y < 2; ++y)
      for (int b = 0; b < 2; ++b) atoms.push_back({pyx[x][y] * pb(x, y)[b], pyx[x][y] * bx[b]});
    return atoms;
  };
  auto ye_dmax = [&](int x) {
    std::vector<double> ex = {0.0, 0.0};
    for (int y = 0; y < 2; ++y)
      for (int e = 0; e < 2; ++e) ex[e] += pyx[x][y] * pe(x, y)[e];
    double lmax = 0.0;
    for (int y = 0; y < 2; ++y)
      for (int e = 0; e < 2; ++e) lmax = std::max(lmax, pe(x, y)[e] / ex[e]);
    return std::log2(lmax);
  };

  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
  };

  auto reduced_pair = [&](int n) {
    const double r_n = oracles::classical_dh(oracles::nfold_atoms(xb_atoms, n), level) - pen;
    std::vector<std::pair<double, double>> vals;
    for (int k = 0; k <= n; ++k) {
      const double w = binom(n, k) * std::pow(px[0], k) * std::pow(px[1], n - k);
      const auto combined = oracles::combine_atoms(oracles::nfold_atoms(yb_atoms(0), k),
                                                   oracles::nfold_atoms(yb_atoms(1), n - k));
      vals.push_back({oracles::classical_dh(combined, level), w});
    }
    std::sort(vals.rbegin(), vals.rend());
    double kept = 0.0, bob = 0.0;
    for (const auto& [v, w] : vals) {
      kept += w;
      bob = v;
      if (kept >= 1.0 - level * level) break;
    }
    std::vector<std::pair<double, double>> evals;
    for (int k = 0; k <= n; ++k) {
      const double w = binom(n, k) * std::pow(px[0], k) * std::pow(px[1], n - k);
      evals.push_back({k * ye_dmax(0) + (n - k) * ye_dmax(1), w});
    }
    std::sort(evals.begin(), evals.end());
    kept = 0.0;
    double eve = 0.0;
    for (const auto& [v, w] : evals) {
      kept += w;
      eve = v;
      if (kept >= 1.0 - ball) break;
    }
    return std::make_pair(r_n, bob - eve - pen - pen_p);
  };

  SUBCASE("reduction stays below the asymptotic point and improves with n") {
    double prev_r = -1e9, prev_big_r = -1e9;
    for (int n = 2; n <= 10; n += 2) {
      const auto [r_n, big_r_n] = reduced_pair(n);
      CHECK(r_n / n <= r_ds + 1e-9);
      CHECK(big_r_n / n <= big_r_ds + 1e-9);
      CHECK(r_n / n >= prev_r - 1e-9);
      CHECK(big_r_n / n >= prev_big_r - 1e-9);
      prev_r = r_n / n;
      prev_big_r = big_r_n / n;
    }
  }
  SUBCASE("implementation agrees with the reduction on one and two letters") {
    for (int n : {1, 2}) {
      const RatePair got = achievable_pair(make_joint(n), s);
      const auto [r_n, big_r_n] = reduced_pair(n);
      CHECK(got.public_rate == doctest::Approx(r_n).epsilon(1e-7));
      CHECK(got.private_rate == doctest::Approx(big_r_n).epsilon(1e-7));
    }
  }
}
