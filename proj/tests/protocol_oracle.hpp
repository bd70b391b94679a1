#pragma once

// Dense full-matrix route through the public/private protocol, used as the
// oracle for the block-sparse simulator. Classical registers are explicit
// diagonal factors here; everything is assembled and measured as one big
// matrix with plain Eigen operations.

#include "oracles.hpp"

#include <vector>

namespace proto_oracle {

using oracles::Matrix;

struct Inputs {
  int nx = 0, ny = 0;
  int m_count = 1, l_count = 1, k_count = 1;
  int db = 0, de = 0;
  std::vector<double> px;                    // p(x)
  std::vector<std::vector<double>> pyx;      // p(y|x)
  std::vector<std::vector<Matrix>> sigma_be; // [x][y] on B⊗E, B-major
  std::vector<Matrix> w;                     // public test blocks W^x on B
  std::vector<std::vector<Matrix>> g;        // private test blocks G^{x,y} on B
};

struct Results {
  double public_error = 0.0;
  double private_error = 0.0;
  double merged_privacy = 0.0;
  std::vector<double> secrecy_per_l;
};

// Partial trace over the middle factor of a (dc ⊗ db ⊗ de) matrix.
inline Matrix ptrace_middle(const Matrix& m, long long dc, int db, int de) {
  Matrix out = Matrix::Zero(dc * de, dc * de);
  for (long long c1 = 0; c1 < dc; ++c1)
    for (long long c2 = 0; c2 < dc; ++c2)
      for (int b = 0; b < db; ++b)
        for (int e1 = 0; e1 < de; ++e1)
          for (int e2 = 0; e2 < de; ++e2)
            out(c1 * de + e1, c2 * de + e2) +=
                m((c1 * db + b) * de + e1, (c2 * db + b) * de + e2);
  return out;
}

// Embed an operator acting on B into classical-block position c of C ⊗ B.
inline void add_block(Matrix& big, long long c, const Matrix& op, int d) {
  big.block(c * d, c * d, d, d) += op;
}

inline Results run(const Inputs& in) {
  Results res;

  // ---- public stage on X^M ⊗ B ----
  {
    long long n_codebooks = 1;
    for (int m = 0; m < in.m_count; ++m) n_codebooks *= in.nx;
    const long long dim = n_codebooks * in.db;

    std::vector<Matrix> rho_b(in.nx, Matrix::Zero(in.db, in.db));
    for (int x = 0; x < in.nx; ++x)
      for (int y = 0; y < in.ny; ++y) {
        // TrE of σ_BE
        Matrix b = Matrix::Zero(in.db, in.db);
        for (int b1 = 0; b1 < in.db; ++b1)
          for (int b2 = 0; b2 < in.db; ++b2)
            for (int e = 0; e < in.de; ++e)
              b(b1, b2) += in.sigma_be[x][y](b1 * in.de + e, b2 * in.de + e);
        rho_b[x] += in.pyx[x][y] * b;
      }

    auto codebook_digit = [&](long long code, int pos) {
      for (int i = in.m_count - 1; i > pos; --i) code /= in.nx;
      return static_cast<int>(code % in.nx);
    };

    if (in.m_count == 1) {
      res.public_error = 0.0;
    } else {
      std::vector<Matrix> gamma(in.m_count, Matrix::Zero(dim, dim));
      std::vector<Matrix> rho(in.m_count, Matrix::Zero(dim, dim));
      for (long long code = 0; code < n_codebooks; ++code) {
        double weight = 1.0;
        for (int pos = 0; pos < in.m_count; ++pos) weight *= in.px[codebook_digit(code, pos)];
        for (int m = 0; m < in.m_count; ++m) {
          const int xm = codebook_digit(code, m);
          add_block(gamma[m], code, in.w[xm], in.db);
          add_block(rho[m], code, weight * rho_b[xm], in.db);
        }
      }
      Matrix s = Matrix::Zero(dim, dim);
      for (const auto& gm : gamma) s += gm;
      const Matrix isq = oracles::inv_sqrt_psd(s);
      double err = 0.0;
      for (int m = 0; m < in.m_count; ++m) {
        const Matrix lam = isq * gamma[m] * isq;
        err += 1.0 - std::real((lam * rho[m]).trace());
      }
      res.public_error = err / in.m_count;
    }
  }

  // ---- private stage on (X ⊗ Y^{LK}) ⊗ B ⊗ E ----
  {
    const int slots = in.l_count * in.k_count;
    long long n_y = 1;
    for (int j = 0; j < slots; ++j) n_y *= in.ny;
    const long long dc = in.nx * n_y;

    auto y_digit = [&](long long ycode, int pos) {
      for (int i = slots - 1; i > pos; --i) ycode /= in.ny;
      return static_cast<int>(ycode % in.ny);
    };

    // POVM on C ⊗ B from the per-slot test blocks.
    std::vector<Matrix> povm;
    Matrix completion;
    {
      std::vector<Matrix> raw(slots, Matrix::Zero(dc * in.db, dc * in.db));
      for (int x = 0; x < in.nx; ++x) {
        for (long long ycode = 0; ycode < n_y; ++ycode) {
          const long long c = x * n_y + ycode;
          for (int j = 0; j < slots; ++j) {
            add_block(raw[j], c, in.g[x][y_digit(ycode, j)], in.db);
          }
        }
      }
      Matrix s = Matrix::Zero(dc * in.db, dc * in.db);
      for (const auto& r : raw) s += r;
      const Matrix isq = oracles::inv_sqrt_psd(s);
      Matrix sum = Matrix::Zero(dc * in.db, dc * in.db);
      for (const auto& r : raw) {
        povm.push_back(isq * r * isq);
        sum += povm.back();
      }
      completion = Matrix::Identity(dc * in.db, dc * in.db) - sum;
    }

    auto branch_weight = [&](int x, long long ycode) {
      double w = in.px[x];
      for (int j = 0; j < slots; ++j) w *= in.pyx[x][y_digit(ycode, j)];
      return w;
    };

    // Reference Σ_c w_c |c⟩⟨c| ⊗ σ̃_E^x on C ⊗ E.
    std::vector<Matrix> sigma_e_avg(in.nx, Matrix::Zero(in.de, in.de));
    for (int x = 0; x < in.nx; ++x)
      for (int y = 0; y < in.ny; ++y) {
        Matrix e = Matrix::Zero(in.de, in.de);
        for (int e1 = 0; e1 < in.de; ++e1)
          for (int e2 = 0; e2 < in.de; ++e2)
            for (int b = 0; b < in.db; ++b)
              e(e1, e2) += in.sigma_be[x][y](b * in.de + e1, b * in.de + e2);
        sigma_e_avg[x] += in.pyx[x][y] * e;
      }
    Matrix ref = Matrix::Zero(dc * in.de, dc * in.de);
    for (int x = 0; x < in.nx; ++x)
      for (long long ycode = 0; ycode < n_y; ++ycode)
        add_block(ref, x * n_y + ycode, branch_weight(x, ycode) * sigma_e_avg[x], in.de);

    double p_l = 0.0;
    double merged = 0.0;
    res.secrecy_per_l.assign(in.l_count, 0.0);
    for (int l = 0; l < in.l_count; ++l) {
      // key-averaged state on C ⊗ B ⊗ E for true message l
      Matrix state = Matrix::Zero(dc * in.db * in.de, dc * in.db * in.de);
      for (int x = 0; x < in.nx; ++x) {
        for (long long ycode = 0; ycode < n_y; ++ycode) {
          const long long c = x * n_y + ycode;
          Matrix avg = Matrix::Zero(in.db * in.de, in.db * in.de);
          for (int k = 0; k < in.k_count; ++k) {
            avg += in.sigma_be[x][y_digit(ycode, l * in.k_count + k)] / in.k_count;
          }
          add_block(state, c, branch_weight(x, ycode) * avg, in.db * in.de);
        }
      }

      const Matrix eve_state = ptrace_middle(state, dc, in.db, in.de);
      res.secrecy_per_l[l] = 0.5 * oracles::trace_norm_herm(eve_state - ref);

      if (in.l_count == 1) {
        merged += 0.5 * oracles::trace_norm_herm(eve_state - ref);
        continue;
      }

      // decoder outputs: bin measurements extended by 1_E
      double dist = 0.0;
      double wrong_mass = 0.0;
      for (int lp = 0; lp <= in.l_count; ++lp) {
        Matrix meas;
        if (lp == in.l_count) {
          meas = completion;
        } else {
          meas = Matrix::Zero(dc * in.db, dc * in.db);
          for (int kp = 0; kp < in.k_count; ++kp) meas += povm[lp * in.k_count + kp];
        }
        // O_{l'} = Tr_B{(meas ⊗ 1_E)·state}
        Matrix big = Matrix::Zero(dc * in.db * in.de, dc * in.db * in.de);
        for (long long r = 0; r < dc * in.db; ++r)
          for (long long q = 0; q < dc * in.db; ++q)
            if (std::abs(meas(r, q)) > 1e-300)
              for (int e = 0; e < in.de; ++e) big(r * in.de + e, q * in.de + e) = meas(r, q);
        const Matrix after = big * state;
        const Matrix o_lp = ptrace_middle(0.5 * (after + after.adjoint().eval()), dc, in.db, in.de);
        if (lp == l) {
          dist += oracles::trace_norm_herm(o_lp - ref);
        } else {
          dist += oracles::trace_norm_herm(o_lp);
          wrong_mass += std::real(o_lp.trace());
        }
      }
      merged += 0.5 * dist / in.l_count;
      p_l += wrong_mass / in.l_count;
    }
    res.private_error = p_l;
    res.merged_privacy = merged;
  }
  return res;
}

} // namespace proto_oracle
