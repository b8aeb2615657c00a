#include "qdecon/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdecon {

ClassicalTriple::ClassicalTriple(int nx, int ny, int nz, std::vector<double> table)
    : nx_(nx), ny_(ny), nz_(nz), table_(std::move(table)) {
  if (nx < 1 || ny < 1 || nz < 1) throw Error("ClassicalTriple: alphabet sizes must be >= 1");
  if (table_.size() != static_cast<std::size_t>(nx) * ny * nz) {
    throw Error("ClassicalTriple: table size does not match alphabets");
  }
  double total = 0.0;
  for (double v : table_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("ClassicalTriple: invalid entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("ClassicalTriple: table does not sum to 1");
}

MultipartiteState ClassicalTriple::to_state(const std::string& x, const std::string& y,
                                            const std::string& z) const {
  const long d = static_cast<long>(table_.size());
  Matrix m = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i) m(i, i) = table_[static_cast<std::size_t>(i)];
  return MultipartiteState::unchecked(SystemLayout({x, y, z}, {nx_, ny_, nz_}), m);
}

namespace {

double h(const std::vector<double>& p) {
  double acc = 0.0;
  for (double v : p) {
    if (v > 0.0) acc -= v * std::log2(v);
  }
  return acc;
}

}  // namespace

double ClassicalTriple::cmi() const {
  std::vector<double> xz(static_cast<std::size_t>(nx_) * nz_, 0.0);
  std::vector<double> yz(static_cast<std::size_t>(ny_) * nz_, 0.0);
  std::vector<double> zz(static_cast<std::size_t>(nz_), 0.0);
  for (int x = 0; x < nx_; ++x) {
    for (int y = 0; y < ny_; ++y) {
      for (int z = 0; z < nz_; ++z) {
        const double v = p(x, y, z);
        xz[static_cast<std::size_t>(x) * nz_ + z] += v;
        yz[static_cast<std::size_t>(y) * nz_ + z] += v;
        zz[static_cast<std::size_t>(z)] += v;
      }
    }
  }
  return h(xz) + h(yz) - h(zz) - h(table_);
}

double ClassicalTriple::conditional_entropy_yz() const {
  std::vector<double> yz(static_cast<std::size_t>(ny_) * nz_, 0.0);
  std::vector<double> zz(static_cast<std::size_t>(nz_), 0.0);
  for (int x = 0; x < nx_; ++x) {
    for (int y = 0; y < ny_; ++y) {
      for (int z = 0; z < nz_; ++z) {
        yz[static_cast<std::size_t>(y) * nz_ + z] += p(x, y, z);
        zz[static_cast<std::size_t>(z)] += p(x, y, z);
      }
    }
  }
  return h(yz) - h(zz);
}

namespace {

// Dual of the classical recovery problem:
//   min_{t > 0, s} 1/2 (p't + sum_z' s_z')  s.t.  s_z' >= c_{r,z'}(t),
//   c_{r,z'}(t) = sum_{k in row r} w_{y_k, z'} / t_k.
struct DualProblem {
  int nz = 0;
  int rows = 0;
  std::vector<double> p;              // support probabilities
  std::vector<int> row_of;            // row (x * nz + z) of each support entry
  std::vector<int> y_of;
  std::vector<std::vector<int>> members;  // support entries per row
  Eigen::MatrixXd w;                  // p_YZ(y, z')
};

double c_value(const DualProblem& dp, const RealVector& t, int r, int zp) {
  double acc = 0.0;
  for (int k : dp.members[r]) acc += dp.w(dp.y_of[k], zp) / t[k];
  return acc;
}

double upper(const DualProblem& dp, const RealVector& t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dp.p.size(); ++k) acc += dp.p[k] * t[static_cast<long>(k)];
  for (int zp = 0; zp < dp.nz; ++zp) {
    double best = 0.0;
    for (int r = 0; r < dp.rows; ++r) {
      if (!dp.members[r].empty()) best = std::max(best, c_value(dp, t, r, zp));
    }
    acc += best;
  }
  return 0.5 * acc;
}

double primal_value(const DualProblem& dp, const Eigen::MatrixXd& q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dp.p.size(); ++k) {
    double l = 0.0;
    for (int zp = 0; zp < dp.nz; ++zp) l += q(dp.row_of[k], zp) * dp.w(dp.y_of[k], zp);
    acc += std::sqrt(dp.p[k] * std::max(0.0, l));
  }
  return acc;
}

// Barrier objective; returns +inf outside the domain.
double barrier(const DualProblem& dp, const RealVector& v, double tau) {
  const long kk = static_cast<long>(dp.p.size());
  double f = 0.0;
  for (long k = 0; k < kk; ++k) {
    if (v[k] <= 0.0) return std::numeric_limits<double>::infinity();
    f += 0.5 * tau * dp.p[static_cast<std::size_t>(k)] * v[k] - std::log(v[k]);
  }
  const RealVector t = v.head(kk);
  for (int zp = 0; zp < dp.nz; ++zp) {
    const double s = v[kk + zp];
    f += 0.5 * tau * s;
    for (int r = 0; r < dp.rows; ++r) {
      if (dp.members[r].empty()) continue;
      const double g = s - c_value(dp, t, r, zp);
      if (g <= 0.0) return std::numeric_limits<double>::infinity();
      f -= std::log(g);
    }
  }
  return f;
}

}  // namespace

ClassicalRecovery classical_for_oracle(const ClassicalTriple& tr, double tol_gap) {
  const int nx = tr.nx(), ny = tr.ny(), nz = tr.nz();
  if (static_cast<long>(nx) * nz * nz > kClassicalOracleLimit) {
    throw Error("classical_for_oracle: alphabets too large for the exact solver");
  }
  DualProblem dp;
  dp.nz = nz;
  dp.rows = nx * nz;
  dp.members.assign(static_cast<std::size_t>(dp.rows), {});
  dp.w = Eigen::MatrixXd::Zero(ny, nz);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      for (int z = 0; z < nz; ++z) {
        const double v = tr.p(x, y, z);
        dp.w(y, z) += v;
        if (v > 0.0) {
          dp.members[static_cast<std::size_t>(x * nz + z)].push_back(
              static_cast<int>(dp.p.size()));
          dp.p.push_back(v);
          dp.row_of.push_back(x * nz + z);
          dp.y_of.push_back(y);
        }
      }
    }
  }
  const long kk = static_cast<long>(dp.p.size());
  const long nv = kk + nz;
  std::vector<int> live_rows;
  for (int r = 0; r < dp.rows; ++r) {
    if (!dp.members[r].empty()) live_rows.push_back(r);
  }
  const double n_log = static_cast<double>(kk + static_cast<long>(live_rows.size()) * nz);

  RealVector v(nv);
  v.head(kk).setOnes();
  for (int zp = 0; zp < nz; ++zp) {
    double best = 0.0;
    for (int r : live_rows) best = std::max(best, c_value(dp, v.head(kk), r, zp));
    v[kk + zp] = best + 1.0;
  }

  ClassicalRecovery out;
  out.table = Eigen::MatrixXd::Zero(dp.rows, nz);
  double tau = 1.0;
  for (int outer = 0; outer < 200; ++outer) {
    // Centering by damped Newton.
    for (int it = 0; it < 200; ++it) {
      RealVector grad = RealVector::Zero(nv);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nv, nv);
      for (long k = 0; k < kk; ++k) {
        grad[k] += 0.5 * tau * dp.p[static_cast<std::size_t>(k)] - 1.0 / v[k];
        hess(k, k) += 1.0 / (v[k] * v[k]);
      }
      for (int zp = 0; zp < nz; ++zp) grad[kk + zp] += 0.5 * tau;
      for (int r : live_rows) {
        const auto& mem = dp.members[r];
        for (int zp = 0; zp < nz; ++zp) {
          const double g = v[kk + zp] - c_value(dp, v.head(kk), r, zp);
          // Gradient of g: e_{s_z'} and w / t_k^2 on the row's t entries.
          std::vector<std::pair<long, double>> dg;
          dg.emplace_back(kk + zp, 1.0);
          for (int k : mem) {
            const double wk = dp.w(dp.y_of[k], zp);
            dg.emplace_back(k, wk / (v[k] * v[k]));
          }
          for (const auto& [i, gi] : dg) {
            grad[i] -= gi / g;
            for (const auto& [j, gj] : dg) hess(i, j) += gi * gj / (g * g);
          }
          for (int k : mem) {
            const double wk = dp.w(dp.y_of[k], zp);
            hess(k, k) += 2.0 * wk / (v[k] * v[k] * v[k] * g);
          }
        }
      }
      const RealVector step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (decrement < 1e-14) break;
      double alpha = 1.0;
      const double f0 = barrier(dp, v, tau);
      while (alpha > 1e-16) {
        const RealVector cand = v + alpha * step;
        const double f1 = barrier(dp, cand, tau);
        if (std::isfinite(f1) && f1 <= f0 - 0.25 * alpha * decrement) {
          v = cand;
          break;
        }
        alpha *= 0.5;
      }
      if (alpha <= 1e-16) break;
    }

    // Primal recovery from the centering conditions in s.
    const RealVector t = v.head(kk);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dp.rows, nz);
    for (int zp = 0; zp < nz; ++zp) {
      double col = 0.0;
      for (int r : live_rows) {
        const double g = v[kk + zp] - c_value(dp, t, r, zp);
        q(r, zp) = 1.0 / g;
        col += q(r, zp);
      }
      if (col > 0.0) q.col(zp) /= col;
    }
    const double phi = primal_value(dp, q);
    const double u = upper(dp, t);
    out.value = phi * phi;
    out.upper_bound = u * u;
    out.gap = out.upper_bound - out.value;
    out.table = q;
    if (out.gap <= tol_gap || n_log / tau < 1e-15) break;
    tau *= 8.0;
  }
  return out;
}

AppendixB appendixB_triple(int n, int m) {
  if (n < 2 || m < 1 || n % m != 0) throw Error("appendixB_triple: need n >= 2 and m | n");
  const int npairs = n * (n - 1) / 2;
  const int cls = n / m;
  std::vector<double> fine(static_cast<std::size_t>(n) * n * npairs, 0.0);
  std::vector<double> coarse(static_cast<std::size_t>(m) * n * npairs, 0.0);
  const double w = 1.0 / (static_cast<double>(n) * (n - 1));
  int z = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l, ++z) {
      for (int i : {k, l}) {
        fine[(static_cast<std::size_t>(i) * n + i) * npairs + z] = w;
        coarse[(static_cast<std::size_t>(i / cls) * n + i) * npairs + z] += w;
      }
    }
  }
  return {ClassicalTriple(n, n, npairs, std::move(fine)),
          ClassicalTriple(m, n, npairs, std::move(coarse))};
}

AppendixBBound appendixB_bound(int n, int m) {
  if (n < 2 || m < 1 || n % m != 0) throw Error("appendixB_bound: need n >= 2 and m | n");
  const double a = n - 1;
  const double c = static_cast<double>(n / m) - 1.0;
  return {a / (2.0 * a - c), (a + c) / (2.0 * a)};
}

double appendixB_noise_bound_bits(int n, double eps) {
  if (n < 2) throw Error("appendixB_noise_bound_bits: need n >= 2");
  if (!(eps >= 0.0) || eps >= 0.5) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(static_cast<double>(n - 1)) + std::log2((1.0 - 2.0 * eps) / (1.0 - eps));
}

}  // namespace qdecon
