#include "qdecon/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdecon {

namespace {

using Blocks = std::vector<Matrix>;

// Re Tr(A G) for one part; G need not be Hermitian.
double part_value(const SdpPart& p, const Matrix& g) {
  if (p.dense.size() != 0) return p.dense.cwiseProduct(g.transpose()).sum().real();
  double acc = 0.0;
  for (const auto& e : p.entries) {
    if (e.row == e.col) {
      acc += (e.value * g(e.row, e.row)).real();
    } else {
      acc += (e.value * g(e.col, e.row)).real() +
             (std::conj(e.value) * g(e.row, e.col)).real();
    }
  }
  return acc;
}

void add_part(const SdpPart& p, double y, Matrix& out) {
  if (p.dense.size() != 0) {
    out += y * p.dense;
    return;
  }
  for (const auto& e : p.entries) {
    out(e.row, e.col) += y * e.value;
    if (e.row != e.col) out(e.col, e.row) += y * std::conj(e.value);
  }
}

// X A Zi restricted to the block of part p.
void add_g(const SdpPart& p, const Matrix& x, const Matrix& zi, Matrix& g) {
  if (p.dense.size() != 0) {
    g.noalias() += x * p.dense * zi;
    return;
  }
  for (const auto& e : p.entries) {
    g.noalias() += e.value * x.col(e.row) * zi.row(e.col);
    if (e.row != e.col) g.noalias() += std::conj(e.value) * x.col(e.col) * zi.row(e.row);
  }
}

double functional(const SdpConstraint& c, const Blocks& m) {
  double acc = 0.0;
  for (const auto& p : c.parts) {
    if (m[p.block].size() != 0) acc += part_value(p, m[p.block]);
  }
  return acc;
}

RealVector apply_a(const SdpProblem& pr, const Blocks& m) {
  RealVector v(pr.constraints.size());
  for (std::size_t i = 0; i < pr.constraints.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = functional(pr.constraints[i], m);
  }
  return v;
}

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k].cwiseProduct(b[k].transpose()).sum().real();
  }
  return acc;
}

double frob(const Blocks& a) {
  double acc = 0.0;
  for (const auto& m : a) acc += m.squaredNorm();
  return std::sqrt(acc);
}

// Largest alpha with x + alpha dx >= 0 (infinity when unbounded).
double max_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix l = llt.matrixL();
  Matrix w = l.triangularView<Eigen::Lower>().solve(dx);
  w = l.triangularView<Eigen::Lower>().solve(w.adjoint().eval()).adjoint();
  const double lo = eigh(hermitian_part(w)).values.minCoeff();
  if (lo >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lo;
}

Matrix inverse_pd(const Matrix& z) {
  Eigen::LLT<Matrix> llt(z);
  if (llt.info() != Eigen::Success) {
    throw Error("solve_sdp: dual iterate lost positive definiteness");
  }
  return hermitian_part(llt.solve(Matrix::Identity(z.rows(), z.cols())));
}

}  // namespace

double constraint_value(const SdpConstraint& c, const std::vector<Matrix>& x) {
  return functional(c, x);
}

std::vector<Matrix> constraint_adjoint(const SdpProblem& problem, const RealVector& y) {
  Blocks out;
  for (int d : problem.block_dims) out.push_back(Matrix::Zero(d, d));
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    if (yi == 0.0) continue;
    for (const auto& p : problem.constraints[i].parts) add_part(p, yi, out[p.block]);
  }
  return out;
}

SdpResult solve_sdp(const SdpProblem& pr, const SdpOptions& opt) {
  const std::size_t nb = pr.block_dims.size();
  const long m = static_cast<long>(pr.constraints.size());
  long n_total = 0;
  for (int d : pr.block_dims) n_total += d;

  RealVector b(m);
  for (long i = 0; i < m; ++i) b[i] = pr.constraints[i].rhs;
  // Blocks touched by each constraint.
  std::vector<std::vector<int>> touches(m);
  for (long i = 0; i < m; ++i) {
    for (const auto& p : pr.constraints[i].parts) {
      if (std::find(touches[i].begin(), touches[i].end(), p.block) == touches[i].end()) {
        touches[i].push_back(p.block);
      }
    }
  }

  Blocks x, z;
  for (std::size_t k = 0; k < nb; ++k) {
    const int d = pr.block_dims[k];
    x.push_back(opt.x0 ? hermitian_part((*opt.x0)[k]) : Matrix(Matrix::Identity(d, d)));
    z.push_back(Matrix::Identity(d, d));
  }
  RealVector y = RealVector::Zero(m);
  const double b_norm = b.norm();
  double c_norm = 0.0;
  for (const auto& c : pr.objective) c_norm += c.squaredNorm();
  c_norm = std::sqrt(c_norm);

  SdpResult res;
  for (int it = 0; it < opt.max_iters; ++it) {
    Blocks zi(nb);
    for (std::size_t k = 0; k < nb; ++k) zi[k] = inverse_pd(z[k]);

    const RealVector rp = b - apply_a(pr, x);
    Blocks rd = constraint_adjoint(pr, y);
    for (std::size_t k = 0; k < nb; ++k) rd[k] -= pr.objective[k] + z[k];

    const double pobj = inner(pr.objective, x);
    const double dobj = b.dot(y);
    const double mu = inner(x, z) / static_cast<double>(n_total);
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    res.dual_infeasibility = frob(rd) / (1.0 + c_norm);
    res.iterations = it;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (rel_gap <= opt.tol && res.primal_infeasibility <= opt.tol &&
        res.dual_infeasibility <= opt.tol) {
      res.converged = true;
      break;
    }

    // Schur complement M_ij = Re Tr(A_i X A_j Z^-1).
    Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(m, m);
    std::vector<Blocks> g(m);
    for (long j = 0; j < m; ++j) {
      g[j].assign(nb, Matrix());
      for (int blk : touches[j]) {
        g[j][blk] = Matrix::Zero(pr.block_dims[blk], pr.block_dims[blk]);
      }
      for (const auto& p : pr.constraints[j].parts) add_g(p, x[p.block], zi[p.block], g[j][p.block]);
    }
    for (long j = 0; j < m; ++j) {
      for (long i = j; i < m; ++i) {
        const double v = functional(pr.constraints[i], g[j]);
        mm(i, j) = v;
        mm(j, i) = v;
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(mm);
    if (ldlt.info() != Eigen::Success) break;

    // Direction for a given complementarity target K (dX = K - X dZ Z^-1).
    auto direction = [&](const Blocks& k, Blocks& dx, RealVector& dy, Blocks& dz) {
      Blocks t(nb);
      for (std::size_t q = 0; q < nb; ++q) t[q] = k[q] - x[q] * rd[q] * zi[q];
      dy = ldlt.solve(apply_a(pr, t) - rp);
      dz = constraint_adjoint(pr, dy);
      dx.assign(nb, Matrix());
      for (std::size_t q = 0; q < nb; ++q) {
        dz[q] += rd[q];
        dz[q] = hermitian_part(dz[q]);
        dx[q] = hermitian_part(k[q] - x[q] * dz[q] * zi[q]);
      }
    };
    auto steps = [&](const Blocks& dx, const Blocks& dz, double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (std::size_t q = 0; q < nb; ++q) {
        ap = std::min(ap, 0.98 * max_step(x[q], dx[q]));
        ad = std::min(ad, 0.98 * max_step(z[q], dz[q]));
      }
    };

    Blocks kp(nb);
    for (std::size_t q = 0; q < nb; ++q) kp[q] = -x[q];
    Blocks dxp, dzp;
    RealVector dyp;
    direction(kp, dxp, dyp, dzp);
    double ap = 0.0, ad = 0.0;
    steps(dxp, dzp, ap, ad);
    Blocks xa(nb), za(nb);
    for (std::size_t q = 0; q < nb; ++q) {
      xa[q] = x[q] + ap * dxp[q];
      za[q] = z[q] + ad * dzp[q];
    }
    const double mu_aff = inner(xa, za) / static_cast<double>(n_total);
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    Blocks kc(nb);
    for (std::size_t q = 0; q < nb; ++q) {
      const long d = pr.block_dims[q];
      kc[q] = (sigma * mu * Matrix::Identity(d, d) - dxp[q] * dzp[q]) * zi[q] - x[q];
    }
    Blocks dx, dz;
    RealVector dy;
    direction(kc, dx, dy, dz);
    steps(dx, dz, ap, ad);
    if (ap <= 0.0 && ad <= 0.0) break;
    // Rounding can leave a full step numerically singular; back off until
    // both iterates factor.
    Blocks xn(nb), zn(nb);
    bool ok = false;
    for (int tries = 0; tries < 40 && !ok; ++tries) {
      ok = true;
      for (std::size_t q = 0; q < nb && ok; ++q) {
        xn[q] = hermitian_part(x[q] + ap * dx[q]);
        zn[q] = hermitian_part(z[q] + ad * dz[q]);
        ok = Eigen::LLT<Matrix>(xn[q]).info() == Eigen::Success &&
             Eigen::LLT<Matrix>(zn[q]).info() == Eigen::Success;
      }
      if (!ok) {
        ap *= 0.5;
        ad *= 0.5;
      }
    }
    if (!ok) break;
    x = std::move(xn);
    z = std::move(zn);
    y += ad * dy;
    res.iterations = it + 1;
  }
  if (!res.converged) {
    const RealVector rp = b - apply_a(pr, x);
    Blocks rd = constraint_adjoint(pr, y);
    for (std::size_t k = 0; k < nb; ++k) rd[k] -= pr.objective[k] + z[k];
    res.primal_objective = inner(pr.objective, x);
    res.dual_objective = b.dot(y);
    res.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    res.dual_infeasibility = frob(rd) / (1.0 + c_norm);
  }
  res.x = std::move(x);
  res.z = std::move(z);
  res.y = std::move(y);
  return res;
}

}  // namespace qdecon
