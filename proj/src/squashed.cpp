#include "qdecon/squashed.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "qdecon/measures.hpp"

namespace qdecon {

namespace {

constexpr const char* kExt = "E#sq";

struct Extension {
  Matrix psi;  // dAB x r, purification amplitudes
  SystemLayout ab;
  Labels a, b;
  long r = 1;
  long k = 1;  // extension dimension
  long f = 1;  // Stinespring environment dimension
};

// V = G (G^dag G)^{-1/2}, shape (k f) x r.
Matrix isometry_from(const Matrix& g) {
  const HermitianEig e = eigh(g.adjoint() * g);
  RealVector inv(e.values.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv[i] = e.values[i] > 1e-300 ? 1.0 / std::sqrt(e.values[i]) : 0.0;
  }
  return g * e.vectors * inv.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

double half_cmi(const Extension& ext, const Matrix& v) {
  const long dab = ext.psi.rows();
  const Matrix phi = ext.psi * v.transpose();  // dAB x (k f)
  Matrix t(dab * ext.k, ext.f);
  for (long x = 0; x < dab; ++x) {
    for (long e = 0; e < ext.k; ++e) {
      t.row(x * ext.k + e) = phi.row(x).segment(e * ext.f, ext.f);
    }
  }
  const SystemLayout lay =
      ext.ab.concat(SystemLayout({kExt}, {static_cast<int>(ext.k)}));
  const MultipartiteState st = MultipartiteState::unchecked(lay, t * t.adjoint());
  return 0.5 * cqmi(st, ext.a, ext.b, {kExt});
}

Matrix unpack(const RealVector& x, long rows, long cols) {
  Matrix g(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      const long idx = 2 * (j * rows + i);
      g(i, j) = Complex(x[idx], x[idx + 1]);
    }
  }
  return g;
}

// BFGS with central-difference gradients and Armijo backtracking.
RealVector bfgs(const std::function<double(const RealVector&)>& f, RealVector x,
                int max_iters) {
  const long n = x.size();
  auto gradient = [&](const RealVector& p) {
    RealVector g(n);
    RealVector q = p;
    for (long i = 0; i < n; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(p[i]));
      q[i] = p[i] + h;
      const double up = f(q);
      q[i] = p[i] - h;
      const double dn = f(q);
      q[i] = p[i];
      g[i] = (up - dn) / (2.0 * h);
    }
    return g;
  };
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  double fx = f(x);
  RealVector g = gradient(x);
  for (int it = 0; it < max_iters; ++it) {
    if (g.norm() < 1e-9) break;
    RealVector d = -hinv * g;
    if (d.dot(g) >= 0.0) {
      hinv.setIdentity();
      d = -g;
    }
    double alpha = 1.0;
    RealVector xn;
    double fn = fx;
    bool moved = false;
    while (alpha > 1e-12) {
      xn = x + alpha * d;
      fn = f(xn);
      if (fn <= fx + 1e-4 * alpha * g.dot(d)) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
    const RealVector gn = gradient(xn);
    const RealVector s = xn - x;
    const RealVector yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
      hinv = (i - rho * s * yv.transpose()) * hinv * (i - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    const double improvement = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (improvement < 1e-13) break;
  }
  return x;
}

QuantumChannel channel_of(const Extension& ext, const Matrix& v) {
  std::vector<Matrix> kraus;
  for (long fi = 0; fi < ext.f; ++fi) {
    Matrix k(ext.k, ext.r);
    for (long e = 0; e < ext.k; ++e) k.row(e) = v.row(e * ext.f + fi);
    kraus.push_back(std::move(k));
  }
  return QuantumChannel::from_kraus(SystemLayout({"R"}, {static_cast<int>(ext.r)}),
                                    SystemLayout({"E"}, {static_cast<int>(ext.k)}),
                                    kraus);
}

}  // namespace

SquashedResult squashed_upper_bound(const MultipartiteState& s, const Labels& a,
                                    const Labels& b, int ext_dim, int restarts,
                                    std::uint64_t seed) {
  if (ext_dim < 1) throw Error("squashed_upper_bound: ext_dim must be >= 1");
  if (restarts < 0) throw Error("squashed_upper_bound: restarts must be >= 0");
  Labels ab_labels = a;
  ab_labels.insert(ab_labels.end(), b.begin(), b.end());
  const MultipartiteState rho_ab = marginal(s, ab_labels);
  const MultipartiteState pure = purify(rho_ab, "R#sq");
  const Vector psi = pure_vector(pure);

  Extension ext;
  ext.ab = rho_ab.layout();
  ext.a = a;
  ext.b = b;
  ext.r = pure.layout().dims().back();
  ext.k = ext_dim;
  ext.f = ext.r * ext.k;
  const long dab = rho_ab.dim();
  ext.psi = Matrix(dab, ext.r);
  for (long x = 0; x < dab; ++x) {
    for (long i = 0; i < ext.r; ++i) ext.psi(x, i) = psi[x * ext.r + i];
  }
  const long rows = ext.k * ext.f;

  SquashedResult best;
  best.value = std::numeric_limits<double>::infinity();
  int index = 0;
  auto consider = [&](const Matrix& v) {
    const double val = half_cmi(ext, v);
    if (val < best.value - 1e-12) {
      best.value = val;
      best.witness = channel_of(ext, v);
      best.best_candidate = index;
    }
    ++index;
  };

  // Trivial extension content: everything into the environment.
  {
    Matrix v = Matrix::Zero(rows, ext.r);
    for (long i = 0; i < ext.r; ++i) v(i, i) = 1.0;  // e = 0, f = i
    consider(v);
  }
  // Dephase R in its Schmidt basis into E.
  {
    Matrix v = Matrix::Zero(rows, ext.r);
    for (long i = 0; i < ext.r; ++i) v((i % ext.k) * ext.f + i, i) = 1.0;
    consider(v);
  }
  if (ext.k > 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const long nparams = 2 * rows * ext.r;
    auto objective = [&](const RealVector& x) {
      return half_cmi(ext, isometry_from(unpack(x, rows, ext.r)));
    };
    for (int rs = 0; rs < restarts; ++rs) {
      RealVector x0(nparams);
      for (long i = 0; i < nparams; ++i) x0[i] = nd(rng);
      const RealVector x = bfgs(objective, x0, 200);
      consider(isometry_from(unpack(x, rows, ext.r)));
    }
  }
  best.value = std::max(0.0, best.value);
  return best;
}

}  // namespace qdecon
