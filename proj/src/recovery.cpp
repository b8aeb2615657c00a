#include "qdecon/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qdecon/measures.hpp"
#include "qdecon/sdp.hpp"

namespace qdecon {

namespace {

Labels cat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Orthonormal basis of the eigenvectors with eigenvalue > tol, largest first.
struct Support {
  Matrix vecs;
  RealVector vals;
};

Support support_of(const Matrix& h, double tol) {
  const HermitianEig e = eigh(h);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = e.values.size(); i-- > 0;) {
    if (e.values[i] > tol) keep.push_back(i);
  }
  Support s{Matrix(h.rows(), static_cast<long>(keep.size())),
            RealVector(static_cast<long>(keep.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    s.vecs.col(static_cast<long>(k)) = e.vectors.col(keep[k]);
    s.vals[static_cast<long>(k)] = e.values[keep[k]];
  }
  return s;
}

Matrix psd_power(const Matrix& h, double power, double tol) {
  const HermitianEig e = eigh(h);
  RealVector v(e.values.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = e.values[i] > tol ? std::pow(e.values[i], power) : 0.0;
  }
  return e.vectors * v.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

Matrix psd_sqrt(const Matrix& h) {
  const HermitianEig e = eigh(h);
  const RealVector v = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * v.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

// Marginal matrix; the empty label set gives the 1x1 unit matrix.
Matrix marginal_matrix(const MultipartiteState& s, const Labels& keep) {
  if (keep.empty()) return Matrix::Identity(1, 1);
  return marginal(s, keep).matrix();
}

// Rescales a PSD Choi matrix so that Tr_out J = I.
Matrix normalize_tp(const Matrix& j, long out_dim, long in_dim) {
  const Matrix s = choi_output_trace(j, out_dim, in_dim);
  const Matrix k = kron(Matrix::Identity(out_dim, out_dim), psd_power(s, -0.5, 1e-300));
  return hermitian_part(k * j * k.adjoint());
}

Matrix clip_psd(const Matrix& h) {
  const HermitianEig e = eigh(h);
  const RealVector v = e.values.cwiseMax(0.0);
  return hermitian_part(e.vectors * v.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

// Hermitian basis patterns of r x r matrices: diagonal, real and imaginary
// parts of the upper triangle.
struct Pattern {
  int row;
  int col;
  Complex value;
  double identity_rhs;  // value of the functional on the identity
};

std::vector<Pattern> hermitian_patterns(int r) {
  std::vector<Pattern> out;
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) {
      if (a == b) {
        out.push_back({a, a, Complex(1.0, 0.0), 1.0});
      } else {
        out.push_back({a, b, Complex(0.5, 0.0), 0.0});
        out.push_back({a, b, Complex(0.0, 0.5), 0.0});
      }
    }
  }
  return out;
}

Matrix pattern_dense(const Pattern& p, int r) {
  Matrix m = Matrix::Zero(r, r);
  m(p.row, p.col) += p.value;
  if (p.row != p.col) m(p.col, p.row) += std::conj(p.value);
  return m;
}

}  // namespace

Matrix random_choi(long out_dim, long in_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const long n = out_dim * in_dim;
  Matrix g(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) g(i, j) = Complex(nd(rng), nd(rng));
  }
  return normalize_tp(g * g.adjoint(), out_dim, in_dim);
}

QuantumChannel petz_recovery(const MultipartiteState& s, const Labels& a,
                             const Labels& e, double tol_psd) {
  if (a.empty()) throw Error("petz_recovery: empty recovered system");
  const Labels ae = cat(a, e);
  const SystemLayout out = s.layout().select(ae);
  const SystemLayout in = s.layout().select(e);
  const Matrix rho_ae = marginal(s, ae).matrix();
  const Matrix rho_e = marginal_matrix(s, e);
  const long da = s.layout().dim_of(std::span<const std::string>(a));
  const long de = in.total_dim();
  const long dae = da * de;

  const Matrix s_ae = psd_sqrt(rho_ae);
  const Matrix d_e = psd_power(rho_e, -0.5, tol_psd);
  const Support sup = support_of(rho_e, tol_psd);
  const Matrix kernel = Matrix::Identity(de, de) - sup.vecs * sup.vecs.adjoint();
  const Matrix ida = Matrix::Identity(da, da);

  Matrix j = Matrix::Zero(dae * de, dae * de);
  for (long t = 0; t < de; ++t) {
    for (long tp = 0; tp < de; ++tp) {
      const Matrix x = d_e.col(t) * d_e.row(tp);
      Matrix blk = s_ae * kron(ida, x) * s_ae;
      blk += kernel(tp, t) * Matrix::Identity(dae, dae) / static_cast<double>(dae);
      for (long o = 0; o < dae; ++o) {
        for (long op = 0; op < dae; ++op) j(o * de + t, op * de + tp) = blk(o, op);
      }
    }
  }
  return QuantumChannel::unchecked(in, out, std::move(j));
}

double recovery_fidelity(const MultipartiteState& s, const Labels& a, const Labels& b,
                         const Labels& e, const QuantumChannel& r) {
  const Labels ae = cat(a, e);
  if (r.out_layout().labels() != ae || r.in_layout().labels() != e) {
    throw Error("recovery_fidelity: channel layouts do not match the A, E labels");
  }
  const Matrix rho = marginal(s, cat(ae, b)).matrix();
  const Matrix rho_eb = marginal(s, cat(e, b)).matrix();
  const long db = s.layout().dim_of(std::span<const std::string>(b));
  const Matrix sigma = apply_choi(r.choi(), r.out_dim(), r.in_dim(), rho_eb, db);
  return fidelity(rho, sigma);
}

namespace {

FrResult solve_recovery(const MultipartiteState& s, const Labels& a, const Labels& b,
                        const Labels& e, const FrOptions& opts) {
  const Labels ae = cat(a, e);
  const Labels all = cat(ae, b);
  {
    Labels sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error("fidelity_of_recovery: label groups overlap");
    }
  }
  const SystemLayout& lay = s.layout();
  const long da = lay.dim_of(std::span<const std::string>(a));
  const long de = lay.dim_of(std::span<const std::string>(e));
  const long db = lay.dim_of(std::span<const std::string>(b));
  const long dae = da * de;
  const double tol_sup = 1e-12;

  const Matrix rho = marginal(s, all).matrix();
  const Matrix rho_ae = marginal(s, ae).matrix();
  const Matrix rho_e = marginal_matrix(s, e);
  const Matrix rho_eb = marginal(s, cat(e, b)).matrix();

  FrResult result;
  result.witness = petz_recovery(s, a, e);
  result.petz_value = recovery_fidelity(s, a, b, e, result.witness);

  const Support q_sup = support_of(rho_ae, tol_sup);
  const Support p_sup = support_of(rho_e, tol_sup);
  const Support r_sup = support_of(rho, tol_sup);
  const Matrix& qm = q_sup.vecs;
  const Matrix& pm = p_sup.vecs;
  const int q = static_cast<int>(qm.cols());
  const int p = static_cast<int>(pm.cols());
  const int r = static_cast<int>(r_sup.vecs.cols());

  const long n_constraints = 2L * r * r + static_cast<long>(p) * p;
  if (n_constraints > opts.max_constraints) {
    throw SizeLimitError("fidelity_of_recovery: problem has " + std::to_string(n_constraints) +
                " constraints, above the limit of " +
                std::to_string(opts.max_constraints));
  }

  const Matrix idb = Matrix::Identity(db, db);
  const Matrix ut = kron(qm.adjoint(), idb) * r_sup.vecs;             // (q db) x r
  const Matrix rho_c = kron(pm.adjoint(), idb) * rho_eb * kron(pm, idb);  // (p db)^2
  const int n1 = q * p;
  const int n2 = 2 * r;

  // Adjoint of J -> Ut^dag Phi(J) Ut, evaluated on a pattern Y (r x r).
  auto phi_adj = [&](const Matrix& y_small) {
    const Matrix y = ut * y_small * ut.adjoint();
    Matrix k(n1, n1);
    for (int o = 0; o < q; ++o) {
      for (int op = 0; op < q; ++op) {
        const Matrix yb = y.block(op * db, o * db, db, db);
        for (int t = 0; t < p; ++t) {
          for (int tp = 0; tp < p; ++tp) {
            const Matrix rb = rho_c.block(t * db, tp * db, db, db);
            k(op * p + tp, o * p + t) = yb.cwiseProduct(rb.transpose()).sum();
          }
        }
      }
    }
    return Matrix(hermitian_part(k));
  };

  SdpProblem pr;
  pr.block_dims = {n1, n2};
  pr.objective = {Matrix::Zero(n1, n1), Matrix::Zero(n2, n2)};
  for (int i = 0; i < r; ++i) {
    const double w = 0.5 * std::sqrt(std::max(0.0, r_sup.vals[i]));
    pr.objective[1](i, r + i) = w;
    pr.objective[1](r + i, i) = w;
  }
  std::vector<long> w11_diag, w22_diag, tp_diag;
  for (const auto& pat : hermitian_patterns(r)) {
    SdpConstraint c;
    c.rhs = pat.identity_rhs;
    c.parts.push_back({1, Matrix(), {{pat.row, pat.col, pat.value}}});
    if (pat.row == pat.col) w11_diag.push_back(static_cast<long>(pr.constraints.size()));
    pr.constraints.push_back(std::move(c));
  }
  for (const auto& pat : hermitian_patterns(r)) {
    SdpConstraint c;
    c.rhs = 0.0;
    c.parts.push_back({1, Matrix(), {{r + pat.row, r + pat.col, pat.value}}});
    c.parts.push_back({0, Matrix(-phi_adj(pattern_dense(pat, r))), {}});
    if (pat.row == pat.col) w22_diag.push_back(static_cast<long>(pr.constraints.size()));
    pr.constraints.push_back(std::move(c));
  }
  for (const auto& pat : hermitian_patterns(p)) {
    SdpConstraint c;
    c.rhs = pat.identity_rhs;
    c.parts.push_back({0, kron(Matrix::Identity(q, q), pattern_dense(pat, p)), {}});
    if (pat.row == pat.col) tp_diag.push_back(static_cast<long>(pr.constraints.size()));
    pr.constraints.push_back(std::move(c));
  }

  // Interior starting point.
  Matrix j0 = Matrix::Identity(n1, n1) / static_cast<double>(q);
  if (opts.seed) {
    j0 = 0.5 * random_choi(q, p, *opts.seed) + 0.5 * j0;
  }
  Matrix w0 = Matrix::Identity(n2, n2);
  w0.bottomRightCorner(r, r) =
      ut.adjoint() * apply_choi(j0, q, p, rho_c, db) * ut + 1e-6 * Matrix::Identity(r, r);
  SdpOptions sopt;
  sopt.max_iters = opts.max_iters;
  sopt.x0 = std::vector<Matrix>{j0, hermitian_part(w0)};
  const SdpResult sol = solve_sdp(pr, sopt);
  result.iterations = sol.iterations;

  // Primal witness: project to an exact CPTP map and lift to the full space.
  const Matrix jc = normalize_tp(clip_psd(sol.x[0]), q, p);
  const Matrix lift_map = kron(qm, pm.conjugate());
  const Matrix kernel_t =
      (Matrix::Identity(de, de) - pm * pm.adjoint()).transpose();
  const Matrix j_full = lift_map * jc * lift_map.adjoint() +
                        kron(Matrix::Identity(dae, dae) / static_cast<double>(dae),
                             kernel_t);
  QuantumChannel witness = QuantumChannel::unchecked(lay.select(e), lay.select(ae), j_full);
  const double value = fidelity(rho, apply_choi(j_full, dae, de, rho_eb, db));
  if (value >= result.petz_value) {
    result.value = value;
    result.witness = std::move(witness);
  } else {
    result.value = result.petz_value;
  }

  // Dual certificate: shift the diagonal families until Z >= 0.
  RealVector y = sol.y;
  auto zblocks = [&]() {
    auto z = constraint_adjoint(pr, y);
    z[0] -= pr.objective[0];
    z[1] -= pr.objective[1];
    return z;
  };
  auto zw = zblocks();
  const Matrix y1 = zw[1].topLeftCorner(r, r);
  const double lo1 = eigh(y1).values.minCoeff();
  const double floor1 = 1e-10;
  if (lo1 < floor1) {
    for (long i : w11_diag) y[i] += floor1 - lo1;
  }
  zw = zblocks();
  const Matrix y1r = zw[1].topLeftCorner(r, r);
  const Matrix half = zw[1].topRightCorner(r, r);
  const Matrix schur = zw[1].bottomRightCorner(r, r) -
                       half.adjoint() * y1r.llt().solve(half);
  const double lo2 = eigh(schur).values.minCoeff();
  if (lo2 < 0.0) {
    for (long i : w22_diag) y[i] += -lo2 * (1.0 + 1e-12) + 1e-15;
  }
  zw = zblocks();
  const double lo3 = eigh(zw[0]).values.minCoeff();
  if (lo3 < 0.0) {
    for (long i : tp_diag) y[i] += -lo3 * (1.0 + 1e-12) + 1e-15;
  }
  double ub = 0.0;
  for (std::size_t i = 0; i < pr.constraints.size(); ++i) {
    ub += pr.constraints[i].rhs * y[static_cast<long>(i)];
  }
  result.upper_bound = std::min(1.0, ub * ub);
  result.gap = std::max(0.0, result.upper_bound - result.value);
  result.converged = result.gap <= opts.tol_gap;
  return result;
}

// Splits off A systems that are exactly product with everything else.
// F(P A; B|E) for rho_P (x) rho_{ABE} equals F(A; B|E): prepending rho_P maps a
// recovery of A to one of PA, and tracing P maps back.
constexpr double kProductTol = 1e-11;

}  // namespace

FrResult fidelity_of_recovery(const MultipartiteState& s, const Labels& a,
                              const Labels& b, const Labels& e, const FrOptions& opts) {
  if (a.empty() || b.empty()) throw Error("fidelity_of_recovery: empty A or B");
  const Labels all = cat(cat(a, e), b);
  MultipartiteState rest = marginal(s, all);
  Labels kept;
  Labels split;
  std::vector<MultipartiteState> factors;
  for (const auto& l : a) {
    Labels others;
    for (const auto& x : rest.labels()) {
      if (x != l) others.push_back(x);
    }
    const MultipartiteState ml = marginal(rest, {l});
    const MultipartiteState mo = marginal(rest, others);
    const Matrix prod = permute_matrix(kron(ml.matrix(), mo.matrix()),
                                       ml.layout().concat(mo.layout()), rest.labels());
    if (max_abs(prod - rest.matrix()) <= kProductTol) {
      split.push_back(l);
      factors.push_back(ml);
      rest = mo;
    } else {
      kept.push_back(l);
    }
  }
  if (split.empty()) return solve_recovery(s, a, b, e, opts);

  FrResult result;
  QuantumChannel inner;
  if (kept.empty()) {
    inner = QuantumChannel::identity(s.layout().select(e));
    result.value = result.upper_bound = 1.0;
    result.gap = 0.0;
    result.converged = true;
  } else {
    result = solve_recovery(rest, kept, b, e, opts);
    inner = result.witness;
  }
  for (std::size_t i = factors.size(); i-- > 0;) inner = with_preparation(factors[i], inner);
  result.witness = permute_outputs(inner, cat(a, e));
  result.petz_value = recovery_fidelity(s, a, b, e, petz_recovery(s, a, e));
  return result;
}

FrCheck fr_inequality_check(const MultipartiteState& s, const Labels& a,
                            const Labels& b, const Labels& e, const FrOptions& opts) {
  FrCheck c;
  c.recovery = fidelity_of_recovery(s, a, b, e, opts);
  c.cqmi = cqmi(s, a, b, e);
  c.neg_log_f = -std::log2(std::min(1.0, c.recovery.value));
  c.slack = c.cqmi - c.neg_log_f;
  return c;
}

Isometry measurement_dilation(const Povm& povm, const DilationLabels& labels) {
  const long da = povm.layout().total_dim();
  const long nx = static_cast<long>(povm.size());
  const long d0 = nx * nx;
  const long dim = da * d0;
  Matrix v = Matrix::Zero(dim, da);
  for (long x = 0; x < nx; ++x) {
    const Matrix root = psd_sqrt(povm.elements()[x]);
    for (long a = 0; a < da; ++a) {
      for (long i = 0; i < da; ++i) v(x * (da * nx) + i * nx + x, a) = root(i, a);
    }
  }
  const Matrix uc = complete_to_unitary(v);
  Matrix full(dim, dim);
  long next = da;
  for (long a = 0; a < da; ++a) {
    for (long e0 = 0; e0 < d0; ++e0) {
      full.col(a * d0 + e0) = e0 == 0 ? uc.col(a) : uc.col(next++);
    }
  }
  const SystemLayout in =
      povm.layout().concat(SystemLayout({labels.e0}, {static_cast<int>(d0)}));
  const SystemLayout out({labels.x, labels.ebar, labels.etilde},
                         {static_cast<int>(nx), static_cast<int>(da), static_cast<int>(nx)});
  return Isometry(in, out, std::move(full));
}

}  // namespace qdecon
