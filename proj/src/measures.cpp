#include "qdecon/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qdecon {

namespace {

void require_disjoint(std::initializer_list<const Labels*> groups) {
  std::set<std::string> seen;
  for (const Labels* g : groups) {
    for (const auto& l : *g) {
      if (!seen.insert(l).second) {
        throw Error("label '" + l + "' appears in more than one group");
      }
    }
  }
}

Labels join(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Eigenvalues below 1e-14 of the largest are roundoff for the states handled
// here; their square roots would otherwise leak ~1e-8 into fidelities.
Matrix sqrt_psd(const Matrix& m) {
  const HermitianEig e = eigh(m);
  const double floor = 1e-14 * std::max(e.values.maxCoeff(), 0.0);
  RealVector r(e.values.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    r[i] = e.values[i] > floor ? std::sqrt(e.values[i]) : 0.0;
  }
  return e.vectors * r.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace

double entropy_of(const RealVector& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy_of(const Matrix& rho) {
  return entropy_of(eigh(rho).values);
}

double entropy(const MultipartiteState& s, const Labels& systems) {
  if (systems.empty()) throw Error("entropy: empty system set");
  require_disjoint({&systems});
  return entropy_of(marginal(s, systems).matrix());
}

double conditional_entropy(const MultipartiteState& s, const Labels& target,
                           const Labels& cond) {
  require_disjoint({&target, &cond});
  const double hc = cond.empty() ? 0.0 : entropy(s, cond);
  return entropy(s, join(target, cond)) - hc;
}

double mutual_information(const MultipartiteState& s, const Labels& a, const Labels& b) {
  require_disjoint({&a, &b});
  return entropy(s, a) + entropy(s, b) - entropy(s, join(a, b));
}

double cqmi(const MultipartiteState& s, const Labels& a, const Labels& b,
            const Labels& e) {
  require_disjoint({&a, &b, &e});
  if (e.empty()) return mutual_information(s, a, b);
  const MultipartiteState abe = marginal(s, join(join(a, b), e));
  return entropy(abe, join(a, e)) + entropy(abe, join(b, e)) - entropy(abe, e) -
         entropy_of(abe.matrix());
}

double chain_rule_check(const MultipartiteState& s, const std::vector<Labels>& a_parts,
                        const Labels& b, const Labels& e) {
  if (a_parts.empty()) throw Error("chain_rule_check: no parts");
  Labels all_a;
  for (const auto& p : a_parts) all_a = join(all_a, p);
  require_disjoint({&all_a, &b, &e});
  if (a_parts.size() == 1) return 0.0;
  const double whole = cqmi(s, all_a, b, e);
  double sum = 0.0;
  Labels cond = e;
  for (const auto& p : a_parts) {
    sum += cqmi(s, p, b, cond);
    cond = join(cond, p);
  }
  return std::abs(whole - sum);
}

double fidelity(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("fidelity: dimension mismatch");
  }
  const Matrix p = sqrt_psd(a) * sqrt_psd(b);
  const double f = trace_norm(p);
  return f * f;
}

double fidelity(const MultipartiteState& a, const MultipartiteState& b) {
  if (!(a.layout() == b.layout())) throw Error("fidelity: layout mismatch");
  return fidelity(a.matrix(), b.matrix());
}

double trace_distance(const MultipartiteState& a, const MultipartiteState& b) {
  if (!(a.layout() == b.layout())) throw Error("trace_distance: layout mismatch");
  const RealVector v = eigh(a.matrix() - b.matrix()).values;
  return v.cwiseAbs().sum();
}

double purified_distance(const MultipartiteState& a, const MultipartiteState& b) {
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, fidelity(a, b))));
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error("binary_entropy: argument outside [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double continuity_bound_f(const BoundParams& p) {
  if (p.n < 1 || p.dim_b < 1 || !(p.eps >= 0.0 && p.eps <= 1.0)) {
    throw Error("continuity_bound_f: invalid parameters");
  }
  const double r = std::sqrt(p.eps);
  return 2.0 * r * p.n * std::log2(static_cast<double>(p.dim_b)) +
         (1.0 + r) * binary_entropy(r / (1.0 + r));
}

double recoverability_bound_g(const BoundParams& p) { return continuity_bound_f(p); }

double discord(const MultipartiteState& s, const Labels& a, const Labels& b,
               const Povm& povm) {
  require_disjoint({&a, &b});
  const MultipartiteState ab = marginal(s, join(a, b));
  if (povm.layout().dims() != ab.layout().select(a).dims()) {
    throw Error("discord: POVM layout does not match the measured systems");
  }
  const MultipartiteState zeta = apply_channel(povm.measurement_channel("X#"), ab, a);
  return mutual_information(ab, a, b) - mutual_information(zeta, {"X#"}, b);
}

}  // namespace qdecon
