#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "qdecon/classical.hpp"
#include "qdecon/measures.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/squashed.hpp"
#include "qdecon/unitaries.hpp"
#include "state_io.hpp"

namespace qdecon::cli {

namespace {

constexpr double kQuantityTol = 1e-9;

double env_tol(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(x > 0.0) || !std::isfinite(x)) {
    throw UsageError(std::string(name) + " must be a positive number, got '" + v + "'");
  }
  return x;
}

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

MultipartiteState load(Report& rep, const std::string& key, const std::string& path,
                       const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  MultipartiteState s = parse_state(text, tol);
  rep.input(key, path, fnv1a_hex(text));
  return s;
}

void require_labels(const MultipartiteState& s, const Labels& labels) {
  for (const auto& l : labels) {
    if (!s.layout().contains(l)) throw UsageError("state has no system '" + l + "'");
  }
}

Povm make_povm(const std::string& kind, const SystemLayout& on, int elements,
               std::optional<std::uint64_t> seed) {
  if (kind == "computational") return Povm::computational(on);
  if (kind == "trivial") {
    const long d = on.total_dim();
    return Povm(on, {Matrix::Identity(d, d)});
  }
  if (kind == "random") {
    if (!seed) throw UsageError("--seed is required with --povm random");
    return Povm::random(on, elements, *seed);
  }
  throw UsageError("unknown POVM '" + kind + "'");
}

// Exact simulations keep every operator dense; refuse instances whose joint
// state would not fit comfortably in memory.
constexpr long kMaxSimDim = 1024;

void require_small(long dim, const char* what) {
  if (dim > kMaxSimDim) {
    throw UsageError(std::string(what) + ": joint dimension " + std::to_string(dim) +
                     " exceeds the exact-simulation limit of " + std::to_string(kMaxSimDim));
  }
}

long ipow(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// LB erasure of A^n: swap A^n into the discarded register, hand out a fresh
// maximally mixed copy.
LbProtocol swap_out_lb(const Roles& roles, int da) {
  const Labels an = copy_labels(roles.a, roles.n);
  const int dc = static_cast<int>(ipow(da, roles.n));
  SystemLayout in = SystemLayout(an, std::vector<int>(roles.n, da))
                        .concat(SystemLayout({roles.a + "'"}, {dc}));
  const SystemLayout out({roles.a + "hat", roles.a + "bar0"}, {dc, dc});
  Matrix u = Matrix::Zero(static_cast<long>(dc) * dc, static_cast<long>(dc) * dc);
  for (long a = 0; a < dc; ++a) {
    for (long c = 0; c < dc; ++c) u(c * dc + a, a * dc + c) = 1.0;
  }
  const MultipartiteState cat = maximally_mixed(SystemLayout({roles.a + "'"}, {dc}));
  LbProtocol p{roles,
               Isometry::unchecked(std::move(in), out, std::move(u)),
               cat,
               {roles.a + "bar0"},
               {roles.a + "hat"},
               copy_labels(roles.e, roles.n),
               std::nullopt};
  return p;
}

struct Opts {
  std::string state, other;
  Labels sys, given, a, b, e;
  std::string a1 = "A", b1 = "B", e1 = "E", r1 = "R";
  std::string method = "optimize", model = "lur", family = "twirl";
  std::string povm = "computational", protocol = "trace-env";
  int n = 1, m = 2, elements = 2, ent_dim = 1, ext_dim = 2, restarts = 4;
  double eps = 1e-8;
  double ab_eps = 0.01;
  std::optional<std::uint64_t> seed;
};

Roles roles_of(const Opts& o) {
  if (o.n < 1) throw UsageError("--n must be >= 1");
  return Roles{o.a1, o.b1, o.e1, o.n};
}

void cmd_entropy(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, o.sys);
  require_labels(s, o.given);
  const double h = conditional_entropy(s, o.sys, o.given);
  rep.result("entropy", h, kQuantityTol);
  if (o.given.empty()) rep.check_ge("nonnegative", h, 0.0, kQuantityTol);
}

void cmd_cqmi(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, o.a);
  require_labels(s, o.b);
  require_labels(s, o.e);
  const double i = cqmi(s, o.a, o.b, o.e);
  rep.result("cqmi", i, kQuantityTol);
  rep.check_ge("strong_subadditivity", i, 0.0, kQuantityTol);
}

void cmd_fidelity(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  const auto t = load(rep, "other", o.other, tol);
  if (!(s.layout() == t.layout())) throw UsageError("states have different layouts");
  const double f = fidelity(s, t);
  rep.result("fidelity", f, kQuantityTol);
  rep.check_ge("at_least_0", f, 0.0, kQuantityTol);
  rep.check_le("at_most_1", f, 1.0, kQuantityTol);
}

void cmd_recover(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, o.a);
  require_labels(s, o.b);
  require_labels(s, o.e);
  const double i = cqmi(s, o.a, o.b, o.e);
  rep.result("cqmi", i, kQuantityTol);
  double value = 0.0;
  if (o.method == "petz") {
    const QuantumChannel r = petz_recovery(s, o.a, o.e);
    value = recovery_fidelity(s, o.a, o.b, o.e, r);
    rep.result("fidelity", value, kQuantityTol);
  } else if (o.method == "optimize") {
    FrOptions fo;
    fo.tol_gap = tol.gap;
    fo.seed = o.seed;
    const FrResult fr = fidelity_of_recovery(s, o.a, o.b, o.e, fo);
    value = fr.value;
    rep.result("fidelity", fr.value, tol.gap);
    rep.result("upper_bound", fr.upper_bound, tol.gap);
    rep.result("petz_fidelity", fr.petz_value, kQuantityTol);
    rep.result("iterations", Json(fr.iterations));
    rep.check_le("certified_gap", fr.gap, 0.0, tol.gap);
    rep.check_ge("at_least_petz", fr.value, fr.petz_value, kQuantityTol);
  } else {
    throw UsageError("--method must be petz or optimize");
  }
  const double nlf = value > 0.0 ? -std::log2(value) : std::numeric_limits<double>::infinity();
  rep.result("neg_log2_fidelity", json_number(nlf));
  rep.check_ge("cqmi_minus_neg_log2_fidelity", i - nlf, 0.0, 1e-4);
  long db = 1;
  for (const auto& l : o.b) db *= s.layout().dim_of(l);
  const double eps = std::clamp(1.0 - value, 0.0, 1.0);
  rep.check_le("cqmi_within_recoverability_bound", i,
               continuity_bound_f({1, eps, static_cast<int>(db)}), kQuantityTol);
}

void cmd_deconstruct(const Opts& o, const Tolerances& tol, Report& rep) {
  const Roles roles = roles_of(o);
  const auto s0 = load(rep, "state", o.state, tol);
  require_labels(s0, {roles.a, roles.b, roles.e});
  const MultipartiteState rho = marginal(s0, {roles.a, roles.b, roles.e});
  const int da = rho.layout().dim_of(roles.a);
  const long base = ipow(rho.dim(), roles.n);

  ConditionReport cr;
  if (o.model == "lur") {
    require_small(base, "deconstruct");
    LurProtocol p = [&] {
      if (o.family == "twirl") {
        return make_lur(roles, hw_group(SystemLayout(copy_labels(roles.a, roles.n),
                                                     std::vector<int>(roles.n, da))));
      }
      if (o.family == "classical") return classical_side_deconstruction(rho, roles);
      throw UsageError("--family must be twirl or classical");
    }();
    if (o.family == "twirl") {
      // A^n ends up maximally mixed and product: preparing it is exact.
      const SystemLayout an(copy_labels(roles.a, roles.n), std::vector<int>(roles.n, da));
      const int de = rho.layout().dim_of(roles.e);
      const SystemLayout en(copy_labels(roles.e, roles.n), std::vector<int>(roles.n, de));
      p.witness = with_preparation(maximally_mixed(an), QuantumChannel::identity(en));
    }
    cr = verify_deconstruction(p, rho);
    rep.result("ensemble_size", Json(p.size()));
  } else if (o.model == "lb") {
    LbProtocol p = [&] {
      if (o.family == "twirl") {
        require_small(base * ipow(da, roles.n), "deconstruct");
        LbProtocol q = swap_out_lb(roles, da);
        const int de = rho.layout().dim_of(roles.e);
        const SystemLayout en(q.side, std::vector<int>(roles.n, de));
        q.witness = with_preparation(
            maximally_mixed(q.interaction.out_layout().select(q.recovered)),
            QuantumChannel::identity(en));
        return q;
      }
      if (o.family == "classical") {
        long mm = ipow(da, 2 * roles.n);
        long d = std::lround(std::sqrt(static_cast<double>(mm)));
        if (d * d != mm) {
          long p4 = 1;
          d = 1;
          while (p4 < mm) {
            p4 *= 4;
            d *= 2;
          }
          mm = p4;
        }
        require_small(base * d * d * mm, "deconstruct");
        return lb_from_lur(classical_side_deconstruction(rho, roles));
      }
      throw UsageError("--family must be twirl or classical");
    }();
    cr = verify_deconstruction(p, rho);
    rep.result("traced_dim", Json(p.traced_dim()));
  } else {
    throw UsageError("--model must be lur or lb");
  }
  rep.section("condition_report", to_json(cr));
  rep.result("cqmi", cqmi(rho, {roles.a}, {roles.b}, {roles.e}), kQuantityTol);
  rep.result("noise_active_rate", cr.noise_active_bits / roles.n, kQuantityTol);
  rep.check_le("eps_achieved", cr.eps_achieved, o.eps, 0.0);
  rep.check_ge("converse_gap", converse_gap(cr, rho, roles), 0.0, kQuantityTol);
}

MultipartiteState pure_aber(const MultipartiteState& s, const Roles& roles,
                            const std::string& r) {
  require_labels(s, {roles.a, roles.b, roles.e});
  if (s.layout().contains(r)) {
    const MultipartiteState m = marginal(s, {roles.a, roles.b, roles.e, r});
    const double purity = (m.matrix() * m.matrix()).trace().real();
    if (std::abs(purity - 1.0) > 1e-9) {
      throw UsageError("state on " + roles.a + roles.b + roles.e + r + " must be pure");
    }
    return m;
  }
  return purify(marginal(s, {roles.a, roles.b, roles.e}), r);
}

void cmd_erase(const Opts& o, const Tolerances& tol, Report& rep) {
  const Roles roles = roles_of(o);
  const auto s = load(rep, "state", o.state, tol);
  const MultipartiteState psi = pure_aber(s, roles, o.r1);
  require_small(ipow(psi.dim(), roles.n) * o.ent_dim * o.ent_dim, "erase");
  const RedistributionProtocol red = trivial_redistribution(roles, o.r1, psi, o.ent_dim);
  const ErasureProtocol er = erasure_from_redistribution(red);
  const MultipartiteState rho = marginal(psi, {roles.a, roles.b, roles.e});
  const ConditionReport cr = verify_erasure(er, rho);
  rep.section("condition_report", to_json(cr));
  const double ra = cr.noise_active_bits / roles.n;
  const double rp = cr.noise_passive_bits / roles.n;
  rep.result("rate_active", ra, kQuantityTol);
  rep.result("rate_passive", rp, kQuantityTol);
  rep.result("cqmi_abr", cqmi(psi, {roles.a}, {roles.b}, {o.r1}), kQuantityTol);
  rep.result("twice_h_a_given_r", 2.0 * conditional_entropy(psi, {roles.a}, {o.r1}),
             kQuantityTol);
  const RegionCheck rc = rate_region_check(psi, roles, o.r1, ra, rp, kQuantityTol);
  rep.check_le("eps_achieved", cr.eps_achieved, o.eps, 0.0);
  rep.check_ge("region_active", rc.margin_1, 0.0, kQuantityTol);
  rep.check_ge("region_total", rc.margin_2, 0.0, kQuantityTol);
}

void cmd_redistribute(const Opts& o, const Tolerances& tol, Report& rep) {
  const Roles roles = roles_of(o);
  const auto s = load(rep, "state", o.state, tol);
  const MultipartiteState psi = pure_aber(s, roles, o.r1);
  require_small(ipow(psi.dim(), roles.n) * o.ent_dim * o.ent_dim, "redistribute-verify");
  const RedistributionProtocol red = trivial_redistribution(roles, o.r1, psi, o.ent_dim);
  const double f = verify_redistribution(red, psi);
  const ErasureProtocol er = erasure_from_redistribution(red);
  const RedistributionProtocol back = redistribution_from_erasure(er, psi, o.r1);
  const double fb = verify_redistribution(back, psi);
  const double q = log2(static_cast<double>(red.message_dim())) / roles.n;
  const double e = red.log2_l() / roles.n;
  rep.result("fidelity", f, kQuantityTol);
  rep.result("uhlmann_round_trip_fidelity", fb, kQuantityTol);
  rep.result("rate_quantum", q, kQuantityTol);
  rep.result("rate_entanglement", e, kQuantityTol);
  const RegionCheck rc = redistribution_region_check(psi, roles, o.r1, q, e, kQuantityTol);
  rep.check_ge("fidelity", f, 1.0, 1e-6);
  rep.check_ge("uhlmann_round_trip_fidelity", fb, 1.0, 1e-6);
  rep.check_ge("region_quantum", rc.margin_1, 0.0, kQuantityTol);
  rep.check_ge("region_total", rc.margin_2, 0.0, kQuantityTol);
}

void cmd_discord(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, {o.a1, o.b1});
  const MultipartiteState ab = marginal(s, {o.a1, o.b1});
  const Povm povm = make_povm(o.povm, ab.layout().select(Labels{o.a1}), o.elements, o.seed);
  const double d = discord(ab, {o.a1}, {o.b1}, povm);
  const MultipartiteState dil = dilated_state(ab, o.a1, o.b1, povm, "X#", "E#");
  const double c = cqmi(dil, {"E#"}, {o.b1}, {"X#"});
  rep.result("discord", d, kQuantityTol);
  rep.result("dilated_cqmi", c, kQuantityTol);
  rep.check_le("identity_residual", std::abs(d - c), 0.0, 1e-8);
  rep.check_ge("nonnegative", d, 0.0, kQuantityTol);
}

void cmd_einselect(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, {o.a1, o.b1});
  const MultipartiteState ab = marginal(s, {o.a1, o.b1});
  const SystemLayout al = ab.layout().select(Labels{o.a1});
  const Povm povm = make_povm(o.povm, al, o.elements, o.seed);
  EinselectionProtocol p = [&] {
    if (o.protocol == "zero-noise") {
      // Read the outcome back into the matching basis vector of A.
      const int dx = static_cast<int>(povm.size());
      const int da = static_cast<int>(al.total_dim());
      std::vector<Matrix> kraus;
      for (int x = 0; x < dx; ++x) {
        Matrix k = Matrix::Zero(da, dx);
        k(x % da, x) = 1.0;
        kraus.push_back(k);
      }
      const QuantumChannel prep = QuantumChannel::from_kraus(
          SystemLayout({"X"}, {dx}), SystemLayout({o.a1}, {da}), kraus);
      return zero_noise_einselection(o.a1, o.b1, povm, prep);
    }
    if (o.protocol == "trace-env") {
      const MultipartiteState dil = dilated_state(ab, o.a1, o.b1, povm, "X", "Ed");
      const int ded = dil.layout().dim_of("Ed");
      require_small(static_cast<long>(ab.dim()) * ded * ded, "einselect");
      Roles rd{"Ed", o.b1, "X", 1};
      const SystemLayout in({"Ed_1", "E1'"}, {ded, 1});
      const SystemLayout out({"E2'", "E1'"}, {ded, 1});
      const MultipartiteState cat = MultipartiteState::unchecked(SystemLayout({"E1'"}, {1}),
                                                                 Matrix::Identity(1, 1));
      const SystemLayout xl({"X_1"}, {static_cast<int>(povm.size())});
      LbProtocol d{rd,
                   Isometry::unchecked(in, out, Matrix::Identity(ded, ded)),
                   cat,
                   {"E2'"},
                   {"E1'"},
                   {"X_1"},
                   with_preparation(cat, QuantumChannel::identity(xl))};
      const ConditionReport dr = verify_deconstruction(d, dil);
      rep.section("deconstruction_report", to_json(dr));
      return einselection_from_deconstruction(d, povm, o.a1);
    }
    throw UsageError("--protocol must be trace-env or zero-noise");
  }();
  const ConditionReport cr = verify_einselection(p, ab, povm);
  rep.section("condition_report", to_json(cr));
  const double d = discord(ab, {o.a1}, {o.b1}, povm);
  rep.result("discord", d, kQuantityTol);
  rep.check_le("eps_achieved", cr.eps_achieved, 1e-6, 0.0);
  rep.check_ge("noise_covers_discord", cr.noise_active_bits + cr.noise_passive_bits, d,
               kQuantityTol);
}

void cmd_squashed(const Opts& o, const Tolerances& tol, Report& rep) {
  const auto s = load(rep, "state", o.state, tol);
  require_labels(s, {o.a1, o.b1});
  if (o.ext_dim < 1 || o.restarts < 0) throw UsageError("--ext-dim >= 1, --restarts >= 0");
  const SquashedResult r =
      squashed_upper_bound(s, {o.a1}, {o.b1}, o.ext_dim, o.restarts, *o.seed);
  rep.result("squashed_upper_bound", r.value, kQuantityTol);
  rep.result("best_candidate", Json(r.best_candidate));
  rep.check_ge("nonnegative", r.value, 0.0, kQuantityTol);
  rep.check_le("at_most_half_mutual_information", r.value,
               0.5 * mutual_information(s, {o.a1}, {o.b1}), kQuantityTol);
}

void cmd_appendixb(const Opts& o, Report& rep) {
  if (o.n < 2 || o.m < 1 || o.n % o.m != 0) throw UsageError("need --n >= 2 and --m dividing n");
  const long nz = static_cast<long>(o.n) * (o.n - 1) / 2;
  if (o.m * nz * nz > kClassicalOracleLimit) {
    throw UsageError("appendixb: instance too large for the classical oracle");
  }
  const AppendixB t = appendixB_triple(o.n, o.m);
  const AppendixBBound b = appendixB_bound(o.n, o.m);
  const ClassicalRecovery rc = classical_for_oracle(t.coarse);
  const double cmi = t.fine.cmi();
  rep.result("cmi_xy_given_z", cmi, 1e-12);
  rep.result("oracle_fidelity", rc.value, rc.gap);
  rep.result("oracle_upper_bound", rc.upper_bound, rc.gap);
  rep.result("fid_bound", b.fid_bound, kQuantityTol);
  rep.result("relaxed_bound", b.relaxed_bound, kQuantityTol);
  const double nb = appendixB_noise_bound_bits(o.n, o.ab_eps);
  rep.result("eps", o.ab_eps, 0.0);
  rep.result("noise_lower_bound_bits", Json{{"value", json_number(nb)}, {"tol", kQuantityTol}});
  rep.check_ge("cmi_equals_1_low", cmi, 1.0, 1e-12);
  rep.check_le("cmi_equals_1_high", cmi, 1.0, 1e-12);
  rep.check_le("oracle_within_fid_bound", rc.upper_bound, b.fid_bound, 1e-9);
  rep.check_le("oracle_within_relaxed_bound", rc.upper_bound, b.relaxed_bound, 1e-9);
  rep.check_le("noise_bound_at_most_log2_n_minus_1", std::isfinite(nb) ? nb : 1e300,
               std::log2(static_cast<double>(o.n - 1)), kQuantityTol);
}

}  // namespace

Tolerances tolerances_from_env() {
  Tolerances t;
  t.herm = env_tol("QDECON_TOL_HERM", t.herm);
  t.trace = env_tol("QDECON_TOL_TRACE", t.trace);
  t.psd = env_tol("QDECON_TOL_PSD", t.psd);
  t.gap = env_tol("QDECON_TOL_GAP", t.gap);
  return t;
}

Report::Report(std::vector<std::string> command, const Tolerances& tol,
               std::optional<std::uint64_t> seed) {
  head_["command"] = std::move(command);
  head_["seed"] = seed ? Json(*seed) : Json(nullptr);
  head_["tolerances"] = {{"herm", tol.herm}, {"trace", tol.trace}, {"psd", tol.psd},
                         {"gap", tol.gap}};
}

void Report::input(const std::string& name, const std::string& path,
                   const std::string& digest) {
  inputs_[name] = {{"path", path}, {"fnv1a64", digest}};
}

void Report::result(const std::string& name, double value, double tol) {
  results_[name] = {{"value", json_number(value)}, {"tol", tol}};
}

void Report::result(const std::string& name, const Json& value) { results_[name] = value; }

bool Report::add_check(const std::string& name, double value, const char* rel, double bound,
                       double tol, bool ok) {
  checks_.push_back({{"name", name},
                     {"value", json_number(value)},
                     {"relation", rel},
                     {"bound", json_number(bound)},
                     {"tol", tol},
                     {"pass", ok}});
  pass_ = pass_ && ok;
  return ok;
}

bool Report::check_ge(const std::string& name, double value, double bound, double tol) {
  return add_check(name, value, ">=", bound, tol, value >= bound - tol);
}

bool Report::check_le(const std::string& name, double value, double bound, double tol) {
  return add_check(name, value, "<=", bound, tol, value <= bound + tol);
}

void Report::section(const std::string& name, Json value) { sections_[name] = std::move(value); }

Json Report::document() const {
  Json d = head_;
  d["inputs"] = inputs_;
  d["results"] = results_;
  for (const auto& [k, v] : sections_.items()) d[k] = v;
  d["checks"] = checks_;
  d["pass"] = pass_;
  return d;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["n"] = r.n;
  j["disturbance_fid"] = json_number(r.disturbance_fid);
  j["recoverability_fid"] = json_number(r.recoverability_fid);
  if (r.decoupling_fid) j["decoupling_fid"] = json_number(*r.decoupling_fid);
  if (r.faithfulness_fid) j["faithfulness_fid"] = json_number(*r.faithfulness_fid);
  j["eps_achieved"] = json_number(r.eps_achieved);
  j["noise_active_bits"] = json_number(r.noise_active_bits);
  j["noise_passive_bits"] = json_number(r.noise_passive_bits);
  j["recovery_upper_bound"] = json_number(r.recovery_upper_bound);
  j["recovery_method"] = r.recovery_method;
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qdecon: quantum state deconstruction toolkit", "qdecon"};
  app.require_subcommand(1);
  Opts o;
  std::uint64_t seed_value = 0;

  auto state_opt = [&](CLI::App* c) {
    c->add_option("--state", o.state, "QSTATE file")->required();
  };
  auto seed_opt = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--seed", seed_value, "random seed");
    if (required) opt->required();
    return opt;
  };
  auto roles_opt = [&](CLI::App* c) {
    c->add_option("--a", o.a1, "system A")->capture_default_str();
    c->add_option("--b", o.b1, "system B")->capture_default_str();
    c->add_option("--e", o.e1, "system E")->capture_default_str();
    c->add_option("--n", o.n, "copies")->capture_default_str();
  };

  auto* entropy = app.add_subcommand("entropy", "H(systems | given)");
  state_opt(entropy);
  entropy->add_option("--systems", o.sys)->delimiter(',')->required();
  entropy->add_option("--given", o.given)->delimiter(',');

  auto* cq = app.add_subcommand("cqmi", "I(A;B|E)");
  state_opt(cq);
  cq->add_option("--a", o.a)->delimiter(',')->required();
  cq->add_option("--b", o.b)->delimiter(',')->required();
  cq->add_option("--e", o.e)->delimiter(',');

  auto* fid = app.add_subcommand("fidelity", "F(state, other)");
  state_opt(fid);
  fid->add_option("--other", o.other)->required();

  auto* rec = app.add_subcommand("recover", "fidelity of recovery of A from E");
  state_opt(rec);
  rec->add_option("--a", o.a)->delimiter(',')->required();
  rec->add_option("--b", o.b)->delimiter(',')->required();
  rec->add_option("--e", o.e)->delimiter(',')->required();
  rec->add_option("--method", o.method)->check(CLI::IsMember({"petz", "optimize"}))
      ->capture_default_str();
  auto* rec_seed = seed_opt(rec, false);

  auto* dec = app.add_subcommand("deconstruct", "verify a builtin deconstruction protocol");
  state_opt(dec);
  roles_opt(dec);
  dec->add_option("--model", o.model)->check(CLI::IsMember({"lur", "lb"}))
      ->capture_default_str();
  dec->add_option("--family", o.family)->check(CLI::IsMember({"twirl", "classical"}))
      ->capture_default_str();
  dec->add_option("--eps", o.eps, "target epsilon")->capture_default_str();

  auto* er = app.add_subcommand("erase", "conditional erasure from trivial redistribution");
  state_opt(er);
  roles_opt(er);
  er->add_option("--r", o.r1, "reference system")->capture_default_str();
  er->add_option("--ent-dim", o.ent_dim)->capture_default_str();
  er->add_option("--eps", o.eps, "target epsilon")->capture_default_str();

  auto* rd = app.add_subcommand("redistribute-verify",
                                "trivial redistribution and its Uhlmann round trip");
  state_opt(rd);
  roles_opt(rd);
  rd->add_option("--r", o.r1, "reference system")->capture_default_str();
  rd->add_option("--ent-dim", o.ent_dim)->capture_default_str();

  auto povm_opts = [&](CLI::App* c) {
    c->add_option("--a", o.a1)->capture_default_str();
    c->add_option("--b", o.b1)->capture_default_str();
    c->add_option("--povm", o.povm)
        ->check(CLI::IsMember({"computational", "trivial", "random"}))
        ->capture_default_str();
    c->add_option("--elements", o.elements, "elements of a random POVM")
        ->capture_default_str();
    return seed_opt(c, false);
  };

  auto* ein = app.add_subcommand("einselect", "einselection simulation");
  state_opt(ein);
  auto* ein_seed = povm_opts(ein);
  ein->add_option("--protocol", o.protocol)
      ->check(CLI::IsMember({"trace-env", "zero-noise"}))
      ->capture_default_str();

  auto* dis = app.add_subcommand("discord", "discord for a fixed POVM");
  state_opt(dis);
  auto* dis_seed = povm_opts(dis);

  auto* sq = app.add_subcommand("squashed", "upper bound on squashed entanglement");
  state_opt(sq);
  sq->add_option("--a", o.a1)->capture_default_str();
  sq->add_option("--b", o.b1)->capture_default_str();
  sq->add_option("--ext-dim", o.ext_dim)->capture_default_str();
  sq->add_option("--restarts", o.restarts)->capture_default_str();
  seed_opt(sq, true);

  auto* ab = app.add_subcommand("appendixb", "classical counterexample family");
  ab->add_option("--n", o.n)->required();
  ab->add_option("--m", o.m)->required();
  ab->add_option("--eps", o.ab_eps, "epsilon for the noise lower bound")->capture_default_str();

  auto* su = app.add_subcommand("suite", "invariant corpus");
  seed_opt(su, true);

  std::vector<std::string> argv_store{"qdecon"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const bool has_seed = (sq->parsed() || su->parsed() || rec_seed->count() > 0 ||
                         ein_seed->count() > 0 || dis_seed->count() > 0);
  if (has_seed) o.seed = seed_value;

  try {
    const Tolerances tol = tolerances_from_env();
    Report rep(args, tol, o.seed);
    if (entropy->parsed()) cmd_entropy(o, tol, rep);
    else if (cq->parsed()) cmd_cqmi(o, tol, rep);
    else if (fid->parsed()) cmd_fidelity(o, tol, rep);
    else if (rec->parsed()) cmd_recover(o, tol, rep);
    else if (dec->parsed()) cmd_deconstruct(o, tol, rep);
    else if (er->parsed()) cmd_erase(o, tol, rep);
    else if (rd->parsed()) cmd_redistribute(o, tol, rep);
    else if (ein->parsed()) cmd_einselect(o, tol, rep);
    else if (dis->parsed()) cmd_discord(o, tol, rep);
    else if (sq->parsed()) cmd_squashed(o, tol, rep);
    else if (ab->parsed()) cmd_appendixb(o, rep);
    else if (su->parsed()) run_suite(*o.seed, tol, rep);
    out << rep.document().dump(2) << '\n';
    return rep.pass() ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qdecon::cli
