#include "qdecon/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qdecon/measures.hpp"

namespace qdecon {

namespace {

Labels cat(Labels a, const Labels& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::set<std::string> as_set(const Labels& l) { return {l.begin(), l.end()}; }

double log2d(long d) { return std::log2(static_cast<double>(d)); }

std::vector<std::size_t> positions_in(const SystemLayout& layout, const Labels& order) {
  std::vector<std::size_t> idx;
  for (const auto& l : order) {
    auto i = layout.index_of(l);
    if (!i) throw Error("unknown label '" + l + "'");
    idx.push_back(*i);
  }
  return idx;
}

Vector permute_vector(const Vector& v, const SystemLayout& layout, const Labels& order) {
  if (order.size() != layout.size()) throw Error("permute_vector: not a permutation");
  const auto map = permutation_index_map(layout.dims(), positions_in(layout, order));
  Vector out(v.size());
  for (std::size_t i = 0; i < map.size(); ++i) out[static_cast<long>(i)] = v[map[i]];
  return out;
}

struct PureVec {
  SystemLayout layout;
  Vector v;
};

PureVec kron_vec(const PureVec& a, const PureVec& b) {
  Vector out(a.v.size() * b.v.size());
  for (long i = 0; i < a.v.size(); ++i) out.segment(i * b.v.size(), b.v.size()) = a.v[i] * b.v;
  return {a.layout.concat(b.layout), out};
}

PureVec apply_vec(const Isometry& u, const PureVec& p) {
  const Isometry ext = extend(u, p.layout);
  return {ext.out_layout(), ext.matrix() * p.v};
}

PureVec relabel_vec(PureVec p, const std::map<std::string, std::string>& rename) {
  Labels labels = p.layout.labels();
  for (auto& l : labels) {
    auto it = rename.find(l);
    if (it != rename.end()) l = it->second;
  }
  return {SystemLayout(labels, p.layout.dims()), std::move(p.v)};
}

// |Phi> = D^{-1/2} sum_i |i>_{left} |i>_{right} over the total index of `left`.
PureVec max_entangled_vec(const SystemLayout& left, const std::string& right) {
  const long d = left.total_dim();
  Vector v = Vector::Zero(d * d);
  for (long i = 0; i < d; ++i) v[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  return {left.concat(SystemLayout({right}, {static_cast<int>(d)})), v};
}

PureVec tensor_power_vec(const MultipartiteState& psi, int n) {
  const Vector one = pure_vector(psi);
  PureVec acc{SystemLayout(), Vector::Ones(1)};
  for (int i = 1; i <= n; ++i) {
    Labels l;
    for (const auto& x : psi.labels()) l.push_back(copy_label(x, i));
    acc = kron_vec(acc, {SystemLayout(l, psi.layout().dims()), one});
  }
  return acc;
}

MultipartiteState prepare_input(const Roles& r, const MultipartiteState& rho,
                                const MultipartiteState& catalyst) {
  if (r.n < 1) throw Error("protocol: copy count must be >= 1");
  const MultipartiteState base = marginal(rho, {r.a, r.b, r.e});
  return tensor_product(tensor_power(base, r.n), catalyst);
}

// Output layout of the systems A^n A' E^n after `in` -> `out` acts on them.
void check_roles(const Roles& r, const MultipartiteState& catalyst, const SystemLayout& in,
                 const SystemLayout& out, const Labels& traced, const Labels& recovered,
                 const Labels& side, const char* what) {
  const std::string w = what;
  if (r.n < 1) throw Error(w + ": copy count must be >= 1");
  if (r.a == r.b || r.a == r.e || r.b == r.e) throw Error(w + ": roles must be distinct");
  Labels data = cat(copy_labels(r.a, r.n), copy_labels(r.e, r.n));
  data = cat(data, catalyst.labels());
  const std::set<std::string> allowed = as_set(data);
  for (const auto& l : in.labels()) {
    if (!allowed.count(l)) {
      throw Error(w + ": unitary acts on '" + l + "', outside A^n E^n and the catalyst");
    }
  }
  // Systems present after the unitary, excluding B^n.
  std::set<std::string> after = allowed;
  for (const auto& l : in.labels()) after.erase(l);
  for (const auto& l : out.labels()) {
    if (!after.insert(l).second) throw Error(w + ": output label '" + l + "' collides");
  }
  for (const auto& l : copy_labels(r.b, r.n)) {
    if (after.count(l)) throw Error(w + ": output label '" + l + "' collides with B^n");
  }
  const Labels named = cat(cat(traced, recovered), side);
  if (as_set(named).size() != named.size() || as_set(named) != after) {
    throw Error(w + ": traced, recovered and side must partition the output systems");
  }
  if (recovered.empty()) throw Error(w + ": nothing to recover");
  if (side.size() != static_cast<std::size_t>(r.n)) {
    throw Error(w + ": side must hold one system per copy of E");
  }
}

ConditionReport verify_common(const MultipartiteState& omega, const MultipartiteState& rho,
                              const Roles& r, const Labels& recovered, const Labels& side,
                              const std::optional<QuantumChannel>& witness,
                              const VerifyOptions& opts) {
  ConditionReport rep;
  rep.n = r.n;
  const Labels bn = copy_labels(r.b, r.n);
  const Labels en = copy_labels(r.e, r.n);

  // Disturbance: omega_{B^n side} against rho_BE^{(x) n} with side -> E^n.
  const MultipartiteState ref = tensor_power(marginal(rho, {r.b, r.e}), r.n);
  std::map<std::string, std::string> rename;
  for (int i = 0; i < r.n; ++i) rename[side[i]] = en[i];
  MultipartiteState obe = relabel(marginal(omega, cat(bn, side)), rename);
  for (std::size_t k = 0; k < ref.layout().size(); ++k) {
    const auto& l = ref.labels()[k];
    if (obe.layout().dim_of(l) != ref.layout().dims()[k]) {
      throw Error("verify: side system '" + l + "' does not match E in dimension");
    }
  }
  rep.disturbance_fid = fidelity(permute_systems(obe, ref.labels()), ref);

  double w = -1.0;
  if (witness) {
    w = recovery_fidelity(omega, recovered, bn, side, *witness);
    if (w >= 1.0 - opts.witness_accept) {
      rep.recoverability_fid = w;
      rep.recovery_upper_bound = 1.0;
      rep.recovery_method = "witness";
      rep.witness = witness;
    }
  }
  if (rep.recovery_method.empty()) {
    try {
      const FrResult fr = fidelity_of_recovery(omega, recovered, bn, side, opts.fr);
      rep.recovery_upper_bound = fr.upper_bound;
      if (w > fr.value) {
        rep.recoverability_fid = w;
        rep.recovery_method = "witness";
        rep.witness = witness;
      } else {
        rep.recoverability_fid = fr.value;
        rep.recovery_method = "optimizer";
        rep.witness = fr.witness;
      }
    } catch (const SizeLimitError&) {
      // Too large for the optimizer: fall back to the Petz map.
      const QuantumChannel petz = petz_recovery(omega, recovered, side);
      const double pv = recovery_fidelity(omega, recovered, bn, side, petz);
      rep.recovery_upper_bound = 1.0;
      if (w > pv) {
        rep.recoverability_fid = w;
        rep.recovery_method = "witness";
        rep.witness = witness;
      } else {
        rep.recoverability_fid = pv;
        rep.recovery_method = "petz";
        rep.witness = petz;
      }
    }
  }
  rep.eps_achieved = 1.0 - std::min(rep.disturbance_fid, rep.recoverability_fid);
  return rep;
}

QuantumChannel prepare_with_identity(const MultipartiteState& sigma,
                                     const SystemLayout& side) {
  return with_preparation(sigma, QuantumChannel::identity(side));
}

QuantumChannel attach_preparation(const QuantumChannel& w, const MultipartiteState& sigma,
                                  const Labels& order) {
  return permute_outputs(with_preparation(sigma, w), order);
}

// Isometry with its output systems reordered.
Isometry reorder_outputs(const Isometry& u, const Labels& order) {
  const SystemLayout& out = u.out_layout();
  const auto map = permutation_index_map(out.dims(), positions_in(out, order));
  Matrix m(u.matrix().rows(), u.matrix().cols());
  for (std::size_t i = 0; i < map.size(); ++i) m.row(static_cast<long>(i)) = u.matrix().row(map[i]);
  return Isometry::unchecked(u.in_layout(), out.select(order), std::move(m));
}

}  // namespace

std::string copy_label(const std::string& base, int i) {
  return base + "_" + std::to_string(i);
}

Labels copy_labels(const std::string& base, int n) {
  Labels out;
  for (int i = 1; i <= n; ++i) out.push_back(copy_label(base, i));
  return out;
}

MultipartiteState tensor_power(const MultipartiteState& s, int n) {
  if (n < 1) throw Error("tensor_power: n must be >= 1");
  MultipartiteState acc = trivial_state();
  for (int i = 1; i <= n; ++i) {
    std::map<std::string, std::string> rename;
    for (const auto& l : s.labels()) rename[l] = copy_label(l, i);
    acc = tensor_product(acc, relabel(s, rename));
  }
  return acc;
}

MultipartiteState trivial_state() {
  return MultipartiteState::unchecked(SystemLayout(), Matrix::Identity(1, 1));
}

MultipartiteState merge_systems(const MultipartiteState& s, const Labels& parts,
                                const std::string& merged) {
  if (parts.empty()) throw Error("merge_systems: nothing to merge");
  const SystemLayout& lay = s.layout();
  std::size_t first = lay.size();
  for (const auto& p : parts) first = std::min(first, *lay.index_of(p));
  Labels order;
  for (std::size_t i = 0; i < lay.size(); ++i) {
    const auto& l = lay.labels()[i];
    if (i == first) order.insert(order.end(), parts.begin(), parts.end());
    if (std::find(parts.begin(), parts.end(), l) == parts.end()) order.push_back(l);
  }
  const MultipartiteState p = permute_systems(s, order);
  Labels labels;
  std::vector<int> dims;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == first) {
      labels.push_back(merged);
      dims.push_back(static_cast<int>(lay.dim_of(std::span<const std::string>(parts))));
      i += parts.size() - 1;
      continue;
    }
    labels.push_back(order[i]);
    dims.push_back(lay.dim_of(order[i]));
  }
  return MultipartiteState::unchecked(SystemLayout(labels, dims), p.matrix());
}

LurProtocol make_lur(const Roles& roles, UnitaryEnsemble ensemble,
                     MultipartiteState catalyst) {
  Labels recovered = cat(copy_labels(roles.a, roles.n), catalyst.labels());
  LurProtocol p{roles, std::move(ensemble), std::move(catalyst), std::move(recovered),
                copy_labels(roles.e, roles.n), std::nullopt};
  validate(p);
  return p;
}

long LbProtocol::traced_dim() const {
  return interaction.out_layout().dim_of(std::span<const std::string>(traced));
}

void validate(const LurProtocol& p) {
  check_roles(p.roles, p.catalyst, p.ensemble.layout(), p.ensemble.out_layout(), {},
              p.recovered, p.side, "LurProtocol");
  if (p.witness) {
    (void)p.witness;  // layout checked when the witness is evaluated
  }
}

void validate(const LbProtocol& p) {
  if (!p.interaction.is_square()) throw Error("LbProtocol: interaction must be unitary");
  check_roles(p.roles, p.catalyst, p.interaction.in_layout(), p.interaction.out_layout(),
              p.traced, p.recovered, p.side, "LbProtocol");
  if (p.traced.empty()) throw Error("LbProtocol: no traced system");
  for (const auto& l : p.traced) {
    if (!p.interaction.out_layout().contains(l)) {
      throw Error("LbProtocol: traced system '" + l + "' is not an interaction output");
    }
  }
}

MultipartiteState run_lur(const LurProtocol& p, const MultipartiteState& rho) {
  validate(p);
  const MultipartiteState in = prepare_input(p.roles, rho, p.catalyst);
  const Labels& targets = p.ensemble.layout().labels();
  Matrix acc;
  SystemLayout lay;
  for (std::size_t i = 0; i < p.ensemble.size(); ++i) {
    if (p.ensemble.probs()[i] == 0.0) continue;
    const MultipartiteState out = apply_on_subsystems(p.ensemble.unitaries()[i], in, targets);
    if (acc.size() == 0) {
      acc = p.ensemble.probs()[i] * out.matrix();
      lay = out.layout();
    } else {
      acc += p.ensemble.probs()[i] * out.matrix();
    }
  }
  return MultipartiteState::unchecked(lay, acc);
}

MultipartiteState run_lb(const LbProtocol& p, const MultipartiteState& rho) {
  validate(p);
  const MultipartiteState in = prepare_input(p.roles, rho, p.catalyst);
  const MultipartiteState out =
      apply_on_subsystems(p.interaction, in, p.interaction.in_layout().labels());
  return partial_trace(out, p.traced);
}

ConditionReport verify_deconstruction(const LurProtocol& p, const MultipartiteState& rho,
                                      const VerifyOptions& opts) {
  const MultipartiteState omega = run_lur(p, rho);
  ConditionReport rep = verify_common(omega, rho, p.roles, p.recovered, p.side, p.witness, opts);
  rep.noise_active_bits = log2d(static_cast<long>(p.size()));
  rep.noise_passive_bits = log2d(p.catalyst.dim());
  return rep;
}

ConditionReport verify_deconstruction(const LbProtocol& p, const MultipartiteState& rho,
                                      const VerifyOptions& opts) {
  const MultipartiteState omega = run_lb(p, rho);
  ConditionReport rep = verify_common(omega, rho, p.roles, p.recovered, p.side, p.witness, opts);
  rep.noise_active_bits = 2.0 * log2d(p.traced_dim());
  rep.noise_passive_bits = log2d(p.catalyst.dim());
  return rep;
}

LurProtocol lur_from_lb(const LbProtocol& p) {
  validate(p);
  const Isometry& u = p.interaction;
  const UnitaryEnsemble hw = hw_group(u.out_layout().select(p.traced));
  std::vector<Isometry> members;
  for (const auto& v : hw.unitaries()) members.push_back(compose(lift(v, u.out_layout()), u));
  UnitaryEnsemble ens(hw.probs(), std::move(members));
  LurProtocol out{p.roles, std::move(ens), p.catalyst, cat(p.recovered, p.traced), p.side,
                  std::nullopt};
  if (p.witness) {
    out.witness = attach_preparation(*p.witness, maximally_mixed(u.out_layout().select(p.traced)),
                                     cat(out.recovered, out.side));
  }
  validate(out);
  return out;
}

LbProtocol lb_from_lur(const LurProtocol& p) { return lb_from_lur(p, LbAncillaLabels{}); }

LbProtocol lb_from_lur(const LurProtocol& p, const LbAncillaLabels& names) {
  validate(p);
  for (const auto& l : {names.s, names.t, names.m}) {
    if (p.catalyst.layout().contains(l) || p.ensemble.out_layout().contains(l) ||
        l == copy_label(p.roles.a, 1)) {
      throw Error("lb_from_lur: ancilla label '" + l + "' already in use");
    }
  }
  std::vector<double> probs = p.ensemble.probs();
  std::vector<Isometry> us = p.ensemble.unitaries();
  long m = static_cast<long>(probs.size());
  long d = std::lround(std::sqrt(static_cast<double>(m)));
  if (d * d != m) {
    long mp = 1;
    d = 1;
    while (mp < m) {
      mp *= 4;
      d *= 2;
    }
    while (static_cast<long>(probs.size()) < mp) {
      probs.push_back(0.0);
      us.push_back(us.front());
    }
    m = mp;
  }
  const SystemLayout& lin = p.ensemble.layout();
  const SystemLayout& lout = p.ensemble.out_layout();
  const long du = lin.total_dim();
  const SystemLayout mreg({names.m}, {static_cast<int>(m)});

  // sum_i |i><i|_M (x) U_i
  Matrix c1 = Matrix::Zero(m * du, m * du);
  for (long i = 0; i < m; ++i) c1.block(i * du, i * du, du, du) = us[i].matrix();
  const Isometry ctrl = Isometry::unchecked(mreg.concat(lin), mreg.concat(lout), std::move(c1));

  const SystemLayout st({names.s, names.t}, {static_cast<int>(d), static_cast<int>(d)});
  const SystemLayout full_in = st.concat(mreg).concat(lin);
  const Isometry first = extend(ctrl, full_in);
  const Isometry shift = bell_controlled_shift(static_cast<int>(d), names.s, names.t, names.m);
  const Isometry interaction = compose(extend(shift, first.out_layout()), first);

  Matrix pm = Matrix::Zero(m, m);
  for (long i = 0; i < m; ++i) pm(i, i) = probs[i];
  MultipartiteState catalyst = tensor_product(
      tensor_product(maximally_mixed(st), MultipartiteState::unchecked(mreg, pm)), p.catalyst);

  LbProtocol out{p.roles,
                 interaction,
                 std::move(catalyst),
                 {names.s},
                 cat({names.t, names.m}, p.recovered),
                 p.side,
                 std::nullopt};
  if (p.witness) {
    const MultipartiteState pi_tm =
        maximally_mixed(SystemLayout({names.t, names.m}, {static_cast<int>(d), static_cast<int>(m)}));
    out.witness = attach_preparation(*p.witness, pi_tm, cat(out.recovered, out.side));
  }
  validate(out);
  return out;
}

long RedistributionProtocol::message_dim() const {
  return encoder.out_layout().dim_of(std::span<const std::string>(message));
}

double RedistributionProtocol::log2_l() const {
  return log2d(encoder.in_layout().dim_of(std::span<const std::string>(ent_in))) -
         log2d(encoder.out_layout().dim_of(std::span<const std::string>(ent_out)));
}

void validate(const RedistributionProtocol& p) {
  const Roles& r = p.roles;
  const int n = r.n;
  if (n < 1) throw Error("RedistributionProtocol: copy count must be >= 1");
  if (!p.encoder.is_square()) throw Error("RedistributionProtocol: encoder must be unitary");
  const Labels enc_in = cat(cat(copy_labels(r.a, n), copy_labels(r.e, n)), p.ent_in);
  if (as_set(p.encoder.in_layout().labels()) != as_set(enc_in) ||
      p.encoder.in_layout().size() != enc_in.size()) {
    throw Error("RedistributionProtocol: encoder must act on exactly A^n E^n A'");
  }
  const Labels enc_out = cat(cat(p.message, p.ent_out), p.side);
  if (as_set(p.encoder.out_layout().labels()) != as_set(enc_out) ||
      p.encoder.out_layout().size() != enc_out.size()) {
    throw Error("RedistributionProtocol: encoder outputs must be message, A0 and side");
  }
  const Labels dec_in = cat(cat(p.message, {p.r_prime}), copy_labels(p.r, n));
  if (as_set(p.decoder.in_layout().labels()) != as_set(dec_in) ||
      p.decoder.in_layout().size() != dec_in.size()) {
    throw Error("RedistributionProtocol: decoder must act on exactly message R' R^n");
  }
  for (const auto& l : cat(cat(p.a_hat, p.r_hat), {p.r0})) {
    if (!p.decoder.out_layout().contains(l)) {
      throw Error("RedistributionProtocol: decoder lacks output '" + l + "'");
    }
  }
  if (p.a_hat.size() != static_cast<std::size_t>(n) ||
      p.r_hat.size() != static_cast<std::size_t>(n) ||
      p.side.size() != static_cast<std::size_t>(n)) {
    throw Error("RedistributionProtocol: hat and side labels need one system per copy");
  }
  if (p.ent_out.empty()) throw Error("RedistributionProtocol: A0 must name a system");
  const long din = p.encoder.in_layout().dim_of(std::span<const std::string>(p.ent_in));
  const long dout = p.encoder.out_layout().dim_of(std::span<const std::string>(p.ent_out));
  if (p.decoder.in_layout().dim_of(p.r_prime) != din) {
    throw Error("RedistributionProtocol: |R'| must equal |A'|");
  }
  if (p.decoder.out_layout().dim_of(p.r0) != dout) {
    throw Error("RedistributionProtocol: |R0| must equal |A0|");
  }
}

double verify_redistribution(const RedistributionProtocol& p, const MultipartiteState& psi) {
  validate(p);
  const Roles& r = p.roles;
  const int n = r.n;
  const MultipartiteState base = marginal(psi, {r.a, r.b, r.e, p.r});
  const PureVec psin = tensor_power_vec(base, n);
  const PureVec phi_in = max_entangled_vec(p.encoder.in_layout().select(p.ent_in), p.r_prime);
  const PureVec start = kron_vec(psin, phi_in);
  const PureVec xi = apply_vec(p.decoder, apply_vec(p.encoder, start));

  std::map<std::string, std::string> rename;
  for (int i = 0; i < n; ++i) {
    rename[copy_label(r.a, i + 1)] = p.a_hat[i];
    rename[copy_label(r.e, i + 1)] = p.side[i];
    rename[copy_label(p.r, i + 1)] = p.r_hat[i];
  }
  const PureVec target = kron_vec(
      relabel_vec(psin, rename),
      max_entangled_vec(p.encoder.out_layout().select(p.ent_out), p.r0));
  Labels order = target.layout.labels();
  const std::set<std::string> named = as_set(order);
  long junk = 1;
  for (std::size_t k = 0; k < xi.layout.size(); ++k) {
    const auto& l = xi.layout.labels()[k];
    if (!named.count(l)) {
      order.push_back(l);
      junk *= xi.layout.dims()[k];
    }
  }
  if (order.size() != xi.layout.size()) {
    throw Error("verify_redistribution: final systems do not match the target");
  }
  for (const auto& l : target.layout.labels()) {
    if (xi.layout.dim_of(l) != target.layout.dim_of(l)) {
      throw Error("verify_redistribution: dimension mismatch on '" + l + "'");
    }
  }
  const Vector v = permute_vector(xi.v, xi.layout, order);
  const long dt = target.v.size();
  double f = 0.0;
  for (long j = 0; j < junk; ++j) {
    Complex ov = 0.0;
    for (long t = 0; t < dt; ++t) ov += std::conj(target.v[t]) * v[t * junk + j];
    f += std::norm(ov);
  }
  return std::min(1.0, f);
}

RedistributionProtocol trivial_redistribution(const Roles& roles, const std::string& r,
                                              const MultipartiteState& psi, int ent_dim) {
  if (ent_dim < 1) throw Error("trivial_redistribution: ent_dim must be >= 1");
  const int n = roles.n;
  const int da = psi.layout().dim_of(roles.a);
  const int de = psi.layout().dim_of(roles.e);
  const int dr = psi.layout().dim_of(r);
  const Labels an = copy_labels(roles.a, n), en = copy_labels(roles.e, n),
               rn = copy_labels(r, n);
  const Labels msg = copy_labels(roles.a + "bar0", n), side = copy_labels(roles.e + "hat", n),
               ahat = copy_labels(roles.a + "hat", n), rhat = copy_labels(r + "hat", n);
  const std::vector<int> das(n, da), des(n, de), drs(n, dr);
  auto layout_of = [](std::vector<std::pair<Labels, std::vector<int>>> parts) {
    SystemLayout l;
    for (auto& [labels, dims] : parts) l = l.concat(SystemLayout(labels, dims));
    return l;
  };
  const SystemLayout enc_in = layout_of({{an, das}, {en, des}, {{"A'"}, {ent_dim}}});
  const SystemLayout enc_out = layout_of({{msg, das}, {side, des}, {{"A0"}, {ent_dim}}});
  const long denc = enc_in.total_dim();
  const SystemLayout dec_in = layout_of({{msg, das}, {{"R'"}, {ent_dim}}, {rn, drs}});
  const SystemLayout dec_out = layout_of({{ahat, das}, {{"R0"}, {ent_dim}}, {rhat, drs}});
  const long ddec = dec_in.total_dim();
  return RedistributionProtocol{roles,
                                r,
                                Isometry::unchecked(enc_in, enc_out, Matrix::Identity(denc, denc)),
                                Isometry::unchecked(dec_in, dec_out, Matrix::Identity(ddec, ddec)),
                                {"A'"},
                                "R'",
                                {"A0"},
                                "R0",
                                msg,
                                side,
                                ahat,
                                rhat};
}

LbProtocol decon_from_redistribution(const RedistributionProtocol& p) {
  validate(p);
  const MultipartiteState pi_in = maximally_mixed(p.encoder.in_layout().select(p.ent_in));
  const MultipartiteState pi_out = maximally_mixed(p.encoder.out_layout().select(p.ent_out));
  LbProtocol out{p.roles,
                 p.encoder,
                 pi_in,
                 p.message,
                 p.ent_out,
                 p.side,
                 prepare_with_identity(pi_out, p.encoder.out_layout().select(p.side))};
  validate(out);
  return out;
}

double ErasureProtocol::log2_l() const {
  const long dcat = lb.catalyst.dim();
  const long drec = lb.interaction.out_layout().dim_of(std::span<const std::string>(lb.recovered));
  return 2.0 * (log2d(dcat) - log2d(drec));
}

void validate(const ErasureProtocol& e) {
  validate(e.lb);
  const long d = e.lb.catalyst.dim();
  const Matrix pi = Matrix::Identity(d, d) / static_cast<double>(d);
  if (max_abs(e.lb.catalyst.matrix() - pi) > 1e-12) {
    throw Error("ErasureProtocol: catalyst must be maximally mixed");
  }
}

ErasureProtocol erasure_from_redistribution(const RedistributionProtocol& p) {
  ErasureProtocol e{decon_from_redistribution(p)};
  validate(e);
  return e;
}

ConditionReport verify_erasure(const ErasureProtocol& e, const MultipartiteState& rho) {
  validate(e);
  const LbProtocol& p = e.lb;
  const MultipartiteState omega = run_lb(p, rho);
  const SystemLayout rec = p.interaction.out_layout().select(p.recovered);
  const SystemLayout side = p.interaction.out_layout().select(p.side);
  const QuantumChannel prep = prepare_with_identity(maximally_mixed(rec), side);
  VerifyOptions opts;
  opts.witness_accept = 2.0;  // always accept: the prepare-pi value is the decoupling fidelity
  ConditionReport rep = verify_common(omega, rho, p.roles, p.recovered, p.side, prep, opts);
  rep.decoupling_fid = rep.recoverability_fid;
  rep.noise_active_bits = 2.0 * log2d(p.traced_dim());
  rep.noise_passive_bits = e.log2_l();
  rep.eps_achieved = 1.0 - std::min(rep.disturbance_fid, *rep.decoupling_fid);
  return rep;
}

RedistributionProtocol redistribution_from_erasure(const ErasureProtocol& e,
                                                   const MultipartiteState& psi,
                                                   const std::string& r) {
  validate(e);
  const LbProtocol& lb = e.lb;
  const Roles& roles = lb.roles;
  const int n = roles.n;
  const MultipartiteState base = marginal(psi, {roles.a, roles.b, roles.e, r});
  {
    const long d = base.dim();
    const Matrix& m = base.matrix();
    if (std::abs((m * m).trace().real() - 1.0) > 1e-9 || d < 1) {
      throw Error("redistribution_from_erasure: psi must be pure");
    }
  }
  // Encoder on exactly A^n E^n A'.
  const SystemLayout base_lay = base.layout();
  SystemLayout enc_in;
  for (const auto& lab : {roles.a, roles.e}) {
    for (int i = 1; i <= n; ++i) {
      enc_in = enc_in.concat(SystemLayout({copy_label(lab, i)}, {base_lay.dim_of(lab)}));
    }
  }
  enc_in = enc_in.concat(lb.catalyst.layout());
  const Isometry encoder = extend(lb.interaction, enc_in);

  const std::string r_prime = "R'";
  const std::string r0 = "R0";
  const Labels ahat = copy_labels(roles.a + "hat", n);
  const Labels rhat = copy_labels(r + "hat", n);
  const Labels rn = copy_labels(r, n);
  const Labels bn = copy_labels(roles.b, n);

  // varsigma = U (psi^{(x) n} (x) Phi_{A'R'}).
  const PureVec psin = tensor_power_vec(base, n);
  const PureVec sig = apply_vec(encoder, kron_vec(psin, max_entangled_vec(lb.catalyst.layout(), r_prime)));
  // Target Phi_{A1' R0} (x) psi^{(x) n} on hatted systems.
  std::map<std::string, std::string> rename;
  for (int i = 0; i < n; ++i) {
    rename[copy_label(roles.a, i + 1)] = ahat[i];
    rename[copy_label(roles.e, i + 1)] = lb.side[i];
    rename[rn[i]] = rhat[i];
  }
  const PureVec tgt = kron_vec(
      max_entangled_vec(encoder.out_layout().select(lb.recovered), r0), relabel_vec(psin, rename));

  const Labels kept = cat(cat(lb.recovered, bn), lb.side);
  const Labels p1 = cat(cat(lb.traced, {r_prime}), rn);
  const Labels p2 = cat(cat(ahat, rhat), {r0});
  const Vector sv = permute_vector(sig.v, sig.layout, cat(kept, p1));
  const Vector tv = permute_vector(tgt.v, tgt.layout, cat(kept, p2));
  const long dk = sig.layout.dim_of(std::span<const std::string>(kept));
  const long d1 = sig.layout.dim_of(std::span<const std::string>(p1));
  const long d2 = tgt.layout.dim_of(std::span<const std::string>(p2));
  const long junk = d2 >= d1 ? 1 : (d1 + d2 - 1) / d2;
  const long d2j = d2 * junk;

  // Omega = S^T conj(T), S: dk x d1, T: dk x d2j (junk in |0>).
  Matrix omega = Matrix::Zero(d1, d2j);
  for (long k = 0; k < dk; ++k) {
    for (long a = 0; a < d1; ++a) {
      const Complex s = sv[k * d1 + a];
      if (s == Complex(0.0)) continue;
      for (long q = 0; q < d2; ++q) omega(a, q * junk) += s * std::conj(tv[k * d2 + q]);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(omega, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // Tr(V Omega) is maximized by V = X W^dag with Omega = W S X^dag.
  const Matrix v = svd.matrixV().leftCols(d1) * svd.matrixU().adjoint();

  const SystemLayout dec_in = sig.layout.select(p1);
  SystemLayout dec_out = tgt.layout.select(p2);
  if (junk > 1) dec_out = dec_out.concat(SystemLayout({"J#uhl"}, {static_cast<int>(junk)}));

  RedistributionProtocol out{roles,
                             r,
                             encoder,
                             Isometry(dec_in, dec_out, v),
                             lb.catalyst.labels(),
                             r_prime,
                             lb.recovered,
                             r0,
                             lb.traced,
                             lb.side,
                             ahat,
                             rhat};
  validate(out);
  return out;
}

LurProtocol classical_side_deconstruction(const MultipartiteState& rho, const Roles& roles) {
  const MultipartiteState abe = marginal(rho, {roles.a, roles.b, roles.e});
  const int da = abe.layout().dim_of(roles.a);
  const int db = abe.layout().dim_of(roles.b);
  const int de = abe.layout().dim_of(roles.e);
  const long dab = static_cast<long>(da) * db;
  const Matrix& m = abe.matrix();
  // Classical E: every block |e><e'| with e != e' vanishes.
  for (long x = 0; x < m.rows(); ++x) {
    for (long y = 0; y < m.cols(); ++y) {
      if (x % de != y % de && std::abs(m(x, y)) > 1e-10) {
        throw Error("classical_side_deconstruction: E is not classical");
      }
    }
  }
  std::vector<bool> correlated(de, false);
  std::vector<Matrix> omega_a(de, Matrix::Identity(da, da) / static_cast<double>(da));
  for (int e = 0; e < de; ++e) {
    Matrix blk(dab, dab);
    for (long x = 0; x < dab; ++x) {
      for (long y = 0; y < dab; ++y) blk(x, y) = m(x * de + e, y * de + e);
    }
    const double pe = blk.trace().real();
    if (pe <= 1e-14) continue;
    blk /= pe;
    const MultipartiteState s =
        MultipartiteState::unchecked(SystemLayout({roles.a, roles.b}, {da, db}), blk);
    const Matrix ra = marginal(s, {roles.a}).matrix();
    const Matrix rb = marginal(s, {roles.b}).matrix();
    correlated[e] = max_abs(kron(ra, rb) - blk) > 1e-12;
    if (!correlated[e]) omega_a[e] = ra;
  }

  const int n = roles.n;
  const Labels an = copy_labels(roles.a, n);
  const Labels en = copy_labels(roles.e, n);
  const SystemLayout lay =
      SystemLayout(an, std::vector<int>(n, da)).concat(SystemLayout(en, std::vector<int>(n, de)));
  long dan = 1, den = 1;
  for (int i = 0; i < n; ++i) {
    dan *= da;
    den *= de;
  }
  const long members = dan * dan;
  std::vector<Isometry> us;
  std::vector<double> probs(members, 1.0 / static_cast<double>(members));
  for (long idx = 0; idx < members; ++idx) {
    // Digits (j_c, k_c) of copy c, copy 1 most significant.
    std::vector<int> jk(2 * n);
    long rest = idx;
    for (int c = 2 * n - 1; c >= 0; --c) {
      jk[c] = static_cast<int>(rest % da) + 1;
      rest /= da;
    }
    Matrix big = Matrix::Zero(dan * den, dan * den);
    for (long ev = 0; ev < den; ++ev) {
      const std::vector<int> es = unravel(ev, std::vector<int>(n, de));
      Matrix op = Matrix::Identity(1, 1);
      for (int c = 0; c < n; ++c) {
        const Matrix w = correlated[es[c]] ? hw_operator(da, jk[2 * c], jk[2 * c + 1]).matrix()
                                           : Matrix::Identity(da, da);
        op = kron(op, w);
      }
      for (long x = 0; x < dan; ++x) {
        for (long y = 0; y < dan; ++y) big(x * den + ev, y * den + ev) = op(x, y);
      }
    }
    us.push_back(Isometry::unchecked(lay, lay, std::move(big)));
  }
  LurProtocol p{roles, UnitaryEnsemble(std::move(probs), std::move(us)), trivial_state(), an,
                en, std::nullopt};

  // Witness: read e^n, prepare the product of the conditional A states.
  const SystemLayout in_lay(en, std::vector<int>(n, de));
  const long dout = dan * den;
  Matrix j = Matrix::Zero(dout * den, dout * den);
  for (long ev = 0; ev < den; ++ev) {
    const std::vector<int> es = unravel(ev, std::vector<int>(n, de));
    Matrix wa = Matrix::Identity(1, 1);
    for (int c = 0; c < n; ++c) wa = kron(wa, omega_a[es[c]]);
    for (long x = 0; x < dan; ++x) {
      for (long y = 0; y < dan; ++y) {
        const long o = x * den + ev, op = y * den + ev;
        j(o * den + ev, op * den + ev) = wa(x, y);
      }
    }
  }
  p.witness = QuantumChannel(in_lay, lay, std::move(j));
  validate(p);
  return p;
}

double converse_gap(const ConditionReport& report, const MultipartiteState& rho,
                    const Roles& roles) {
  const double eps = std::clamp(report.eps_achieved, 0.0, 1.0);
  const BoundParams bp{roles.n, eps, rho.layout().dim_of(roles.b)};
  const double rhs = (report.noise_active_bits + continuity_bound_f(bp) +
                      recoverability_bound_g(bp)) /
                     static_cast<double>(roles.n);
  return rhs - cqmi(rho, {roles.a}, {roles.b}, {roles.e});
}

namespace {

void require_pure(const MultipartiteState& psi, const char* what) {
  const Matrix& m = psi.matrix();
  if (std::abs((m * m).trace().real() - 1.0) > 1e-9) {
    throw Error(std::string(what) + ": state must be pure");
  }
}

}  // namespace

RegionCheck rate_region_check(const MultipartiteState& psi, const Roles& roles,
                              const std::string& r, double r_active, double r_passive,
                              double tol) {
  require_pure(psi, "rate_region_check");
  RegionCheck c;
  c.margin_1 = r_active - cqmi(psi, {roles.a}, {roles.b}, {r});
  c.margin_2 = r_active + r_passive - 2.0 * conditional_entropy(psi, {roles.a}, {r});
  c.member = c.margin_1 >= -tol && c.margin_2 >= -tol;
  return c;
}

RegionCheck redistribution_region_check(const MultipartiteState& psi, const Roles& roles,
                                        const std::string& r, double q, double e,
                                        double tol) {
  require_pure(psi, "redistribution_region_check");
  RegionCheck c;
  c.margin_1 = q - 0.5 * cqmi(psi, {roles.a}, {roles.b}, {r});
  c.margin_2 = q + e - conditional_entropy(psi, {roles.a}, {r});
  c.member = c.margin_1 >= -tol && c.margin_2 >= -tol;
  return c;
}

Isometry einselection_dilation(const Povm& povm, const std::string& a,
                               const std::string& e0, const std::string& x,
                               const std::string& e) {
  const Isometry v = measurement_dilation(povm);
  const SystemLayout& in = v.in_layout();
  const SystemLayout& out = v.out_layout();
  const int dx = out.dims()[0];
  const int dm = out.dims()[1] * out.dims()[2];
  return Isometry::unchecked(SystemLayout({a, e0}, in.dims()),
                             SystemLayout({x, e}, {dx, dm}), v.matrix());
}

MultipartiteState dilated_state(const MultipartiteState& rho_ab, const std::string& a,
                                const std::string& b, const Povm& povm,
                                const std::string& x, const std::string& e) {
  const MultipartiteState ab = marginal(rho_ab, {a, b});
  if (povm.layout().total_dim() != ab.layout().dim_of(a)) {
    throw Error("dilated_state: POVM does not act on A");
  }
  const std::string e0 = e + "#0";
  const Isometry v = einselection_dilation(povm, a, e0, x, e);
  const MultipartiteState in =
      tensor_product(ab, basis_state(SystemLayout({e0}, {v.in_layout().dims()[1]}), 0));
  const MultipartiteState out = apply_on_subsystems(v, in, {a, e0});
  return permute_systems(out, {x, e, b});
}

EinselectionProtocol einselection_from_deconstruction(const LbProtocol& d,
                                                      const Povm& povm,
                                                      const std::string& a) {
  if (!d.witness) throw Error("einselection_from_deconstruction: protocol has no witness");
  return einselection_from_deconstruction(d, povm, a, *d.witness);
}

EinselectionProtocol einselection_from_deconstruction(const LbProtocol& d,
                                                      const Povm& povm,
                                                      const std::string& a,
                                                      const QuantumChannel& recovery) {
  validate(d);
  const Roles& r = d.roles;
  const int n = r.n;
  const Labels xn = copy_labels(r.e, n);
  if (d.side != xn) {
    throw Error("einselection_from_deconstruction: the interaction must leave X^n in place");
  }
  const SystemLayout x_layout(xn, std::vector<int>(n, static_cast<int>(povm.size())));
  if (!(recovery.in_layout() == x_layout)) {
    throw Error("einselection_from_deconstruction: recovery must act on X^n");
  }
  // V^{(x) n} (x) I_{E'}: A_i E0_i -> X_i E_i.
  const Labels an = copy_labels(a, n);
  const Labels e0n = copy_labels(r.a + "0", n);
  Isometry k1 = identity_isometry(SystemLayout());
  for (int i = 0; i < n; ++i) {
    const Isometry vi = einselection_dilation(povm, an[i], e0n[i], xn[i], copy_label(r.a, i + 1));
    k1 = tensor(k1, vi);
  }
  k1 = tensor(k1, identity_isometry(d.catalyst.layout()));
  const Isometry k = compose(extend(d.interaction, k1.out_layout()), k1);
  const Isometry kd = k.adjoint();

  const UnitaryEnsemble hw = hw_group(k.out_layout().select(d.traced));
  std::vector<Isometry> members;
  for (const auto& w : hw.unitaries()) {
    members.push_back(compose(kd, compose(lift(w, k.out_layout()), k)));
  }
  MultipartiteState catalyst = d.catalyst;
  for (int i = 0; i < n; ++i) {
    catalyst = tensor_product(
        catalyst, basis_state(SystemLayout({e0n[i]}, {k1.in_layout().dim_of(e0n[i])}), 0));
  }

  // Measurement: dephase X^n after K, discard the rest.
  Labels xfirst = xn;
  for (const auto& l : k.out_layout().labels()) {
    if (std::find(xn.begin(), xn.end(), l) == xn.end()) xfirst.push_back(l);
  }
  const Isometry kx = reorder_outputs(k, xfirst);
  const SystemLayout xl = k.out_layout().select(xn);
  const long dx = xl.total_dim();
  const long din = k.in_layout().total_dim();
  const long drest = k.out_layout().total_dim() / dx;
  Matrix j = Matrix::Zero(dx * din, dx * din);
  for (long x = 0; x < dx; ++x) {
    const Matrix rows = kx.matrix().middleRows(x * drest, drest);  // drest x din
    j.block(x * din, x * din, din, din) = rows.transpose() * rows.conjugate();
  }
  QuantumChannel meas(k.in_layout(), xl, std::move(j));

  // Preparation: K^dag (R(.) (x) pi_{traced}).
  const QuantumChannel rp = permute_outputs(
      with_preparation(maximally_mixed(k.out_layout().select(d.traced)), recovery),
      k.out_layout().labels());
  const QuantumChannel prep = compose(QuantumChannel::from_isometry(kd), rp);

  return EinselectionProtocol{a,    r.b,  n, UnitaryEnsemble(hw.probs(), std::move(members)),
                              std::move(catalyst), std::move(meas), prep, r.e};
}

EinselectionProtocol zero_noise_einselection(const std::string& a, const std::string& b,
                                             const Povm& povm,
                                             const QuantumChannel& preparation_x_to_a) {
  const int da = static_cast<int>(povm.layout().total_dim());
  const int dx = static_cast<int>(povm.size());
  if (preparation_x_to_a.in_dim() != dx || preparation_x_to_a.out_dim() != da) {
    throw Error("zero_noise_einselection: preparation must map X to A");
  }
  const SystemLayout al({copy_label(a, 1)}, {da});
  const SystemLayout xl({copy_label("X", 1)}, {dx});
  const QuantumChannel meas =
      QuantumChannel::unchecked(al, xl, povm.measurement_channel("X").choi());
  const QuantumChannel prep = QuantumChannel::unchecked(xl, al, preparation_x_to_a.choi());
  return EinselectionProtocol{a, b, 1, UnitaryEnsemble({1.0}, {identity_isometry(al)}),
                              trivial_state(), meas, prep, "X"};
}

ConditionReport verify_einselection(const EinselectionProtocol& p,
                                    const MultipartiteState& rho_ab, const Povm& povm) {
  if (!p.ensemble.in_place()) throw Error("verify_einselection: ensemble must act in place");
  const int n = p.n;
  const MultipartiteState ab = marginal(rho_ab, {p.a, p.b});
  const MultipartiteState in = tensor_product(tensor_power(ab, n), p.catalyst);
  const Labels& targets = p.ensemble.layout().labels();
  Matrix acc = Matrix::Zero(in.dim(), in.dim());
  for (std::size_t i = 0; i < p.ensemble.size(); ++i) {
    if (p.ensemble.probs()[i] == 0.0) continue;
    acc += p.ensemble.probs()[i] *
           apply_on_subsystems(p.ensemble.unitaries()[i], in, targets).matrix();
  }
  const MultipartiteState sigma = MultipartiteState::unchecked(in.layout(), acc);

  const MultipartiteState ms = apply_channel(p.measurement, sigma, p.measurement.in_layout().labels());
  const MultipartiteState pms =
      apply_channel(p.preparation, ms, p.preparation.in_layout().labels());

  ConditionReport rep;
  rep.n = n;
  rep.recoverability_fid = fidelity(permute_systems(pms, sigma.labels()), sigma);

  const MultipartiteState zeta =
      apply_channel(povm.measurement_channel(p.x), ab, {p.a});
  const MultipartiteState zn = tensor_power(permute_systems(zeta, {p.x, p.b}), n);
  rep.faithfulness_fid = fidelity(permute_systems(ms, zn.labels()), zn);
  rep.disturbance_fid = *rep.faithfulness_fid;
  rep.eps_achieved = 1.0 - std::min(rep.recoverability_fid, *rep.faithfulness_fid);
  rep.noise_active_bits = log2d(static_cast<long>(p.ensemble.size()));
  // Pure ancillas in the catalyst carry no passive noise.
  rep.noise_passive_bits = log2d(numerical_rank(p.catalyst.matrix(), 1e-12));
  rep.recovery_method = "witness";
  rep.witness = p.preparation;
  return rep;
}

}  // namespace qdecon
