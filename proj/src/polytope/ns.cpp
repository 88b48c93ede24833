#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "lp_util.hpp"
#include "nqbell/cg.hpp"
#include "nqbell/polytope.hpp"

namespace nqbell {

namespace {

using detail::npos;

// Homogeneous coordinates for the no-signaling LP.
//
// Binary outcomes use correlators: slot 0 of a party is the constant and slot
// 1 + x the expectation of (-1)^a under input x, so that
//   P(a|x) = 2^-N sum_S prod_{i in S} (-1)^{a_i} E_S(x_S).
// Relabelings that flip an outcome act as signed permutations of these
// coordinates. Other scenarios use the CG slots, where only party and input
// permutations act by plain permutations.
struct Coords {
  const Scenario* s = nullptr;
  bool correlators = false;
  std::vector<std::size_t> sizes;
  std::size_t dim = 1;

  Coords(const Scenario& sc, bool corr) : s(&sc), correlators(corr) {
    if (corr) {
      for (int i = 0; i < sc.parties(); ++i) sizes.push_back(1 + static_cast<std::size_t>(sc.inputs(i)));
      for (const auto z : sizes) dim *= z;
    } else {
      sizes = cg::local_sizes(sc);
      dim = cg::dimension(sc);
    }
  }

  [[nodiscard]] std::vector<std::pair<std::size_t, int>> row(std::size_t x, std::size_t a) const {
    if (!correlators) return cg::table_row(*s, x, a);
    const int n = s->parties();
    std::vector<std::pair<std::size_t, int>> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::size_t k = 0;
      int sign = 1;
      for (int i = 0; i < n; ++i) {
        k *= sizes[static_cast<std::size_t>(i)];
        if (mask >> (n - 1 - i) & 1u) {
          k += 1 + static_cast<std::size_t>(s->input_of(x, i));
          if (s->outcome_of(a, i) == 1) sign = -sign;
        }
      }
      out.emplace_back(k, sign);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] Box box(const std::vector<Rat>& p) const {
    if (!correlators) return cg::box_from_coordinates(*s, p);
    const Rat scale(1, 1LL << s->parties());
    std::vector<Rat> t(s->table_size());
    for (std::size_t x = 0; x < s->input_count(); ++x) {
      for (std::size_t a = 0; a < s->outcome_count(); ++a) {
        Rat v;
        for (const auto& [k, sg] : row(x, a)) {
          if (sg > 0) {
            v += p[k];
          } else {
            v -= p[k];
          }
        }
        t[s->entry(x, a)] = v * scale;
      }
    }
    return {*s, std::move(t)};
  }
};

// Party i moves to position to[i]; its input x becomes inperm[i][x] and, for
// binary outcomes, its outcome is flipped when flip[i][x] is set.
struct Relabel {
  std::vector<int> to;
  std::vector<std::vector<int>> inperm;
  std::vector<std::vector<char>> flip;
};

struct Action {
  std::vector<std::size_t> entry;
  std::vector<std::size_t> coord;
  std::vector<signed char> sign;
};

Action make_action(const Coords& c, const Relabel& g) {
  const Scenario& s = *c.s;
  const int n = s.parties();
  const auto un = static_cast<std::size_t>(n);
  Action act;
  act.entry.resize(s.table_size());
  std::vector<int> xs(un), as(un);
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      xs[static_cast<std::size_t>(g.to[ui])] = g.inperm[ui][static_cast<std::size_t>(s.input_of(x, i))];
    }
    const std::size_t nx = s.encode_inputs(xs);
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int ai = s.outcome_of(a, i);
        as[static_cast<std::size_t>(g.to[ui])] = g.flip[ui][static_cast<std::size_t>(s.input_of(x, i))] ? 1 - ai : ai;
      }
      act.entry[s.entry(x, a)] = s.entry(nx, s.encode_outcomes(as));
    }
  }
  act.coord.resize(c.dim);
  act.sign.resize(c.dim);
  std::vector<std::size_t> digits(un), moved(un);
  for (std::size_t k = 0; k < c.dim; ++k) {
    std::size_t rest = k;
    for (int i = n - 1; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      digits[ui] = rest % c.sizes[ui];
      rest /= c.sizes[ui];
    }
    signed char sign = 1;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      std::size_t slot = digits[ui];
      if (slot != 0) {
        if (c.correlators) {
          const std::size_t x = slot - 1;
          if (g.flip[ui][x]) sign = static_cast<signed char>(-sign);
          slot = 1 + static_cast<std::size_t>(g.inperm[ui][x]);
        } else {
          const auto dm1 = static_cast<std::size_t>(s.outputs(i) - 1);
          const std::size_t x = (slot - 1) / dm1;
          slot = 1 + static_cast<std::size_t>(g.inperm[ui][x]) * dm1 + (slot - 1) % dm1;
        }
      }
      moved[static_cast<std::size_t>(g.to[ui])] = slot;
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < un; ++i) out = out * c.sizes[i] + moved[i];
    act.coord[k] = out;
    act.sign[k] = sign;
  }
  return act;
}

constexpr int kMaxSupport = 4;
constexpr std::size_t kMaxGenerators = 256;

// Relabelings that fix every coefficient of e: party permutations from a
// small fixed set, each composed with local relabelings touching at most
// kMaxSupport parties (plus the uniform ones).
std::vector<Relabel> expression_symmetries(const BellExpression& e, bool flips) {
  const Scenario& s = e.scenario();
  const int n = s.parties();
  const auto un = static_cast<std::size_t>(n);

  std::vector<std::vector<int>> perms;
  std::vector<int> id(un);
  for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i)] = i;
  perms.push_back(id);
  const bool uniform =
      std::all_of(s.input_sizes().begin(), s.input_sizes().end(), [&](int m) { return m == s.inputs(0); }) &&
      std::all_of(s.output_sizes().begin(), s.output_sizes().end(), [&](int d) { return d == s.outputs(0); });
  if (uniform && n >= 2) {
    std::vector<int> shift(un), rev(un), swap(id);
    for (int i = 0; i < n; ++i) {
      shift[static_cast<std::size_t>(i)] = (i + 1) % n;
      rev[static_cast<std::size_t>(i)] = n - 1 - i;
    }
    std::swap(swap[0], swap[1]);
    perms.push_back(shift);
    if (n >= 3) {
      perms.push_back(swap);
      perms.push_back(rev);
    }
  }

  // Local options per party: (input reversal?, outcome flip mask); option 0 is the identity.
  std::vector<std::vector<std::pair<bool, unsigned>>> options(un);
  for (int i = 0; i < n; ++i) {
    const int m = s.inputs(i);
    const unsigned masks = flips && m <= 4 ? 1u << m : 1u;
    for (int r = 0; r < (m >= 2 ? 2 : 1); ++r) {
      for (unsigned mask = 0; mask < masks; ++mask) options[static_cast<std::size_t>(i)].emplace_back(r == 1, mask);
    }
  }

  std::unordered_map<std::size_t, Rat> coef;
  struct Digits {
    std::vector<int> x, a;
    Rat c;
  };
  std::vector<Digits> terms;
  for (const auto& t : e.terms()) {
    coef.emplace(s.entry(t.x, t.a), t.coefficient);
    terms.push_back({s.decode_inputs(t.x), s.decode_outcomes(t.a), t.coefficient});
  }

  Relabel g;
  g.inperm.assign(un, {});
  g.flip.assign(un, {});
  auto set_option = [&](std::size_t i, std::size_t opt) {
    const int m = s.inputs(static_cast<int>(i));
    const auto [reverse, mask] = options[i][opt];
    g.inperm[i].resize(static_cast<std::size_t>(m));
    g.flip[i].resize(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) {
      g.inperm[i][static_cast<std::size_t>(x)] = reverse ? m - 1 - x : x;
      g.flip[i][static_cast<std::size_t>(x)] = static_cast<char>(mask >> x & 1u);
    }
  };
  std::vector<int> xs(un), as(un);
  auto fixes = [&] {
    bool identity = true;
    for (std::size_t i = 0; i < un && identity; ++i) {
      if (g.to[i] != static_cast<int>(i)) identity = false;
      for (std::size_t x = 0; x < g.inperm[i].size() && identity; ++x) {
        identity = g.inperm[i][x] == static_cast<int>(x) && !g.flip[i][x];
      }
    }
    if (identity) return false;
    for (const auto& t : terms) {
      for (std::size_t i = 0; i < un; ++i) {
        const auto xi = static_cast<std::size_t>(t.x[i]);
        const auto to = static_cast<std::size_t>(g.to[i]);
        xs[to] = g.inperm[i][xi];
        as[to] = g.flip[i][xi] ? 1 - t.a[i] : t.a[i];
      }
      const auto it = coef.find(s.entry(s.encode_inputs(xs), s.encode_outcomes(as)));
      if (it == coef.end() || it->second != t.c) return false;
    }
    return true;
  };

  std::vector<Relabel> out;
  std::vector<std::size_t> choice(un, 0);
  auto recurse = [&](auto&& self, std::size_t i, int support) -> void {
    if (out.size() >= kMaxGenerators) return;
    if (i == un) {
      if (fixes()) out.push_back(g);
      return;
    }
    for (std::size_t opt = 0; opt < options[i].size(); ++opt) {
      if (opt != 0 && support == kMaxSupport) break;
      set_option(i, opt);
      self(self, i + 1, support + (opt != 0 ? 1 : 0));
    }
  };
  for (const auto& to : perms) {
    g.to = to;
    recurse(recurse, 0, 0);
    if (n > kMaxSupport && uniform) {
      for (std::size_t opt = 1; opt < options[0].size(); ++opt) {
        for (std::size_t i = 0; i < un; ++i) set_option(i, opt);
        if (fixes() && out.size() < kMaxGenerators) out.push_back(g);
      }
    }
  }
  return out;
}

struct SignedOrbits {
  std::vector<std::size_t> label;  // npos where the symmetries force the coordinate to zero
  std::vector<signed char> sign;   // coordinate = sign * orbit variable
  std::size_t count = 0;
};

SignedOrbits signed_orbits(std::size_t size, const std::vector<Action>& acts) {
  std::vector<std::size_t> parent(size);
  std::vector<signed char> rel(size, 1);  // value(i) = rel[i] * value(parent[i])
  for (std::size_t i = 0; i < size; ++i) parent[i] = i;
  std::vector<char> zero(size, 0);
  auto find = [&](std::size_t i) {
    signed char sg = 1;
    std::size_t r = i;
    while (parent[r] != r) {
      sg = static_cast<signed char>(sg * rel[r]);
      r = parent[r];
    }
    // Path compression with accumulated signs.
    signed char acc = sg;
    while (parent[i] != r) {
      const std::size_t next = parent[i];
      const signed char step = rel[i];
      parent[i] = r;
      rel[i] = acc;
      acc = static_cast<signed char>(acc * step);
      i = next;
    }
    return std::pair{r, sg};
  };
  for (const auto& act : acts) {
    for (std::size_t k = 0; k < size; ++k) {
      // value(coord[k]) = sign[k] * value(k)
      auto [ra, sa] = find(k);
      auto [rb, sb] = find(act.coord[k]);
      const auto want = static_cast<signed char>(act.sign[k] * sa * sb);  // value(rb) = want * value(ra)
      if (ra == rb) {
        if (want != 1) zero[ra] = 1;
        continue;
      }
      if (ra < rb) {
        parent[rb] = ra;
        rel[rb] = want;
        zero[ra] = static_cast<char>(zero[ra] | zero[rb]);
      } else {
        parent[ra] = rb;
        rel[ra] = want;
        zero[rb] = static_cast<char>(zero[ra] | zero[rb]);
      }
    }
  }
  SignedOrbits o;
  o.label.assign(size, npos);
  o.sign.assign(size, 1);
  std::vector<std::size_t> root_label(size, npos);
  for (std::size_t k = 0; k < size; ++k) {
    const auto [r, sg] = find(k);
    if (zero[r]) continue;
    if (root_label[r] == npos) root_label[r] = o.count++;
    o.label[k] = root_label[r];
    o.sign[k] = sg;
  }
  return o;
}

std::vector<std::size_t> entry_orbits(std::size_t size, const std::vector<Action>& acts, std::size_t& count) {
  std::vector<std::size_t> parent(size);
  for (std::size_t i = 0; i < size; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& act : acts) {
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t a = find(i), b = find(act.entry[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::size_t> label(size), root_label(size, npos);
  count = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == npos) root_label[r] = count++;
    label[i] = root_label[r];
  }
  return label;
}

}  // namespace

NsResult ns_max(const BellExpression& e, const PolytopeOptions& opts) {
  // Dual of  max c.p  s.t.  M p >= 0, p_0 = 1  in homogeneous coordinates:
  //   min sum_r M[r][0] y_r  s.t.  sum_r M[r][k] y_r = -c'_k (k >= 1), y >= 0.
  // Its row prices give back p_k = -price_k. Averaging an optimum over the
  // symmetries of e keeps it optimal, so p is restricted to the invariant
  // subspace (one variable per signed coordinate orbit) and one row of M per
  // entry orbit suffices.
  const Scenario& s = e.scenario();
  std::vector<Relabel> syms;
  bool correlators = false;
  if (opts.use_symmetry) {
    if (s.is_binary() || std::all_of(s.output_sizes().begin(), s.output_sizes().end(), [](int d) { return d == 2; })) {
      syms = expression_symmetries(e, true);
      correlators = !syms.empty();
    }
    if (!correlators) syms = expression_symmetries(e, false);
  }
  const Coords coords(s, correlators);
  std::vector<Action> acts;
  acts.reserve(syms.size());
  for (const auto& g : syms) acts.push_back(make_action(coords, g));
  const SignedOrbits corb = signed_orbits(coords.dim, acts);
  std::size_t n_eorb = 0;
  const auto eorb = entry_orbits(s.table_size(), acts, n_eorb);
  acts.clear();
  detail::check_lp_size("no-signaling", corb.count - 1, n_eorb, opts);

  std::vector<Rat> cprime(corb.count);
  for (const auto& t : e.terms()) {
    for (const auto& [k, sg] : coords.row(t.x, t.a)) {
      if (corb.label[k] == npos) continue;
      if (sg * corb.sign[k] > 0) {
        cprime[corb.label[k]] += t.coefficient;
      } else {
        cprime[corb.label[k]] -= t.coefficient;
      }
    }
  }
  lp::Problem p;
  p.sense = lp::Sense::minimize;
  std::vector<std::vector<std::pair<std::size_t, Rat>>> rows(corb.count);
  std::vector<char> seen(n_eorb, 0), mark(corb.count, 0);
  std::vector<long> acc(corb.count, 0);
  std::vector<std::size_t> touched;
  for (std::size_t x = 0; x < s.input_count(); ++x) {
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      const std::size_t o = eorb[s.entry(x, a)];
      if (seen[o]) continue;
      seen[o] = 1;
      const std::size_t var = p.add_variable(Rat(0));
      for (const auto& [k, sg] : coords.row(x, a)) {
        const std::size_t c = corb.label[k];
        if (c == npos) continue;
        if (!mark[c]) {
          mark[c] = 1;
          touched.push_back(c);
        }
        acc[c] += sg * corb.sign[k];
      }
      std::sort(touched.begin(), touched.end());
      for (const std::size_t c : touched) {
        if (acc[c] != 0) {
          if (c == 0) {
            p.objective[var] = Rat(acc[c]);
          } else {
            rows[c].emplace_back(var, Rat(acc[c]));
          }
        }
        acc[c] = 0;
        mark[c] = 0;
      }
      touched.clear();
    }
  }
  for (std::size_t c = 1; c < corb.count; ++c) p.add_row(std::move(rows[c]), lp::RowType::eq, -cprime[c]);

  const lp::Result r = lp::solve(p, detail::lp_options(opts));
  detail::require_verified(r, "no-signaling");

  std::vector<Rat> pk(coords.dim);
  for (std::size_t k = 0; k < coords.dim; ++k) {
    const std::size_t c = corb.label[k];
    if (c == 0) {
      pk[k] = Rat(1);
    } else if (c != npos) {
      pk[k] = corb.sign[k] > 0 ? -r.duals[c - 1] : r.duals[c - 1];
    }
  }
  Box box = coords.box(pk);
  Rat value = bell_value(e, box);
  Rat expect = r.objective + cprime[0];
  if (correlators) expect *= Rat(1, 1LL << s.parties());
  if (value != expect) throw std::logic_error("no-signaling certificate does not reproduce the optimum");
  if (!is_nonsignaling(box)) throw std::logic_error("no-signaling certificate box signals");
  return {std::move(value), std::move(box), corb.count - 1, n_eorb, syms.size(), r.stats};
}

}  // namespace nqbell
