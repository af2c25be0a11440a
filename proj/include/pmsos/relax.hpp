// Moment relaxations for polynomial optimization over sets cut out by a
// polynomial matrix inequality G(x) >= 0, on the binary cube or the unit
// ball.  The streamlined kinds replace the Kronecker localizer of the
// classical matrix-SOS hierarchy by a pair of small Hankel-style trace
// blocks; the classical hierarchy and the scalar (m = 1) hierarchy are kept
// as baselines.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsos/json_io.hpp"
#include "pmsos/matrix_poly.hpp"
#include "pmsos/polynomial.hpp"
#include "pmsos/solver.hpp"

namespace pmsos {

enum class RelaxKind {
  ProposedBinary,
  ProposedBall,
  BlockDiag,
  HolScherer,
  ScalarLasserre,
};

inline std::string kind_name(RelaxKind k) {
  switch (k) {
    case RelaxKind::ProposedBinary: return "proposed-binary";
    case RelaxKind::ProposedBall: return "proposed-ball";
    case RelaxKind::BlockDiag: return "blockdiag";
    case RelaxKind::HolScherer: return "holscherer";
    case RelaxKind::ScalarLasserre: return "scalar-lasserre";
  }
  return "?";
}

inline RelaxKind kind_from_name(const std::string& s) {
  if (s == "proposed-binary") return RelaxKind::ProposedBinary;
  if (s == "proposed-ball") return RelaxKind::ProposedBall;
  if (s == "blockdiag") return RelaxKind::BlockDiag;
  if (s == "holscherer") return RelaxKind::HolScherer;
  if (s == "scalar-lasserre") return RelaxKind::ScalarLasserre;
  throw std::invalid_argument("unknown relaxation kind: " + s);
}

// Kind matching the streamlined hierarchy for the instance's domain.
inline RelaxKind proposed_kind_for(Domain d) {
  return d == Domain::Binary ? RelaxKind::ProposedBinary
                             : RelaxKind::ProposedBall;
}

struct RelaxSpec {
  Instance instance;
  RelaxKind kind = RelaxKind::ProposedBinary;
  int r = 1;
  // Binary domain: reduce modulo x_i^2 = x_i (default) instead of carrying
  // explicit equality localizers.
  bool explicit_equalities = false;
  // Overrides the instance's normalize flag when set.
  std::optional<bool> normalize;
};

// A symbolic constraint block: a symmetric matrix of polynomials whose Riesz
// image L_y(entry) is required PSD (or zero, for equality blocks).
struct TemplateBlock {
  std::string name;
  std::string role;  // moment | domain | trace-p | trace-q | kron | scalar |
                     // equality
  bool equality = false;
  int size = 0;
  std::vector<MultiPoly> upper;  // upper triangle, row-major

  static size_t tri(int size, int i, int j) {
    return static_cast<size_t>(i) * size - static_cast<size_t>(i) * (i - 1) / 2 +
           (j - i);
  }
  const MultiPoly& at(int i, int j) const {
    if (i > j) std::swap(i, j);
    return upper.at(tri(size, i, j));
  }
  MultiPoly& at(int i, int j) {
    if (i > j) std::swap(i, j);
    return upper.at(tri(size, i, j));
  }
  int max_degree() const {
    int d = 0;
    for (const auto& p : upper) d = std::max(d, p.degree());
    return d;
  }
};

inline TemplateBlock make_template(std::string name, std::string role,
                                   bool equality, int size, int n) {
  TemplateBlock t;
  t.name = std::move(name);
  t.role = std::move(role);
  t.equality = equality;
  t.size = size;
  t.upper.assign(static_cast<size_t>(size) * (size + 1) / 2, MultiPoly(n));
  return t;
}

// M_order(y): entries b_i * b_j over the monomial basis of degree <= order.
inline TemplateBlock moment_template(int n, int order, bool squarefree,
                                     std::string name = "moment") {
  const auto b = monomial_basis(n, order, squarefree);
  TemplateBlock t = make_template(std::move(name), "moment", false,
                                  static_cast<int>(b.size()), n);
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i; j < b.size(); ++j) {
      MultiPoly p = MultiPoly::from_monomial(b[i] * b[j]);
      t.at(static_cast<int>(i), static_cast<int>(j)) =
          squarefree ? p.reduce_binary() : p;
    }
  return t;
}

// M_order(g y): entries g * b_i * b_j.
inline TemplateBlock localize_scalar(const MultiPoly& g, int order,
                                     bool squarefree, std::string name,
                                     std::string role = "scalar",
                                     bool equality = false) {
  const int n = g.nvars();
  const auto b = monomial_basis(n, order, squarefree);
  TemplateBlock t = make_template(std::move(name), std::move(role), equality,
                                  static_cast<int>(b.size()), n);
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i; j < b.size(); ++j) {
      MultiPoly p = g * MultiPoly::from_monomial(b[i] * b[j]);
      t.at(static_cast<int>(i), static_cast<int>(j)) =
          squarefree ? p.reduce_binary() : p;
    }
  return t;
}

// M_order(G tensor b b'): row index u * s + a for matrix row u, basis
// element a; entry ((u,a),(w,c)) = g_uw * b_a * b_c.
inline TemplateBlock localize_kron(const SymPolyMatrix& g, int order,
                                   bool squarefree,
                                   std::string name = "kron") {
  const int n = g.nvars(), m = g.dim();
  const auto b = monomial_basis(n, order, squarefree);
  const int s = static_cast<int>(b.size());
  TemplateBlock t =
      make_template(std::move(name), "kron", false, m * s, n);
  for (int u = 0; u < m; ++u)
    for (int w = u; w < m; ++w)
      for (int a = 0; a < s; ++a)
        for (int c = (u == w ? a : 0); c < s; ++c) {
          MultiPoly p = g.at(u, w) * MultiPoly::from_monomial(b[a] * b[c]);
          t.at(u * s + a, w * s + c) = squarefree ? p.reduce_binary() : p;
        }
  return t;
}

// [tr(G^1), ..., tr(G^pmax)], reducing modulo the binary ideal after each
// product when requested (keeps degrees capped at n).
inline std::vector<MultiPoly> trace_powers(const SymPolyMatrix& g, int pmax,
                                           bool reduce) {
  const int n = g.nvars(), m = g.dim();
  std::vector<MultiPoly> out;
  out.reserve(pmax);
  auto reduce_mat = [&](std::vector<std::vector<MultiPoly>>& a) {
    if (!reduce) return;
    for (auto& row : a)
      for (auto& p : row) p = p.reduce_binary();
  };
  auto pw = g.as_rows();
  reduce_mat(pw);
  for (int p = 1; p <= pmax; ++p) {
    if (p > 1) {
      pw = g.mul(pw);
      reduce_mat(pw);
    }
    MultiPoly tr(n);
    for (int i = 0; i < m; ++i) tr += pw[i][i];
    out.push_back(tr);
  }
  return out;
}

// P_v: (v+1)x(v+1) with entries tr(G^{i+j+1}); Q_{v-1}: v x v with entries
// tr(G^{i+j+1}) - tr(G^{i+j+3}).  Q is omitted upstream when v = 0.
inline TemplateBlock trace_p_template(const std::vector<MultiPoly>& tr,
                                      int vstar, int n,
                                      std::string name = "trace-p") {
  TemplateBlock t =
      make_template(std::move(name), "trace-p", false, vstar + 1, n);
  for (int i = 0; i <= vstar; ++i)
    for (int j = i; j <= vstar; ++j) t.at(i, j) = tr.at(i + j);
  return t;
}

inline TemplateBlock trace_q_template(const std::vector<MultiPoly>& tr,
                                      int vstar, int n,
                                      std::string name = "trace-q") {
  TemplateBlock t = make_template(std::move(name), "trace-q", false, vstar, n);
  for (int i = 0; i < vstar; ++i)
    for (int j = i; j < vstar; ++j) t.at(i, j) = tr.at(i + j) - tr.at(i + j + 2);
  return t;
}

struct RelaxMeta {
  RelaxKind kind = RelaxKind::ProposedBinary;
  Domain domain = Domain::Binary;
  int n = 0, m = 0, r = 0, l = 1, k = 0, vstar = 0;
  int moment_degree = 0;  // max indexed moment degree (2r unless extended)
  bool squarefree = true;
  double g_scale = 1.0;
  std::vector<double> g_scales;  // per diagonal block (BlockDiag kind)
  double obj_scale = 1.0;
  std::vector<std::string> warnings;
};

struct Relaxation {
  SdpProblem sdp;  // moment side, Min sense, y0 substituted
  MomentIndex index;
  RelaxMeta meta;
  std::vector<TemplateBlock> templates;
  MultiPoly objective_scaled;  // reduced objective divided by obj_scale
  SymPolyMatrix g_scaled;      // normalized G (whole matrix)
  Instance instance;           // as given
};

namespace detail {

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Equality localizers (x_i^2 - x_i) b_a b_b at basis order ord; entries
// whose degree exceeds max_deg reference moments outside the index and are
// dropped (imposing fewer equalities is always sound).
inline void append_equality_templates(std::vector<TemplateBlock>& out, int n,
                                      int ord, int max_deg) {
  if (ord < 0) return;
  const auto b = monomial_basis(n, ord, false);
  for (int v = 0; v < n; ++v) {
    MultiPoly g = MultiPoly::variable(n, v) * MultiPoly::variable(n, v) -
                  MultiPoly::variable(n, v);
    TemplateBlock t =
        make_template("eq_x" + std::to_string(v + 1), "equality", true,
                      static_cast<int>(b.size()), n);
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = i; j < b.size(); ++j) {
        MultiPoly p = g * MultiPoly::from_monomial(b[i] * b[j]);
        if (p.degree() <= max_deg)
          t.at(static_cast<int>(i), static_cast<int>(j)) = p;
      }
    out.push_back(std::move(t));
  }
}

inline MultiPoly ball_constraint(int n) {
  MultiPoly g = MultiPoly::constant(n, 1.0);
  for (int i = 0; i < n; ++i)
    g -= MultiPoly::variable(n, i) * MultiPoly::variable(n, i);
  return g;
}

}  // namespace detail

// Builds the moment-side SDP in standard primal form:
//   min c'y + c0  s.t.  sum_a y_a A_{b,a} - C_b >= 0 (or = 0),
// over the moment vector y indexed by the monomial basis with y0 = 1
// substituted into the constant matrices.
inline Relaxation build(const RelaxSpec& spec) {
  const Instance& inst = spec.instance;
  const int n = inst.n;
  const int m = inst.g.dim();
  const Domain dom = inst.domain;
  const RelaxKind kind = spec.kind;

  if (kind == RelaxKind::ProposedBinary && dom != Domain::Binary)
    throw std::invalid_argument("proposed-binary requires a binary domain");
  if (kind == RelaxKind::ProposedBall && dom != Domain::Ball)
    throw std::invalid_argument("proposed-ball requires a ball domain");
  if (kind == RelaxKind::ScalarLasserre && m != 1)
    throw std::invalid_argument("scalar-lasserre requires a 1x1 constraint");
  if (kind == RelaxKind::BlockDiag && inst.blocks.empty())
    throw std::invalid_argument(
        "blockdiag requires the instance to declare diagonal blocks");

  Relaxation rel;
  rel.instance = inst;
  RelaxMeta& meta = rel.meta;
  meta.kind = kind;
  meta.domain = dom;
  meta.n = n;
  meta.m = m;
  meta.r = spec.r;

  // Normalization: soundness of the trace blocks needs the spectral radius
  // of G at or below 1 on the domain, which sum_ij ||g_ij||_1 <= 1
  // certifies on both supported domains.
  const bool do_normalize = spec.normalize.value_or(inst.normalize);
  auto norm_scale = [&](const SymPolyMatrix& g) {
    double s = g.entry_norm_sum();
    return s > 1.0 ? s : 1.0;
  };
  if (kind == RelaxKind::BlockDiag) {
    // Verify the declared blocks tile G.
    int off = 0;
    std::vector<int> offsets;
    for (const auto& gb : inst.blocks) {
      offsets.push_back(off);
      if (off + gb.dim() > m)
        throw std::invalid_argument("blockdiag: declared blocks exceed G");
      for (int i = 0; i < gb.dim(); ++i)
        for (int j = i; j < gb.dim(); ++j)
          if (!(inst.g.at(off + i, off + j) == gb.at(i, j)))
            throw std::invalid_argument(
                "blockdiag: declared blocks do not match G's diagonal");
      off += gb.dim();
    }
    if (off != m)
      throw std::invalid_argument(
          "blockdiag: declared blocks do not tile G (dimensions sum to " +
          std::to_string(off) + " of " + std::to_string(m) + ")");
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        // Off-block entries must vanish.
        size_t bi = 0, bj = 0, acc = 0;
        for (size_t b = 0; b < inst.blocks.size(); ++b) {
          size_t d = inst.blocks[b].dim();
          if (static_cast<size_t>(i) >= acc && static_cast<size_t>(i) < acc + d) bi = b;
          if (static_cast<size_t>(j) >= acc && static_cast<size_t>(j) < acc + d) bj = b;
          acc += d;
        }
        if (bi != bj && !inst.g.at(i, j).is_zero())
          throw std::invalid_argument(
              "blockdiag: G has nonzero entries outside the declared blocks");
      }
  }

  double whole_scale = norm_scale(inst.g);
  if (!do_normalize && whole_scale > 1.0 + 1e-9)
    throw std::invalid_argument(
        "constraint matrix norm " + std::to_string(whole_scale) +
        " exceeds 1; enable normalization or rescale the instance");
  meta.g_scale = do_normalize ? whole_scale : 1.0;
  rel.g_scaled = inst.g.scaled(1.0 / meta.g_scale);
  if (do_normalize && whole_scale > 1.0)
    meta.warnings.push_back("G scaled by 1/" + std::to_string(whole_scale));

  std::vector<SymPolyMatrix> blocks_scaled;
  if (kind == RelaxKind::BlockDiag) {
    for (const auto& gb : inst.blocks) {
      double s = do_normalize ? norm_scale(gb) : 1.0;
      if (!do_normalize && gb.entry_norm_sum() > 1.0 + 1e-9)
        throw std::invalid_argument(
            "blockdiag: a diagonal block has norm above 1; enable "
            "normalization");
      meta.g_scales.push_back(s);
      blocks_scaled.push_back(gb.scaled(1.0 / s));
    }
  }

  // Degrees and level bounds.
  const int l = rel.g_scaled.half_degree();
  meta.l = l;
  MultiPoly f = dom == Domain::Binary ? inst.objective.reduce_binary()
                                      : inst.objective;
  const int fdeg = std::max(0, f.degree());
  const int rmin = std::max(l, detail::ceil_div(fdeg, 2));
  if (spec.r < rmin)
    throw std::invalid_argument(
        "relaxation order r = " + std::to_string(spec.r) +
        " below the minimum " + std::to_string(rmin) +
        " required by the data degrees");
  if (spec.r < 3 * l)
    meta.warnings.push_back(
        "r < 3l: the trace-block hierarchy is below its nominal starting "
        "order");

  meta.obj_scale = std::max(1.0, f.coef_norm());
  f *= 1.0 / meta.obj_scale;
  rel.objective_scaled = f;

  const int r = spec.r;
  const int k = r / l - 1;
  const int vstar = (k + 1) / 2;
  meta.k = k;
  meta.vstar = vstar;
  const bool squarefree =
      dom == Domain::Binary && !spec.explicit_equalities &&
      kind != RelaxKind::HolScherer;  // the baseline keeps the literal basis
  meta.squarefree = squarefree;

  // Constraint templates, in declaration order.
  std::vector<TemplateBlock>& T = rel.templates;
  T.push_back(moment_template(n, r, squarefree, "M_" + std::to_string(r)));
  if (dom == Domain::Ball)
    T.push_back(localize_scalar(detail::ball_constraint(n), r - 1, false,
                                "ball", "domain"));

  switch (kind) {
    case RelaxKind::ProposedBinary:
    case RelaxKind::ProposedBall: {
      auto tr = trace_powers(rel.g_scaled, 2 * vstar + 1, squarefree);
      T.push_back(trace_p_template(tr, vstar, n));
      if (vstar >= 1) T.push_back(trace_q_template(tr, vstar, n));
      break;
    }
    case RelaxKind::BlockDiag: {
      for (size_t b = 0; b < blocks_scaled.size(); ++b) {
        const SymPolyMatrix& gb = blocks_scaled[b];
        const int lb = gb.half_degree();
        const int kb = r / lb - 1;
        const int vb = (kb + 1) / 2;
        auto tr = trace_powers(gb, 2 * vb + 1, squarefree);
        const std::string suf = std::to_string(b + 1);
        T.push_back(trace_p_template(tr, vb, n, "trace-p" + suf));
        if (vb >= 1) T.push_back(trace_q_template(tr, vb, n, "trace-q" + suf));
        meta.vstar = std::max(meta.vstar, vb);
      }
      break;
    }
    case RelaxKind::HolScherer:
      T.push_back(localize_kron(rel.g_scaled, r - l, squarefree));
      break;
    case RelaxKind::ScalarLasserre:
      T.push_back(localize_scalar(rel.g_scaled.at(0, 0), r - l, squarefree,
                                  "loc_g"));
      break;
  }

  // Moment index degree: 2r unless a trace entry (odd k, full-degree G)
  // legitimately references higher powers.
  int need = std::max(2 * r, fdeg);
  for (const auto& t : T) need = std::max(need, t.max_degree());
  rel.index = MomentIndex(n, need, squarefree);
  meta.moment_degree = rel.index.max_degree();
  if (need > 2 * r)
    meta.warnings.push_back("moment index extended to degree " +
                            std::to_string(need) + " (above 2r = " +
                            std::to_string(2 * r) + ") for trace entries");

  if (dom == Domain::Binary && !squarefree)
    detail::append_equality_templates(T, n, detail::ceil_div(need, 2) - 1,
                                      need);

  for (const auto& t : T)
    if (t.max_degree() > rel.index.max_degree())
      throw std::logic_error("template entry degree exceeds the moment index");

  // Assemble the SDP.  Variable a (0-based) is the moment of basis monomial
  // a+1; the constant monomial's moment y0 = 1 lands in C and obj_const.
  SdpProblem& p = rel.sdp;
  p.sense = Sense::Min;
  const size_t nm = rel.index.size();
  if (nm == 0 || !(rel.index.monomial(0).degree() == 0))
    throw std::logic_error("moment index must start at the unit monomial");
  p.var_names.reserve(nm - 1);
  for (size_t a = 1; a < nm; ++a) {
    std::string s;
    const Monomial& mo = rel.index.monomial(a);
    for (int i = 0; i < n; ++i) {
      if (mo.exp[i] == 0) continue;
      s += "x" + std::to_string(i + 1);
      if (mo.exp[i] > 1) s += "^" + std::to_string(mo.exp[i]);
    }
    p.var_names.push_back("y[" + s + "]");
  }
  p.c = Eigen::VectorXd::Zero(static_cast<int>(nm) - 1);
  p.obj_const = 0.0;
  for (const auto& [pos, coef] : rel.index.riesz(f)) {
    if (pos == 0)
      p.obj_const += coef;
    else
      p.c(static_cast<int>(pos) - 1) += coef;
  }

  for (const auto& t : T) {
    SdpBlock& b = p.add_block(t.name, t.size, t.equality);
    for (int i = 0; i < t.size; ++i)
      for (int j = i; j < t.size; ++j) {
        const MultiPoly& e = t.at(i, j);
        if (e.is_zero()) continue;
        for (const auto& [pos, coef] : rel.index.riesz(e)) {
          if (pos == 0)
            b.C.add(i, j, -coef);
          else
            b.A[pos - 1].add(i, j, coef);
        }
      }
  }
  p.validate();
  return rel;
}

// The SOS side is the conic dual of the moment program over the same data;
// the label lets reports and exports carry the intended reading.
inline SdpProblem build_sos_dual(const Relaxation& rel) {
  SdpProblem p = rel.sdp;
  p.sense = Sense::Max;
  return p;
}

struct BlockSizeEntry {
  std::string name;
  int size = 0;
  bool equality = false;
};

struct SizeReport {
  int nvars = 0;
  std::vector<BlockSizeEntry> blocks;
  int largest_block = 0;       // largest PSD block order
  long long gram_entries = 0;  // sum of size^2 over PSD blocks
  std::string str() const {
    std::string s = "vars=" + std::to_string(nvars) + " blocks=[";
    for (size_t i = 0; i < blocks.size(); ++i) {
      if (i) s += ", ";
      s += blocks[i].name + ":" + std::to_string(blocks[i].size);
      if (blocks[i].equality) s += "(eq)";
    }
    s += "] largest=" + std::to_string(largest_block);
    return s;
  }
};

inline SizeReport size_report(const SdpProblem& p) {
  SizeReport rep;
  rep.nvars = p.nvars();
  for (const auto& b : p.blocks) {
    rep.blocks.push_back({b.name, b.size, b.equality});
    if (!b.equality) {
      rep.largest_block = std::max(rep.largest_block, b.size);
      rep.gram_entries += static_cast<long long>(b.size) * b.size;
    }
  }
  return rep;
}

// Side-by-side block orders of the streamlined trace pair versus the
// classical Kronecker localizer at the same level.
struct SizeComparison {
  int trace_p = 0, trace_q = 0, kron = 0;
  double ratio = 0.0;  // kron / trace_p
};

inline SizeComparison compare_sizes(int n, int m, int l, int r) {
  if (l < 1 || r < l) throw std::invalid_argument("compare_sizes: need r >= l >= 1");
  SizeComparison c;
  const int k = r / l - 1;
  const int vstar = (k + 1) / 2;
  c.trace_p = vstar + 1;
  c.trace_q = vstar;
  c.kron = m * static_cast<int>(basis_size(n, r - l));
  c.ratio = static_cast<double>(c.kron) / c.trace_p;
  return c;
}

struct RelaxSolution {
  SdpSolution sdp;
  double bound = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

// Solves the moment SDP and un-scales the certified bound.  An infeasible
// moment program means the feasible set is empty, so the infimum is +inf.
inline RelaxSolution solve_relaxation(const Relaxation& rel,
                                      const SolveOptions& opt = {},
                                      const SdpBackend& backend =
                                          default_backend()) {
  RelaxSolution rs;
  rs.sdp = solve_sdp(rel.sdp, opt, backend);
  if (rs.sdp.status == SolveStatus::Infeasible) {
    rs.bound = std::numeric_limits<double>::infinity();
    rs.note = "moment program infeasible: the feasible set is empty";
  } else if (rs.sdp.usable()) {
    rs.bound = rs.sdp.dual_obj * rel.meta.obj_scale;
  } else {
    rs.note = "solver returned " + status_name(rs.sdp.status);
  }
  return rs;
}

// Max violation of the relaxation's constraints at an explicit moment
// vector (used by soundness tests with point-mass moments).
struct PointViolation {
  double psd = 0.0;  // most negative eigenvalue across PSD blocks, as >= 0
  double eq = 0.0;   // largest |entry| across equality blocks
  double objective = 0.0;
};

inline PointViolation primal_point_violation(const SdpProblem& p,
                                             const Eigen::VectorXd& x) {
  PointViolation v;
  v.objective = p.c.dot(x) + p.obj_const;
  for (const auto& b : p.blocks) {
    Eigen::MatrixXd s = b.slack(x);
    if (b.equality)
      v.eq = std::max(v.eq, s.cwiseAbs().maxCoeff());
    else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
      v.psd = std::max(v.psd, std::max(0.0, -es.eigenvalues().minCoeff()));
    }
  }
  return v;
}

// Moment vector of the point mass at x, over the relaxation's index and
// with y0 dropped (matching the SDP's variable layout).
inline Eigen::VectorXd point_mass_moments(const MomentIndex& idx,
                                          const std::vector<double>& x) {
  Eigen::VectorXd y(static_cast<int>(idx.size()) - 1);
  for (size_t a = 1; a < idx.size(); ++a) {
    double t = 1.0;
    const Monomial& mo = idx.monomial(a);
    for (int i = 0; i < idx.nvars(); ++i)
      for (int e = 0; e < mo.exp[i]; ++e) t *= x[i];
    y(static_cast<int>(a) - 1) = t;
  }
  return y;
}

}  // namespace pmsos
