#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "pmsos/oracle.hpp"
#include "pmsos/relax.hpp"

using namespace pmsos;

namespace {

MultiPoly var(int n, int i) { return MultiPoly::variable(n, i); }

Instance random_binary_instance(int n, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Instance inst;
  inst.n = n;
  inst.domain = Domain::Binary;
  inst.normalize = true;
  inst.objective = MultiPoly(n);
  for (const auto& mo : monomial_basis(n, 2, false))
    inst.objective.add_term(mo, u(rng));
  inst.g = SymPolyMatrix(n, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      MultiPoly e(n);
      for (const auto& mo : monomial_basis(n, 2, false))
        e.add_term(mo, 0.3 * u(rng));
      if (i == j) e += MultiPoly::constant(n, 0.5 + 0.5 * std::abs(u(rng)));
      inst.g.set(i, j, e);
    }
  return inst;
}

Instance feasible_binary_instance(int n, int m, std::mt19937_64& rng,
                                  OracleResult& oracle) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Instance inst = random_binary_instance(n, m, rng);
    try {
      oracle = brute_force_binary(inst.objective, inst.g);
      return inst;
    } catch (const std::runtime_error&) {
      // empty feasible set; draw again
    }
  }
  throw std::runtime_error("could not draw a feasible instance");
}

Instance simple_ball_m1() {
  // g = 0.5 + 0.25 x1 is positive on the ball; f = x1 + 0.3 x2^2 has its
  // constrained minimum -1 at (-1, 0).
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Ball;
  inst.objective = var(2, 0) + var(2, 1) * var(2, 1) * 0.3;
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, 0.5) + var(2, 0) * 0.25);
  return inst;
}

}  // namespace

TEST(Kinds, NamesRoundTrip) {
  for (RelaxKind k :
       {RelaxKind::ProposedBinary, RelaxKind::ProposedBall,
        RelaxKind::BlockDiag, RelaxKind::HolScherer,
        RelaxKind::ScalarLasserre})
    EXPECT_EQ(kind_from_name(kind_name(k)), k);
  EXPECT_THROW(kind_from_name("nope"), std::invalid_argument);
  EXPECT_EQ(proposed_kind_for(Domain::Binary), RelaxKind::ProposedBinary);
  EXPECT_EQ(proposed_kind_for(Domain::Ball), RelaxKind::ProposedBall);
}

TEST(Templates, MomentEntries) {
  TemplateBlock t = moment_template(2, 1, false);
  ASSERT_EQ(t.size, 3);  // basis 1, x1, x2
  EXPECT_TRUE(t.at(0, 0) == MultiPoly::constant(2, 1.0));
  EXPECT_TRUE(t.at(0, 1) == var(2, 0));
  EXPECT_TRUE(t.at(1, 1) == var(2, 0) * var(2, 0));
  EXPECT_TRUE(t.at(1, 2) == var(2, 0) * var(2, 1));
  EXPECT_TRUE(t.at(2, 1) == t.at(1, 2));  // symmetric access

  TemplateBlock sf = moment_template(2, 1, true);
  EXPECT_TRUE(sf.at(1, 1) == var(2, 0));  // x1^2 reduced to x1
}

TEST(Templates, LocalizeScalarEntries) {
  MultiPoly g = MultiPoly::constant(2, 1.0) - var(2, 0);
  TemplateBlock t = localize_scalar(g, 1, false, "loc");
  ASSERT_EQ(t.size, 3);
  EXPECT_TRUE(t.at(0, 0) == g);
  EXPECT_TRUE(t.at(0, 2) == g * var(2, 1));
  EXPECT_EQ(t.role, "scalar");
  EXPECT_FALSE(t.equality);
}

TEST(Templates, LocalizeKronLayout) {
  SymPolyMatrix g(2, 2);
  g.set(0, 0, MultiPoly::constant(2, 1.0));
  g.set(0, 1, var(2, 0));
  g.set(1, 1, var(2, 1));
  TemplateBlock t = localize_kron(g, 1, false);
  const int s = 3;  // basis 1, x1, x2
  ASSERT_EQ(t.size, 2 * s);
  // entry ((u,a),(w,c)) = g_uw b_a b_c with row index u*s + a
  EXPECT_TRUE(t.at(0 * s + 0, 1 * s + 0) == var(2, 0));
  EXPECT_TRUE(t.at(0 * s + 2, 1 * s + 1) ==
              var(2, 0) * var(2, 0) * var(2, 1));
  EXPECT_TRUE(t.at(1 * s + 1, 1 * s + 1) ==
              var(2, 1) * var(2, 0) * var(2, 0));
}

TEST(Templates, TracePowersReduceBinary) {
  SymPolyMatrix g(1, 1);
  g.set(0, 0, var(1, 0));
  auto tr = trace_powers(g, 3, true);
  ASSERT_EQ(tr.size(), 3u);
  for (const auto& p : tr) EXPECT_TRUE(p == var(1, 0));  // x^p = x mod ideal
  auto full = trace_powers(g, 3, false);
  EXPECT_TRUE(full[2] == var(1, 0) * var(1, 0) * var(1, 0));
}

TEST(Templates, TracePAndQEntries) {
  SymPolyMatrix g(2, 2);
  g.set(0, 0, var(2, 0) * 0.25);
  g.set(0, 1, MultiPoly::constant(2, 0.125));
  g.set(1, 1, var(2, 1) * 0.25);
  auto tr = trace_powers(g, 3, false);
  for (int p = 1; p <= 3; ++p) EXPECT_TRUE(tr[p - 1] == trace_power(g, p));
  TemplateBlock tp = trace_p_template(tr, 1, 2);
  ASSERT_EQ(tp.size, 2);
  EXPECT_TRUE(tp.at(0, 0) == tr[0]);
  EXPECT_TRUE(tp.at(0, 1) == tr[1]);
  EXPECT_TRUE(tp.at(1, 1) == tr[2]);
  TemplateBlock tq = trace_q_template(tr, 1, 2);
  ASSERT_EQ(tq.size, 1);
  EXPECT_TRUE(tq.at(0, 0) == tr[0] - tr[2]);
}

TEST(CompareSizes, PinnedExample) {
  SizeComparison c = compare_sizes(2, 3, 1, 3);
  EXPECT_EQ(c.trace_p, 2);
  EXPECT_EQ(c.trace_q, 1);
  EXPECT_EQ(c.kron, 18);
  EXPECT_DOUBLE_EQ(c.ratio, 9.0);
  EXPECT_THROW(compare_sizes(2, 1, 2, 1), std::invalid_argument);
}

TEST(Build, MinimalBinaryLayout) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Binary;
  inst.objective = var(2, 0);
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, 1.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 1;
  Relaxation rel = build(spec);

  EXPECT_EQ(rel.meta.l, 1);
  EXPECT_EQ(rel.meta.k, 0);
  EXPECT_EQ(rel.meta.vstar, 0);
  EXPECT_TRUE(rel.meta.squarefree);
  EXPECT_EQ(rel.meta.moment_degree, 2);
  ASSERT_EQ(rel.sdp.blocks.size(), 2u);  // M_1 and the 1x1 P block
  EXPECT_EQ(rel.sdp.blocks[0].name, "M_1");
  EXPECT_EQ(rel.sdp.blocks[0].size, 3);
  EXPECT_EQ(rel.sdp.blocks[1].name, "trace-p");
  EXPECT_EQ(rel.sdp.blocks[1].size, 1);
  ASSERT_EQ(rel.sdp.nvars(), 3);  // y[x1], y[x2], y[x1x2]
  EXPECT_EQ(rel.sdp.var_names[0], "y[x1]");
  EXPECT_EQ(rel.sdp.var_names[2], "y[x1x2]");

  SizeReport rep = size_report(rel.sdp);
  EXPECT_EQ(rep.largest_block, 3);
  EXPECT_EQ(rep.gram_entries, 9 + 1);
  EXPECT_NE(rep.str().find("M_1:3"), std::string::npos);

  SdpProblem dual = build_sos_dual(rel);
  EXPECT_EQ(dual.sense, Sense::Max);
  EXPECT_EQ(dual.blocks.size(), rel.sdp.blocks.size());
}

TEST(Build, KindGuards) {
  Instance binary;
  binary.n = 1;
  binary.domain = Domain::Binary;
  binary.objective = var(1, 0);
  binary.g = SymPolyMatrix(1, 2);
  binary.g.set(0, 0, MultiPoly::constant(1, 0.5));
  binary.g.set(1, 1, MultiPoly::constant(1, 0.5));

  RelaxSpec spec;
  spec.instance = binary;
  spec.r = 1;
  spec.kind = RelaxKind::ProposedBall;
  EXPECT_THROW(build(spec), std::invalid_argument);
  spec.kind = RelaxKind::ScalarLasserre;  // m = 2
  EXPECT_THROW(build(spec), std::invalid_argument);
  spec.kind = RelaxKind::BlockDiag;  // no declared blocks
  EXPECT_THROW(build(spec), std::invalid_argument);

  Instance ball = binary;
  ball.domain = Domain::Ball;
  spec.instance = ball;
  spec.kind = RelaxKind::ProposedBinary;
  EXPECT_THROW(build(spec), std::invalid_argument);
}

TEST(Build, EnforcesMinimumOrder) {
  Instance inst;
  inst.n = 3;
  inst.domain = Domain::Binary;
  inst.objective = var(3, 0) * var(3, 1) * var(3, 2);  // stays cubic reduced
  inst.g = SymPolyMatrix(3, 1);
  inst.g.set(0, 0, MultiPoly::constant(3, 1.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 1;
  EXPECT_THROW(build(spec), std::invalid_argument);
  spec.r = 2;
  Relaxation rel = build(spec);
  EXPECT_EQ(rel.meta.r, 2);

  // On the binary cube the reduction can lower the needed order.
  Instance sq = inst;
  sq.objective = var(3, 0) * var(3, 0) * var(3, 0);  // = x1 mod ideal
  spec.instance = sq;
  spec.r = 1;
  EXPECT_EQ(build(spec).meta.r, 1);
}

TEST(Build, NormalizationGuardAndScale) {
  Instance inst;
  inst.n = 1;
  inst.domain = Domain::Binary;
  inst.objective = var(1, 0);
  inst.g = SymPolyMatrix(1, 1);
  inst.g.set(0, 0, MultiPoly::constant(1, 2.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 1;
  EXPECT_THROW(build(spec), std::invalid_argument);  // norm 2 without opt-in
  spec.normalize = true;
  Relaxation rel = build(spec);
  EXPECT_DOUBLE_EQ(rel.meta.g_scale, 2.0);
  EXPECT_NEAR(rel.g_scaled.entry_norm_sum(), 1.0, 1e-15);
  bool warned = false;
  for (const auto& w : rel.meta.warnings)
    warned = warned || w.find("scaled") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Build, BlockDiagValidation) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Binary;
  inst.objective = var(2, 0) - var(2, 1);
  inst.g = SymPolyMatrix(2, 2);
  MultiPoly g1 = MultiPoly::constant(2, 0.3) + var(2, 0) * 0.2;
  MultiPoly g2 = MultiPoly::constant(2, 0.25) + var(2, 1) * 0.25;
  inst.g.set(0, 0, g1);
  inst.g.set(1, 1, g2);
  SymPolyMatrix b1(2, 1), b2(2, 1);
  b1.set(0, 0, g1);
  b2.set(0, 0, g2);

  RelaxSpec spec;
  spec.kind = RelaxKind::BlockDiag;
  spec.r = 2;
  spec.instance = inst;
  spec.instance.blocks = {b1, b2};
  Relaxation rel = build(spec);
  ASSERT_EQ(rel.meta.g_scales.size(), 2u);

  spec.instance.blocks = {b1};  // does not tile G
  EXPECT_THROW(build(spec), std::invalid_argument);

  spec.instance.blocks = {b2, b1};  // wrong order: diagonal mismatch
  EXPECT_THROW(build(spec), std::invalid_argument);

  spec.instance.blocks = {b1, b2};
  spec.instance.g.set(0, 1, MultiPoly::constant(2, 0.1));  // off-block entry
  EXPECT_THROW(build(spec), std::invalid_argument);
}

TEST(Solve, UnconstrainedBinaryMin) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Binary;
  inst.objective = var(2, 0);
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, 1.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 1;
  RelaxSolution rs = solve_relaxation(build(spec));
  ASSERT_TRUE(rs.sdp.usable()) << rs.note;
  EXPECT_NEAR(rs.bound, 0.0, 1e-6);
}

TEST(Solve, BallLinearObjective) {
  Instance inst;
  inst.n = 1;
  inst.domain = Domain::Ball;
  inst.objective = var(1, 0);
  inst.g = SymPolyMatrix(1, 1);
  inst.g.set(0, 0, MultiPoly::constant(1, 1.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBall;
  spec.r = 1;
  RelaxSolution rs = solve_relaxation(build(spec));
  ASSERT_TRUE(rs.sdp.usable()) << rs.note;
  EXPECT_NEAR(rs.bound, -1.0, 1e-6);
}

TEST(Solve, ScalarLasserreBallQuadratic) {
  Instance inst;
  inst.n = 1;
  inst.domain = Domain::Ball;
  inst.objective = var(1, 0) * var(1, 0);
  inst.g = SymPolyMatrix(1, 1);
  inst.g.set(0, 0, MultiPoly::constant(1, 1.0));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ScalarLasserre;
  spec.r = 1;
  RelaxSolution rs = solve_relaxation(build(spec));
  ASSERT_TRUE(rs.sdp.usable()) << rs.note;
  EXPECT_NEAR(rs.bound, 0.0, 1e-6);
}

TEST(Solve, InfeasibleSetGivesPlusInfinity) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Binary;
  inst.objective = var(2, 0);
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, -0.25));
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 1;
  RelaxSolution rs = solve_relaxation(build(spec));
  EXPECT_EQ(rs.sdp.status, SolveStatus::Infeasible);
  EXPECT_TRUE(std::isinf(rs.bound));
  EXPECT_GT(rs.bound, 0.0);
  EXPECT_NE(rs.note.find("infeasible"), std::string::npos);
}

TEST(Solve, PointMassMomentsAreFeasibleBinary) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    OracleResult oracle;
    Instance inst = feasible_binary_instance(2 + trial % 2, 1 + trial % 2,
                                             rng, oracle);
    for (bool explicit_eq : {false, true}) {
      RelaxSpec spec;
      spec.instance = inst;
      spec.kind = RelaxKind::ProposedBinary;
      spec.r = 2;
      spec.explicit_equalities = explicit_eq;
      Relaxation rel = build(spec);
      const int n = inst.n;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
        if (rel.g_scaled.min_eigenvalue(x) < -1e-12) continue;
        Eigen::VectorXd y = point_mass_moments(rel.index, x);
        PointViolation v = primal_point_violation(rel.sdp, y);
        EXPECT_LE(v.psd, 1e-9);
        EXPECT_LE(v.eq, 1e-12);
        EXPECT_NEAR(v.objective, inst.objective.eval(x) / rel.meta.obj_scale,
                    1e-10);
      }
    }
  }
}

TEST(Solve, PointMassMomentsAreFeasibleBall) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Ball;
  inst.objective = var(2, 0) - var(2, 1);
  inst.g = SymPolyMatrix(2, 2);
  inst.g.set(0, 0, MultiPoly::constant(2, 0.35));
  inst.g.set(0, 1, var(2, 0) * 0.1);
  inst.g.set(1, 1, MultiPoly::constant(2, 0.25) + var(2, 1) * 0.2);
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBall;
  spec.r = 2;
  Relaxation rel = build(spec);

  pmsos::detail::Rng rng(77);
  int feasible = 0;
  for (int s = 0; s < 400; ++s) {
    std::vector<double> x = rng.ball_point(2);
    if (rel.g_scaled.min_eigenvalue(x) < 0.0) continue;
    ++feasible;
    Eigen::VectorXd y = point_mass_moments(rel.index, x);
    PointViolation v = primal_point_violation(rel.sdp, y);
    EXPECT_LE(v.psd, 1e-8);
    EXPECT_NEAR(v.objective, inst.objective.eval(x) / rel.meta.obj_scale,
                1e-10);
  }
  EXPECT_GT(feasible, 50);
}

TEST(Solve, BoundNeverExceedsBruteForce) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 4; ++trial) {
    OracleResult oracle;
    Instance inst = feasible_binary_instance(2 + trial % 2, 1 + (trial / 2) % 2,
                                             rng, oracle);
    for (RelaxKind kind :
         {RelaxKind::ProposedBinary, RelaxKind::HolScherer}) {
      RelaxSpec spec;
      spec.instance = inst;
      spec.kind = kind;
      spec.r = 2;
      RelaxSolution rs = solve_relaxation(build(spec));
      ASSERT_TRUE(rs.sdp.usable())
          << kind_name(kind) << ": " << rs.note << " " << rs.sdp.message;
      EXPECT_LE(rs.bound, oracle.f_min + 1e-6) << kind_name(kind);
    }
  }
}

TEST(Solve, BoundsAreMonotoneInR) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 3; ++trial) {
    OracleResult oracle;
    Instance inst = feasible_binary_instance(3, 1, rng, oracle);
    RelaxSpec spec;
    spec.instance = inst;
    spec.kind = RelaxKind::ProposedBinary;
    double prev = -std::numeric_limits<double>::infinity();
    for (int r = 2; r <= 4; ++r) {
      spec.r = r;
      RelaxSolution rs = solve_relaxation(build(spec));
      ASSERT_TRUE(rs.sdp.usable()) << rs.note;
      EXPECT_GE(rs.bound, prev - 1e-6) << "r=" << r;
      EXPECT_LE(rs.bound, oracle.f_min + 1e-6) << "r=" << r;
      prev = rs.bound;
    }
  }
}

TEST(Solve, BlockDiagAtLeastAsTightAsProposed) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Instance inst;
    inst.n = 2;
    inst.domain = Domain::Binary;
    inst.normalize = true;
    inst.objective = MultiPoly(2);
    for (const auto& mo : monomial_basis(2, 2, false))
      inst.objective.add_term(mo, u(rng));
    MultiPoly g1 = MultiPoly::constant(2, 0.4 + 0.2 * std::abs(u(rng))) +
                   var(2, 0) * (0.3 * u(rng));
    MultiPoly g2 = MultiPoly::constant(2, 0.4 + 0.2 * std::abs(u(rng))) +
                   var(2, 1) * (0.3 * u(rng));
    inst.g = SymPolyMatrix(2, 2);
    inst.g.set(0, 0, g1);
    inst.g.set(1, 1, g2);
    SymPolyMatrix b1(2, 1), b2(2, 1);
    b1.set(0, 0, g1);
    b2.set(0, 0, g2);
    inst.blocks = {b1, b2};

    OracleResult oracle;
    try {
      oracle = brute_force_binary(inst.objective, inst.g);
    } catch (const std::runtime_error&) {
      continue;  // empty feasible set; skip draw
    }
    for (int r = 2; r <= 3; ++r) {
      RelaxSpec spec;
      spec.instance = inst;
      spec.r = r;
      spec.kind = RelaxKind::ProposedBinary;
      RelaxSolution prop = solve_relaxation(build(spec));
      spec.kind = RelaxKind::BlockDiag;
      RelaxSolution bd = solve_relaxation(build(spec));
      ASSERT_TRUE(prop.sdp.usable()) << prop.note;
      ASSERT_TRUE(bd.sdp.usable()) << bd.note;
      EXPECT_GE(bd.bound, prop.bound - 1e-7) << "r=" << r;
      EXPECT_LE(bd.bound, oracle.f_min + 1e-6) << "r=" << r;
    }
  }
}

TEST(Solve, ExplicitEqualitiesMatchSquarefree) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Binary;
  inst.objective = var(2, 0) + var(2, 1) - var(2, 0) * var(2, 1) * 2.0;
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, 0.5) + var(2, 0) * 0.5);
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBinary;
  spec.r = 2;
  Relaxation sf = build(spec);
  EXPECT_TRUE(sf.meta.squarefree);
  spec.explicit_equalities = true;
  Relaxation eq = build(spec);
  EXPECT_FALSE(eq.meta.squarefree);
  bool has_eq_block = false;
  for (const auto& b : eq.sdp.blocks) has_eq_block |= b.equality;
  EXPECT_TRUE(has_eq_block);

  RelaxSolution rs_sf = solve_relaxation(sf);
  RelaxSolution rs_eq = solve_relaxation(eq);
  ASSERT_TRUE(rs_sf.sdp.usable()) << rs_sf.note;
  ASSERT_TRUE(rs_eq.sdp.usable()) << rs_eq.note;
  EXPECT_NEAR(rs_sf.bound, rs_eq.bound, 1e-6);
  EXPECT_NEAR(rs_sf.bound, 0.0, 1e-6);  // f_min over the cube is 0
}

TEST(Solve, ScalarKindsCollapseAtMEqualsOne) {
  Instance inst = simple_ball_m1();
  RelaxSpec spec;
  spec.instance = inst;
  spec.r = 2;

  spec.kind = RelaxKind::HolScherer;
  Relaxation hs = build(spec);
  spec.kind = RelaxKind::ScalarLasserre;
  Relaxation sl = build(spec);

  // identical constraint data, block for block
  ASSERT_EQ(hs.sdp.blocks.size(), sl.sdp.blocks.size());
  ASSERT_EQ(hs.sdp.nvars(), sl.sdp.nvars());
  for (size_t b = 0; b < hs.sdp.blocks.size(); ++b) {
    const SdpBlock& bh = hs.sdp.blocks[b];
    const SdpBlock& bs = sl.sdp.blocks[b];
    ASSERT_EQ(bh.size, bs.size);
    EXPECT_EQ((bh.C.dense(bh.size) - bs.C.dense(bs.size)).cwiseAbs().maxCoeff(),
              0.0);
    for (int i = 0; i < hs.sdp.nvars(); ++i)
      EXPECT_EQ((bh.A[i].dense(bh.size) - bs.A[i].dense(bs.size))
                    .cwiseAbs()
                    .maxCoeff(),
                0.0);
  }

  RelaxSolution rs_hs = solve_relaxation(hs);
  RelaxSolution rs_sl = solve_relaxation(sl);
  spec.kind = RelaxKind::ProposedBall;
  RelaxSolution rs_pb = solve_relaxation(build(spec));
  ASSERT_TRUE(rs_hs.sdp.usable()) << rs_hs.note;
  ASSERT_TRUE(rs_sl.sdp.usable()) << rs_sl.note;
  ASSERT_TRUE(rs_pb.sdp.usable()) << rs_pb.note;
  EXPECT_NEAR(rs_hs.bound, rs_sl.bound, 1e-7);
  EXPECT_NEAR(rs_pb.bound, rs_hs.bound, 1e-6);
  EXPECT_NEAR(rs_pb.bound, -1.0, 1e-5);  // exact at this instance
}

TEST(Build, TraceDegreesCanExtendTheIndex) {
  Instance inst;
  inst.n = 2;
  inst.domain = Domain::Ball;
  inst.objective = var(2, 0);
  inst.g = SymPolyMatrix(2, 1);
  inst.g.set(0, 0, MultiPoly::constant(2, 0.3) +
                       var(2, 0) * var(2, 1) * 0.3);  // degree 2, l = 1
  RelaxSpec spec;
  spec.instance = inst;
  spec.kind = RelaxKind::ProposedBall;
  spec.r = 4;  // k = 3, v* = 2: P holds tr(G^5), degree 10 > 2r
  Relaxation rel = build(spec);
  EXPECT_EQ(rel.meta.k, 3);
  EXPECT_EQ(rel.meta.vstar, 2);
  EXPECT_EQ(rel.meta.moment_degree, 10);
  bool warned = false;
  for (const auto& w : rel.meta.warnings)
    warned = warned || w.find("extended") != std::string::npos;
  EXPECT_TRUE(warned);

  // same data at r = 2 still extends: v* = 1 brings tr(G^3), degree 6 > 4
  spec.r = 2;
  EXPECT_EQ(build(spec).meta.moment_degree, 6);

  // a degree-1 G at r = 2 stays within 2r (tr(G^3) has degree 3)
  inst.g.set(0, 0, MultiPoly::constant(2, 0.3) + var(2, 0) * 0.3);
  spec.instance = inst;
  EXPECT_EQ(build(spec).meta.moment_degree, 4);
}
