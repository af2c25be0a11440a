#pragma once

// Standard-form semidefinite programming data, read two ways:
//
//   (P)  min  c'x + c0   s.t.  S_b(x) = sum_i x_i A_{b,i} - C_b  PSD for all b
//   (D)  max  sum_b <C_b, Y_b> + c0   s.t.  sum_b <A_{b,i}, Y_b> = c_i, Y_b PSD
//
// Moment relaxations are the (P) reading (x = truncated moment vector with
// y_0 = 1 substituted into C); the matching sum-of-squares program is the (D)
// reading of the same data, so both forms come out of one template store.
// Blocks flagged `equality` pin S_b(x) = 0 entrywise; their dual multipliers
// are sign-free.

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pmsos {

// Sparse symmetric matrix: upper-triangle map (r <= c) -> value, where the
// value is the entry of the full symmetric matrix.
class SymSparse {
 public:
  using Map = std::map<std::pair<int, int>, double>;

  void add(int r, int c, double v) {
    if (r > c) std::swap(r, c);
    auto [it, fresh] = m_.try_emplace({r, c}, 0.0);
    it->second += v;
    if (it->second == 0.0) m_.erase(it);
  }
  const Map& entries() const { return m_; }
  bool empty() const { return m_.empty(); }

  Eigen::MatrixXd dense(int size) const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
    for (const auto& [rc, v] : m_) d(rc.first, rc.second) = d(rc.second, rc.first) = v;
    return d;
  }

  // <A, Y> for symmetric Y.
  double inner(const Eigen::MatrixXd& y) const {
    double s = 0.0;
    for (const auto& [rc, v] : m_) {
      const auto [r, c] = rc;
      s += (r == c) ? v * y(r, r) : 2.0 * v * y(r, c);
    }
    return s;
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& [rc, v] : m_) s = std::max(s, std::abs(v));
    return s;
  }

 private:
  Map m_;
};

struct SdpBlock {
  std::string name;
  int size = 0;
  bool equality = false;     // S_b(x) = 0 instead of PSD
  SymSparse C;               // constant part
  std::vector<SymSparse> A;  // per scalar variable

  // sum_i x_i A_i - C as a dense matrix
  Eigen::MatrixXd slack(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd s = -C.dense(size);
    for (size_t i = 0; i < A.size(); ++i) {
      if (A[i].empty()) continue;
      for (const auto& [rc, v] : A[i].entries()) {
        s(rc.first, rc.second) += x(i) * v;
        if (rc.first != rc.second) s(rc.second, rc.first) += x(i) * v;
      }
    }
    return s;
  }
};

enum class Sense { Min, Max };

struct SdpProblem {
  Sense sense = Sense::Min;  // reporting label: Min = moment form, Max = SOS form
  double obj_const = 0.0;
  std::vector<std::string> var_names;
  Eigen::VectorXd c;  // objective on scalar vars, (P) reading
  std::vector<SdpBlock> blocks;

  int nvars() const { return static_cast<int>(var_names.size()); }

  SdpBlock& add_block(const std::string& name, int size, bool equality = false) {
    SdpBlock b;
    b.name = name;
    b.size = size;
    b.equality = equality;
    b.A.resize(var_names.size());
    blocks.push_back(std::move(b));
    return blocks.back();
  }

  const SdpBlock* find_block(const std::string& name) const {
    for (const auto& b : blocks)
      if (b.name == name) return &b;
    return nullptr;
  }

  void validate() const {
    const size_t m = var_names.size();
    if (static_cast<size_t>(c.size()) != m)
      throw std::invalid_argument("SdpProblem: objective length mismatch");
    for (const auto& b : blocks) {
      if (b.size < 1) throw std::invalid_argument("SdpProblem: empty block");
      if (b.A.size() != m)
        throw std::invalid_argument("SdpProblem: block " + b.name +
                                    " has wrong variable count");
      for (const auto& [rc, v] : b.C.entries())
        if (rc.second >= b.size)
          throw std::invalid_argument("SdpProblem: C entry out of range");
      for (const auto& a : b.A)
        for (const auto& [rc, v] : a.entries())
          if (rc.second >= b.size)
            throw std::invalid_argument("SdpProblem: A entry out of range");
    }
  }

  // Total count of scalar unknowns in the (D) reading (upper triangles of all
  // PSD block variables).
  long long gram_var_count() const {
    long long t = 0;
    for (const auto& b : blocks)
      if (!b.equality) t += static_cast<long long>(b.size) * (b.size + 1) / 2;
    return t;
  }
};

enum class SolveStatus {
  Optimal,
  NearOptimal,
  Infeasible,
  Unbounded,
  NumericalFailure
};

inline std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near_optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    default: return "numerical_failure";
  }
}

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;                  // scalar variables, (P) reading
  std::vector<Eigen::MatrixXd> Y;     // one PSD/multiplier matrix per block
  double primal_obj = 0.0;            // c'x + c0
  double dual_obj = 0.0;              // sum <C_b, Y_b> + c0
  double rel_gap = 0.0;
  double primal_res = 0.0;            // cone violation of S_b(x) / equality residual
  double dual_res = 0.0;              // residual of sum_b <A_i, Y_b> = c_i
  int iterations = 0;
  std::string message;

  bool usable() const {
    return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal;
  }
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iters = 200;
  bool verbose = false;
};

// Residuals recomputed from scratch against the problem data (independent of
// whatever the backend reports).  Dual residuals are projected onto the
// nullspace of the equality rows, since equality-block multipliers are free.
inline void recompute_residuals(const SdpProblem& p, SdpSolution& sol) {
  double data_scale = 1.0;
  for (const auto& b : p.blocks) {
    data_scale = std::max(data_scale, b.C.max_abs());
    for (const auto& a : b.A) data_scale = std::max(data_scale, a.max_abs());
  }

  double pres = 0.0;
  for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const auto& b = p.blocks[bi];
    Eigen::MatrixXd s = b.slack(sol.x);
    if (b.equality) {
      pres = std::max(pres, s.cwiseAbs().maxCoeff());
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
      pres = std::max(pres, std::max(0.0, -es.eigenvalues().minCoeff()));
    }
  }
  sol.primal_res = pres / (1.0 + data_scale);

  Eigen::VectorXd d = p.c;
  for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const auto& b = p.blocks[bi];
    if (b.equality || sol.Y[bi].size() == 0) continue;
    for (int i = 0; i < p.nvars(); ++i)
      if (!b.A[i].empty()) d(i) -= b.A[i].inner(sol.Y[bi]);
  }
  // Project out directions reachable by equality-block multipliers.
  std::vector<Eigen::VectorXd> eq_rows;
  for (const auto& b : p.blocks) {
    if (!b.equality) continue;
    std::map<std::pair<int, int>, Eigen::VectorXd> rows;
    for (int i = 0; i < p.nvars(); ++i)
      for (const auto& [rc, v] : b.A[i].entries()) {
        auto [it, fresh] =
            rows.try_emplace(rc, Eigen::VectorXd::Zero(p.nvars()));
        it->second(i) += v;
      }
    for (auto& [rc, row] : rows) eq_rows.push_back(row);
  }
  if (!eq_rows.empty() && p.nvars() > 0) {
    Eigen::MatrixXd et(p.nvars(), eq_rows.size());
    for (size_t k = 0; k < eq_rows.size(); ++k) et.col(k) = eq_rows[k];
    d -= et * et.completeOrthogonalDecomposition().solve(d);
  }
  const double cnorm = p.nvars() ? p.c.cwiseAbs().maxCoeff() : 0.0;
  sol.dual_res = (p.nvars() ? d.cwiseAbs().maxCoeff() : 0.0) / (1.0 + cnorm);

  sol.primal_obj = (p.nvars() ? p.c.dot(sol.x) : 0.0) + p.obj_const;
  double dob = p.obj_const;
  for (size_t bi = 0; bi < p.blocks.size(); ++bi)
    if (sol.Y[bi].size() > 0) dob += p.blocks[bi].C.inner(sol.Y[bi]);
  sol.dual_obj = dob;
  sol.rel_gap = std::abs(sol.primal_obj - sol.dual_obj) /
                (1.0 + std::abs(sol.primal_obj) + std::abs(sol.dual_obj));
}

}  // namespace pmsos
