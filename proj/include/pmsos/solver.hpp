#pragma once

// Backend adapter for SDP solving.  The library ships one in-tree binding
// (the dense interior-point method in ipm.hpp); external solvers can be
// plugged in either by implementing SdpBackend or by going through the SDPA
// sparse file format in sdpa_io.hpp.
//
// solve_sdp() always re-derives residuals from the problem data and will
// downgrade a backend's status claim if they disagree; a backend failure is
// reported through SolveStatus, never an exception.

#include <memory>
#include <stdexcept>
#include <string>

#include "pmsos/ipm.hpp"
#include "pmsos/sdp.hpp"

namespace pmsos {

class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const SdpProblem& p,
                            const SolveOptions& opt) const = 0;
};

class IpmBackend final : public SdpBackend {
 public:
  std::string name() const override { return "ipm"; }
  SdpSolution solve(const SdpProblem& p,
                    const SolveOptions& opt) const override {
    return solve_ipm(p, opt);
  }
};

inline const SdpBackend& default_backend() {
  static const IpmBackend backend;
  return backend;
}

inline SdpSolution solve_sdp(const SdpProblem& p, const SolveOptions& opt = {},
                             const SdpBackend& backend = default_backend()) {
  SdpSolution sol;
  try {
    sol = backend.solve(p, opt);
  } catch (const std::exception& e) {
    sol.status = SolveStatus::NumericalFailure;
    sol.message = std::string("backend ") + backend.name() + " threw: " + e.what();
    sol.x = Eigen::VectorXd::Zero(p.nvars());
    sol.Y.assign(p.blocks.size(), Eigen::MatrixXd());
    for (size_t bi = 0; bi < p.blocks.size(); ++bi)
      sol.Y[bi] = Eigen::MatrixXd::Zero(p.blocks[bi].size, p.blocks[bi].size);
    recompute_residuals(p, sol);
    return sol;
  }

  recompute_residuals(p, sol);
  if (sol.usable()) {
    // Trust, then verify: the recomputed residuals decide the final label.
    const double worst =
        std::max({sol.primal_res, sol.dual_res, sol.rel_gap});
    if (worst > 1e-3) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message += " (recomputed residuals too large: " +
                     std::to_string(worst) + ")";
    } else if (worst > 10.0 * opt.tol) {
      sol.status = SolveStatus::NearOptimal;
    }
  }
  return sol;
}

}  // namespace pmsos
