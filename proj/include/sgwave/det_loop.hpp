#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgwave/dd.hpp"
#include "sgwave/newmark.hpp"

namespace sgwave {

struct SolveOptions {
  PrecondKind precond = PrecondKind::nn2;
  double tol = 1e-8;
  int max_iter = 500;
  int threads = 1;
  bool store_full = false;
  std::vector<Index> probe_nodes;  // mesh node ids
};

struct TimeHistory {
  std::vector<double> times;                  // t_0 .. t_N
  Eigen::MatrixXd probe_u, probe_v, probe_a;  // n_probes x (n_steps + 1)
  std::vector<Eigen::VectorXd> full_u;        // reduced dof fields, if requested
  std::vector<PcgReport> reports;             // per solved step (DD path only)

  double mean_iterations() const;
};

// f(t) -> nodal force over all mesh nodes; null means zero forcing.
using ForceFn = std::function<Eigen::VectorXd(double)>;

/// Deterministic acoustic solver: Newmark stepping with the interface Schur
/// system solved by preconditioned CG, or a sparse direct factorization when
/// the partition is a single subdomain.
class DetSolver {
 public:
  DetSolver(const Mesh& mesh, const Partition& partition, const Eigen::VectorXd& speed_sq,
            double density, double alpha0, double alpha1, NewmarkParams params,
            SolveOptions options);

  TimeHistory run(const Eigen::VectorXd& u0_nodal, const Eigen::VectorXd& v0_nodal, int n_steps,
                  const ForceFn& force = nullptr);

  const DirichletReduction& reduction() const { return red_; }
  const InterfaceLayout& layout() const { return layout_; }
  const SchurSystem& schur() const { return schur_; }
  bool uses_direct() const { return direct_; }
  void set_preconditioner(PrecondKind kind) { opt_.precond = kind; }
  void set_tolerance(double tol) { opt_.tol = tol; }

 private:
  struct Local {
    SparseSym mass, stiffness;              // subdomain matrices on local slots
    SparseSym ktilde_ig;                    // interior x iface block of K~
    std::unique_ptr<Eigen::SimplicialLLT<SparseSym>> ii_llt;  // K~_II factorization
    SparseSym ktilde_gg;                    // iface block (lumped preconditioner)
  };

  void assemble_subdomains();
  Eigen::VectorXd step_rhs_and_solve(const StateTriple& state, const Eigen::VectorXd& f_next,
                                     PcgReport* report);

  Mesh mesh_;
  Partition part_;
  DirichletReduction red_;
  InterfaceLayout layout_;
  Eigen::VectorXd speed_sq_;
  double density_, alpha0_, alpha1_;
  NewmarkParams params_;
  SolveOptions opt_;
  bool direct_ = false;

  SparseSym mass_red_, damping_red_, stiffness_red_;
  Eigen::SimplicialLLT<SparseSym> mass_llt_;
  Eigen::SimplicialLLT<SparseSym> ktilde_llt_;  // direct path
  std::vector<Local> locals_;
  SchurSystem schur_;
};

}  // namespace sgwave
