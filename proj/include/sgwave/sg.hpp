#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sgwave/dd.hpp"
#include "sgwave/det_loop.hpp"
#include "sgwave/newmark.hpp"
#include "sgwave/pce.hpp"

namespace sgwave {

struct SgOptions {
  double tol = 1e-8;
  int max_iter = 500;
  int threads = 1;
  bool store_full = false;
  std::vector<Index> probe_nodes;
};

struct SgHistory {
  std::vector<double> times;
  Eigen::MatrixXd probe_mean, probe_std;       // n_probes x (n_steps + 1)
  std::vector<Eigen::MatrixXd> probe_coeffs;   // per probe: (N+1) x (n_steps + 1)
  std::vector<Eigen::VectorXd> full_state;     // flattened (N+1)*n_dofs, if requested
  std::vector<PcgReport> reports;

  double mean_iterations() const;
};

// mean = u_0, variance = sum_{j>=1} u_j^2 (normalized basis).
void moments(const Eigen::VectorXd& flat_state, Index n_dofs, Eigen::VectorXd& mean,
             Eigen::VectorXd& std_dev);

// [F]_k = <f psi_k>: deterministic forcing populates block 0 only.
Eigen::VectorXd stochastic_rhs(const Eigen::VectorXd& f, int n_terms);

/// Intrusive stochastic Galerkin solver. Keeps the deterministic blocks
/// K_i per subdomain plus the sparse triple-product tensor and applies the
/// block operators matrix-free; interface solves use the probabilistic
/// two-level Neumann-Neumann preconditioner.
class SgSolver {
 public:
  SgSolver(const Mesh& mesh, const Partition& partition, const CoefficientField& coeff,
           const TripleTensor& tensor, double density, double alpha0, double alpha1,
           NewmarkParams params, SgOptions options);

  SgHistory run(const Eigen::VectorXd& u0_nodal, const Eigen::VectorXd& v0_nodal, int n_steps,
                const ForceFn& force = nullptr);

  int n_terms() const { return n_terms_; }
  const DirichletReduction& reduction() const { return red_; }
  const SchurSystem& schur() const { return schur_; }
  bool uses_direct() const { return direct_; }

  // Global block actions on flattened states (exposed for oracle tests).
  Eigen::VectorXd apply_block_mass(const Eigen::VectorXd& flat) const;
  Eigen::VectorXd apply_block_stiffness(const Eigen::VectorXd& flat) const;
  Eigen::VectorXd apply_block_transient(const Eigen::VectorXd& flat) const;

 private:
  struct Local {
    SparseSym mass;
    std::vector<SparseSym> k_terms;           // one per input PCE term
    SparseSym a_ig;                           // flattened K~ interior x iface
    std::unique_ptr<Eigen::SimplicialLLT<SparseSym>> ii_llt;  // coupled interior block
  };

  void assemble_subdomains();
  Eigen::VectorXd local_force(int s, const Eigen::VectorXd& um, const Eigen::VectorXd& uc,
                              const Eigen::VectorXd& f_next) const;
  Eigen::VectorXd step_rhs_and_solve(const StateTriple& state, const Eigen::VectorXd& f_next,
                                     PcgReport* report);

  Mesh mesh_;
  Partition part_;
  DirichletReduction red_;
  InterfaceLayout layout_;
  CoefficientField coeff_;
  TripleTensor tensor_;
  int n_terms_;  // output PCE terms N+1
  double density_, alpha0_, alpha1_;
  NewmarkParams params_;
  SgOptions opt_;
  bool direct_ = false;

  // scalar factors of the transient blocks:
  // K~_jk = delta_jk * mass_scale * M + stiff_scale * sum_i G_ijk K_i
  double mass_scale_ = 0.0, stiff_scale_ = 0.0;

  std::vector<SparseSym> k_red_;  // global reduced stiffness per input term
  SparseSym mass_red_;
  Eigen::SimplicialLLT<SparseSym> mass_llt_;
  Eigen::SimplicialLLT<SparseSym> direct_llt_;  // flattened global K~ (direct path)
  std::vector<Local> locals_;
  SchurSystem schur_;
};

}  // namespace sgwave
