#pragma once

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "sgwave/assembly.hpp"
#include "sgwave/partition.hpp"
#include "sgwave/pcg.hpp"

namespace sgwave {

/// Dof-level view of one subdomain after Dirichlet elimination. Local slots
/// order interior dofs first, then interface dofs, both ascending.
struct SubdomainDofs {
  std::vector<Index> interior;     // reduced dof ids
  std::vector<Index> iface;        // reduced dof ids
  std::vector<Index> iface_pos;    // local iface k -> global interface position (R_s)
  std::vector<Index> r_local;      // local iface positions classified remaining
  std::vector<Index> c_local;      // local iface positions classified corner
  std::vector<Index> corner_pos;   // local corner k -> global corner position (B_c^s)
  Eigen::VectorXd weights;         // D_s on the local interface
  std::vector<Index> loc_dofs;     // local slot -> reduced dof id

  Index n_interior() const { return static_cast<Index>(interior.size()); }
  Index n_iface() const { return static_cast<Index>(iface.size()); }
};

struct InterfaceLayout {
  std::vector<Index> iface_dofs;   // reduced dof ids on the global interface
  std::vector<Index> corner_dofs;  // reduced dof ids of corner nodes
  std::vector<SubdomainDofs> sub;

  Index n_iface() const { return static_cast<Index>(iface_dofs.size()); }
  Index n_corner() const { return static_cast<Index>(corner_dofs.size()); }
};

InterfaceLayout build_interface_layout(const Mesh& mesh, const Partition& partition,
                                       const DirichletReduction& red);

// Cholesky with a trace-scaled 1e-10 shift retry; the shift is a safety net
// for semi-definite local Neumann problems.
Eigen::LLT<Eigen::MatrixXd> llt_regularized(Eigen::MatrixXd mat);

/// Dense local Schur complement data of one subdomain, flattened over PCE
/// blocks (deterministic problems use one block). Index maps address the
/// flat global interface / corner vectors.
struct LocalSchur {
  Eigen::MatrixXd S;
  std::vector<Index> gmap;         // flat local iface -> flat global iface
  Eigen::VectorXd weights;         // flat local D_s
  std::vector<Index> r_idx;        // flat local positions, remaining
  std::vector<Index> c_idx;        // flat local positions, corner
  std::vector<Index> corner_gmap;  // aligned with c_idx -> flat global corner
  Eigen::MatrixXd S_rc;
  Eigen::LLT<Eigen::MatrixXd> Srr_llt;
  Eigen::LLT<Eigen::MatrixXd> S_llt;  // full local Schur (one-level NN only)

  Index n_flat() const { return static_cast<Index>(gmap.size()); }
};

// Replicates the dof maps of a subdomain over n_blocks PCE terms (term-major
// flattening); the S matrices are filled by the owner.
LocalSchur make_flat_maps(const SubdomainDofs& sd, int n_blocks, Index n_iface, Index n_corner);

/// Assembled interface problem S u = g with lumped / one-level NN / two-level
/// NN preconditioner applications. Subdomain work runs concurrently; all
/// reductions are in fixed subdomain order.
class SchurSystem {
 public:
  Index n_global = 0;  // flat global interface size
  Index n_corner = 0;  // flat global corner size
  int n_threads = 1;
  std::vector<LocalSchur> locals;

  // K~_GG action for the lumped preconditioner, local flat vector in/out.
  std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)> gg_action;

  // Splits r/c blocks, factors S_rr (and optionally full S), assembles and
  // factors the coarse corner operator F_cc.
  void finalize(bool build_nn1);

  Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_lumped(const Eigen::VectorXd& r) const;
  Eigen::VectorXd apply_nn1(const Eigen::VectorXd& r) const;
  Eigen::VectorXd apply_nn2(const Eigen::VectorXd& r) const;

  const Eigen::MatrixXd& coarse_operator() const { return fcc_; }

 private:
  Eigen::MatrixXd fcc_;
  Eigen::LLT<Eigen::MatrixXd> fcc_llt_;
  bool has_coarse_ = false;
};

enum class PrecondKind { lumped, nn1, nn2 };

PrecondKind precond_from_string(const std::string& name);

LinearOp make_preconditioner(const SchurSystem& system, PrecondKind kind);

}  // namespace sgwave
