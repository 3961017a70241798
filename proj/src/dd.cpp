#include "sgwave/dd.hpp"

#include <algorithm>
#include <stdexcept>

#include "sgwave/parallel.hpp"

namespace sgwave {

InterfaceLayout build_interface_layout(const Mesh&, const Partition& partition,
                                       const DirichletReduction& red) {
  InterfaceLayout layout;
  // global interface dofs, ascending by reduced dof id
  std::vector<Index> iface_pos_of_dof(red.n_dofs(), -1);
  for (Index node : partition.global_interface) {
    const Index dof = red.node_to_dof[node];
    if (dof >= 0) layout.iface_dofs.push_back(dof);
  }
  std::sort(layout.iface_dofs.begin(), layout.iface_dofs.end());
  for (size_t q = 0; q < layout.iface_dofs.size(); ++q) {
    iface_pos_of_dof[layout.iface_dofs[q]] = static_cast<Index>(q);
  }
  std::vector<Index> corner_pos_of_dof(red.n_dofs(), -1);
  for (Index node : partition.corner_nodes) {
    const Index dof = red.node_to_dof[node];
    if (dof >= 0) layout.corner_dofs.push_back(dof);
  }
  std::sort(layout.corner_dofs.begin(), layout.corner_dofs.end());
  for (size_t q = 0; q < layout.corner_dofs.size(); ++q) {
    corner_pos_of_dof[layout.corner_dofs[q]] = static_cast<Index>(q);
  }

  layout.sub.resize(partition.n_sub);
  for (int s = 0; s < partition.n_sub; ++s) {
    SubdomainDofs& sd = layout.sub[s];
    for (Index node : partition.interior_nodes[s]) {
      const Index dof = red.node_to_dof[node];
      if (dof >= 0) sd.interior.push_back(dof);
    }
    for (Index node : partition.interface_nodes[s]) {
      const Index dof = red.node_to_dof[node];
      if (dof >= 0) sd.iface.push_back(dof);
    }
    std::sort(sd.interior.begin(), sd.interior.end());
    std::sort(sd.iface.begin(), sd.iface.end());

    sd.weights.resize(sd.iface.size());
    for (size_t k = 0; k < sd.iface.size(); ++k) {
      const Index dof = sd.iface[k];
      sd.iface_pos.push_back(iface_pos_of_dof[dof]);
      const Index node = red.dof_to_node[dof];
      sd.weights[static_cast<Index>(k)] = 1.0 / partition.multiplicity_of(node);
      if (corner_pos_of_dof[dof] >= 0) {
        sd.c_local.push_back(static_cast<Index>(k));
        sd.corner_pos.push_back(corner_pos_of_dof[dof]);
      } else {
        sd.r_local.push_back(static_cast<Index>(k));
      }
    }
    sd.loc_dofs = sd.interior;
    sd.loc_dofs.insert(sd.loc_dofs.end(), sd.iface.begin(), sd.iface.end());
  }
  return layout;
}

Eigen::LLT<Eigen::MatrixXd> llt_regularized(Eigen::MatrixXd mat) {
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() == Eigen::Success || mat.rows() == 0) return llt;
  const double shift = 1e-10 * mat.trace() / mat.rows();
  mat.diagonal().array() += shift;
  llt.compute(mat);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("llt_regularized: factorization failed after regularization");
  }
  return llt;
}

LocalSchur make_flat_maps(const SubdomainDofs& sd, int n_blocks, Index n_iface, Index n_corner) {
  LocalSchur ls;
  const Index ng = sd.n_iface();
  const Index nc = static_cast<Index>(sd.c_local.size());
  ls.gmap.reserve(static_cast<size_t>(n_blocks) * ng);
  ls.weights.resize(static_cast<Index>(n_blocks) * ng);
  for (int j = 0; j < n_blocks; ++j) {
    for (Index p = 0; p < ng; ++p) {
      ls.gmap.push_back(j * n_iface + sd.iface_pos[p]);
      ls.weights[j * ng + p] = sd.weights[p];
    }
    for (Index r : sd.r_local) ls.r_idx.push_back(j * ng + r);
    for (Index c = 0; c < nc; ++c) {
      ls.c_idx.push_back(j * ng + sd.c_local[c]);
      ls.corner_gmap.push_back(j * n_corner + sd.corner_pos[c]);
    }
  }
  return ls;
}

void SchurSystem::finalize(bool build_nn1) {
  const int ns = static_cast<int>(locals.size());
  std::vector<Eigen::MatrixXd> coarse_contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    LocalSchur& ls = locals[s];
    const Index nr = static_cast<Index>(ls.r_idx.size());
    const Index nc = static_cast<Index>(ls.c_idx.size());
    Eigen::MatrixXd srr(nr, nr), scc(nc, nc);
    ls.S_rc.resize(nr, nc);
    for (Index a = 0; a < nr; ++a) {
      for (Index b = 0; b < nr; ++b) srr(a, b) = ls.S(ls.r_idx[a], ls.r_idx[b]);
      for (Index b = 0; b < nc; ++b) ls.S_rc(a, b) = ls.S(ls.r_idx[a], ls.c_idx[b]);
    }
    for (Index a = 0; a < nc; ++a) {
      for (Index b = 0; b < nc; ++b) scc(a, b) = ls.S(ls.c_idx[a], ls.c_idx[b]);
    }
    ls.Srr_llt = llt_regularized(srr);
    if (build_nn1) ls.S_llt = llt_regularized(ls.S);
    // local coarse block S_cc - S_cr S_rr^-1 S_rc
    if (nc > 0) {
      if (nr > 0) {
        coarse_contrib[s] = scc - ls.S_rc.transpose() * ls.Srr_llt.solve(ls.S_rc);
      } else {
        coarse_contrib[s] = scc;
      }
    }
  });

  if (n_corner > 0) {
    fcc_ = Eigen::MatrixXd::Zero(n_corner, n_corner);
    for (int s = 0; s < ns; ++s) {
      const LocalSchur& ls = locals[s];
      const Index nc = static_cast<Index>(ls.c_idx.size());
      for (Index a = 0; a < nc; ++a) {
        for (Index b = 0; b < nc; ++b) {
          fcc_(ls.corner_gmap[a], ls.corner_gmap[b]) += coarse_contrib[s](a, b);
        }
      }
    }
    fcc_llt_ = llt_regularized(fcc_);
    has_coarse_ = true;
  }
}

Eigen::VectorXd SchurSystem::matvec(const Eigen::VectorXd& x) const {
  const int ns = static_cast<int>(locals.size());
  std::vector<Eigen::VectorXd> contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    const LocalSchur& ls = locals[s];
    Eigen::VectorXd xl(ls.n_flat());
    for (Index k = 0; k < ls.n_flat(); ++k) xl[k] = x[ls.gmap[k]];
    contrib[s] = ls.S * xl;
  });
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_global);
  for (int s = 0; s < ns; ++s) {
    const LocalSchur& ls = locals[s];
    for (Index k = 0; k < ls.n_flat(); ++k) y[ls.gmap[k]] += contrib[s][k];
  }
  return y;
}

Eigen::VectorXd SchurSystem::apply_lumped(const Eigen::VectorXd& r) const {
  const int ns = static_cast<int>(locals.size());
  std::vector<Eigen::VectorXd> contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    const LocalSchur& ls = locals[s];
    Eigen::VectorXd rl(ls.n_flat());
    for (Index k = 0; k < ls.n_flat(); ++k) rl[k] = r[ls.gmap[k]];
    rl.array() *= ls.weights.array();
    Eigen::VectorXd zl = gg_action(s, rl);
    zl.array() *= ls.weights.array();
    contrib[s] = zl;
  });
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n_global);
  for (int s = 0; s < ns; ++s) {
    const LocalSchur& ls = locals[s];
    for (Index k = 0; k < ls.n_flat(); ++k) z[ls.gmap[k]] += contrib[s][k];
  }
  return z;
}

Eigen::VectorXd SchurSystem::apply_nn1(const Eigen::VectorXd& r) const {
  const int ns = static_cast<int>(locals.size());
  std::vector<Eigen::VectorXd> contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    const LocalSchur& ls = locals[s];
    Eigen::VectorXd rl(ls.n_flat());
    for (Index k = 0; k < ls.n_flat(); ++k) rl[k] = r[ls.gmap[k]];
    rl.array() *= ls.weights.array();
    Eigen::VectorXd zl = ls.S_llt.solve(rl);
    zl.array() *= ls.weights.array();
    contrib[s] = zl;
  });
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n_global);
  for (int s = 0; s < ns; ++s) {
    const LocalSchur& ls = locals[s];
    for (Index k = 0; k < ls.n_flat(); ++k) z[ls.gmap[k]] += contrib[s][k];
  }
  return z;
}

Eigen::VectorXd SchurSystem::apply_nn2(const Eigen::VectorXd& r) const {
  const int ns = static_cast<int>(locals.size());
  std::vector<Eigen::VectorXd> fr(ns), fc(ns), t(ns), dc_contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    const LocalSchur& ls = locals[s];
    Eigen::VectorXd rl(ls.n_flat());
    for (Index k = 0; k < ls.n_flat(); ++k) rl[k] = r[ls.gmap[k]];
    rl.array() *= ls.weights.array();
    const Index nr = static_cast<Index>(ls.r_idx.size());
    const Index nc = static_cast<Index>(ls.c_idx.size());
    fr[s].resize(nr);
    fc[s].resize(nc);
    for (Index a = 0; a < nr; ++a) fr[s][a] = rl[ls.r_idx[a]];
    for (Index a = 0; a < nc; ++a) fc[s][a] = rl[ls.c_idx[a]];
    t[s] = nr > 0 ? ls.Srr_llt.solve(fr[s]).eval() : Eigen::VectorXd();
    if (nc > 0) {
      dc_contrib[s] = fc[s];
      if (nr > 0) dc_contrib[s] -= ls.S_rc.transpose() * t[s];
    }
  });

  Eigen::VectorXd uc;
  if (has_coarse_) {
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(n_corner);
    for (int s = 0; s < ns; ++s) {
      const LocalSchur& ls = locals[s];
      for (size_t a = 0; a < ls.corner_gmap.size(); ++a) dc[ls.corner_gmap[a]] += dc_contrib[s][a];
    }
    uc = fcc_llt_.solve(dc);
  }

  std::vector<Eigen::VectorXd> contrib(ns);
  parallel_for(ns, n_threads, [&](int s) {
    const LocalSchur& ls = locals[s];
    const Index nr = static_cast<Index>(ls.r_idx.size());
    const Index nc = static_cast<Index>(ls.c_idx.size());
    Eigen::VectorXd zl = Eigen::VectorXd::Zero(ls.n_flat());
    Eigen::VectorXd ur = t[s];
    if (has_coarse_ && nc > 0) {
      Eigen::VectorXd ucl(nc);
      for (Index a = 0; a < nc; ++a) ucl[a] = uc[ls.corner_gmap[a]];
      if (nr > 0) ur -= ls.Srr_llt.solve(ls.S_rc * ucl);
      for (Index a = 0; a < nc; ++a) zl[ls.c_idx[a]] = ucl[a];
    }
    for (Index a = 0; a < nr; ++a) zl[ls.r_idx[a]] = ur[a];
    zl.array() *= ls.weights.array();
    contrib[s] = zl;
  });
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n_global);
  for (int s = 0; s < ns; ++s) {
    const LocalSchur& ls = locals[s];
    for (Index k = 0; k < ls.n_flat(); ++k) z[ls.gmap[k]] += contrib[s][k];
  }
  return z;
}

PrecondKind precond_from_string(const std::string& name) {
  if (name == "lumped") return PrecondKind::lumped;
  if (name == "nn1") return PrecondKind::nn1;
  if (name == "nn2") return PrecondKind::nn2;
  throw std::invalid_argument("unknown preconditioner: " + name);
}

LinearOp make_preconditioner(const SchurSystem& system, PrecondKind kind) {
  switch (kind) {
    case PrecondKind::lumped:
      return [&system](const Eigen::VectorXd& r) { return system.apply_lumped(r); };
    case PrecondKind::nn1:
      return [&system](const Eigen::VectorXd& r) { return system.apply_nn1(r); };
    case PrecondKind::nn2:
    default:
      return [&system](const Eigen::VectorXd& r) { return system.apply_nn2(r); };
  }
}

}  // namespace sgwave
