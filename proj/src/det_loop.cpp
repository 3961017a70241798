#include "sgwave/det_loop.hpp"

#include <numeric>
#include <stdexcept>

#include "sgwave/parallel.hpp"

namespace sgwave {

double TimeHistory::mean_iterations() const {
  if (reports.empty()) return 0.0;
  double sum = 0.0;
  for (const PcgReport& r : reports) sum += r.iterations;
  return sum / reports.size();
}

namespace {

// Element matrices of one subdomain scattered onto its local slots.
void assemble_local(const Mesh& mesh, const Partition& part, const DirichletReduction& red,
                    const SubdomainDofs& sd, const Eigen::VectorXd& coeff, double density,
                    int s, SparseSym& mass, SparseSym& stiffness) {
  std::vector<Index> slot_of_dof(red.n_dofs(), -1);
  for (size_t k = 0; k < sd.loc_dofs.size(); ++k) {
    slot_of_dof[sd.loc_dofs[k]] = static_cast<Index>(k);
  }
  const Index n_loc = static_cast<Index>(sd.loc_dofs.size());
  std::vector<Eigen::Triplet<double>> tm, tk;
  const int nv = mesh.dim + 1;
  Eigen::MatrixXd me(nv, nv), ke(nv, nv);
  for (Index e : part.subdomain_elements[s]) {
    if (mesh.dim == 1) {
      const Index i = mesh.elements(e, 0), j = mesh.elements(e, 1);
      const double len = std::abs(mesh.nodes(j, 0) - mesh.nodes(i, 0));
      const double c = 0.5 * (coeff[i] + coeff[j]) / len;
      ke << c, -c, -c, c;
      const double m = density * len / 6.0;
      me << 2 * m, m, m, 2 * m;
    } else {
      const Index n0 = mesh.elements(e, 0), n1 = mesh.elements(e, 1), n2 = mesh.elements(e, 2);
      const double x0 = mesh.nodes(n0, 0), y0 = mesh.nodes(n0, 1);
      const double x1 = mesh.nodes(n1, 0), y1 = mesh.nodes(n1, 1);
      const double x2 = mesh.nodes(n2, 0), y2 = mesh.nodes(n2, 1);
      const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
      const double area = 0.5 * det;
      const double b[3] = {y1 - y2, y2 - y0, y0 - y1};
      const double c[3] = {x2 - x1, x0 - x2, x1 - x0};
      const double cavg = (coeff[n0] + coeff[n1] + coeff[n2]) / 3.0;
      for (int a = 0; a < 3; ++a) {
        for (int bb = 0; bb < 3; ++bb) {
          ke(a, bb) = cavg * (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
        }
      }
      const double m = density * area / 12.0;
      me << 2 * m, m, m, m, 2 * m, m, m, m, 2 * m;
    }
    for (int a = 0; a < nv; ++a) {
      const Index da = red.node_to_dof[mesh.elements(e, a)];
      if (da < 0) continue;
      const Index sa = slot_of_dof[da];
      for (int b = 0; b < nv; ++b) {
        const Index db = red.node_to_dof[mesh.elements(e, b)];
        if (db < 0) continue;
        tm.emplace_back(sa, slot_of_dof[db], me(a, b));
        tk.emplace_back(sa, slot_of_dof[db], ke(a, b));
      }
    }
  }
  mass.resize(n_loc, n_loc);
  mass.setFromTriplets(tm.begin(), tm.end());
  stiffness.resize(n_loc, n_loc);
  stiffness.setFromTriplets(tk.begin(), tk.end());
}

SparseSym sparse_block(const SparseSym& mat, Index row0, Index rows, Index col0, Index cols) {
  std::vector<Eigen::Triplet<double>> trips;
  for (Index k = col0; k < col0 + cols; ++k) {
    for (SparseSym::InnerIterator it(mat, k); it; ++it) {
      if (it.row() >= row0 && it.row() < row0 + rows) {
        trips.emplace_back(it.row() - row0, it.col() - col0, it.value());
      }
    }
  }
  SparseSym out(rows, cols);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

DetSolver::DetSolver(const Mesh& mesh, const Partition& partition, const Eigen::VectorXd& speed_sq,
                     double density, double alpha0, double alpha1, NewmarkParams params,
                     SolveOptions options)
    : mesh_(mesh),
      part_(partition),
      red_(make_dirichlet_reduction(mesh)),
      layout_(build_interface_layout(mesh, partition, red_)),
      speed_sq_(speed_sq),
      density_(density),
      alpha0_(alpha0),
      alpha1_(alpha1),
      params_(params),
      opt_(std::move(options)) {
  direct_ = partition.n_sub == 1 || layout_.n_iface() == 0;

  const SparseSym mass_full = assemble_mass(mesh, density);
  const SparseSym stiff_full = assemble_stiffness(mesh, speed_sq);
  mass_red_ = red_.reduce(mass_full);
  stiffness_red_ = red_.reduce(stiff_full);
  damping_red_ = rayleigh_damping(mass_red_, stiffness_red_, alpha0, alpha1);
  mass_llt_.compute(mass_red_);
  if (mass_llt_.info() != Eigen::Success) throw std::runtime_error("mass factorization failed");

  if (direct_) {
    const SparseSym kt = transient_stiffness(mass_red_, damping_red_, stiffness_red_, params_);
    ktilde_llt_.compute(kt);
    if (ktilde_llt_.info() != Eigen::Success) {
      throw std::runtime_error("transient stiffness factorization failed");
    }
  } else {
    assemble_subdomains();
  }
}

void DetSolver::assemble_subdomains() {
  const int ns = part_.n_sub;
  locals_.resize(ns);
  schur_.n_global = layout_.n_iface();
  schur_.n_corner = layout_.n_corner();
  schur_.n_threads = opt_.threads;
  schur_.locals.resize(ns);

  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    Local& loc = locals_[s];
    assemble_local(mesh_, part_, red_, sd, speed_sq_, density_, s, loc.mass, loc.stiffness);

    const double mf = params_.mass_factor() + params_.damping_factor() * alpha0_;
    const double kf = 1.0 + params_.damping_factor() * alpha1_;
    SparseSym ktilde = mf * loc.mass + kf * loc.stiffness;

    const Index ni = sd.n_interior(), ng = sd.n_iface();
    const SparseSym kt_ii = sparse_block(ktilde, 0, ni, 0, ni);
    loc.ktilde_ig = sparse_block(ktilde, 0, ni, ni, ng);
    loc.ktilde_gg = sparse_block(ktilde, ni, ng, ni, ng);
    if (ni > 0) {
      loc.ii_llt = std::make_unique<Eigen::SimplicialLLT<SparseSym>>();
      loc.ii_llt->compute(kt_ii);
      if (loc.ii_llt->info() != Eigen::Success) {
        throw std::runtime_error("K~_II factorization failed (subdomain " + std::to_string(s) + ")");
      }
    }

    // dense local Schur, columnwise through the interior solver
    LocalSchur ls = make_flat_maps(sd, 1, layout_.n_iface(), layout_.n_corner());
    ls.S = Eigen::MatrixXd(loc.ktilde_gg);
    if (ni > 0 && ng > 0) {
      const Eigen::MatrixXd ig = Eigen::MatrixXd(loc.ktilde_ig);
      const Eigen::MatrixXd x = loc.ii_llt->solve(ig);
      ls.S.noalias() -= ig.transpose() * x;
    }
    schur_.locals[s] = std::move(ls);
  });

  schur_.gg_action = [this](int s, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return locals_[s].ktilde_gg * v;
  };
  schur_.finalize(true);
}

Eigen::VectorXd DetSolver::step_rhs_and_solve(const StateTriple& state,
                                              const Eigen::VectorXd& f_next, PcgReport* report) {
  if (direct_) {
    Eigen::VectorXd rhs = newmark_rhs(state, mass_red_, damping_red_, params_,
                                      Eigen::VectorXd::Zero(red_.n_dofs()));
    if (f_next.size() > 0) rhs += f_next;
    return ktilde_llt_.solve(rhs);
  }

  const Eigen::VectorXd um = newmark_um(state, params_);
  const Eigen::VectorXd uc = newmark_uc(state, um, params_);

  const int ns = part_.n_sub;
  std::vector<Eigen::VectorXd> g_contrib(ns), y_interior(ns);
  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    const Local& loc = locals_[s];
    const Index ni = sd.n_interior(), ng = sd.n_iface();
    Eigen::VectorXd um_loc(ni + ng), uc_loc(ni + ng);
    for (Index k = 0; k < ni + ng; ++k) {
      um_loc[k] = um[sd.loc_dofs[k]];
      uc_loc[k] = uc[sd.loc_dofs[k]];
    }
    // f~^s = f_ext contribution + M^s u~_m + C^s u~_c, with
    // C^s u~_c = alpha0 M^s u~_c + alpha1 K^s u~_c
    Eigen::VectorXd f_loc = loc.mass * (um_loc + alpha0_ * uc_loc) +
                            loc.stiffness * (alpha1_ * uc_loc);
    if (f_next.size() > 0) {
      for (Index k = 0; k < ni; ++k) f_loc[k] += f_next[sd.interior[k]];
      for (Index k = 0; k < ng; ++k) f_loc[ni + k] += sd.weights[k] * f_next[sd.iface[k]];
    }
    Eigen::VectorXd g = f_loc.tail(ng);
    if (ni > 0) {
      y_interior[s] = loc.ii_llt->solve(f_loc.head(ni));
      g.noalias() -= loc.ktilde_ig.transpose() * y_interior[s];
    }
    g_contrib[s] = g;
  });

  Eigen::VectorXd g_iface = Eigen::VectorXd::Zero(layout_.n_iface());
  for (int s = 0; s < ns; ++s) {
    const SubdomainDofs& sd = layout_.sub[s];
    for (Index k = 0; k < sd.n_iface(); ++k) g_iface[sd.iface_pos[k]] += g_contrib[s][k];
  }

  const LinearOp matvec = [this](const Eigen::VectorXd& x) { return schur_.matvec(x); };
  auto [u_iface, rep] = pcg(matvec, make_preconditioner(schur_, opt_.precond), g_iface, opt_.tol,
                            opt_.max_iter);
  if (report) *report = std::move(rep);

  Eigen::VectorXd u_next(red_.n_dofs());
  for (Index q = 0; q < layout_.n_iface(); ++q) u_next[layout_.iface_dofs[q]] = u_iface[q];
  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    const Local& loc = locals_[s];
    const Index ni = sd.n_interior(), ng = sd.n_iface();
    if (ni == 0) return;
    Eigen::VectorXd ug(ng);
    for (Index k = 0; k < ng; ++k) ug[k] = u_iface[sd.iface_pos[k]];
    const Eigen::VectorXd ui = y_interior[s] - loc.ii_llt->solve(loc.ktilde_ig * ug);
    for (Index k = 0; k < ni; ++k) u_next[sd.interior[k]] = ui[k];
  });
  return u_next;
}

TimeHistory DetSolver::run(const Eigen::VectorXd& u0_nodal, const Eigen::VectorXd& v0_nodal,
                           int n_steps, const ForceFn& force) {
  StateTriple state;
  state.u = red_.reduce_vector(u0_nodal);
  state.v = red_.reduce_vector(v0_nodal);
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(red_.n_dofs());
  if (force) f0 = red_.reduce_vector(force(0.0));
  state.a = mass_llt_.solve(f0 - damping_red_ * state.v - stiffness_red_ * state.u);
  state.t = 0.0;

  std::vector<Index> probe_dofs;
  for (Index node : opt_.probe_nodes) {
    const Index dof = red_.node_to_dof[node];
    if (dof < 0) throw std::invalid_argument("probe node is constrained");
    probe_dofs.push_back(dof);
  }

  TimeHistory hist;
  const int np = static_cast<int>(probe_dofs.size());
  hist.probe_u.resize(np, n_steps + 1);
  hist.probe_v.resize(np, n_steps + 1);
  hist.probe_a.resize(np, n_steps + 1);
  auto record = [&](int step, const StateTriple& st) {
    hist.times.push_back(st.t);
    for (int p = 0; p < np; ++p) {
      hist.probe_u(p, step) = st.u[probe_dofs[p]];
      hist.probe_v(p, step) = st.v[probe_dofs[p]];
      hist.probe_a(p, step) = st.a[probe_dofs[p]];
    }
    if (opt_.store_full) hist.full_u.push_back(st.u);
  };
  record(0, state);

  Eigen::VectorXd f_next;
  for (int n = 0; n < n_steps; ++n) {
    if (force) f_next = red_.reduce_vector(force(state.t + params_.dt));
    PcgReport rep;
    const Eigen::VectorXd u_next = step_rhs_and_solve(state, f_next, direct_ ? nullptr : &rep);
    if (!direct_) {
      if (!rep.converged) {
        throw std::runtime_error("interface solve did not converge at step " + std::to_string(n));
      }
      hist.reports.push_back(std::move(rep));
    }
    state = newmark_update(state, u_next, params_);
    record(n + 1, state);
  }
  return hist;
}

}  // namespace sgwave
