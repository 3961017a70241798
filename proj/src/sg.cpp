#include "sgwave/sg.hpp"

#include <cmath>
#include <stdexcept>

#include "sgwave/parallel.hpp"

namespace sgwave {

double SgHistory::mean_iterations() const {
  if (reports.empty()) return 0.0;
  double sum = 0.0;
  for (const PcgReport& r : reports) sum += r.iterations;
  return sum / reports.size();
}

void moments(const Eigen::VectorXd& flat_state, Index n_dofs, Eigen::VectorXd& mean,
             Eigen::VectorXd& std_dev) {
  const int n_terms = static_cast<int>(flat_state.size() / n_dofs);
  mean = flat_state.head(n_dofs);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(n_dofs);
  for (int j = 1; j < n_terms; ++j) {
    var.array() += flat_state.segment(j * n_dofs, n_dofs).array().square();
  }
  std_dev = var.cwiseSqrt();
}

Eigen::VectorXd stochastic_rhs(const Eigen::VectorXd& f, int n_terms) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size() * n_terms);
  out.head(f.size()) = f;
  return out;
}

namespace {

// Local element assembly of the subdomain mass and the per-term stiffness
// blocks on local slots (interior first, then interface).
void assemble_local_terms(const Mesh& mesh, const Partition& part, const DirichletReduction& red,
                          const SubdomainDofs& sd, const CoefficientField& coeff, double density,
                          int s, SparseSym& mass, std::vector<SparseSym>& k_terms) {
  std::vector<Index> slot_of_dof(red.n_dofs(), -1);
  for (size_t k = 0; k < sd.loc_dofs.size(); ++k) {
    slot_of_dof[sd.loc_dofs[k]] = static_cast<Index>(k);
  }
  const Index n_loc = static_cast<Index>(sd.loc_dofs.size());
  const int n_in = coeff.n_terms();
  const int nv = mesh.dim + 1;
  std::vector<Eigen::Triplet<double>> tm;
  std::vector<std::vector<Eigen::Triplet<double>>> tk(n_in);

  Eigen::MatrixXd geom(nv, nv), me(nv, nv);
  for (Index e : part.subdomain_elements[s]) {
    // geometric grad-grad matrix and elementwise averages per coefficient term
    if (mesh.dim == 1) {
      const Index i = mesh.elements(e, 0), j = mesh.elements(e, 1);
      const double len = std::abs(mesh.nodes(j, 0) - mesh.nodes(i, 0));
      geom << 1 / len, -1 / len, -1 / len, 1 / len;
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
      for (int a = 0; a < 3; ++a) {
        for (int bb = 0; bb < 3; ++bb) {
          geom(a, bb) = (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
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
        for (int i = 0; i < n_in; ++i) {
          double cavg = 0.0;
          for (int v = 0; v < nv; ++v) cavg += coeff.terms[i][mesh.elements(e, v)];
          cavg /= nv;
          tk[i].emplace_back(sa, slot_of_dof[db], cavg * geom(a, b));
        }
      }
    }
  }
  mass.resize(n_loc, n_loc);
  mass.setFromTriplets(tm.begin(), tm.end());
  k_terms.resize(n_in);
  for (int i = 0; i < n_in; ++i) {
    k_terms[i].resize(n_loc, n_loc);
    k_terms[i].setFromTriplets(tk[i].begin(), tk[i].end());
  }
}

void append_block(std::vector<Eigen::Triplet<double>>& trips, const SparseSym& block,
                  Index row0, Index col0, double scale) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SparseSym::InnerIterator it(block, k); it; ++it) {
      trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
    }
  }
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

SgSolver::SgSolver(const Mesh& mesh, const Partition& partition, const CoefficientField& coeff,
                   const TripleTensor& tensor, double density, double alpha0, double alpha1,
                   NewmarkParams params, SgOptions options)
    : mesh_(mesh),
      part_(partition),
      red_(make_dirichlet_reduction(mesh)),
      layout_(build_interface_layout(mesh, partition, red_)),
      coeff_(coeff),
      tensor_(tensor),
      n_terms_(tensor.n_output),
      density_(density),
      alpha0_(alpha0),
      alpha1_(alpha1),
      params_(params),
      opt_(std::move(options)) {
  if (coeff.n_terms() != tensor.n_input) {
    throw std::invalid_argument("SgSolver: coefficient terms do not match tensor input size");
  }
  direct_ = partition.n_sub == 1 || layout_.n_iface() == 0;
  mass_scale_ = params_.mass_factor() + params_.damping_factor() * alpha0_;
  stiff_scale_ = 1.0 + params_.damping_factor() * alpha1_;

  mass_red_ = red_.reduce(assemble_mass(mesh, density));
  mass_llt_.compute(mass_red_);
  if (mass_llt_.info() != Eigen::Success) throw std::runtime_error("mass factorization failed");
  k_red_.reserve(coeff.n_terms());
  for (int i = 0; i < coeff.n_terms(); ++i) {
    k_red_.push_back(red_.reduce(assemble_stiffness(mesh, coeff.terms[i])));
  }

  if (direct_) {
    const Index n = red_.n_dofs();
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < n_terms_; ++j) append_block(trips, mass_red_, j * n, j * n, mass_scale_);
    for (int i = 0; i < tensor_.n_input; ++i) {
      tensor_.for_each(i, [&](int j, int k, double g) {
        append_block(trips, k_red_[i], k * n, j * n, stiff_scale_ * g);
      });
    }
    SparseSym ktilde(n_terms_ * n, n_terms_ * n);
    ktilde.setFromTriplets(trips.begin(), trips.end());
    direct_llt_.compute(ktilde);
    if (direct_llt_.info() != Eigen::Success) {
      throw std::runtime_error("stochastic transient stiffness factorization failed");
    }
  } else {
    assemble_subdomains();
  }
}

void SgSolver::assemble_subdomains() {
  const int ns = part_.n_sub;
  locals_.resize(ns);
  schur_.n_global = n_terms_ * layout_.n_iface();
  schur_.n_corner = n_terms_ * layout_.n_corner();
  schur_.n_threads = opt_.threads;
  schur_.locals.resize(ns);

  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    Local& loc = locals_[s];
    assemble_local_terms(mesh_, part_, red_, sd, coeff_, density_, s, loc.mass, loc.k_terms);

    const Index ni = sd.n_interior(), ng = sd.n_iface();
    const SparseSym m_ii = sparse_block(loc.mass, 0, ni, 0, ni);
    const SparseSym m_ig = sparse_block(loc.mass, 0, ni, ni, ng);
    const SparseSym m_gg = sparse_block(loc.mass, ni, ng, ni, ng);
    std::vector<SparseSym> k_ii(coeff_.n_terms()), k_ig(coeff_.n_terms()), k_gg(coeff_.n_terms());
    for (int i = 0; i < coeff_.n_terms(); ++i) {
      k_ii[i] = sparse_block(loc.k_terms[i], 0, ni, 0, ni);
      k_ig[i] = sparse_block(loc.k_terms[i], 0, ni, ni, ng);
      k_gg[i] = sparse_block(loc.k_terms[i], ni, ng, ni, ng);
    }

    // flattened interior block and interior x iface coupling of K~
    std::vector<Eigen::Triplet<double>> t_ii, t_ig;
    for (int j = 0; j < n_terms_; ++j) {
      append_block(t_ii, m_ii, j * ni, j * ni, mass_scale_);
      append_block(t_ig, m_ig, j * ni, j * ng, mass_scale_);
    }
    for (int i = 0; i < tensor_.n_input; ++i) {
      tensor_.for_each(i, [&](int j, int k, double g) {
        append_block(t_ii, k_ii[i], k * ni, j * ni, stiff_scale_ * g);
        append_block(t_ig, k_ig[i], k * ni, j * ng, stiff_scale_ * g);
      });
    }
    SparseSym a_ii(n_terms_ * ni, n_terms_ * ni);
    a_ii.setFromTriplets(t_ii.begin(), t_ii.end());
    loc.a_ig.resize(n_terms_ * ni, n_terms_ * ng);
    loc.a_ig.setFromTriplets(t_ig.begin(), t_ig.end());
    if (ni > 0) {
      loc.ii_llt = std::make_unique<Eigen::SimplicialLLT<SparseSym>>();
      loc.ii_llt->compute(a_ii);
      if (loc.ii_llt->info() != Eigen::Success) {
        throw std::runtime_error("stochastic interior factorization failed (subdomain " +
                                 std::to_string(s) + ")");
      }
    }

    // dense flattened local Schur
    LocalSchur ls = make_flat_maps(sd, n_terms_, layout_.n_iface(), layout_.n_corner());
    Eigen::MatrixXd a_gg = Eigen::MatrixXd::Zero(n_terms_ * ng, n_terms_ * ng);
    const Eigen::MatrixXd m_gg_d(m_gg);
    for (int j = 0; j < n_terms_; ++j) {
      a_gg.block(j * ng, j * ng, ng, ng) += mass_scale_ * m_gg_d;
    }
    for (int i = 0; i < tensor_.n_input; ++i) {
      const Eigen::MatrixXd k_gg_d(k_gg[i]);
      tensor_.for_each(i, [&](int j, int k, double g) {
        a_gg.block(k * ng, j * ng, ng, ng) += stiff_scale_ * g * k_gg_d;
      });
    }
    ls.S = std::move(a_gg);
    if (ni > 0 && ng > 0) {
      const Eigen::MatrixXd ig(loc.a_ig);
      const Eigen::MatrixXd x = loc.ii_llt->solve(ig);
      ls.S.noalias() -= ig.transpose() * x;
    }
    schur_.locals[s] = std::move(ls);
  });

  schur_.finalize(false);
}

Eigen::VectorXd SgSolver::local_force(int s, const Eigen::VectorXd& um, const Eigen::VectorXd& uc,
                                      const Eigen::VectorXd& f_next) const {
  const SubdomainDofs& sd = layout_.sub[s];
  const Local& loc = locals_[s];
  const Index n = red_.n_dofs();
  const Index nl = static_cast<Index>(sd.loc_dofs.size());
  const Index ni = sd.n_interior(), ng = sd.n_iface();

  // gather per-term local predictors
  Eigen::MatrixXd um_loc(nl, n_terms_), uc_loc(nl, n_terms_);
  for (int j = 0; j < n_terms_; ++j) {
    for (Index k = 0; k < nl; ++k) {
      um_loc(k, j) = um[j * n + sd.loc_dofs[k]];
      uc_loc(k, j) = uc[j * n + sd.loc_dofs[k]];
    }
  }

  // f~_k = M (um_k + alpha0 uc_k) + alpha1 sum_{ij} G_ijk K_i uc_j + f_ext delta_k0
  Eigen::MatrixXd f(nl, n_terms_);
  for (int j = 0; j < n_terms_; ++j) {
    f.col(j) = loc.mass * (um_loc.col(j) + alpha0_ * uc_loc.col(j));
  }
  if (alpha1_ > 0.0) {
    for (int i = 0; i < tensor_.n_input; ++i) {
      tensor_.for_each(i, [&](int j, int k, double g) {
        f.col(k) += (alpha1_ * g) * (loc.k_terms[i] * uc_loc.col(j));
      });
    }
  }
  if (f_next.size() > 0) {
    for (Index k = 0; k < ni; ++k) f(k, 0) += f_next[sd.interior[k]];
    for (Index k = 0; k < ng; ++k) f(ni + k, 0) += sd.weights[k] * f_next[sd.iface[k]];
  }

  // flatten term-major: interior part then interface part
  Eigen::VectorXd flat(n_terms_ * nl);
  for (int j = 0; j < n_terms_; ++j) {
    flat.segment(j * ni, ni) = f.col(j).head(ni);
    flat.segment(n_terms_ * ni + j * ng, ng) = f.col(j).tail(ng);
  }
  return flat;
}

Eigen::VectorXd SgSolver::step_rhs_and_solve(const StateTriple& state,
                                             const Eigen::VectorXd& f_next, PcgReport* report) {
  const Index n = red_.n_dofs();
  const Eigen::VectorXd um = newmark_um(state, params_);
  const Eigen::VectorXd uc = newmark_uc(state, um, params_);

  if (direct_) {
    Eigen::VectorXd rhs = apply_block_mass(um) + alpha0_ * apply_block_mass(uc) +
                          alpha1_ * apply_block_stiffness(uc);
    if (f_next.size() > 0) rhs.head(n) += f_next;
    return direct_llt_.solve(rhs);
  }

  const int ns = part_.n_sub;
  std::vector<Eigen::VectorXd> g_contrib(ns), y_interior(ns);
  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    const Local& loc = locals_[s];
    const Index ni = sd.n_interior(), ng = sd.n_iface();
    const Eigen::VectorXd f_loc = local_force(s, um, uc, f_next);
    Eigen::VectorXd g = f_loc.tail(n_terms_ * ng);
    if (ni > 0) {
      y_interior[s] = loc.ii_llt->solve(f_loc.head(n_terms_ * ni));
      g.noalias() -= loc.a_ig.transpose() * y_interior[s];
    }
    g_contrib[s] = g;
  });

  Eigen::VectorXd g_iface = Eigen::VectorXd::Zero(schur_.n_global);
  for (int s = 0; s < ns; ++s) {
    const LocalSchur& ls = schur_.locals[s];
    for (Index k = 0; k < ls.n_flat(); ++k) g_iface[ls.gmap[k]] += g_contrib[s][k];
  }

  const LinearOp matvec = [this](const Eigen::VectorXd& x) { return schur_.matvec(x); };
  const LinearOp precond = [this](const Eigen::VectorXd& r) { return schur_.apply_nn2(r); };
  auto [u_iface, rep] = pcg(matvec, precond, g_iface, opt_.tol, opt_.max_iter);
  if (report) *report = std::move(rep);

  Eigen::VectorXd u_next(n_terms_ * n);
  const Index n_ifc = layout_.n_iface();
  for (int j = 0; j < n_terms_; ++j) {
    for (Index q = 0; q < n_ifc; ++q) {
      u_next[j * n + layout_.iface_dofs[q]] = u_iface[j * n_ifc + q];
    }
  }
  parallel_for(ns, opt_.threads, [&](int s) {
    const SubdomainDofs& sd = layout_.sub[s];
    const Local& loc = locals_[s];
    const Index ni = sd.n_interior(), ng = sd.n_iface();
    if (ni == 0) return;
    Eigen::VectorXd ug(n_terms_ * ng);
    for (int j = 0; j < n_terms_; ++j) {
      for (Index k = 0; k < ng; ++k) ug[j * ng + k] = u_iface[j * n_ifc + sd.iface_pos[k]];
    }
    const Eigen::VectorXd ui = y_interior[s] - loc.ii_llt->solve(loc.a_ig * ug);
    for (int j = 0; j < n_terms_; ++j) {
      for (Index k = 0; k < ni; ++k) u_next[j * n + sd.interior[k]] = ui[j * ni + k];
    }
  });
  return u_next;
}

SgHistory SgSolver::run(const Eigen::VectorXd& u0_nodal, const Eigen::VectorXd& v0_nodal,
                        int n_steps, const ForceFn& force) {
  const Index n = red_.n_dofs();
  StateTriple state;
  state.u = Eigen::VectorXd::Zero(n_terms_ * n);
  state.u.head(n) = red_.reduce_vector(u0_nodal);
  state.v = Eigen::VectorXd::Zero(n_terms_ * n);
  state.v.head(n) = red_.reduce_vector(v0_nodal);
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(n_terms_ * n);
  if (force) f0.head(n) = red_.reduce_vector(force(0.0));

  // block-diagonal mass: per-term solves for the initial acceleration
  const Eigen::VectorXd resid = f0 - alpha0_ * apply_block_mass(state.v) -
                                alpha1_ * apply_block_stiffness(state.v) -
                                apply_block_stiffness(state.u);
  state.a.resize(n_terms_ * n);
  for (int j = 0; j < n_terms_; ++j) {
    state.a.segment(j * n, n) = mass_llt_.solve(resid.segment(j * n, n));
  }
  state.t = 0.0;

  std::vector<Index> probe_dofs;
  for (Index node : opt_.probe_nodes) {
    const Index dof = red_.node_to_dof[node];
    if (dof < 0) throw std::invalid_argument("probe node is constrained");
    probe_dofs.push_back(dof);
  }

  SgHistory hist;
  const int np = static_cast<int>(probe_dofs.size());
  hist.probe_mean.resize(np, n_steps + 1);
  hist.probe_std.resize(np, n_steps + 1);
  hist.probe_coeffs.assign(np, Eigen::MatrixXd(n_terms_, n_steps + 1));
  auto record = [&](int step, const StateTriple& st) {
    hist.times.push_back(st.t);
    for (int p = 0; p < np; ++p) {
      double var = 0.0;
      for (int j = 0; j < n_terms_; ++j) {
        const double c = st.u[j * n + probe_dofs[p]];
        hist.probe_coeffs[p](j, step) = c;
        if (j > 0) var += c * c;
      }
      hist.probe_mean(p, step) = st.u[probe_dofs[p]];
      hist.probe_std(p, step) = std::sqrt(var);
    }
    if (opt_.store_full) hist.full_state.push_back(st.u);
  };
  record(0, state);

  Eigen::VectorXd f_next;
  for (int nstep = 0; nstep < n_steps; ++nstep) {
    if (force) f_next = red_.reduce_vector(force(state.t + params_.dt));
    PcgReport rep;
    const Eigen::VectorXd u_next = step_rhs_and_solve(state, f_next, direct_ ? nullptr : &rep);
    if (!direct_) {
      if (!rep.converged) {
        throw std::runtime_error("stochastic interface solve did not converge at step " +
                                 std::to_string(nstep));
      }
      hist.reports.push_back(std::move(rep));
    }
    state = newmark_update(state, u_next, params_);
    record(nstep + 1, state);
  }
  return hist;
}

Eigen::VectorXd SgSolver::apply_block_mass(const Eigen::VectorXd& flat) const {
  const Index n = red_.n_dofs();
  Eigen::VectorXd out(n_terms_ * n);
  for (int j = 0; j < n_terms_; ++j) {
    out.segment(j * n, n) = mass_red_ * flat.segment(j * n, n);
  }
  return out;
}

Eigen::VectorXd SgSolver::apply_block_stiffness(const Eigen::VectorXd& flat) const {
  const Index n = red_.n_dofs();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_terms_ * n);
  for (int i = 0; i < tensor_.n_input; ++i) {
    tensor_.for_each(i, [&](int j, int k, double g) {
      out.segment(k * n, n) += g * (k_red_[i] * flat.segment(j * n, n));
    });
  }
  return out;
}

Eigen::VectorXd SgSolver::apply_block_transient(const Eigen::VectorXd& flat) const {
  return mass_scale_ * apply_block_mass(flat) + stiff_scale_ * apply_block_stiffness(flat);
}

}  // namespace sgwave
