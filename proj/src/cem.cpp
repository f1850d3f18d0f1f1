#include "cemhelm/cem.hpp"

#include <algorithm>
#include <cmath>

namespace cemhelm {

namespace {

ComplexSparse augmented_matrix(const ComplexSparse& b_free, const RealSparse& q_free) {
  const Index n = b_free.rows();
  const Index r = q_free.cols();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(b_free.nonZeros() + 2 * q_free.nonZeros() + r));
  for (Index c = 0; c < b_free.outerSize(); ++c) {
    for (ComplexSparse::InnerIterator it(b_free, c); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index c = 0; c < q_free.outerSize(); ++c) {
    for (RealSparse::InnerIterator it(q_free, c); it; ++it) {
      trips.emplace_back(it.row(), n + c, it.value());
      trips.emplace_back(n + c, it.row(), it.value());
    }
  }
  for (Index c = 0; c < r; ++c) trips.emplace_back(n + c, n + c, -1.0);
  ComplexSparse a(n + r, n + r);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

}  // namespace

ConstrainedPatchSolver::ConstrainedPatchSolver(const ComplexSparse& b_free,
                                               const RealSparse& q_free)
    : n_(b_free.rows()), fact_(augmented_matrix(b_free, q_free)) {
  if (b_free.cols() != n_ || q_free.rows() != n_) {
    throw Error(ErrorKind::kDimensionMismatch, "patch solver: B and Q row counts differ");
  }
}

Eigen::MatrixXcd ConstrainedPatchSolver::solve(const Eigen::MatrixXcd& rhs) const {
  if (rhs.rows() != n_) {
    throw Error(ErrorKind::kDimensionMismatch, "patch solver: right-hand side rows mismatch");
  }
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(fact_.size(), rhs.cols());
  full.topRows(n_) = rhs;
  return fact_.solve(full).topRows(n_);
}

Eigen::MatrixXcd local_cem_solve(const DiscreteForms& forms, const ProjectionOperator& projection,
                                 const Patch& patch, bool adjoint) {
  const std::vector<Index> free = patch.free_nodes();
  if (free.empty()) {
    throw Error(ErrorKind::kSingularMatrix,
                "local system of element " + std::to_string(patch.center) + " has no free nodes");
  }
  ComplexSparse b_free = restrict_matrix(forms.helmholtz, free);
  if (adjoint) b_free = b_free.conjugate();
  const RealSparse q_free = projection.weighted_columns(patch.element_ids, free);

  const auto center_pos = std::find(patch.element_ids.begin(), patch.element_ids.end(),
                                    patch.center) - patch.element_ids.begin();
  const Index l = projection.per_element();
  const Eigen::MatrixXcd rhs =
      Eigen::MatrixXd(q_free.middleCols(static_cast<Index>(center_pos) * l, l)).cast<Complex>();

  Eigen::MatrixXcd x;
  try {
    ConstrainedPatchSolver solver(b_free, q_free);
    x = solver.solve(rhs);
  } catch (const Error& e) {
    throw Error(e.kind(), "local system of element " + std::to_string(patch.center) + ": " +
                              e.what());
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Index>(patch.node_ids.size()), l);
  Index row = 0;
  for (std::size_t a = 0; a < patch.node_ids.size(); ++a) {
    if (patch.free[a]) out.row(static_cast<Index>(a)) = x.row(row++);
  }
  return out;
}

Eigen::MatrixXcd global_basis(const CoarseGrid& coarse, const DiscreteForms& forms,
                              const ProjectionOperator& projection, Index j, bool adjoint) {
  // A patch covering the domain has no constrained nodes under the default
  // trace rule, which is exactly the global problem.
  const Patch whole = oversample(coarse, j, coarse.nh(), PatchTrace::kInteriorOnly);
  return local_cem_solve(forms, projection, whole, adjoint);
}

MultiscaleSpace::MultiscaleSpace(Index num_nodes, Index layers, Index per_element,
                                 std::vector<LocalBasisSet> sets)
    : num_nodes_(num_nodes), layers_(layers), per_element_(per_element), sets_(std::move(sets)) {}

ComplexVector MultiscaleSpace::trial(Index p) const {
  const auto& s = set(p / per_element_);
  ComplexVector v = ComplexVector::Zero(num_nodes_);
  for (std::size_t a = 0; a < s.node_ids.size(); ++a) {
    v[s.node_ids[a]] = s.trial(static_cast<Index>(a), p % per_element_);
  }
  return v;
}

ComplexVector MultiscaleSpace::test(Index p) const {
  const auto& s = set(p / per_element_);
  ComplexVector v = ComplexVector::Zero(num_nodes_);
  for (std::size_t a = 0; a < s.node_ids.size(); ++a) {
    v[s.node_ids[a]] = s.test(static_cast<Index>(a), p % per_element_);
  }
  return v;
}

ComplexVector MultiscaleSpace::expand(const ComplexVector& coefficients) const {
  if (coefficients.size() != size()) {
    throw Error(ErrorKind::kDimensionMismatch, "expand: coefficient count mismatch");
  }
  ComplexVector u = ComplexVector::Zero(num_nodes_);
  for (Index j = 0; j < num_elements(); ++j) {
    const auto& s = set(j);
    const ComplexVector local = s.trial * coefficients.segment(j * per_element_, per_element_);
    for (std::size_t a = 0; a < s.node_ids.size(); ++a) {
      u[s.node_ids[a]] += local[static_cast<Index>(a)];
    }
  }
  return u;
}

MultiscaleSpace build_space(const CoarseGrid& coarse, const DiscreteForms& forms,
                            const ProjectionOperator& projection, const CemOptions& options) {
  if (options.layers < 0) throw Error(ErrorKind::kInvalidArgument, "layers must be >= 0");
  std::vector<LocalBasisSet> sets(static_cast<std::size_t>(coarse.num_elements()));
  parallel_for(coarse.num_elements(), options.threads, [&](Index j) {
    const Patch patch = oversample(coarse, j, options.layers, options.trace);
    LocalBasisSet s;
    s.element = j;
    s.nodes = patch.nodes;
    s.node_ids = patch.node_ids;
    try {
      s.trial = local_cem_solve(forms, projection, patch, false);
      s.test = options.test_rule == TestSpaceRule::kConjugate
                   ? Eigen::MatrixXcd(s.trial.conjugate())
                   : local_cem_solve(forms, projection, patch, true);
    } catch (const Error& e) {
      throw e.in_stage("element " + std::to_string(j));
    }
    sets[static_cast<std::size_t>(j)] = std::move(s);
  });
  return MultiscaleSpace(coarse.fine().num_nodes(), options.layers, projection.per_element(),
                         std::move(sets));
}

CoarseSystem assemble_coarse(const MultiscaleSpace& space, const DiscreteForms& forms,
                             const ComplexVector& load, int threads) {
  if (load.size() != space.num_nodes() || forms.size() != space.num_nodes()) {
    throw Error(ErrorKind::kDimensionMismatch, "assemble_coarse: load/forms size mismatch");
  }
  const Index l = space.per_element();
  const Index ne = space.num_elements();
  std::vector<std::vector<Eigen::Triplet<Complex>>> columns(static_cast<std::size_t>(ne));
  CoarseSystem sys;
  sys.rhs = ComplexVector::Zero(space.size());

  parallel_for(ne, threads, [&](Index q) {
    const auto& sq = space.set(q);
    // B psi_q vanishes outside the patch rectangle because psi_q vanishes on
    // every patch side that is interior to the domain.
    const ComplexSparse b_rect = restrict_matrix(forms.helmholtz, sq.node_ids);
    const Eigen::MatrixXcd w = b_rect * sq.trial;
    auto& out = columns[static_cast<std::size_t>(q)];
    for (Index p = 0; p < ne; ++p) {
      const auto& sp = space.set(p);
      const IndexRect ov = sp.nodes.intersect(sq.nodes);
      if (ov.width() < 2 || ov.height() < 2) continue;  // no common cell
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(l, l);
      for (Index y = ov.y0; y <= ov.y1; ++y) {
        const Index rp = (y - sp.nodes.y0) * sp.nodes.width() + (ov.x0 - sp.nodes.x0);
        const Index rq = (y - sq.nodes.y0) * sq.nodes.width() + (ov.x0 - sq.nodes.x0);
        // conj(psi*_p)^T (B psi_q)
        block.noalias() +=
            sp.test.middleRows(rp, ov.width()).adjoint() * w.middleRows(rq, ov.width());
      }
      for (Index a = 0; a < l; ++a) {
        for (Index b = 0; b < l; ++b) out.emplace_back(p * l + a, q * l + b, block(a, b));
      }
    }
  });

  for (Index p = 0; p < ne; ++p) {
    const auto& sp = space.set(p);
    for (Index a = 0; a < l; ++a) {
      Complex acc(0.0, 0.0);
      for (std::size_t n = 0; n < sp.node_ids.size(); ++n) {
        acc += std::conj(sp.test(static_cast<Index>(n), a)) * load[sp.node_ids[n]];
      }
      sys.rhs[p * l + a] = acc;
    }
  }

  if (forms.k == 0.0) {
    const RealVector z = forms.mass * RealVector::Ones(forms.size());
    sys.mean_row.resize(space.size());
    sys.mean_column.resize(space.size());
    for (Index p = 0; p < ne; ++p) {
      const auto& sp = space.set(p);
      for (Index a = 0; a < l; ++a) {
        Complex row(0.0, 0.0), col(0.0, 0.0);
        for (std::size_t n = 0; n < sp.node_ids.size(); ++n) {
          row += z[sp.node_ids[n]] * sp.trial(static_cast<Index>(n), a);
          col += z[sp.node_ids[n]] * std::conj(sp.test(static_cast<Index>(n), a));
        }
        sys.mean_row[p * l + a] = row;
        sys.mean_column[p * l + a] = col;
      }
    }
  }

  std::size_t total = 0;
  for (const auto& c : columns) total += c.size();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(total);
  for (auto& c : columns) trips.insert(trips.end(), c.begin(), c.end());
  sys.matrix.resize(space.size(), space.size());
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.matrix.makeCompressed();
  return sys;
}

MultiscaleResult solve_multiscale(const CoarseSystem& system, const MultiscaleSpace& space) {
  const Index n = system.matrix.rows();
  if (n != space.size() || system.rhs.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "solve_multiscale: system/space size mismatch");
  }
  MultiscaleResult out;
  const Index extra = system.gauged() ? 1 : 0;
  ComplexVector rhs = ComplexVector::Zero(n + extra);
  rhs.head(n) = system.rhs;
  ComplexVector x;
  if (n <= 2000) {
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n + extra, n + extra);
    dense.topLeftCorner(n, n) = Eigen::MatrixXcd(system.matrix);
    if (extra) {
      dense.block(0, n, n, 1) = system.mean_column;
      dense.block(n, 0, 1, n) = system.mean_row.transpose();
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense);
    x = lu.solve(rhs);
    const double scale = dense.cwiseAbs().maxCoeff() * x.norm() + rhs.norm();
    if (n > 0 && !((dense * x - rhs).norm() <= 1e-6 * scale)) {
      throw Error(ErrorKind::kSingularMatrix, "coarse system is numerically singular");
    }
  } else if (extra) {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (Index c = 0; c < system.matrix.outerSize(); ++c) {
      for (ComplexSparse::InnerIterator it(system.matrix, c); it; ++it) {
        trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (Index p = 0; p < n; ++p) {
      trips.emplace_back(p, n, system.mean_column[p]);
      trips.emplace_back(n, p, system.mean_row[p]);
    }
    ComplexSparse a(n + 1, n + 1);
    a.setFromTriplets(trips.begin(), trips.end());
    x = solve(factorize(a), rhs);
  } else {
    x = solve(factorize(system.matrix), rhs);
  }
  out.coefficients = x.head(n);
  if (!out.coefficients.allFinite()) {
    throw Error(ErrorKind::kSingularMatrix, "coarse solve produced non-finite coefficients");
  }
  out.solution = {space.expand(out.coefficients), SolutionKind::kMultiscale};
  return out;
}

double tail_energy(const CoarseGrid& coarse, const Medium& medium,
                   const ProjectionOperator& projection, const ComplexVector& field,
                   const Patch& patch) {
  const FineGrid& fine = coarse.fine();
  const Eigen::Matrix4d ke = element_matrices(fine.h(), 1.0).stiffness;
  double energy = 0.0;
  Eigen::Vector4cd local;
  for (Index c = 0; c < fine.num_cells(); ++c) {
    const Index j = coarse.element_of_cell(c);
    const Index ex = coarse.element_x(j);
    const Index ey = coarse.element_y(j);
    if (patch.elements.contains(ex, ey)) continue;
    const auto nodes = fine.cell_nodes(c);
    for (int a = 0; a < 4; ++a) local[a] = field[nodes[a]];
    energy += medium.cell(c) * std::real(local.dot(ke.cast<Complex>() * local));
  }
  for (Index j = 0; j < projection.num_elements(); ++j) {
    if (patch.elements.contains(coarse.element_x(j), coarse.element_y(j))) continue;
    const auto& b = projection.basis(j);
    ComplexVector v(static_cast<Index>(b.nodes.size()));
    for (std::size_t a = 0; a < b.nodes.size(); ++a) v[static_cast<Index>(a)] = field[b.nodes[a]];
    // |pi_j v|_s^2 = sum_i |s_j(phi_j^i, v)|^2 for s_j-orthonormal phi.
    energy += (b.weighted.transpose().cast<Complex>() * v).squaredNorm();
  }
  return energy;
}

DecayReport measure_decay(const CoarseGrid& coarse, const Medium& medium,
                          const DiscreteForms& forms, const ProjectionOperator& projection,
                          Index j, Index i, const std::vector<Index>& layers) {
  if (i < 0 || i >= projection.per_element()) {
    throw Error(ErrorKind::kInvalidArgument, "measure_decay: mode index out of range");
  }
  const Eigen::MatrixXcd all = global_basis(coarse, forms, projection, j);
  const Patch whole = oversample(coarse, j, coarse.nh());
  ComplexVector field = ComplexVector::Zero(coarse.fine().num_nodes());
  for (std::size_t a = 0; a < whole.node_ids.size(); ++a) {
    field[whole.node_ids[a]] = all(static_cast<Index>(a), i);
  }

  DecayReport report;
  report.layers = layers;
  for (Index m : layers) {
    report.tail_energy.push_back(tail_energy(coarse, medium, projection, field,
                                             oversample(coarse, j, m)));
  }

  // Fit only strictly positive tails; a tail is exactly zero once the patch
  // covers the domain.
  std::vector<double> xs, ys;
  for (std::size_t a = 0; a < layers.size(); ++a) {
    if (report.tail_energy[a] > 0.0) {
      xs.push_back(static_cast<double>(layers[a]));
      ys.push_back(std::log(report.tail_energy[a]));
    }
  }
  if (xs.size() >= 2) {
    const double span = xs.back() - xs.front();
    report.beta_hat = span > 0.0 ? std::exp((ys.back() - ys.front()) / span) : 1.0;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      mx += xs[a] / n;
      my += ys[a] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t a = 0; a < xs.size(); ++a) {
      sxx += (xs[a] - mx) * (xs[a] - mx);
      sxy += (xs[a] - mx) * (ys[a] - my);
      syy += (ys[a] - my) * (ys[a] - my);
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    report.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  }
  return report;
}

}  // namespace cemhelm
