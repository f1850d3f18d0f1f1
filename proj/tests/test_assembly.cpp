#include <doctest.h>

#include <random>

#include "cemhelm/assembly.hpp"

using namespace cemhelm;

namespace {

// Exact integrals of products of bilinear shape functions on the reference
// square, by separation into 1D factors with rational values:
//   int_0^1 l_a l_b = 1/3 (a == b), 1/6 (a != b)
//   int_0^1 l_a' l_b' = 1 (a == b), -1 (a != b)
// with l_0 = 1 - t, l_1 = t. Node (ax, ay) order: (0,0) (1,0) (1,1) (0,1).
constexpr int kNodeX[4] = {0, 1, 1, 0};
constexpr int kNodeY[4] = {0, 0, 1, 1};

double mass_1d(int a, int b) { return a == b ? 1.0 / 3.0 : 1.0 / 6.0; }
double stiff_1d(int a, int b) { return a == b ? 1.0 : -1.0; }

Eigen::Matrix4d oracle_stiffness(double a) {
  Eigen::Matrix4d k;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      k(r, c) = a * (stiff_1d(kNodeX[r], kNodeX[c]) * mass_1d(kNodeY[r], kNodeY[c]) +
                     mass_1d(kNodeX[r], kNodeX[c]) * stiff_1d(kNodeY[r], kNodeY[c]));
    }
  return k;
}

Eigen::Matrix4d oracle_mass(double h) {
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      m(r, c) = h * h * mass_1d(kNodeX[r], kNodeX[c]) * mass_1d(kNodeY[r], kNodeY[c]);
    }
  return m;
}

RealVector interpolate(const FineGrid& g, double ax, double ay) {
  RealVector v(g.num_nodes());
  for (Index n = 0; n < g.num_nodes(); ++n) v[n] = ax * g.coords(n).x() + ay * g.coords(n).y();
  return v;
}

double max_abs(const RealSparse& a) {
  double m = 0.0;
  for (Index c = 0; c < a.outerSize(); ++c)
    for (RealSparse::InnerIterator it(a, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_CASE("element matrices match the integration oracle") {
  Eigen::Matrix4d stated;
  stated << 4, -1, -2, -1, -1, 4, -1, -2, -2, -1, 4, -1, -1, -2, -1, 4;
  stated /= 6.0;
  Eigen::Matrix4d mstated;
  mstated << 4, 2, 1, 2, 2, 4, 2, 1, 1, 2, 4, 2, 2, 1, 2, 4;

  for (double h : {1.0, 0.5, 0.005, 0.1}) {
    const ElementMatrices e = element_matrices(h, 1.0);
    CHECK((e.stiffness - oracle_stiffness(1.0)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((e.stiffness - stated).cwiseAbs().maxCoeff() <= 1e-15);
    for (int i = 0; i < 4; ++i) CHECK(e.stiffness(i, i) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK((e.mass - oracle_mass(h)).cwiseAbs().maxCoeff() <= 1e-14 * h * h);
    CHECK((e.mass - mstated * h * h / 36.0).cwiseAbs().maxCoeff() <= 1e-14 * h * h);
  }
  const ElementMatrices two = element_matrices(0.25, 2.0);
  CHECK((two.stiffness - 2.0 * stated).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((two.mass - element_matrices(0.25, 1.0).mass).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(element_matrices(0.1, 0.0), Error);
  CHECK_THROWS_AS(element_matrices(0.0, 1.0), Error);
}

TEST_CASE("boundary edge mass") {
  const double h = 0.2;
  const Eigen::Matrix2d e = boundary_edge_mass(h);
  // int_0^h l_a l_b ds = h/3 on the diagonal and h/6 off it.
  CHECK(e(0, 0) == doctest::Approx(h / 3.0).epsilon(1e-15));
  CHECK(e(0, 1) == doctest::Approx(h / 6.0).epsilon(1e-15));
  CHECK(e(1, 0) == e(0, 1));
  CHECK(e(1, 1) == e(0, 0));
}

TEST_CASE("stiffness") {
  const FineGrid g(4, 4);
  const Medium ones = constant_medium(4, 4, 1.0);
  const RealSparse k = assemble_stiffness(g, ones);
  const RealVector rowsum = k * RealVector::Ones(g.num_nodes());
  CHECK(rowsum.cwiseAbs().maxCoeff() < 1e-13);
  CHECK(max_abs(RealSparse(k - RealSparse(k.transpose()))) == 0.0);

  const RealVector x = interpolate(g, 1.0, 0.0);
  CHECK(x.dot(k * x) == doctest::Approx(1.0).epsilon(1e-14));
  const RealVector xy = interpolate(g, 1.0, 2.0);
  CHECK(xy.dot(k * xy) == doctest::Approx(5.0).epsilon(1e-14));

  const FineGrid one(1, 1);
  const Eigen::MatrixXd k1 = Eigen::MatrixXd(assemble_stiffness(one, constant_medium(1, 1, 1.0)));
  const Eigen::Matrix4d ke = element_matrices(1.0, 1.0).stiffness;
  const auto nodes = one.cell_nodes(0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(k1(nodes[r], nodes[c]) == ke(r, c));

  // Positive semidefinite with the constants as kernel.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(k)};
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-12);
  CHECK(es.eigenvalues()[1] > 1e-3);
}

TEST_CASE("weighted mass and mass") {
  const FineGrid g(6, 6);
  const RealSparse m = assemble_mass(g);
  const RealVector one = RealVector::Ones(g.num_nodes());
  CHECK(one.dot(m * one) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  RealVector w(g.num_cells());
  for (Index c = 0; c < w.size(); ++c) w[c] = u(rng);
  const RealSparse s = assemble_weighted_mass(g, w);
  const RealSparse s2 = assemble_weighted_mass(g, 2.0 * w);
  CHECK(max_abs(RealSparse(s2 - 2.0 * s)) <= 1e-15);
  CHECK(max_abs(RealSparse(s - RealSparse(s.transpose()))) == 0.0);
  CHECK(max_abs(RealSparse(assemble_weighted_mass(g, RealVector::Ones(g.num_cells())) - m)) == 0.0);

  for (Index n : {1, 3, 8}) {
    const FineGrid gg(n, n);
    RealVector ww(gg.num_cells());
    for (Index c = 0; c < ww.size(); ++c) ww[c] = u(rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{
        Eigen::MatrixXd(assemble_weighted_mass(gg, ww))};
    CHECK(es.eigenvalues()[0] > 0.0);
  }
  CHECK_THROWS_AS(assemble_weighted_mass(g, RealVector::Zero(g.num_cells())), Error);
}

TEST_CASE("boundary mass") {
  const FineGrid g(5, 5);
  const RealSparse mg = assemble_boundary_mass(g);
  const RealVector one = RealVector::Ones(g.num_nodes());
  CHECK(one.dot(mg * one) == doctest::Approx(4.0).epsilon(1e-14));
  const Eigen::MatrixXd d(mg);
  for (Index n = 0; n < g.num_nodes(); ++n) {
    if (!g.on_boundary(n)) {
      CHECK(d.row(n).cwiseAbs().maxCoeff() == 0.0);
      CHECK(d.col(n).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  // Bottom edge between nodes 1 and 2.
  CHECK(d(1, 2) == doctest::Approx(g.h() / 6.0).epsilon(1e-15));
  CHECK(d(1, 1) == doctest::Approx(2.0 * g.h() / 3.0).epsilon(1e-15));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  CHECK(es.eigenvalues()[0] > -1e-15);
}

TEST_CASE("Helmholtz matrix") {
  const FineGrid g(4, 4);
  const Medium a = synthesize_channels(4, 4, 1, 0.01, 2);
  const RealSparse k = assemble_stiffness(g, a);
  const RealSparse m = assemble_mass(g);
  const RealSparse mg = assemble_boundary_mass(g);

  const Eigen::MatrixXcd b0(assemble_B(g, a, 0.0));
  CHECK((b0.real() - Eigen::MatrixXd(k)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b0.imag().cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXcd b16(assemble_B(g, a, 16.0));
  CHECK((b16.imag() + 16.0 * Eigen::MatrixXd(mg)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((b16.real() - Eigen::MatrixXd(k) + 256.0 * Eigen::MatrixXd(m)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((b16 - b16.adjoint()).cwiseAbs().maxCoeff() > 1.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 40.0);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXcd b(helmholtz_matrix(k, m, mg, u(rng)));
    CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.real() - b.real().transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(assemble_B(g, a, -1.0), Error);
}

TEST_CASE("load vectors") {
  const FineGrid g(20, 20);
  const Medium a = constant_medium(20, 20, 1.0);
  const DiscreteForms forms = DiscreteForms::build(g, a, RealVector::Ones(g.num_cells()), 4.0);
  const ComplexVector zero = ComplexVector::Zero(g.num_nodes());
  const ComplexVector one = ComplexVector::Ones(g.num_nodes());
  CHECK(load_volume(forms, zero).norm() == 0.0);
  CHECK(std::abs(load_volume(forms, one).sum() - 1.0) < 1e-13);
  CHECK(load_boundary(forms, zero).norm() == 0.0);
  CHECK(std::abs(load_boundary(forms, one).sum() - 4.0) < 1e-13);

  // Boundary loads only touch boundary nodes, whatever the interior data.
  const ComplexVector b = load_boundary(forms, one);
  for (Index n = 0; n < g.num_nodes(); ++n) {
    if (!g.on_boundary(n)) CHECK(b[n] == Complex(0.0));
  }

  // Volume load of a locally supported source stays within one cell of it.
  ComplexVector f = ComplexVector::Zero(g.num_nodes());
  f[g.node(0, 0)] = 1.0;
  f[g.node(1, 0)] = 0.5;
  const ComplexVector bv = load_volume(forms, f);
  for (Index n = 0; n < g.num_nodes(); ++n) {
    if (bv[n] != Complex(0.0)) CHECK(g.coords(n).lpNorm<Eigen::Infinity>() <= 2.0 * g.h() + 1e-12);
  }
  CHECK_THROWS_AS(load_volume(forms, ComplexVector::Ones(3)), Error);
}

TEST_CASE("restriction and prolongation") {
  const FineGrid g(4, 4);
  const RealSparse k = assemble_stiffness(g, constant_medium(4, 4, 1.0));
  std::vector<Index> all(static_cast<std::size_t>(g.num_nodes()));
  for (Index n = 0; n < g.num_nodes(); ++n) all[static_cast<std::size_t>(n)] = n;
  CHECK(max_abs(RealSparse(restrict_matrix<double>(k, all) - k)) == 0.0);

  // 2x2 fine cells per element: the interior of one element is a single node.
  const CoarseGrid c(g, 2);
  const IndexRect r = c.element_node_rect(0);
  std::vector<Index> interior;
  for (Index iy = r.y0 + 1; iy < r.y1; ++iy)
    for (Index ix = r.x0 + 1; ix < r.x1; ++ix) interior.push_back(g.node(ix, iy));
  REQUIRE(interior.size() == 1);
  const RealSparse small = restrict_matrix<double>(k, interior);
  CHECK(small.rows() == 1);
  CHECK(small.coeff(0, 0) == doctest::Approx(8.0 / 3.0));

  RealVector v = RealVector::LinSpaced(g.num_nodes(), 1.0, 2.0);
  const std::vector<Index> some = {3, 7, 11};
  const RealVector once = prolong_rows(restrict_rows(v, some), some, g.num_nodes());
  const RealVector twice = prolong_rows(restrict_rows(once, some), some, g.num_nodes());
  CHECK(once == twice);
  CHECK(once[7] == v[7]);
  CHECK(once[0] == 0.0);
}
