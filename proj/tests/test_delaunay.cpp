#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "dwt/delaunay.hpp"
#include "dwt/manifold.hpp"
#include "dwt/rng.hpp"
#include "oracles.hpp"

using namespace dwt;

namespace {

EmbeddedCloud make_cloud(const Matrix& coords) {
  EmbeddedCloud c;
  c.coords = coords;
  c.dim = static_cast<int>(coords.cols());
  return c;
}

EmbeddedCloud random_cloud(int n, int d, dwt::Rng& rng, double spread = 1.0) {
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = spread * rng.normal();
  return make_cloud(m);
}

Matrix dense_weights(const WeightMatrix& wm) {
  Matrix W = Matrix::Zero(wm.n, wm.n);
  for (int i = 0; i < wm.n; ++i)
    for (const auto& [j, g] : wm.rows[i].entries) W(i, j) = g;
  return W;
}

}  // namespace

TEST_CASE("inverse stereographic lift lands on the sphere and round trips") {
  Matrix coords(3, 1);
  coords << 0, 1, 3;
  const SphereCloud sphere = lift_cloud(make_cloud(coords), 10.0);
  const double w = 10.0 * 3.0;
  CHECK(sphere.r_max == 3.0);
  REQUIRE(sphere.lifted.rows() == 4);
  REQUIRE(sphere.lifted.cols() == 2);
  // reference pole occupies row 0
  CHECK(sphere.lifted(0, 0) == 0.0);
  CHECK(sphere.lifted(0, 1) == w);
  // closed form: z -> (w^2 z, w z^2) / (w^2 + z^2)
  CHECK(sphere.lifted(1, 0) == 0.0);
  CHECK(sphere.lifted(1, 1) == 0.0);
  CHECK(sphere.lifted(2, 0) == doctest::Approx(900.0 / 901).epsilon(1e-14));
  CHECK(sphere.lifted(2, 1) == doctest::Approx(30.0 / 901).epsilon(1e-14));
  CHECK(sphere.lifted(3, 0) == doctest::Approx(2700.0 / 909).epsilon(1e-14));
  CHECK(sphere.lifted(3, 1) == doctest::Approx(270.0 / 909).epsilon(1e-14));

  // every lifted point sits on the sphere of diameter w touching the origin
  Vector center = Vector::Zero(2);
  center[1] = w / 2;
  for (int r = 0; r < 4; ++r) {
    const double rad = (sphere.lifted.row(r).transpose() - center).norm();
    CHECK(rad == doctest::Approx(w / 2).epsilon(1e-12));
  }

  // forward projection from the sphere recovers the plane point
  for (int r = 1; r < 4; ++r) {
    const double x = sphere.lifted(r, 0), u = sphere.lifted(r, 1);
    const double back = w * x / (w - u);
    CHECK(back == doctest::Approx(coords(r - 1, 0)).epsilon(1e-10));
  }
}

TEST_CASE("located simplices and weights match the one-dimensional example") {
  Matrix coords(3, 1);
  coords << 0, 1, 3;
  const EmbeddedCloud cloud = make_cloud(coords);
  const SphereCloud sphere = lift_cloud(cloud, 10.0);

  const SimplexHandle s0 = locate_simplex(sphere, 0);
  CHECK(s0.vertices == std::vector<int>{1, 2});
  const SimplexHandle s1 = locate_simplex(sphere, 1);
  CHECK(s1.vertices == std::vector<int>{0, 2});
  const SimplexHandle s2 = locate_simplex(sphere, 2);
  CHECK(s2.vertices == std::vector<int>{0, 1});

  const WeightMatrix wm = weight_matrix(cloud, 10.0);
  Matrix expect(3, 3);
  expect << 0, 1, 0, 2.0 / 3, 0, 1.0 / 3, 0, 1, 0;
  CHECK((dense_weights(wm) - expect).cwiseAbs().maxCoeff() < 1e-9);

  // exterior query 0 projects onto the vertex at coordinate 1
  const WeightRow row0 = weight_row(cloud, 0, s0);
  REQUIRE(row0.projection.size() == 1);
  CHECK(row0.projection[0] == doctest::Approx(1.0).epsilon(1e-12));
  // first-order optimality of the projection onto the simplex
  const Vector z = coords.row(0).transpose();
  for (int v : s0.vertices) {
    const Vector vv = coords.row(v).transpose();
    CHECK((z - row0.projection).dot(vv - row0.projection) <= 1e-8);
  }
}

TEST_CASE("simplex_weights solves interior and clamped projections") {
  Matrix tri(2, 3);  // columns are vertices (0,0), (1,0), (0,1)
  tri << 0, 1, 0, 0, 0, 1;

  Vector z(2);
  z << 0.2, 0.3;
  Vector w = simplex_weights(tri, z);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(w[2] == doctest::Approx(0.3).epsilon(1e-10));

  z << 2, 2;  // projects onto the midpoint of the far edge
  w = simplex_weights(tri, z);
  CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w[2] == doctest::Approx(0.5).epsilon(1e-10));

  z << -1, -1;  // clamps to the nearest vertex
  w = simplex_weights(tri, z);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weight matrix invariants hold on random clouds") {
  dwt::Rng rng(21);
  for (int d : {1, 2, 3}) {
    const EmbeddedCloud cloud = random_cloud(40, d, rng);
    const WeightMatrix wm = weight_matrix(cloud, kDefaultEta);
    for (int i = 0; i < wm.n; ++i) {
      const auto& row = wm.rows[i];
      REQUIRE(!row.entries.empty());
      CHECK(static_cast<int>(row.entries.size()) <= d + 1);
      double sum = 0;
      Vector recon = Vector::Zero(d);
      for (const auto& [j, g] : row.entries) {
        CHECK(j != i);  // zero diagonal
        CHECK(j >= 0);
        CHECK(j < wm.n);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-12);
        sum += g;
        recon += g * cloud.coords.row(j).transpose();
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
      const double zn = cloud.coords.row(i).norm();
      CHECK((recon - row.projection).norm() <= 1e-8 * (1.0 + zn));
    }
  }
}

TEST_CASE("interior queries reproduce themselves through their weights") {
  // dense cluster with one query point close to the centroid: its own weights
  // must reconstruct it exactly (projection == the point itself)
  dwt::Rng rng(33);
  const EmbeddedCloud cloud = random_cloud(80, 2, rng);
  // pick the point nearest the centroid: it is interior to the others' hull
  int best = 0;
  double bd = 1e300;
  for (int i = 0; i < 80; ++i) {
    const double nn = cloud.coords.row(i).norm();
    if (nn < bd) {
      bd = nn;
      best = i;
    }
  }
  const SphereCloud sphere = lift_cloud(cloud, kDefaultEta);
  const SimplexHandle s = locate_simplex(sphere, best);
  const WeightRow row = weight_row(cloud, best, s);
  const Vector z = cloud.coords.row(best).transpose();
  CHECK((row.projection - z).norm() < 1e-8 * (1 + z.norm()));
}

TEST_CASE("located simplices are stable across eta") {
  dwt::Rng rng(55);
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const EmbeddedCloud cloud = random_cloud(25, d, rng);
    const SphereCloud s5 = lift_cloud(cloud, 5.0);
    const SphereCloud s10 = lift_cloud(cloud, 10.0);
    const SphereCloud s20 = lift_cloud(cloud, 20.0);
    for (int i = 0; i < 25; ++i) {
      const auto a = locate_simplex(s5, i).vertices;
      const auto b = locate_simplex(s10, i).vertices;
      const auto c = locate_simplex(s20, i).vertices;
      CHECK(a == b);
      CHECK(b == c);
    }
  }
}

TEST_CASE("weights are equivariant under similarity transforms") {
  dwt::Rng rng(77);
  const EmbeddedCloud cloud = random_cloud(30, 2, rng);
  const WeightMatrix base = weight_matrix(cloud, kDefaultEta);

  EmbeddedCloud scaled = cloud;
  scaled.coords *= 2.0;
  const WeightMatrix ws = weight_matrix(scaled, kDefaultEta);

  EmbeddedCloud shifted = cloud;
  shifted.coords.col(0).array() += 10.0;
  shifted.coords.col(1).array() -= 5.0;
  const WeightMatrix wt = weight_matrix(shifted, kDefaultEta);

  const Matrix b = dense_weights(base);
  CHECK((dense_weights(ws) - b).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((dense_weights(wt) - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("brute force triangulation of the unit square breaks the tie") {
  Matrix sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto tris = brute_force_delaunay(make_cloud(sq));
  REQUIRE(tris.size() == 2);
  // the two triangles share a diagonal: exactly two common vertices
  std::vector<int> common;
  std::set_intersection(tris[0].vertices.begin(), tris[0].vertices.end(),
                        tris[1].vertices.begin(), tris[1].vertices.end(),
                        std::back_inserter(common));
  CHECK(common.size() == 2);
  // all four corners are used
  std::set<int> used(tris[0].vertices.begin(), tris[0].vertices.end());
  used.insert(tris[1].vertices.begin(), tris[1].vertices.end());
  CHECK(used.size() == 4);
}

TEST_CASE("brute force simplices pass the empty-ball test and cover the hull") {
  dwt::Rng rng(91);
  const EmbeddedCloud cloud = random_cloud(18, 2, rng);
  const auto tris = brute_force_delaunay(cloud);
  CHECK(tris.size() >= 10);  // 2n - 2 - h for n=18 planar points
  for (const auto& t : tris) CHECK(verify_empty_ball(cloud, t));

  // random convex combinations of data points lie in the hull, so some
  // simplex must contain each of them
  for (int probe = 0; probe < 25; ++probe) {
    Vector p = Vector::Zero(2);
    double tot = 0;
    for (int k = 0; k < 4; ++k) {
      const int idx = static_cast<int>(rng.below(18));
      const double u = rng.uniform() + 1e-3;
      p += u * cloud.coords.row(idx).transpose();
      tot += u;
    }
    p /= tot;
    bool covered = false;
    for (const auto& t : tris)
      if (oracle::simplex_contains(cloud.coords, t.vertices, p, 1e-9)) {
        covered = true;
        break;
      }
    CHECK(covered);
  }
}

TEST_CASE("verify_empty_ball rejects a violated circumball") {
  Matrix pts(4, 2);
  pts << 0, 0, 2, 0, 1, 1.2, 1, 0.3;  // point 3 inside circumball of {0,1,2}
  SimplexHandle bad;
  bad.vertices = {0, 1, 2};
  CHECK_FALSE(verify_empty_ball(make_cloud(pts), bad));
  // excluding the offender restores the property
  CHECK(verify_empty_ball(make_cloud(pts), bad, 3));
}

TEST_CASE("locate agrees with the brute force triangulation on small clouds") {
  dwt::Rng rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    const int d = 2;
    const int n = 12;
    const EmbeddedCloud cloud = random_cloud(n, d, rng);
    const SphereCloud sphere = lift_cloud(cloud, kDefaultEta);
    for (int i = 0; i < n; ++i) {
      const SimplexHandle found = locate_simplex(sphere, i);
      // the located simplex is a true Delaunay cell of the others
      CHECK(verify_empty_ball(cloud, found, i));

      // rebuild the cloud without i and check membership in the full list
      Matrix rest(n - 1, d);
      std::vector<int> map;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          rest.row(static_cast<int>(map.size())) = cloud.coords.row(j);
          map.push_back(j);
        }
      const auto tris = brute_force_delaunay(make_cloud(rest));
      std::vector<int> relabeled;
      for (int v : found.vertices)
        relabeled.push_back(static_cast<int>(
            std::lower_bound(map.begin(), map.end(), v) - map.begin()));
      bool member = false;
      for (const auto& t : tris)
        if (t.vertices == relabeled) {
          member = true;
          break;
        }
      CHECK(member);
    }
  }
}

TEST_CASE("degenerate inputs are reported, not silently mangled") {
  Matrix pts(3, 2);  // n < d + 2
  pts << 0, 0, 1, 0, 0, 1;
  CHECK_THROWS_AS(weight_matrix(make_cloud(pts), kDefaultEta), data_error);

  // a cloud on a 1-flat inside R^2 is non-generic for d=2
  Matrix flat(8, 2);
  for (int i = 0; i < 8; ++i) flat.row(i) << i, 2.0 * i;
  CHECK_THROWS_AS(weight_matrix(make_cloud(flat), kDefaultEta), numeric_error);
}
