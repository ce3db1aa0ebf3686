#include "dwt/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "dwt/parallel.hpp"
#include "dwt/rng.hpp"

namespace dwt {

namespace {

constexpr double kBaryTol = 1e-9;       // containment slack for weights
constexpr double kEmptySlack = 1e-8;    // relative circumball slack

[[noreturn]] void nongeneric(const std::string& what) {
  throw numeric_error("non-generic input; perturb (" + what + ")");
}

// Residual of x against the first m orthonormal columns of Q. Two passes of
// modified Gram-Schmidt keep the result orthogonal to working precision.
Vector perp_residual(const Matrix& Q, int m, Vector x) {
  for (int pass = 0; pass < 2; ++pass)
    for (int c = 0; c < m; ++c) x -= Q.col(c).dot(x) * Q.col(c);
  return x;
}

}  // namespace

Vector inverse_stereographic(const Vector& z, double w) {
  if (w <= 0) throw data_error("sphere diameter must be positive");
  const int d = static_cast<int>(z.size());
  const double sq = z.squaredNorm();
  const double denom = w * w + sq;
  Vector out(d + 1);
  out.head(d) = (w * w / denom) * z;
  out[d] = w * sq / denom;
  return out;
}

SphereCloud lift_cloud(const EmbeddedCloud& cloud, double eta) {
  if (eta <= 0) throw data_error("eta must be positive");
  const int n = static_cast<int>(cloud.coords.rows());
  const int d = cloud.dim;
  if (n < 1 || d < 1) throw data_error("empty cloud");
  const double r_max = cloud.coords.rowwise().norm().maxCoeff();
  if (r_max <= 0) throw numeric_error("degenerate cloud: all points coincide");
  const double w = eta * r_max;

  SphereCloud sphere;
  sphere.eta = eta;
  sphere.r_max = r_max;
  sphere.dim = d;
  sphere.lifted.resize(n + 1, d + 1);
  sphere.lifted.row(0).setZero();
  sphere.lifted(0, d) = w;  // reference pole
  for (int i = 0; i < n; ++i)
    sphere.lifted.row(i + 1) =
        inverse_stereographic(cloud.coords.row(i).transpose(), w).transpose();
  return sphere;
}

namespace {

// Walks the convex hull of the lifted points (minus the query row) to the
// facet pierced by the segment from an interior anchor to the query. Hull
// facets of the sphere-supported cloud are exactly the Delaunay cells of the
// stereographic preimage, so this is simplex location in disguise.
class FacetWalker {
 public:
  FacetWalker(const Matrix& lifted, int query_row, double scale)
      : L_(lifted),
        rows_(static_cast<int>(lifted.rows())),
        dim_(static_cast<int>(lifted.cols()) - 1),
        query_(query_row),
        scale_(scale),
        q_(lifted.row(query_row).transpose()) {
    // Midpoint of the reference pole (row 0) and the centroid of the other
    // usable rows: strictly inside the hull as a convex combination of its
    // vertices, and high above the data cap so the descent toward the query
    // is nearly radial.
    const Vector pole = L_.row(0).transpose();
    Vector centroid = (L_.colwise().sum().transpose() - q_ - pole) /
                      double(rows_ - 2);
    anchor_ = 0.5 * (pole + centroid);
    plane_tol_ = 1e-9 * scale_;
  }

  // Lifted row indices of the located facet (size dim_+1, unsorted).
  std::vector<int> run() {
    seed_facet();
    const long budget = 64L * rows_;
    Vector lambda(dim_ + 1);
    for (long step = 0; step < budget; ++step) {
      double t;
      pierce(lambda, t);
      int worst = 0;
      const double min_l = lambda.minCoeff(&worst);
      if (min_l >= -kBaryTol) {
        if (t > 0) return facet_;
        nongeneric("walk lost orientation");
      }
      pivot(worst);
    }
    nongeneric("facet walk budget exceeded");
  }

 private:
  bool usable(int p) const { return p != query_; }

  // Greedy min-circumradius completion around the query's nearest lifted
  // neighbor. The circumcenter updates are incremental: adding a vertex moves
  // the center by alpha along the new orthonormal direction, so candidate
  // scores cost O(1) each given the cached projections.
  void seed_facet() {
    int v0 = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < rows_; ++p) {
      if (!usable(p)) continue;
      const double dd = (L_.row(p).transpose() - q_).squaredNorm();
      if (dd < best) {
        best = dd;
        v0 = p;
      }
    }
    if (v0 < 0) throw data_error("no points to locate against");

    const Vector v0v = L_.row(v0).transpose();
    Vector pi2(rows_), cd2(rows_), nrm0(rows_);
    for (int p = 0; p < rows_; ++p) {
      const double dd = (L_.row(p).transpose() - v0v).squaredNorm();
      pi2[p] = cd2[p] = nrm0[p] = dd;
    }
    basis_ = Matrix::Zero(dim_ + 1, dim_);
    facet_.assign(1, v0);
    std::vector<char> used(rows_, 0);
    used[v0] = 1;
    double rho2 = 0.0;

    for (int m = 0; m < dim_; ++m) {
      int pick = -1;
      double pick_score = std::numeric_limits<double>::infinity();
      for (int p = 0; p < rows_; ++p) {
        if (!usable(p) || used[p]) continue;
        if (nrm0[p] <= 0 || pi2[p] <= 1e-20 * nrm0[p]) continue;
        const double alpha = (cd2[p] - rho2) / (2.0 * std::sqrt(pi2[p]));
        const double score = alpha * alpha;
        if (score < pick_score) {
          pick_score = score;
          pick = p;
        }
      }
      if (pick < 0) nongeneric("cloud is affinely degenerate");

      Vector x = L_.row(pick).transpose() - v0v;
      Vector xp = perp_residual(basis_, m, x);
      const double np = xp.norm();
      if (np * np <= 1e-20 * x.squaredNorm())
        nongeneric("cloud is affinely degenerate");
      xp /= np;
      const double alpha = (cd2[pick] - rho2) / (2.0 * np);
      rho2 += alpha * alpha;
      basis_.col(m) = xp;
      facet_.push_back(pick);
      used[pick] = 1;

      // fused projection/center updates against the new direction
      Vector t = L_ * xp;
      const double t0 = v0v.dot(xp);
      for (int p = 0; p < rows_; ++p) {
        const double tp = t[p] - t0;
        pi2[p] = std::max(0.0, pi2[p] - tp * tp);
        cd2[p] += alpha * alpha - 2.0 * alpha * tp;
      }
    }

    if (!facet_normal_from_basis(v0v)) giftwrap_seed();
  }

  // Normal of the seed facet; false when the far side is not empty (the
  // greedy simplex failed to be a hull facet, e.g. under near-degeneracy).
  bool facet_normal_from_basis(const Vector& v0v) {
    Vector n = perp_residual(basis_, dim_, q_ - v0v);
    if (n.norm() <= 1e-12 * scale_) {
      double best = -1;
      for (int j = 0; j <= dim_; ++j) {
        Vector e = Vector::Zero(dim_ + 1);
        e[j] = 1.0;
        Vector r = perp_residual(basis_, dim_, e);
        if (r.norm() > best) {
          best = r.norm();
          n = r;
        }
      }
    }
    if (n.norm() <= 0) nongeneric("facet normal vanished");
    n.normalize();

    double lo = 0.0, hi = 0.0;
    scan_heights(n, v0v, lo, hi);
    if (hi <= plane_tol_) {
      normal_ = n;
      return true;
    }
    if (lo >= -plane_tol_) {
      normal_ = -n;
      return true;
    }
    return false;
  }

  void scan_heights(const Vector& n, const Vector& base, double& lo, double& hi) {
    Vector s = L_ * n;
    const double s0 = base.dot(n);
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (int p = 0; p < rows_; ++p) {
      if (!usable(p)) continue;
      if (std::find(facet_.begin(), facet_.end(), p) != facet_.end()) continue;
      lo = std::min(lo, s[p] - s0);
      hi = std::max(hi, s[p] - s0);
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;  // facet swallowed every point
  }

  // Gift-wrapping fallback: construct a genuine hull facet facing the query
  // by rotating a supporting hyperplane around a growing vertex set.
  void giftwrap_seed() {
    Vector center = 0.5 * L_.row(0).transpose();  // sphere center
    Vector dir = q_ - center;
    int v0 = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int p = 0; p < rows_; ++p) {
      if (!usable(p)) continue;
      const double s = (L_.row(p).transpose() - center).dot(dir);
      if (s > best) {
        best = s;
        v0 = p;
      }
    }
    const Vector v0v = L_.row(v0).transpose();
    Vector u = dir.normalized();
    basis_ = Matrix::Zero(dim_ + 1, dim_);
    facet_.assign(1, v0);

    for (int m = 0; m < dim_; ++m) {
      Vector w = perp_residual(basis_, m, anchor_ - v0v);
      w -= u.dot(w) * u;
      if (w.norm() <= 1e-12 * scale_) nongeneric("support rotation degenerate");
      w.normalize();

      Vector a = L_ * w, b = L_ * u;
      const double a0 = v0v.dot(w), b0 = v0v.dot(u);
      int pick = -1;
      double pa = 0, pb = 0;
      for (int p = 0; p < rows_; ++p) {
        if (!usable(p)) continue;
        if (std::find(facet_.begin(), facet_.end(), p) != facet_.end()) continue;
        const double ap = a[p] - a0, bp = b[p] - b0;
        if (ap <= 1e-12 * scale_) continue;  // never touched by the rotation
        if (pick < 0 || -bp * pa < -pb * ap) {
          pick = p;
          pa = ap;
          pb = bp;
        }
      }
      if (pick < 0) nongeneric("cloud is affinely degenerate");

      u = (pa * u - pb * w).normalized();
      Vector x = L_.row(pick).transpose() - v0v;
      Vector xp = perp_residual(basis_, m, x);
      if (xp.norm() <= 1e-12 * scale_) nongeneric("cloud is affinely degenerate");
      basis_.col(m) = xp.normalized();
      facet_.push_back(pick);
    }
    normal_ = u;
  }

  // Barycentric coordinates of the anchor->query line's crossing with the
  // current facet plane, plus the line parameter t of the crossing.
  void pierce(Vector& lambda, double& t) {
    const int m = dim_ + 1;
    Matrix A(m + 1, m + 1);
    for (int k = 0; k < m; ++k) {
      A.block(0, k, m, 1) = L_.row(facet_[k]).transpose();
      A(m, k) = 1.0;
    }
    A.block(0, m, m, 1) = -(q_ - anchor_);
    A(m, m) = 0.0;
    Vector rhs(m + 1);
    rhs.head(m) = anchor_;
    rhs[m] = 1.0;

    Eigen::PartialPivLU<Matrix> lu(A);
    Vector sol = lu.solve(rhs);
    if ((A * sol - rhs).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + scale_))
      nongeneric("piercing solve is singular");
    lambda = sol.head(m);
    t = sol[m];
  }

  // Replaces the facet by its hull neighbor across the ridge opposite vertex
  // `out_pos`: a Jarvis-march step in the 2-plane orthogonal to the ridge.
  void pivot(int out_pos) {
    const int out = facet_[out_pos];
    std::vector<int> ridge = facet_;
    ridge.erase(ridge.begin() + out_pos);

    const Vector r0 = L_.row(ridge[0]).transpose();
    Matrix rbasis = Matrix::Zero(dim_ + 1, std::max(0, dim_ - 1));
    int m = 0;
    for (std::size_t k = 1; k < ridge.size(); ++k) {
      Vector x = perp_residual(rbasis, m, L_.row(ridge[k]).transpose() - r0);
      if (x.norm() <= 1e-12 * scale_) nongeneric("ridge degenerate");
      rbasis.col(m++) = x.normalized();
    }

    Vector w = perp_residual(rbasis, m, L_.row(out).transpose() - r0);
    w -= normal_.dot(w) * normal_;
    if (w.norm() <= 1e-12 * scale_) nongeneric("pivot direction degenerate");
    w.normalize();

    Vector a = L_ * w, b = L_ * normal_;
    const double a0 = r0.dot(w), b0 = r0.dot(normal_);
    int pick = -1;
    double pa = 0, pb = 0;
    for (int p = 0; p < rows_; ++p) {
      if (!usable(p) || p == out) continue;
      if (std::find(ridge.begin(), ridge.end(), p) != ridge.end()) continue;
      const double ap = a[p] - a0, bp = b[p] - b0;
      if (pick < 0 || pa * bp - pb * ap < 0) {
        pick = p;
        pa = ap;
        pb = bp;
      }
    }
    if (pick < 0) nongeneric("hull has a boundary ridge");

    Vector n = pb * w - pa * normal_;
    if (n.norm() <= 1e-15 * scale_) nongeneric("pivot normal vanished");
    n.normalize();
    if ((anchor_ - r0).dot(n) > 0) n = -n;

    ridge.push_back(pick);
    facet_ = std::move(ridge);
    normal_ = n;
  }

 public:
  // Pivot by lifted row id; used to step off the reference pole at the end.
  void pivot_away_from(int row_id) {
    for (std::size_t k = 0; k < facet_.size(); ++k) {
      if (facet_[k] == row_id) {
        pivot(static_cast<int>(k));
        return;
      }
    }
  }

  // The ray exit facet is a hull facet whose circumball covers the query,
  // but near cell boundaries it may be a neighbor of the cell that actually
  // contains it. Correct by a visibility walk adjudicated on the embedded
  // (pre-lift) coordinates, which do not depend on the sphere size: pivot
  // across any face where the query's affine coordinate is negative, never
  // crossing the hull boundary (exterior queries keep their boundary cell).
  void refine_to_query() {
    const int m = dim_ + 1;
    const Vector zq = embedded_of(q_);
    Matrix A(m, m);
    Vector rhs(m);
    std::vector<int> blocked;  // opposite vertices whose face is the boundary
    const long budget = 16L * rows_;
    for (long step = 0; step < budget; ++step) {
      double span = 1.0 + zq.norm();
      for (int k = 0; k < m; ++k) {
        const Vector zk = embedded_of(L_.row(facet_[k]).transpose());
        A.block(0, k, dim_, 1) = zk;
        A(dim_, k) = 1.0;
        span = std::max(span, zk.norm());
      }
      rhs.head(dim_) = zq;
      rhs[dim_] = 1.0;
      Eigen::PartialPivLU<Matrix> lu(A);
      const Vector lam = lu.solve(rhs);
      // Backward-stable solves of thin (ill-conditioned) cells carry residual
      // proportional to the coordinate magnitudes; only a residual large on
      // that scale means the cell is genuinely degenerate.
      const double lam_mag = 1.0 + lam.cwiseAbs().maxCoeff();
      if (!lam.allFinite() ||
          (A * lam - rhs).cwiseAbs().maxCoeff() > 1e-8 * span * lam_mag)
        nongeneric("containment solve is singular");

      int pos = -1;
      double worst = -kBaryTol;
      for (int k = 0; k < m; ++k) {
        if (lam[k] >= worst) continue;
        if (std::find(blocked.begin(), blocked.end(), facet_[k]) !=
            blocked.end())
          continue;
        worst = lam[k];
        pos = k;
      }
      if (pos < 0) return;  // contained, or outside only across the boundary

      const int leaving = facet_[pos];
      pivot(pos);
      if (std::find(facet_.begin(), facet_.end(), 0) != facet_.end()) {
        pivot(m - 1);  // stepped over the hull boundary: cross straight back
        blocked.push_back(leaving);
      } else {
        blocked.clear();
      }
    }
    nongeneric("containment walk budget exceeded");
  }

  const std::vector<int>& facet() const { return facet_; }

 private:
  // Inverts the lift: a sphere point (x, u) came from z = w x / (w - u),
  // with w the sphere diameter (held in scale_).
  Vector embedded_of(const Vector& lifted) const {
    return scale_ / (scale_ - lifted[dim_]) * lifted.head(dim_);
  }

  const Matrix& L_;
  int rows_, dim_, query_;
  double scale_, plane_tol_;
  Vector q_, anchor_;
  std::vector<int> facet_;
  Vector normal_;
  Matrix basis_;
};

}  // namespace

SimplexHandle locate_simplex(const SphereCloud& sphere, int i) {
  const int n = static_cast<int>(sphere.lifted.rows()) - 1;
  const int d = sphere.dim;
  if (i < 0 || i >= n) throw data_error("point index out of range");
  if (n < d + 2)
    throw data_error("sample too small for dimension " + std::to_string(d));

  FacetWalker walker(sphere.lifted, i + 1, sphere.eta * sphere.r_max);
  walker.run();
  walker.pivot_away_from(0);  // spherical cells touching the pole are fake
  walker.refine_to_query();

  SimplexHandle handle;
  handle.vertices.reserve(d + 1);
  for (int row : walker.facet()) {
    if (row == 0) nongeneric("pole re-entered the located facet");
    handle.vertices.push_back(row - 1);
  }
  std::sort(handle.vertices.begin(), handle.vertices.end());
  return handle;
}

Vector simplex_weights(const Matrix& V, const Vector& z) {
  const int m = static_cast<int>(V.cols());
  if (m < 1) throw data_error("empty simplex");
  const Matrix G = 2.0 * V.transpose() * V;
  const Vector h = 2.0 * V.transpose() * z;

  int start = 0;
  (V.colwise() - z).colwise().squaredNorm().minCoeff(&start);
  Vector g = Vector::Zero(m);
  g[start] = 1.0;
  std::vector<char> active(m, 1);
  active[start] = 0;

  const int max_iter = 100 + 10 * m;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> free_idx;
    for (int j = 0; j < m; ++j)
      if (!active[j]) free_idx.push_back(j);
    const int f = static_cast<int>(free_idx.size());

    Matrix kkt(f + 1, f + 1);
    Vector rhs(f + 1);
    for (int r = 0; r < f; ++r) {
      for (int c = 0; c < f; ++c) kkt(r, c) = G(free_idx[r], free_idx[c]);
      kkt(r, f) = 1.0;
      kkt(f, r) = 1.0;
      rhs[r] = h[free_idx[r]];
    }
    kkt(f, f) = 0.0;
    rhs[f] = 1.0;
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) throw numeric_error("degenerate simplex");
    const Vector sol = lu.solve(rhs);
    const double mu = sol[f];

    double min_free = std::numeric_limits<double>::infinity();
    for (int r = 0; r < f; ++r) min_free = std::min(min_free, sol[r]);

    if (min_free >= -1e-12) {
      Vector g_new = Vector::Zero(m);
      for (int r = 0; r < f; ++r) g_new[free_idx[r]] = std::max(0.0, sol[r]);
      const Vector grad = G * g_new - h;
      const double tol = 1e-10 * (1.0 + grad.cwiseAbs().maxCoeff() + std::abs(mu));
      int release = -1;
      double worst = -tol;
      for (int j = 0; j < m; ++j) {
        if (!active[j]) continue;
        const double sigma = grad[j] + mu;
        if (sigma < worst) {
          worst = sigma;
          release = j;
        }
      }
      g = g_new;
      if (release < 0) return g / g.sum();
      active[release] = 0;
      continue;
    }

    // partial step toward the equality solution, pinning the first blocker
    Vector target = Vector::Zero(m);
    for (int r = 0; r < f; ++r) target[free_idx[r]] = sol[r];
    double alpha = 1.0;
    int blocker = -1;
    for (int j = 0; j < m; ++j) {
      if (active[j]) continue;
      const double dir = target[j] - g[j];
      if (dir < 0) {
        const double step = g[j] / -dir;
        if (step < alpha) {
          alpha = step;
          blocker = j;
        }
      }
    }
    g += alpha * (target - g);
    if (blocker >= 0) {
      g[blocker] = 0.0;
      active[blocker] = 1;
    }
  }
  throw numeric_error("simplex projection did not converge");
}

WeightRow weight_row(const EmbeddedCloud& cloud, int i,
                     const SimplexHandle& simplex) {
  const int d = cloud.dim;
  const int m = static_cast<int>(simplex.vertices.size());
  if (m != d + 1) throw data_error("simplex has wrong vertex count");
  Matrix V(d, m);
  for (int k = 0; k < m; ++k) {
    const int v = simplex.vertices[k];
    if (v == i) throw data_error("simplex must not contain the point itself");
    V.col(k) = cloud.coords.row(v).transpose();
  }
  const Vector z = cloud.coords.row(i).transpose();

  // affine solve first; fall back to the constrained projection when the
  // point leaves its simplex
  Matrix A(d + 1, m);
  A.topRows(d) = V;
  A.bottomRows(1).setOnes();
  Vector rhs(d + 1);
  rhs.head(d) = z;
  rhs[d] = 1.0;
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  Vector gamma;
  if (qr.rank() == m) {
    gamma = qr.solve(rhs);
    if (gamma.minCoeff() < -kBaryTol) gamma = simplex_weights(V, z);
  } else {
    gamma = simplex_weights(V, z);
  }

  gamma = gamma.cwiseMax(0.0);
  gamma /= gamma.sum();

  WeightRow row;
  row.projection = V * gamma;
  for (int k = 0; k < m; ++k)
    if (gamma[k] > 0.0) row.entries.emplace_back(simplex.vertices[k], gamma[k]);
  return row;
}

WeightMatrix weight_matrix(const EmbeddedCloud& cloud, double eta, int threads) {
  const int n = static_cast<int>(cloud.coords.rows());
  const int d = cloud.dim;
  if (n < d + 2)
    throw data_error("sample too small for dimension " + std::to_string(d));
  const SphereCloud sphere = lift_cloud(cloud, eta);

  WeightMatrix wm;
  wm.n = n;
  wm.dim = d;
  wm.eta = eta;
  wm.rows.resize(n);
  parallel_for(
      n,
      [&](std::int64_t i) {
        try {
          const SimplexHandle s = locate_simplex(sphere, static_cast<int>(i));
          wm.rows[i] = weight_row(cloud, static_cast<int>(i), s);
        } catch (const numeric_error& e) {
          throw numeric_error(std::string(e.what()) + " [query row " +
                              std::to_string(i) + "]");
        }
      },
      threads);
  return wm;
}

namespace {

// Circumcenter of a full-dimensional simplex, with optional per-point power
// weights (used by the brute-force triangulation to break cocircular ties).
bool circumcenter(const Matrix& coords, const std::vector<int>& verts,
                  const Vector* power, Vector& center) {
  const int d = static_cast<int>(coords.cols());
  const Vector v0 = coords.row(verts[0]).transpose();
  const double w0 = power ? (*power)[verts[0]] : 0.0;
  Matrix A(d, d);
  Vector rhs(d);
  for (int k = 1; k <= d; ++k) {
    const Vector vk = coords.row(verts[k]).transpose();
    const double wk = power ? (*power)[verts[k]] : 0.0;
    A.row(k - 1) = 2.0 * (vk - v0).transpose();
    rhs[k - 1] = vk.squaredNorm() - v0.squaredNorm() - (wk - w0);
  }
  Eigen::PartialPivLU<Matrix> lu(A);
  center = lu.solve(rhs);
  const double scale = A.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
  return (A * center - rhs).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + scale);
}

}  // namespace

bool verify_empty_ball(const EmbeddedCloud& cloud, const SimplexHandle& simplex,
                       int exclude) {
  const int n = static_cast<int>(cloud.coords.rows());
  const int d = cloud.dim;
  if (static_cast<int>(simplex.vertices.size()) != d + 1)
    throw data_error("simplex has wrong vertex count");
  Vector center;
  if (!circumcenter(cloud.coords, simplex.vertices, nullptr, center))
    throw numeric_error("degenerate simplex");
  const double r = (cloud.coords.row(simplex.vertices[0]).transpose() - center).norm();
  for (int p = 0; p < n; ++p) {
    if (p == exclude) continue;
    if (std::find(simplex.vertices.begin(), simplex.vertices.end(), p) !=
        simplex.vertices.end())
      continue;
    const double dist = (cloud.coords.row(p).transpose() - center).norm();
    if (dist < r * (1.0 - kEmptySlack)) return false;
  }
  return true;
}

std::vector<SimplexHandle> brute_force_delaunay(const EmbeddedCloud& cloud) {
  const int n = static_cast<int>(cloud.coords.rows());
  const int d = cloud.dim;
  const int m = d + 1;
  if (n < m) throw data_error("too few points for a full simplex");

  long double subsets = 1.0L;
  for (int t = 0; t < m; ++t) subsets = subsets * (n - t) / (t + 1);
  if (subsets > 1e6)
    throw data_error("brute-force triangulation too large for this cloud");

  // Tiny index-keyed power weights resolve cocircular ties the same way for
  // every subset, so the output is a consistent triangulation. The weights
  // are hashed, not graded, so no arithmetic progression of indices can
  // reproduce an affine relation among the points and cancel out.
  const double scale2 = 1.0 + cloud.coords.rowwise().squaredNorm().maxCoeff();
  Vector power(n);
  for (int i = 0; i < n; ++i) {
    std::uint64_t key = static_cast<std::uint64_t>(i);
    const double u = static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
    power[i] = 1e-7 * scale2 * (0.25 + 0.5 * u);
  }

  std::vector<SimplexHandle> out;
  std::vector<int> idx(m);
  for (int t = 0; t < m; ++t) idx[t] = t;

  while (true) {
    Vector center;
    if (circumcenter(cloud.coords, idx, &power, center)) {
      const Vector v0 = cloud.coords.row(idx[0]).transpose();
      const double pow0 = (v0 - center).squaredNorm() - power[idx[0]];
      bool empty = true;
      for (int p = 0; p < n && empty; ++p) {
        if (std::find(idx.begin(), idx.end(), p) != idx.end()) continue;
        const double powp =
            (cloud.coords.row(p).transpose() - center).squaredNorm() - power[p];
        if (powp < pow0 - 1e-12 * scale2) empty = false;
      }
      if (empty) out.push_back({idx});
    }

    int t = m - 1;
    while (t >= 0 && idx[t] == n - m + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int s = t + 1; s < m; ++s) idx[s] = idx[s - 1] + 1;
  }
  return out;
}

}  // namespace dwt
