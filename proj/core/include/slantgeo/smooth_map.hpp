#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "slantgeo/manifold.hpp"

namespace slantgeo {

// F : source -> target given by one expression per target coordinate.
class SmoothMap {
 public:
  SmoothMap(std::shared_ptr<const ChartManifold> source, std::shared_ptr<const ChartManifold> target,
            std::vector<ScalarExpr> components);

  const ChartManifold& source() const { return *source_; }
  const ChartManifold& target() const { return *target_; }
  std::shared_ptr<const ChartManifold> source_ptr() const { return source_; }
  std::shared_ptr<const ChartManifold> target_ptr() const { return target_; }
  int m() const { return source_->dim(); }
  int n() const { return target_->dim(); }
  const std::vector<ScalarExpr>& components() const { return components_; }

  Vec value_at(std::span<const double> p) const;

 private:
  std::shared_ptr<const ChartManifold> source_;
  std::shared_ptr<const ChartManifold> target_;
  std::vector<ScalarExpr> components_;
};

struct MapJets {
  Vec value;              // F(p)
  Mat differential;       // (a, i) = d_i F^a
  std::vector<Mat> hess;  // hess[a](i, j) = d_i d_j F^a
};

MapJets map_jets_at(const SmoothMap& f, std::span<const double> p);
Mat differential_at(const SmoothMap& f, std::span<const double> p);

struct SplitOptions {
  // Accept rank = min(m, n), i.e. submersions and immersions.
  bool allow_full_rank = false;
  double rank_threshold = 1e-8;
};

struct PointSplit {
  Vec point;
  Vec image;
  int rank = 0;
  Mat g_source;
  Mat g_target;
  Mat differential;
  Mat vertical_basis;    // g_source-orthonormal basis of ker F*
  Mat horizontal_basis;  // g_source-orthonormal basis of (ker F*)^perp
  Mat pushed_basis;      // F* of the horizontal basis
  Mat range_basis;       // g_target-orthonormal basis of range F*
  Mat range_perp_basis;  // g_target-orthonormal basis of (range F*)^perp
  double lambda_sq = 0.0;
  double conformal_residual = 0.0;
  double riemannian_residual = 0.0;

  double lambda() const;
  int m() const { return static_cast<int>(point.size()); }
  int n() const { return static_cast<int>(image.size()); }

  Mat vertical_projector() const { return projector(g_source, vertical_basis); }
  Mat horizontal_projector() const { return projector(g_source, horizontal_basis); }
  Mat range_projector() const { return projector(g_target, range_basis); }
  Mat range_perp_projector() const { return projector(g_target, range_perp_basis); }

  // Horizontal preimage of a vector in range F*.
  Vec horizontal_lift(const Vec& w) const;
};

// Throws DegenerateMapError for rank 0, or rank = min(m, n) unless allowed.
PointSplit split_at(const SmoothMap& f, std::span<const double> p, const SplitOptions& options = {});

enum class Side { domain, range };

struct SlantReport {
  double theta = 0.0;
  double spread = 0.0;
  Side side = Side::domain;
  std::vector<double> samples;
};

// Angle between J v and a subspace; atan2 keeps accuracy near 0 and pi/2.
double wirtinger_angle(const Mat& g, const Mat& subspace_projector, const Vec& jv);

// Probes are the basis vectors plus `probes` random unit vectors drawn from
// a generator seeded with `seed`. Throws GeometryError on a zero-dimensional
// probe space or a missing J.
SlantReport slant_at(const SmoothMap& f, const PointSplit& split, Side side, int probes, std::uint64_t seed = 42);

struct DomainDecomposition {
  Vec phi_v;
  Vec omega_v;
  Vec b_x;
  Vec c_x;
  Mat omega_ker_basis;  // orthonormal basis of omega(ker F*)
  Mat mu_basis;         // its orthogonal complement inside the horizontal space
};

struct RangeDecomposition {
  Vec rho_w;
  Vec varpi_w;
  Vec d_p;
  Vec e_p;
  Mat varpi_range_basis;  // orthonormal basis of varpi(range F*)
  Mat eta_basis;          // its orthogonal complement inside (range F*)^perp
};

// JV = phi V + omega V, JX = B X + C X. Throws GeometryError when v is not
// vertical or x not horizontal to 1e-8 (relative).
DomainDecomposition decompose_domain(const SmoothMap& f, const PointSplit& split, const Vec& v, const Vec& x);

// phi W = rho W + varpi W, phi P = D P + E P with J of the target at F(p).
RangeDecomposition decompose_range(const SmoothMap& f, const PointSplit& split, const Vec& w, const Vec& perp);

// Metric adjoint: g_M(*F* W, X) = g_N(W, F* X), valued in the horizontal space.
Mat adjoint_matrix(const PointSplit& split);
Vec adjoint_at(const PointSplit& split, const Vec& w);

}  // namespace slantgeo
