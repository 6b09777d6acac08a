#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slantgeo/smooth_map.hpp"

namespace slantgeo {

// Matrix-valued function of the source coordinates with its first partials at a point.
struct MatJet {
  Mat value;
  std::vector<Mat> d;

  static MatJet constant(const Mat& v, int m);
  MatJet transpose() const;
  MatJet inverse() const;
  // Derivative along a source direction e.
  Mat along(const Vec& e) const;
};

// Vector-valued function of the source coordinates; d(:, i) = partial_i value.
struct FieldJet {
  Vec value;
  Mat d;
};

MatJet operator*(const MatJet& a, const MatJet& b);
MatJet operator+(const MatJet& a, const MatJet& b);
MatJet operator-(const MatJet& a, const MatJet& b);
FieldJet operator*(const MatJet& a, const Vec& v);
FieldJet operator*(const MatJet& a, const FieldJet& f);
FieldJet operator+(const FieldJet& a, const FieldJet& b);
FieldJet operator-(const FieldJet& a, const FieldJet& b);
FieldJet operator*(double s, const FieldJet& f);

/// First-order geometry of a map at one source point: metrics, connections,
/// the differential and its Hessians, and the projector fields P (vertical),
/// H (horizontal), R (range), Q (range-perp) with exact first derivatives.
/// A vector w at the point is extended to a field by applying the matching
/// projector field to the constant w (e.g. V' = P(x) v). These extensions stay
/// inside their distribution, so tensorial identities hold without
/// extension-dependent error terms.
class MapGeometry {
 public:
  MapGeometry(const SmoothMap& f, std::span<const double> p, const SplitOptions& options = {});

  const SmoothMap& map() const { return *map_; }
  const PointSplit& split() const { return split_; }
  int m() const { return split_.m(); }
  int n() const { return split_.n(); }

  const Mat& g() const { return g_.value; }
  const Mat& gn() const { return gn_.value; }
  const Tensor3& gamma_source() const { return gamma_m_; }
  const Tensor3& gamma_target() const { return gamma_n_; }
  const MapJets& jets() const { return jets_; }

  const MatJet& metric() const { return g_; }
  const MatJet& target_metric() const { return gn_; }  // g_N along the map
  const MatJet& differential() const { return a_; }
  const MatJet& vertical() const { return p_; }
  const MatJet& horizontal() const { return h_; }
  const MatJet& range() const { return r_; }
  const MatJet& range_perp() const { return q_; }
  const MatJet& adjoint() const { return adj_; }
  // J of the source (resp. target along the map); throw GeometryError when absent.
  const MatJet& j_source() const;
  const MatJet& j_target() const;
  bool has_j_source() const { return j_m_.has_value(); }
  bool has_j_target() const { return j_n_.has_value(); }

  double gs(const Vec& x, const Vec& y) const { return inner(g(), x, y); }
  double gt(const Vec& x, const Vec& y) const { return inner(gn(), x, y); }

  // nabla^M_e f for a source field f.
  Vec cov_source(const FieldJet& f, const Vec& e) const;
  // Pullback connection nabla^F_e f for a field f along the map.
  Vec cov_pullback(const FieldJet& f, const Vec& e) const;
  // nabla^N_u f for a target vector u. Along the range the derivative comes
  // from the horizontal lift of u; transverse directions use the frozen
  // (coordinate-constant) extension, so only the Christoffel term survives.
  Vec cov_target(const FieldJet& f, const Vec& u) const;
  // Lie bracket of two target fields under the same extension rule.
  Vec bracket_target(const FieldJet& a, const FieldJet& b) const;

  // Second fundamental form (nabla F*)(x, y) at the point.
  Vec sff(const Vec& x, const Vec& y) const;
  // O'Neill tensors T_e f and A_e f.
  Vec oneill_t(const Vec& e, const Vec& f) const;
  Vec oneill_a(const Vec& e, const Vec& f) const;
  // V[X', Y'] for horizontal x, y.
  Vec vertical_bracket(const Vec& x, const Vec& y) const;

  Vec horizontal_lift(const Vec& w) const { return split_.horizontal_lift(w); }

 private:
  const SmoothMap* map_;
  PointSplit split_;
  MapJets jets_;
  MetricJets source_metric_;
  Tensor3 gamma_m_;
  Tensor3 gamma_n_;
  MatJet g_;
  MatJet gn_;
  MatJet a_;
  MatJet p_;
  MatJet h_;
  MatJet r_;
  MatJet q_;
  MatJet adj_;
  std::optional<MatJet> j_m_;
  std::optional<MatJet> j_n_;
};

struct SFFValue {
  Vec total;
  Vec range_part;
  Vec perp_part;
};

// (nabla F*)(X,Y) = nabla^F_X F*Y - F*(nabla^M_X Y) for expression-level fields.
SFFValue sff_at(const SmoothMap& f, const VectorField& x, const VectorField& y, std::span<const double> p,
                const SplitOptions& options = {});
SFFValue split_sff(const MapGeometry& geo, const Vec& total);

// Scalar field with exact or numerically estimated derivatives.
struct ScalarJet {
  double value = 0.0;
  Vec gradient;  // coordinate partials
  Mat hessian;   // coordinate second partials
};

/// Dilation lambda as a function on the source. With a declared expression
/// its jets are exact; otherwise lambda is re-estimated by split_at at
/// displaced points with central differences (h = 1e-5 for first, 1e-4 for
/// second derivatives), Richardson-extrapolated once.
class DilationField {
 public:
  DilationField(const SmoothMap& f, std::optional<ScalarExpr> declared, SplitOptions options = {});

  bool declared() const { return declared_.has_value(); }
  double lambda(std::span<const double> p) const;
  ScalarJet jet(std::span<const double> p) const;
  ScalarJet numeric_jet(std::span<const double> p, bool with_hessian = true) const;
  // Jets of ln(lambda) and 1/lambda^2.
  static ScalarJet log_of(const ScalarJet& lam);
  static ScalarJet inverse_square_of(const ScalarJet& lam);

 private:
  double estimate(const Vec& x) const;
  const SmoothMap* map_;
  std::optional<ScalarExpr> declared_;
  SplitOptions options_;
};

// Residual of the conformal identity for the range part of the SFF at horizontal x, y.
double sff_conformal_identity_at(const MapGeometry& geo, const Vec& x, const Vec& y, const ScalarJet& log_lambda);

struct ONeillAtPoint {
  Mat vertical_frame;
  Mat horizontal_frame;
  // t[a][b] = T_{E_a} E_b and a_tab[a][b] = A_{E_a} E_b over the full frame (vertical first).
  std::vector<std::vector<Vec>> t;
  std::vector<std::vector<Vec>> a;
  double decomposition_residual = 0.0;  // worst of the four connection splits
  double t_symmetry_residual = 0.0;     // T_V W - T_W V on vertical pairs
};

ONeillAtPoint oneill_at(const MapGeometry& geo);

struct SOperatorValue {
  Vec s;                   // S_V F*X
  Vec normal;              // nabla^perp_X V
  double duality_residual = 0.0;
};

// V in (range F*)^perp, x horizontal; V is extended by Q(x) v.
SOperatorValue s_operator_at(const MapGeometry& geo, const Vec& v, const Vec& x);
// Same with an explicit perp-valued field along the map.
SOperatorValue s_operator_at(const MapGeometry& geo, const FieldJet& v, const Vec& x);

struct OmegaPhiDerivatives {
  Vec nabla_omega;  // (nabla_V omega) W
  Vec nabla_phi;    // (nabla_V phi) W
  double omega_residual = 0.0;
  double phi_residual = 0.0;
  double omega_parallel_residual = 0.0;
};

OmegaPhiDerivatives omega_phi_covderiv_at(const MapGeometry& geo, const Vec& v, const Vec& w);

struct TensionValue {
  Vec tension;
  bool harmonic = false;
};

inline constexpr double kHarmonicTolerance = 1e-7;
TensionValue tension_at(const MapGeometry& geo);

}  // namespace slantgeo
