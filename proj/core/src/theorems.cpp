#include "slantgeo/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "slantgeo/errors.hpp"

namespace slantgeo {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(CheckRole r) {
  switch (r) {
    case CheckRole::identity: return "identity";
    case CheckRole::inequality: return "inequality";
    case CheckRole::clause: return "clause";
    case CheckRole::relation: return "relation";
  }
  return "?";
}

bool is_gating(CheckRole r) { return r == CheckRole::identity || r == CheckRole::inequality; }

bool SuiteResult::gating_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckReport& c) { return is_gating(c.role) && c.verdict == Verdict::fail; });
}

namespace {

struct CheckSpec {
  CheckRole role;
  double tolerance;
};

const std::map<std::string, CheckSpec, std::less<>>& registry() {
  using R = CheckRole;
  static const std::map<std::string, CheckSpec, std::less<>> table = {
      {"split.orthonormality", {R::identity, 1e-10}},
      {"conformality", {R::identity, 1e-8}},
      {"declared_lambda", {R::identity, 1e-8}},
      {"lambda_gradient.crosscheck", {R::identity, 1e-5}},
      {"declared_theta", {R::identity, 1e-6}},
      {"slant.pointwise", {R::identity, 1e-6}},
      {"structure.jsq", {R::clause, 1e-10}},
      {"structure.compat", {R::clause, 1e-10}},
      {"structure.kahler", {R::clause, 1e-10}},
      {"decomposition.completeness", {R::identity, 1e-12}},
      {"domain_algebra.phi_squared", {R::identity, 1e-8}},
      {"domain_algebra.phi_isometry", {R::identity, 1e-8}},
      {"domain_algebra.omega_isometry", {R::identity, 1e-8}},
      {"domain_algebra.c_skew", {R::identity, 1e-8}},
      {"domain_algebra.c_square", {R::identity, 1e-8}},
      {"domain_algebra.c2_symmetric", {R::identity, 1e-8}},
      {"domain_algebra.omega_phi", {R::identity, 1e-8}},
      {"range_algebra.rho_squared", {R::identity, 1e-8}},
      {"range_algebra.rho_isometry", {R::identity, 1e-8}},
      {"range_algebra.varpi_isometry", {R::identity, 1e-8}},
      {"sff.symmetry", {R::identity, 1e-9}},
      {"sff.splitting", {R::identity, 1e-10}},
      {"sff.conformal", {R::identity, 1e-6}},
      {"shape_operator.duality", {R::identity, 1e-8}},
      {"oneill.decomposition", {R::identity, 1e-9}},
      {"oneill.t_symmetry", {R::identity, 1e-9}},
      {"fiber.omega_derivative", {R::identity, 1e-8}},
      {"fiber.phi_derivative", {R::identity, 1e-8}},
      {"tension", {R::clause, 1e-7}},
      {"space_form.crosscheck", {R::clause, 1e-8}},
      {"fiber_t_phi", {R::identity, 1e-8}},
      {"fiber_t_phi.omega_parallel", {R::clause, 1e-8}},
      {"horizontal_integrability.integrable", {R::clause, 1e-8}},
      {"horizontal_integrability.bracket_criterion", {R::clause, 1e-8}},
      {"horizontal_integrability.homothetic", {R::clause, 1e-6}},
      {"horizontal_integrability", {R::relation, 0.0}},
      {"vertical_geodesic.geodesic", {R::clause, 1e-8}},
      {"vertical_geodesic.criterion", {R::clause, 1e-8}},
      {"vertical_geodesic", {R::relation, 0.0}},
      {"vertical_geodesic.identity", {R::identity, 1e-8}},
      {"vertical_geodesic.consequence", {R::clause, 1e-6}},
      {"horizontal_geodesic.geodesic", {R::clause, 1e-8}},
      {"horizontal_geodesic.homothetic", {R::clause, 1e-6}},
      {"horizontal_geodesic.criterion", {R::clause, 1e-8}},
      {"horizontal_geodesic", {R::relation, 0.0}},
      {"harmonicity.harmonic", {R::clause, kHarmonicTolerance}},
      {"harmonicity.omega_parallel", {R::clause, 1e-8}},
      {"harmonicity.lambda_constant", {R::clause, 1e-6}},
      {"harmonicity", {R::relation, 0.0}},
      {"ricci_vertical", {R::inequality, 1e-8}},
      {"ricci_vertical.slack_oracle", {R::identity, 1e-8}},
      {"ricci_horizontal", {R::inequality, 1e-8}},
      {"ricci_horizontal.slack_oracle", {R::identity, 1e-6}},
      {"range_integrability.integrable", {R::clause, 1e-8}},
      {"range_integrability.perp_criterion", {R::clause, 1e-8}},
      {"range_integrability.sff_criterion", {R::clause, 1e-8}},
      {"range_integrability", {R::relation, 0.0}},
      {"perp_foliation.integrable", {R::clause, 1e-8}},
      {"perp_foliation.geodesic", {R::clause, 1e-8}},
      {"perp_foliation.criterion", {R::clause, 1e-8}},
      {"perp_foliation", {R::relation, 0.0}},
      {"range_geodesic.geodesic", {R::clause, 1e-8}},
      {"range_geodesic.criterion", {R::clause, 1e-8}},
      {"range_geodesic", {R::relation, 0.0}},
      {"range_geodesic.identity", {R::identity, 1e-8}},
      {"perp_geodesic.geodesic", {R::clause, 1e-8}},
      {"perp_geodesic.homothetic", {R::clause, 1e-6}},
      {"perp_geodesic.criterion", {R::clause, 1e-8}},
      {"perp_geodesic", {R::relation, 0.0}},
      {"range_harmonicity.perp_condition", {R::clause, 1e-6}},
      {"range_harmonicity.range_condition", {R::clause, 1e-6}},
      {"range_harmonicity.minimal_fibers", {R::clause, 1e-8}},
      {"range_harmonicity", {R::relation, 0.0}},
      {"range_norm_expansion.range", {R::identity, 1e-7}},
      {"range_norm_expansion.perp", {R::identity, 1e-7}},
  };
  return table;
}

const CheckSpec& spec_of(const std::string& id) {
  const auto& t = registry();
  const auto it = t.find(id);
  if (it == t.end()) throw Error("unknown check id: " + id);
  return it->second;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

class CheckBook {
 public:
  explicit CheckBook(const SuiteConfig& config) : config_(config) {}

  // Largest value of a quantity that feeds a paper-note rather than a check.
  void observe(const std::string& key, double value) {
    double& slot = observed_[key];
    slot = std::max(slot, value);
  }
  double observed(const std::string& key) const {
    const auto it = observed_.find(key);
    return it == observed_.end() ? 0.0 : it->second;
  }

  void record(const std::string& id, int point, double residual) {
    Entry& e = entry(id);
    if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
    e.points.insert(point);
    if (e.worst < 0 || residual > e.residual) {
      e.residual = residual;
      e.worst = point;
    }
  }

  void not_applicable(const std::string& id, int point, const std::string& reason) {
    Entry& e = entry(id);
    e.na_points.insert(point);
    if (e.reasons.size() < 3 && std::find(e.reasons.begin(), e.reasons.end(), reason) == e.reasons.end()) {
      e.reasons.push_back(reason);
    }
  }

  void inequality(const std::string& id, int point, const InequalityReport& r) {
    const double measure = std::max(-r.slack, r.equality_expected ? std::fabs(r.slack) : 0.0);
    Entry& e = entry(id);
    const bool worse = !e.ineq || measure > e.ineq_measure || (measure == e.ineq_measure && r.slack < e.ineq->slack);
    record(id, point, measure);
    if (worse) {
      e.ineq = r;
      e.ineq_measure = measure;
    }
  }

  void note(const std::string& id, const std::string& text) {
    Entry& e = entry(id);
    if (e.notes.empty()) e.notes = text;
  }

  double tolerance(const std::string& id) const { return tolerance_for(config_, id); }

  std::vector<CheckReport> finalize() const {
    std::vector<CheckReport> out;
    for (const auto& [id, e] : entries_) {
      CheckReport c;
      c.id = id;
      c.role = spec_of(id).role;
      c.tolerance = tolerance(id);
      c.points.assign(e.points.begin(), e.points.end());
      c.worst_point = e.worst;
      c.residual = e.points.empty() ? 0.0 : e.residual;
      c.notes = e.notes;
      std::string reasons;
      for (const auto& r : e.reasons) reasons += (reasons.empty() ? "" : "; ") + r;
      if (e.points.empty()) {
        c.verdict = Verdict::not_applicable;
        c.notes = reasons.empty() ? "no point satisfied the preconditions" : reasons;
      } else if (!(c.residual <= c.tolerance)) {
        c.verdict = Verdict::fail;
      } else if (!e.na_points.empty()) {
        c.verdict = Verdict::not_applicable;
        std::string msg = "preconditions failed at " + std::to_string(e.na_points.size()) + " point(s): " + reasons;
        c.notes = c.notes.empty() ? msg : c.notes + "; " + msg;
      } else {
        c.verdict = Verdict::pass;
      }
      if (e.ineq) {
        c.inequality = e.ineq;
        c.inequality->check_id = id;
        c.inequality->verdict = c.verdict;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  struct Entry {
    double residual = 0.0;
    int worst = -1;
    std::set<int> points;
    std::set<int> na_points;
    std::vector<std::string> reasons;
    std::string notes;
    std::optional<InequalityReport> ineq;
    double ineq_measure = -1.0;
  };

  Entry& entry(const std::string& id) {
    spec_of(id);
    return entries_[id];
  }

  const SuiteConfig& config_;
  std::map<std::string, double> observed_;
  std::map<std::string, Entry> entries_;
};

MatJet scaled(const ScalarJet& s, const MatJet& m) {
  MatJet r{s.value * m.value, {}};
  for (std::size_t i = 0; i < m.d.size(); ++i) r.d.push_back(s.value * m.d[i] + s.gradient(static_cast<Eigen::Index>(i)) * m.value);
  return r;
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double orthonormality_defect(const Mat& g, const Mat& b) {
  if (b.cols() == 0) return 0.0;
  return max_abs(b.transpose() * g * b - Mat::Identity(b.cols(), b.cols()));
}

double cross_defect(const Mat& g, const Mat& a, const Mat& b) {
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  return max_abs(a.transpose() * g * b);
}

// Alternative T_V W on vertical pairs from the second jets of the map.
Vec t_alternative(const MapGeometry& geo, const Vec& v, const Vec& w) {
  return -geo.horizontal_lift(geo.differential().along(v) * w) + geo.horizontal().value * geo.gamma_source().contract(v, w);
}

double max_tensor_norm(const MapGeometry& geo, const Mat& a, const Mat& b, bool use_t) {
  double worst = 0.0;
  for (int i = 0; i < a.cols(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      const Vec t = use_t ? geo.oneill_t(a.col(i), b.col(j)) : geo.oneill_a(a.col(i), b.col(j));
      worst = std::max(worst, norm(geo.g(), t));
    }
  }
  return worst;
}

Mat gamma_slice_contracted(const Tensor3& gamma, const Vec& w) {
  const int m = gamma.dim(1);
  Mat out = Mat::Zero(m, m);
  for (int k = 0; k < gamma.dim(0); ++k) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out(i, j) += w(k) * gamma(k, i, j);
    }
  }
  return out;
}

class PointEval {
 public:
  PointEval(const SuiteConfig& config, CheckBook& book, int index, const Vec& p, const MapGeometry& geo,
            const DilationField& dilation, const DilationField& numeric_dilation)
      : config_(config),
        book_(book),
        idx_(index),
        p_(p),
        geo_(geo),
        s_(geo.split()),
        dilation_(dilation),
        numeric_dilation_(numeric_dilation),
        rng_(config.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1)) {}

  void run(PointSummary& summary) {
    summary.rank = s_.rank;
    summary.lambda = s_.lambda();
    summary.conformal_residual = s_.conformal_residual;
    common();
    if (config_.side == Side::domain) {
      guarded(domain_ids(), [&] { domain(summary); });
    } else {
      guarded(range_ids(), [&] { range(summary); });
    }
  }

 private:
  // ---- helpers ----
  double tol(const std::string& id) const { return book_.tolerance(id); }
  void rec(const std::string& id, double r) { book_.record(id, idx_, r); }
  void na(const std::string& id, const std::string& why) { book_.not_applicable(id, idx_, why); }
  void na_all(const std::vector<std::string>& ids, const std::string& why) {
    for (const auto& id : ids) na(id, why);
  }

  void guarded(const std::vector<std::string>& ids, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const GeometryError& e) {
      na_all(ids, e.what());
    }
  }

  Vec random_unit(const Mat& basis) {
    if (basis.cols() == 0) return Vec::Zero(basis.rows());
    std::normal_distribution<double> normal;
    Vec c(basis.cols());
    for (int i = 0; i < c.size(); ++i) c(i) = normal(rng_);
    return basis * (c / c.norm());
  }

  std::vector<Vec> probes(const Mat& basis, int extra) {
    std::vector<Vec> out;
    for (int i = 0; i < basis.cols(); ++i) out.push_back(basis.col(i));
    for (int i = 0; i < extra && basis.cols() > 0; ++i) out.push_back(random_unit(basis));
    return out;
  }

  const ScalarJet& lambda_jet(bool hessian) {
    if (!lam_ || (hessian && !lam_hessian_)) {
      lam_ = dilation_.declared() ? dilation_.jet(as_span(p_)) : dilation_.numeric_jet(as_span(p_), hessian);
      lam_hessian_ = hessian || dilation_.declared();
    }
    return *lam_;
  }

  double lambda() const { return s_.lambda(); }

  // |H grad ln(lambda)|_g
  double horizontal_log_gradient() {
    const ScalarJet l = DilationField::log_of(lambda_jet(false));
    const Vec grad = Eigen::PartialPivLU<Mat>(geo_.g()).solve(l.gradient);
    return norm(geo_.g(), geo_.horizontal().value * grad);
  }

  bool conformal() const { return s_.conformal_residual <= 1e-8 * std::max(1.0, s_.lambda_sq); }

  void relation_any_two(const std::string& id, const std::vector<std::pair<std::string, double>>& clauses) {
    int holding = 0;
    for (const auto& [cid, r] : clauses) holding += r <= tol(cid) ? 1 : 0;
    const bool violated = holding == static_cast<int>(clauses.size()) - 1;
    rec(id, violated ? 1.0 : 0.0);
    if (violated) book_.note(id, describe(clauses));
  }

  void relation_iff(const std::string& id, const std::pair<std::string, double>& a,
                    const std::vector<std::pair<std::string, double>>& b) {
    const bool ha = a.second <= tol(a.first);
    bool hb = true;
    for (const auto& [cid, r] : b) hb = hb && r <= tol(cid);
    const bool violated = ha != hb;
    rec(id, violated ? 1.0 : 0.0);
    if (violated) {
      std::vector<std::pair<std::string, double>> all{a};
      all.insert(all.end(), b.begin(), b.end());
      book_.note(id, describe(all));
    }
  }

  void relation_implies(const std::string& id, const std::vector<std::pair<std::string, double>>& premises,
                        const std::pair<std::string, double>& conclusion) {
    bool all = true;
    for (const auto& [cid, r] : premises) all = all && r <= tol(cid);
    const bool violated = all && conclusion.second > tol(conclusion.first);
    rec(id, violated ? 1.0 : 0.0);
    if (violated) {
      auto c = premises;
      c.push_back(conclusion);
      book_.note(id, describe(c));
    }
  }

  std::string describe(const std::vector<std::pair<std::string, double>>& clauses) {
    std::string s = "first violation at point " + std::to_string(idx_) + ":";
    for (const auto& [cid, r] : clauses) {
      s += " " + cid + (r <= tol(cid) ? " holds" : " fails") + " (" + fmt(r) + ")";
    }
    return s;
  }

  // ---- checks on every map ----
  void common() {
    const Mat& g = geo_.g();
    const Mat& gn = geo_.gn();
    rec("split.orthonormality",
        std::max({orthonormality_defect(g, s_.vertical_basis), orthonormality_defect(g, s_.horizontal_basis),
                  cross_defect(g, s_.vertical_basis, s_.horizontal_basis), orthonormality_defect(gn, s_.range_basis),
                  orthonormality_defect(gn, s_.range_perp_basis), cross_defect(gn, s_.range_basis, s_.range_perp_basis)}));
    rec("conformality", s_.conformal_residual / std::max(s_.lambda_sq, std::numeric_limits<double>::min()));

    if (config_.declared_lambda) {
      const double d = config_.declared_lambda->eval(as_span(p_));
      rec("declared_lambda", std::fabs(lambda() - d) / std::max(std::fabs(d), 1e-300));
      const ScalarJet num = numeric_dilation_.numeric_jet(as_span(p_), false);
      const ScalarJet exact = dilation_.jet(as_span(p_));
      rec("lambda_gradient.crosscheck",
          (num.gradient - exact.gradient).cwiseAbs().maxCoeff() / std::max(1.0, std::fabs(exact.value)));
    } else {
      na("declared_lambda", "no dilation declared");
      na("lambda_gradient.crosscheck", "no dilation declared");
    }

    const Mat& vb = s_.vertical_basis;
    const Mat& hb = s_.horizontal_basis;
    Mat frame(geo_.m(), vb.cols() + hb.cols());
    frame << vb, hb;
    const int k = static_cast<int>(vb.cols());
    auto ext = [&](int c) { return (c < k ? geo_.vertical() : geo_.horizontal()) * Vec(frame.col(c)); };
    double sym = 0.0;
    double splitting = 0.0;
    for (int a = 0; a < frame.cols(); ++a) {
      for (int b = 0; b < frame.cols(); ++b) {
        const Vec x = frame.col(a);
        const Vec y = frame.col(b);
        const FieldJet yf = ext(b);
        const FieldJet xf = ext(a);
        const Vec bxy = geo_.cov_pullback(geo_.differential() * yf, x) - geo_.differential().value * geo_.cov_source(yf, x);
        const Vec byx = geo_.cov_pullback(geo_.differential() * xf, y) - geo_.differential().value * geo_.cov_source(xf, y);
        const Vec tensor = geo_.sff(x, y);
        sym = std::max({sym, norm(gn, bxy - byx), norm(gn, bxy - tensor)});
        const SFFValue sv = split_sff(geo_, tensor);
        splitting = std::max({splitting, std::fabs(geo_.gt(sv.range_part, sv.perp_part)),
                         norm(gn, sv.total - sv.range_part - sv.perp_part),
                         norm(gn, geo_.range_perp().value * sv.range_part), norm(gn, geo_.range().value * sv.perp_part)});
      }
    }
    rec("sff.symmetry", sym);
    rec("sff.splitting", splitting);

    if (conformal() && hb.cols() > 0) {
      const ScalarJet l = DilationField::log_of(lambda_jet(false));
      double worst = 0.0;
      for (int a = 0; a < hb.cols(); ++a) {
        for (int b = 0; b < hb.cols(); ++b) worst = std::max(worst, sff_conformal_identity_at(geo_, hb.col(a), hb.col(b), l));
      }
      rec("sff.conformal", worst);
    } else {
      na("sff.conformal", "map is not horizontally conformal at this point");
    }

    if (s_.range_perp_basis.cols() == 0) {
      na("shape_operator.duality", "range of the differential has trivial orthogonal complement");
    } else {
      double worst = 0.0;
      for (int q = 0; q < s_.range_perp_basis.cols(); ++q) {
        for (int a = 0; a < hb.cols(); ++a) {
          worst = std::max(worst, s_operator_at(geo_, Vec(s_.range_perp_basis.col(q)), Vec(hb.col(a))).duality_residual);
        }
      }
      rec("shape_operator.duality", worst);
    }

    const ONeillAtPoint o = oneill_at(geo_);
    rec("oneill.decomposition", o.decomposition_residual);
    rec("oneill.t_symmetry", o.t_symmetry_residual);
    tension_ = norm(gn, tension_at(geo_).tension);
    rec("tension", tension_);
  }

  // ---- domain side ----
  static std::vector<std::string> domain_ids() {
    return {"structure.jsq", "structure.compat", "structure.kahler", "slant.pointwise", "declared_theta",
            "decomposition.completeness", "domain_algebra.phi_squared", "domain_algebra.phi_isometry", "domain_algebra.omega_isometry", "domain_algebra.c_skew", "domain_algebra.c_square",
            "domain_algebra.c2_symmetric", "domain_algebra.omega_phi", "fiber.omega_derivative", "fiber.phi_derivative", "fiber_t_phi", "fiber_t_phi.omega_parallel", "horizontal_integrability.integrable",
            "horizontal_integrability.bracket_criterion", "horizontal_integrability.homothetic", "horizontal_integrability", "vertical_geodesic.geodesic", "vertical_geodesic.criterion", "vertical_geodesic", "vertical_geodesic.identity",
            "vertical_geodesic.consequence", "horizontal_geodesic.geodesic", "horizontal_geodesic.homothetic", "horizontal_geodesic.criterion", "horizontal_geodesic", "harmonicity.harmonic", "harmonicity.omega_parallel",
            "harmonicity.lambda_constant", "harmonicity", "ricci_vertical", "ricci_vertical.slack_oracle", "ricci_horizontal", "ricci_horizontal.slack_oracle",
            "space_form.crosscheck"};
  }

  void structure(const ChartManifold& m, std::span<const double> at) {
    const HermitianResiduals h = hermitian_kahler_residuals(m, at);
    rec("structure.jsq", h.jsq);
    rec("structure.compat", h.compat);
    rec("structure.kahler", h.kahler);
    kahler_ = h.kahler <= tol("structure.kahler");
  }

  void domain(PointSummary& summary) {
    const SmoothMap& f = *config_.map;
    if (!f.source().has_complex_structure()) throw GeometryError("source has no almost complex structure");
    structure(f.source(), as_span(p_));
    const SlantReport sr = slant_at(f, s_, Side::domain, 8, config_.seed + static_cast<std::uint64_t>(idx_));
    theta_ = sr.theta;
    summary.theta = sr.theta;
    summary.slant_spread = sr.spread;
    rec("slant.pointwise", sr.spread);
    pointwise_slant_ = sr.spread <= tol("slant.pointwise");
    if (config_.declared_theta) {
      rec("declared_theta", std::fabs(theta_ - config_.declared_theta->eval(as_span(p_))));
    } else {
      na("declared_theta", "no slant angle declared");
    }

    const Mat& g = geo_.g();
    const Mat& j0 = geo_.j_source().value;
    const Mat& p0 = geo_.vertical().value;
    const Mat& h0 = geo_.horizontal().value;
    const double c2 = std::cos(theta_) * std::cos(theta_);
    const double s2 = std::sin(theta_) * std::sin(theta_);
    auto phi = [&](const Vec& v) { return Vec(p0 * (j0 * v)); };
    auto omega = [&](const Vec& v) { return Vec(h0 * (j0 * v)); };
    auto big_c = [&](const Vec& x) { return Vec(h0 * (j0 * x)); };

    double l31 = 0, l32p = 0, l32o = 0, l33[4] = {0, 0, 0, 0}, l33_printed = 0, comp = 0;
    for (int q = 0; q < config_.probe_pairs; ++q) {
      const Vec v = random_unit(s_.vertical_basis);
      const Vec w = random_unit(s_.vertical_basis);
      const Vec x = random_unit(s_.horizontal_basis);
      const Vec y = random_unit(s_.horizontal_basis);
      l31 = std::max(l31, norm(g, phi(phi(v)) + c2 * v));
      l32p = std::max(l32p, std::fabs(inner(g, phi(v), phi(w)) - c2 * inner(g, v, w)));
      l32o = std::max(l32o, std::fabs(inner(g, omega(v), omega(w)) - s2 * inner(g, v, w)));
      l33[0] = std::max(l33[0], std::fabs(inner(g, x, big_c(y)) + inner(g, big_c(x), y)));
      l33[1] = std::max(l33[1], std::fabs(inner(g, big_c(x), big_c(y)) + inner(g, x, big_c(big_c(y)))));
      l33[2] = std::max(l33[2], std::fabs(inner(g, x, big_c(big_c(y))) - inner(g, big_c(big_c(x)), y)));
      // Both sides equal -g(BX, phi V).
      l33[3] = std::max(l33[3], std::fabs(inner(g, x, omega(phi(v))) - inner(g, big_c(x), omega(v))));
      l33_printed = std::max(l33_printed, std::fabs(inner(g, x, omega(phi(v))) + inner(g, big_c(x), omega(v))));
      if (s_.horizontal_basis.cols() > 0) {
        const DomainDecomposition d = decompose_domain(f, s_, v, x);
        const double scale = std::max(1.0, norm(g, j0 * v) + norm(g, j0 * x));
        comp = std::max(comp, (norm(g, j0 * v - d.phi_v - d.omega_v) + norm(g, j0 * x - d.b_x - d.c_x)) / scale);
      }
    }
    rec("domain_algebra.phi_squared", l31);
    rec("domain_algebra.phi_isometry", l32p);
    rec("domain_algebra.omega_isometry", l32o);
    rec("domain_algebra.c_skew", l33[0]);
    rec("domain_algebra.c_square", l33[1]);
    rec("domain_algebra.c2_symmetric", l33[2]);
    rec("domain_algebra.omega_phi", l33[3]);
    if (selected(config_, "domain_algebra.omega_phi")) book_.observe("domain_algebra.omega_phi.printed", l33_printed);
    rec("decomposition.completeness", comp);

    domain_theorems(c2, s2);
  }

  void domain_theorems(double c2, double s2) {
    const Mat& g = geo_.g();
    const Mat& vb = s_.vertical_basis;
    const Mat& hb = s_.horizontal_basis;
    const MatJet& jm = geo_.j_source();
    const MatJet& pm = geo_.vertical();
    const MatJet& hm = geo_.horizontal();
    const MatJet& am = geo_.differential();
    const Mat& j0 = jm.value;
    const Mat& p0 = pm.value;
    const Mat& h0 = hm.value;
    const Mat& a0 = am.value;
    const double lam2 = s_.lambda_sq;
    const MatJet hjp = hm * jm * pm;
    const MatJet hjpjp = hjp * jm * pm;
    const MatJet ahjp = am * hjp;
    const MatJet ahjpjp = am * hjpjp;
    auto omega = [&](const Vec& v) { return Vec(h0 * (j0 * v)); };
    auto phi = [&](const Vec& v) { return Vec(p0 * (j0 * v)); };
    auto big_b = [&](const Vec& x) { return Vec(p0 * (j0 * x)); };
    auto big_c = [&](const Vec& x) { return Vec(h0 * (j0 * x)); };
    const int k = static_cast<int>(vb.cols());
    const int r = static_cast<int>(hb.cols());

    // Covariant derivatives of omega and phi on the vertical frame.
    double omega_deriv = 0.0, phi_deriv = 0.0, omega_par = 0.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const OmegaPhiDerivatives d = omega_phi_covderiv_at(geo_, vb.col(i), vb.col(j));
        omega_deriv = std::max(omega_deriv, d.omega_residual);
        phi_deriv = std::max(phi_deriv, d.phi_residual);
        omega_par = std::max(omega_par, d.omega_parallel_residual);
      }
    }
    if (kahler_) {
      rec("fiber.omega_derivative", omega_deriv);
      rec("fiber.phi_derivative", phi_deriv);
    } else {
      na("fiber.omega_derivative", "complex structure is not parallel at this point");
      na("fiber.phi_derivative", "complex structure is not parallel at this point");
    }

    const double hgrad = horizontal_log_gradient();
    const double geodesic = max_tensor_norm(geo_, vb, vb, true);

    // T along phi V when omega is parallel.
    rec("fiber_t_phi.omega_parallel", omega_par);
    if (kahler_ && omega_par <= tol("fiber_t_phi.omega_parallel")) {
      double worst = 0.0;
      for (const Vec& v : probes(vb, 4)) {
        const Vec pv = phi(v);
        worst = std::max(worst, norm(g, geo_.oneill_t(pv, pv) + c2 * geo_.oneill_t(v, v)));
      }
      rec("fiber_t_phi", worst);
    } else {
      na("fiber_t_phi", kahler_ ? "omega is not parallel at this point" : "complex structure is not parallel at this point");
    }

    // Integrability of the horizontal distribution.
    double c1 = 0.0;
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) c1 = std::max(c1, norm(g, geo_.vertical_bracket(hb.col(a), hb.col(b))));
    }
    double c2i = 0.0;
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        const Vec x = hb.col(a);
        const Vec y = hb.col(b);
        for (int j = 0; j < k; ++j) {
          const Vec v = vb.col(j);
          const FieldJet wp = ahjpjp * v;
          const FieldJet wo = ahjp * v;
          const double e = geo_.gt(geo_.cov_pullback(wp, x), a0 * y) - geo_.gt(geo_.cov_pullback(wp, y), a0 * x) -
                           geo_.gt(geo_.cov_pullback(wo, x), a0 * big_c(y)) + geo_.gt(geo_.cov_pullback(wo, y), a0 * big_c(x));
          c2i = std::max(c2i, std::fabs(e));
        }
      }
    }
    rec("horizontal_integrability.integrable", c1);
    rec("horizontal_integrability.bracket_criterion", c2i);
    rec("horizontal_integrability.homothetic", hgrad);
    relation_any_two("horizontal_integrability", {{"horizontal_integrability.integrable", c1}, {"horizontal_integrability.bracket_criterion", c2i}, {"horizontal_integrability.homothetic", hgrad}});

    // Totally geodesic fibers.
    double criterion = 0.0;
    double ident = 0.0;
    for (int i = 0; i < k; ++i) {
      const Vec v = vb.col(i);
      for (int j = 0; j < k; ++j) {
        const Vec w = vb.col(j);
        for (int l = 0; l < r; ++l) {
          const Vec x = hb.col(l);
          const double tbx = inner(g, geo_.oneill_t(v, big_b(x)), omega(w));
          const double e = lam2 * tbx - (geo_.gt(geo_.sff(v, omega(phi(w))), a0 * x) - geo_.gt(geo_.sff(v, omega(w)), a0 * big_c(x)));
          criterion = std::max(criterion, std::fabs(e));
          const Vec nab_ow = a0 * geo_.cov_source(hjp * w, v);
          const Vec nab_opw = a0 * geo_.cov_source(hjpjp * w, v);
          const double id = s2 * inner(g, geo_.oneill_t(v, w), x) + tbx -
                            (geo_.gt(nab_ow, a0 * big_c(x)) - geo_.gt(nab_opw, a0 * x)) / lam2;
          ident = std::max(ident, std::fabs(id));
        }
      }
    }
    rec("vertical_geodesic.geodesic", geodesic);
    rec("vertical_geodesic.criterion", criterion);
    relation_iff("vertical_geodesic", {"vertical_geodesic.geodesic", geodesic}, {{"vertical_geodesic.criterion", criterion}});
    if (kahler_ && pointwise_slant_) {
      rec("vertical_geodesic.identity", ident);
    } else {
      na("vertical_geodesic.identity", kahler_ ? "map is not pointwise slant here" : "complex structure is not parallel at this point");
    }

    if (geodesic <= tol("vertical_geodesic.geodesic")) {
      const ScalarJet l = DilationField::log_of(lambda_jet(false));
      const Vec grad = Eigen::PartialPivLU<Mat>(g).solve(l.gradient);
      double worst = 0.0;
      for (int j = 0; j < k; ++j) {
        const Vec v = vb.col(j);
        for (int a = 0; a < r; ++a) {
          const Vec x = hb.col(a);
          const double e = inner(g, geo_.oneill_t(v, big_b(x)), omega(v)) - 2.0 * inner(g, v, grad) * inner(g, omega(phi(v)), x);
          worst = std::max(worst, std::fabs(e));
        }
      }
      rec("vertical_geodesic.consequence", worst);
      book_.note("vertical_geodesic.consequence", "evaluated with W = V");
    } else {
      na("vertical_geodesic.consequence", "fibers are not totally geodesic at this point");
    }

    // Totally geodesic horizontal distribution.
    const double ai = max_tensor_norm(geo_, hb, hb, false);
    double aiii = 0.0;
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < r; ++b) {
        const Vec x = hb.col(a);
        const Vec y = hb.col(b);
        for (int j = 0; j < k; ++j) {
          const Vec v = vb.col(j);
          const double e = lam2 * inner(g, geo_.oneill_a(x, big_b(y)), omega(v)) -
                           (geo_.gt(geo_.cov_pullback(ahjp * v, x), a0 * big_c(y)) -
                            geo_.gt(geo_.cov_pullback(ahjpjp * v, x), a0 * y));
          aiii = std::max(aiii, std::fabs(e));
        }
      }
    }
    rec("horizontal_geodesic.geodesic", ai);
    rec("horizontal_geodesic.homothetic", hgrad);
    rec("horizontal_geodesic.criterion", aiii);
    relation_any_two("horizontal_geodesic", {{"horizontal_geodesic.geodesic", ai}, {"horizontal_geodesic.homothetic", hgrad}, {"horizontal_geodesic.criterion", aiii}});

    // Harmonicity.
    rec("harmonicity.harmonic", tension_);
    rec("harmonicity.omega_parallel", omega_par);
    rec("harmonicity.lambda_constant", hgrad);
    relation_iff("harmonicity", {"harmonicity.harmonic", tension_},
                 {{"harmonicity.omega_parallel", omega_par}, {"harmonicity.lambda_constant", hgrad}});

    // Ricci inequalities.
    space_form_crosscheck();
    if (config_.v != 0.0) {
      const std::string msg = "ambient curvature from the complex space form formula at v = " + fmt(config_.v) +
                              "; the metric is not checked to realize it";
      book_.note("ricci_vertical", msg);
      book_.note("ricci_horizontal", msg);
    }
    if (k % 2 != 0) book_.note("ricci_vertical", "dim ker = " + std::to_string(k) + " is odd");
    const int dim_omega = static_cast<int>(metric_orthonormalize(h0 * j0 * vb, g).cols());
    if (dim_omega != k) {
      book_.note("ricci_horizontal", "dim omega(ker) = " + std::to_string(dim_omega) + " differs from dim ker = " + std::to_string(k));
    }
    if (s_.range_perp_basis.cols() != 0) {
      na("ricci_vertical", "range of the differential has a nontrivial orthogonal complement");
      na("ricci_vertical.slack_oracle", "range of the differential has a nontrivial orthogonal complement");
    } else {
      for (const Vec& u : probes(vb, 4)) {
        const InequalityReport rep = ricci_vertical_check(geo_, config_.v, theta_, u, tol("ricci_vertical"));
        book_.inequality("ricci_vertical", idx_, rep);
        rec("ricci_vertical.slack_oracle", std::fabs(rep.slack - rep.oracle_slack));
      }
    }
    if (r == 0) {
      na("ricci_horizontal", "horizontal space is trivial");
      na("ricci_horizontal.slack_oracle", "horizontal space is trivial");
    } else {
      const ScalarJet& lam = lambda_jet(true);
      for (const Vec& x : probes(hb, 4)) {
        const InequalityReport rep = ricci_horizontal_check(geo_, config_.v, lam, x, tol("ricci_horizontal"));
        book_.inequality("ricci_horizontal", idx_, rep);
        rec("ricci_horizontal.slack_oracle", std::fabs(rep.slack - rep.oracle_slack));
      }
    }
  }

  void space_form_crosscheck() {
    const ChartManifold& src = config_.map->source();
    const CurvatureAtPoint curv = riemann_at(src, as_span(p_));
    const int m = geo_.m();
    const Mat& j0 = geo_.j_source().value;
    const Mat eye = Mat::Identity(m, m);
    double worst = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        for (int c = 0; c < m; ++c) {
          for (int d = 0; d < m; ++d) {
            const double sf = space_form_curvature(config_.v, geo_.g(), j0, eye.col(a), eye.col(b), eye.col(c), eye.col(d));
            worst = std::max(worst, std::fabs(curv(a, b, c, d) - sf));
          }
        }
      }
    }
    rec("space_form.crosscheck", worst);
  }

  // ---- range side ----
  static std::vector<std::string> range_ids() {
    return {"structure.jsq", "structure.compat", "structure.kahler", "slant.pointwise", "declared_theta",
            "decomposition.completeness", "range_algebra.rho_squared", "range_algebra.rho_isometry", "range_algebra.varpi_isometry", "range_integrability.integrable", "range_integrability.perp_criterion",
            "range_integrability.sff_criterion", "range_integrability", "perp_foliation.integrable", "perp_foliation.geodesic", "perp_foliation.criterion", "perp_foliation", "range_geodesic.geodesic", "range_geodesic.criterion",
            "range_geodesic", "range_geodesic.identity", "perp_geodesic.geodesic", "perp_geodesic.homothetic", "perp_geodesic.criterion", "perp_geodesic", "range_harmonicity.perp_condition", "range_harmonicity.range_condition",
            "range_harmonicity.minimal_fibers", "range_harmonicity", "range_norm_expansion.range", "range_norm_expansion.perp"};
  }

  double theta_at(const Vec& x) const {
    const PointSplit s = split_at(*config_.map, as_span(x), config_.split);
    return slant_at(*config_.map, s, Side::range, 0).theta;
  }

  // Y(Theta) for horizontal y.
  double theta_derivative(const Vec& y) {
    if (config_.declared_theta) {
      const Jet2 t = config_.declared_theta->eval_jet2(as_span(s_.image));
      return t.gradient.dot(geo_.differential().value * y);
    }
    auto d = [&](double h) { return (theta_at(p_ + h * y) - theta_at(p_ - h * y)) / (2 * h); };
    const double h = 1e-5;
    return (4 * d(h / 2) - d(h)) / 3;
  }

  void range(PointSummary& summary) {
    const SmoothMap& f = *config_.map;
    if (!f.target().has_complex_structure()) throw GeometryError("target has no almost complex structure");
    structure(f.target(), as_span(s_.image));
    const SlantReport sr = slant_at(f, s_, Side::range, 8, config_.seed + static_cast<std::uint64_t>(idx_));
    theta_ = sr.theta;
    summary.theta = sr.theta;
    summary.slant_spread = sr.spread;
    rec("slant.pointwise", sr.spread);
    pointwise_slant_ = sr.spread <= tol("slant.pointwise");
    if (config_.declared_theta) {
      rec("declared_theta", std::fabs(theta_ - config_.declared_theta->eval(as_span(s_.image))));
    } else {
      na("declared_theta", "no slant angle declared");
    }

    const Mat& gn = geo_.gn();
    const Mat& a0 = geo_.differential().value;
    const Mat& r0 = geo_.range().value;
    const Mat& q0 = geo_.range_perp().value;
    const Mat& jn = geo_.j_target().value;
    const double c2 = std::cos(theta_) * std::cos(theta_);
    const double s2 = std::sin(theta_) * std::sin(theta_);
    const double lam2 = s_.lambda_sq;
    auto rho = [&](const Vec& w) { return Vec(r0 * (jn * w)); };
    auto varpi = [&](const Vec& w) { return Vec(q0 * (jn * w)); };

    double l41 = 0, l42r = 0, l42v = 0, comp = 0;
    for (int q = 0; q < config_.probe_pairs; ++q) {
      const Vec y = random_unit(s_.horizontal_basis);
      const Vec z = random_unit(s_.horizontal_basis);
      const Vec gy = a0 * y;
      const Vec gz = a0 * z;
      const Vec w = gy / std::max(norm(gn, gy), 1e-300);
      l41 = std::max(l41, norm(gn, rho(rho(w)) + c2 * w));
      l42r = std::max(l42r, std::fabs(geo_.gt(rho(gy), rho(gz)) - lam2 * c2 * geo_.gs(y, z)));
      l42v = std::max(l42v, std::fabs(geo_.gt(varpi(gy), varpi(gz)) - lam2 * s2 * geo_.gs(y, z)));
      const Vec pp = random_unit(s_.range_perp_basis);
      const RangeDecomposition d = decompose_range(f, s_, gy, pp);
      const double scale = std::max(1.0, norm(gn, jn * gy) + norm(gn, jn * pp));
      comp = std::max(comp, (norm(gn, jn * gy - d.rho_w - d.varpi_w) + norm(gn, jn * pp - d.d_p - d.e_p)) / scale);
    }
    rec("range_algebra.rho_squared", l41);
    rec("range_algebra.rho_isometry", l42r);
    rec("range_algebra.varpi_isometry", l42v);
    rec("decomposition.completeness", comp);

    range_theorems(s2);
  }

  void range_theorems(double s2) {
    const Mat& gn = geo_.gn();
    const Mat& hb = s_.horizontal_basis;
    const Mat& vb = s_.vertical_basis;
    const Mat& qb = s_.range_perp_basis;
    const MatJet& am = geo_.differential();
    const MatJet& hm = geo_.horizontal();
    const MatJet& rm = geo_.range();
    const MatJet& qm = geo_.range_perp();
    const MatJet& jm = geo_.j_target();
    const MatJet& adj = geo_.adjoint();
    const Mat& a0 = am.value;
    const Mat& r0 = rm.value;
    const Mat& q0 = qm.value;
    const Mat& jn = jm.value;
    const double lam2 = s_.lambda_sq;
    const int r = static_cast<int>(hb.cols());
    const int np = static_cast<int>(qb.cols());

    const MatJet gst = am * hm;
    const MatJet m_varpi = qm * jm * gst;
    const MatJet m_rho = rm * jm * gst;
    const MatJet m_varpirho = qm * jm * m_rho;
    const MatJet m_evarpi = qm * jm * m_varpi;
    auto perp_nabla = [&](const FieldJet& f, const Vec& y) { return Vec(q0 * geo_.cov_pullback(f, y)); };
    auto sff_perp = [&](const Vec& x, const Vec& y) { return Vec(q0 * geo_.sff(x, y)); };
    auto dee = [&](const Vec& p) { return Vec(r0 * (jn * p)); };
    auto ee = [&](const Vec& p) { return Vec(q0 * (jn * p)); };
    const Mat adj0 = adj.value;

    const double hgrad = horizontal_log_gradient();
    const bool proper = std::sin(theta_) > 1e-8 && std::cos(theta_) > 1e-8;

    // Integrability of the range distribution.
    if (np == 0) {
      na_all({"range_integrability.integrable", "range_integrability.perp_criterion", "range_integrability.sff_criterion", "range_integrability", "perp_foliation.integrable", "perp_foliation.geodesic", "perp_foliation.criterion", "perp_foliation",
              "range_geodesic.geodesic", "range_geodesic.criterion", "range_geodesic", "range_geodesic.identity", "perp_geodesic.geodesic", "perp_geodesic.homothetic", "perp_geodesic.criterion",
              "perp_geodesic"},
             "range of the differential has trivial orthogonal complement");
    } else {
      double i1 = 0, i2 = 0, i3 = 0;
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
          const Vec y = hb.col(a);
          const Vec z = hb.col(b);
          i1 = std::max(i1, norm(gn, q0 * (geo_.cov_pullback(gst * z, y) - geo_.cov_pullback(gst * y, z))));
          for (int c = 0; c < np; ++c) {
            const Vec p = qb.col(c);
            const double e2 = geo_.gt(perp_nabla(m_varpirho * y, z) - perp_nabla(m_varpirho * z, y), p) -
                              geo_.gt(perp_nabla(m_varpi * z, y) - perp_nabla(m_varpi * y, z), ee(p));
            i2 = std::max(i2, std::fabs(e2));
            const Vec sdp = adj0 * dee(p);
            const double e3 = geo_.gt(sff_perp(y, sdp), m_varpi.value * z) - geo_.gt(sff_perp(z, sdp), m_varpi.value * y);
            i3 = std::max(i3, std::fabs(e3));
          }
        }
      }
      rec("range_integrability.integrable", i1);
      rec("range_integrability.perp_criterion", i2);
      rec("range_integrability.sff_criterion", i3);
      relation_any_two("range_integrability", {{"range_integrability.integrable", i1}, {"range_integrability.perp_criterion", i2}, {"range_integrability.sff_criterion", i3}});

      // Integrability of the orthogonal complement.
      double j1 = 0, j2 = 0, j3 = 0;
      for (int a = 0; a < np; ++a) {
        for (int b = 0; b < np; ++b) {
          const Vec p = qb.col(a);
          const Vec q = qb.col(b);
          j1 = std::max(j1, norm(gn, r0 * geo_.bracket_target(qm * p, qm * q)));
          j2 = std::max(j2, norm(gn, r0 * geo_.cov_target(qm * q, p)));
          for (int c = 0; c < r; ++c) {
            const Vec y = hb.col(c);
            const double e = geo_.gt(geo_.cov_target(m_varpirho * y, p), q) - geo_.gt(geo_.cov_target(m_varpi * y, p), ee(q)) -
                             geo_.gt(geo_.cov_target(m_varpirho * y, q), p) + geo_.gt(geo_.cov_target(m_varpi * y, q), ee(p));
            j3 = std::max(j3, std::fabs(e));
          }
        }
      }
      rec("perp_foliation.integrable", j1);
      rec("perp_foliation.geodesic", j2);
      rec("perp_foliation.criterion", j3);
      relation_any_two("perp_foliation", {{"perp_foliation.integrable", j1}, {"perp_foliation.geodesic", j2}, {"perp_foliation.criterion", j3}});

      if (!proper) {
        na_all({"range_geodesic.geodesic", "range_geodesic.criterion", "range_geodesic", "range_geodesic.identity", "perp_geodesic.geodesic", "perp_geodesic.homothetic", "perp_geodesic.criterion",
                "perp_geodesic"},
               "slant function is not proper at this point");
      } else {
        double geo_r = 0, eqr = 0, ident = 0;
        for (int a = 0; a < r; ++a) {
          for (int b = 0; b < r; ++b) {
            const Vec y = hb.col(a);
            const Vec z = hb.col(b);
            geo_r = std::max(geo_r, norm(gn, sff_perp(y, z)));
            for (int c = 0; c < np; ++c) {
              const Vec p = qb.col(c);
              const double t1 = geo_.gt(sff_perp(y, adj0 * dee(p)), m_varpi.value * z);
              const double t2 = geo_.gt(perp_nabla(m_varpi * z, y), ee(p));
              const double t3 = geo_.gt(perp_nabla(m_varpirho * z, y), p);
              eqr = std::max(eqr, std::fabs(t1 - (t2 - t3)));
              ident = std::max(ident, std::fabs(s2 * geo_.gt(sff_perp(y, z), p) + t3 - t2 + t1 / lam2));
            }
          }
        }
        rec("range_geodesic.geodesic", geo_r);
        rec("range_geodesic.criterion", eqr);
        relation_iff("range_geodesic", {"range_geodesic.geodesic", geo_r}, {{"range_geodesic.criterion", eqr}});
        if (kahler_ && pointwise_slant_) {
          rec("range_geodesic.identity", ident);
        } else {
          na("range_geodesic.identity", kahler_ ? "map is not pointwise slant here" : "complex structure is not parallel at this point");
        }

        // Totally geodesic orthogonal complement.
        double k3 = 0;
        for (int a = 0; a < np; ++a) {
          for (int b = 0; b < np; ++b) {
            const Vec p = qb.col(a);
            const Vec q = qb.col(b);
            const Vec sdp = adj0 * dee(p);
            const Vec sdq = adj0 * dee(q);
            const FieldJet sdp_field = adj * (rm * jm * qm * p);
            const Vec s_ep = s_operator_at(geo_, ee(p), geo_.horizontal_lift(dee(q))).s;
            for (int c = 0; c < r; ++c) {
              const Vec y = hb.col(c);
              const double lhs = geo_.gt(sff_perp(sdq, sdp), m_evarpi.value * y);
              const double rhs = s2 * (lam2 * geo_.gs(geo_.cov_source(sdp_field, sdq), y) - geo_.gt(s_ep, a0 * y)) +
                                 geo_.gt(geo_.cov_target(m_varpi * y, p), ee(q)) -
                                 geo_.gt(geo_.cov_target(m_varpirho * y, p), q) -
                                 geo_.gt(geo_.bracket_target(qm * p, rm * jm * qm * q), m_varpi.value * y);
              k3 = std::max(k3, std::fabs(lhs - rhs));
            }
          }
        }
        rec("perp_geodesic.geodesic", j2);
        rec("perp_geodesic.homothetic", hgrad);
        rec("perp_geodesic.criterion", k3);
        relation_any_two("perp_geodesic", {{"perp_geodesic.geodesic", j2}, {"perp_geodesic.homothetic", hgrad}, {"perp_geodesic.criterion", k3}});
      }
    }

    // Harmonicity and the norm expansion.
    const std::vector<std::string> expansion_ids{"range_harmonicity.perp_condition", "range_harmonicity.range_condition", "range_harmonicity.minimal_fibers", "range_harmonicity", "range_norm_expansion.range",
                                                 "range_norm_expansion.perp"};
    if (!kahler_) {
      na_all(expansion_ids, "complex structure is not parallel at this point");
      return;
    }
    if (std::sin(theta_) <= 1e-8) {
      na_all(expansion_ids, "slant function vanishes at this point");
      return;
    }
    if (!pointwise_slant_) {
      na_all(expansion_ids, "map is not pointwise slant here");
      return;
    }
    const ScalarJet& lam = lambda_jet(false);
    Vec trace_range = Vec::Zero(geo_.n());
    Vec trace_perp = Vec::Zero(geo_.n());
    for (int a = 0; a < r; ++a) {
      const Vec y = hb.col(a);
      const NormExpansion ne = norm_expansion_check(geo_, theta_, theta_derivative(y), lam, y);
      for (const Vec& t : ne.range_terms) trace_range += t;
      for (const Vec& t : ne.perp_terms) trace_perp += t;
    }
    Vec minimal = Vec::Zero(geo_.m());
    for (int j = 0; j < vb.cols(); ++j) minimal += geo_.oneill_t(vb.col(j), vb.col(j));
    const double t1 = norm(gn, trace_range);
    const double t2 = norm(gn, trace_perp);
    const double t3 = norm(geo_.g(), minimal);
    rec("range_harmonicity.perp_condition", t1);
    rec("range_harmonicity.range_condition", t2);
    rec("range_harmonicity.minimal_fibers", t3);
    relation_implies("range_harmonicity", {{"range_harmonicity.perp_condition", t1}, {"range_harmonicity.range_condition", t2}, {"range_harmonicity.minimal_fibers", t3}}, {"tension", tension_});

    for (const Vec& y : probes(hb, 4)) {
      const NormExpansion ne = norm_expansion_check(geo_, theta_, theta_derivative(y), lam, y);
      rec("range_norm_expansion.range", std::max(ne.range_vector_gap, ne.range_norm_gap));
      rec("range_norm_expansion.perp", std::max(ne.perp_vector_gap, ne.perp_norm_gap));
    }
  }

  const SuiteConfig& config_;
  CheckBook& book_;
  int idx_;
  Vec p_;
  const MapGeometry& geo_;
  const PointSplit& s_;
  const DilationField& dilation_;
  const DilationField& numeric_dilation_;
  std::mt19937_64 rng_;
  std::optional<ScalarJet> lam_;
  bool lam_hessian_ = false;
  double theta_ = 0.0;
  double tension_ = 0.0;
  bool kahler_ = false;
  bool pointwise_slant_ = false;
};

void printed_notes(const SuiteConfig& config, const std::vector<Vec>& points, SuiteResult& result) {
  double kernel_worst = 0.0;
  double angle_worst = 0.0;
  std::string kernel_label;
  bool any_kernel = false;
  bool any_horizontal = false;
  for (const Vec& p : points) {
    PointSplit s;
    try {
      s = split_at(*config.map, as_span(p), config.split);
    } catch (const DegenerateMapError&) {
      continue;
    }
    Mat horizontal(config.map->m(), 0);
    for (const PrintedVector& pv : config.printed) {
      Vec v(static_cast<Eigen::Index>(pv.components.size()));
      for (std::size_t i = 0; i < pv.components.size(); ++i) v(static_cast<Eigen::Index>(i)) = pv.components[i].eval(as_span(p));
      if (pv.kind == PrintedVector::Kind::kernel) {
        any_kernel = true;
        const double rel = norm(s.g_target, s.differential * v) / std::max(norm(s.g_source, v), 1e-300);
        if (rel > kernel_worst) {
          kernel_worst = rel;
          kernel_label = pv.label;
        }
      } else {
        any_horizontal = true;
        horizontal.conservativeResize(Eigen::NoChange, horizontal.cols() + 1);
        horizontal.col(horizontal.cols() - 1) = v;
      }
    }
    if (horizontal.cols() > 0) {
      const Mat basis = metric_orthonormalize(horizontal, s.g_source);
      angle_worst = std::max(angle_worst, max_principal_angle(s.g_source, basis, s.horizontal_basis));
    }
  }
  if (any_kernel && kernel_worst > 1e-8) {
    result.paper_notes.push_back({"printed.kernel", "split.orthonormality",
                                  "printed kernel vector " + kernel_label +
                                      " is not annihilated by the differential; relative |dF v| = " + fmt(kernel_worst),
                                  kernel_worst});
  }
  if (any_horizontal && angle_worst > 1e-8) {
    result.paper_notes.push_back({"printed.horizontal", "split.orthonormality",
                                  "printed horizontal vectors do not span the orthogonal complement of the kernel; "
                                  "largest principal angle " + fmt(angle_worst) + " rad",
                                  angle_worst});
  }
}

}  // namespace

double default_tolerance(const std::string& id) { return spec_of(id).tolerance; }

double tolerance_for(const SuiteConfig& config, const std::string& id) {
  const auto it = config.tolerance_overrides.find(id);
  const double base = it != config.tolerance_overrides.end() ? it->second : default_tolerance(id);
  return base * config.tol_scale;
}

bool selected(const SuiteConfig& config, const std::string& id) {
  if (config.only.empty()) return true;
  return std::any_of(config.only.begin(), config.only.end(), [&](const std::string& s) {
    return id == s || (id.size() > s.size() && id.compare(0, s.size(), s) == 0 && id[s.size()] == '.');
  });
}

std::vector<std::string> check_ids() {
  std::vector<std::string> out;
  for (const auto& [id, spec] : registry()) out.push_back(id);
  return out;
}

bool is_known_selector(const std::string& selector) {
  SuiteConfig probe;
  probe.only = {selector};
  const auto ids = check_ids();
  return std::any_of(ids.begin(), ids.end(), [&](const std::string& id) { return selected(probe, id); });
}

SuiteResult run_suite(const SuiteConfig& config, const std::vector<Vec>& points) {
  if (!config.map) throw Error("suite has no map");
  for (const auto& [id, t] : config.tolerance_overrides) {
    spec_of(id);
    if (!(t >= 0.0)) throw Error("tolerance for " + id + " must be nonnegative");
  }
  SuiteResult result;
  CheckBook book(config);
  const DilationField dilation(*config.map, config.declared_lambda, config.split);
  const DilationField numeric(*config.map, std::nullopt, config.split);

  for (std::size_t i = 0; i < points.size(); ++i) {
    const int idx = static_cast<int>(i);
    const Vec& p = points[i];
    std::vector<double> pv(p.data(), p.data() + p.size());
    try {
      const MapGeometry geo(*config.map, as_span(p), config.split);
      PointSummary summary;
      summary.index = idx;
      summary.point = pv;
      PointEval(config, book, idx, p, geo, dilation, numeric).run(summary);
      result.points.push_back(std::move(summary));
    } catch (const DegenerateMapError& e) {
      result.skipped.push_back({idx, pv, e.what()});
    } catch (const DomainError& e) {
      result.skipped.push_back({idx, pv, e.what()});
    }
  }

  std::vector<CheckReport> all = book.finalize();
  auto evaluated = [&](const std::string& id) {
    return std::any_of(all.begin(), all.end(), [&](const CheckReport& c) { return c.id == id && !c.points.empty(); });
  };

  for (const CheckReport& c : all) {
    if (c.role == CheckRole::relation && c.verdict == Verdict::fail) {
      result.paper_notes.push_back({"relation." + c.id, c.id,
                                    "stated relation between the clauses does not hold: " + c.notes, c.residual});
    }
    if (c.id == "structure.kahler" && c.verdict == Verdict::fail) {
      result.paper_notes.push_back({"kahler.residual", c.id,
                                    "almost complex structure is not parallel (max |(nabla J)| = " + fmt(c.residual) +
                                        "), so the Kähler hypothesis does not hold",
                                    c.residual});
    }
  }
  if (evaluated("domain_algebra.omega_phi") && book.observed("domain_algebra.omega_phi.printed") > 1e-8) {
    result.paper_notes.push_back(
        {"domain_algebra.omega_phi.sign", "domain_algebra.omega_phi",
         "g(X, omega phi V) = +g(CX, omega V) (both equal -g(BX, phi V)); the stated minus sign leaves a residual of " +
             fmt(book.observed("domain_algebra.omega_phi.printed")),
         book.observed("domain_algebra.omega_phi.printed")});
  }
  if (evaluated("ricci_horizontal")) {
    result.paper_notes.push_back(
        {"ricci_horizontal.bracket_coefficient", "ricci_horizontal",
         "in the horizontal curvature sum the O'Neill bracket term -(1/4){...} with X = B and Y = Z = X_n equals "
         "+(3/4)|V[X,X_n]|^2; the inequality is evaluated with this coefficient",
         0.75});
  }
  if (evaluated("range_norm_expansion.range")) {
    result.paper_notes.push_back(
        {"range_norm_expansion.lift", "range_norm_expansion.range",
         "the expansion holds with the horizontal lift (1/lambda^2)*G_*(D varpi G_*Y) and with a minus sign on "
         "G_*(nabla_Y of that lift); the same 1/lambda^2 enters the perpendicular part",
         0.0});
  }
  if (!config.printed.empty()) printed_notes(config, points, result);

  for (auto& c : all) {
    if (selected(config, c.id)) result.checks.push_back(std::move(c));
  }
  std::erase_if(result.paper_notes, [&](const PaperNote& n) { return !selected(config, n.check); });
  return result;
}

std::vector<CheckReport> lemma_suite(const SuiteConfig& config, const std::vector<Vec>& points, Side side) {
  SuiteConfig c = config;
  c.side = side;
  c.only = side == Side::domain
               ? std::vector<std::string>{"domain_algebra.phi_squared", "domain_algebra", "domain_algebra", "decomposition.completeness"}
               : std::vector<std::string>{"range_algebra.rho_squared", "range_algebra", "decomposition.completeness"};
  return run_suite(c, points).checks;
}

std::vector<CheckReport> theorem_condition(const SuiteConfig& config, const std::vector<Vec>& points,
                                           const std::string& id) {
  SuiteConfig c = config;
  c.only = {id};
  return run_suite(c, points).checks;
}

InequalityReport ricci_vertical_check(const MapGeometry& geo, double v, double theta, const Vec& u, double tolerance) {
  const Mat& g = geo.g();
  const Mat& j0 = geo.j_source().value;
  const Mat& vb = geo.split().vertical_basis;
  const int k = static_cast<int>(vb.cols());
  if (k == 0) throw GeometryError("vertical space is trivial");
  InequalityReport rep;
  rep.check_id = "ricci_vertical";
  Vec mean = Vec::Zero(geo.m());
  const Vec tuu = geo.oneill_t(u, u);
  for (int i = 0; i < k; ++i) {
    const Vec e = vb.col(i);
    const Vec tee = geo.oneill_t(e, e);
    mean += tee;
    rep.lhs += space_form_curvature(v, g, j0, u, e, e, u) - inner(g, geo.oneill_t(u, e), geo.oneill_t(e, u)) +
               inner(g, tee, tuu);
    rep.oracle_slack += inner(g, t_alternative(geo, u, e), t_alternative(geo, u, e));
  }
  mean /= static_cast<double>(k);
  const double c2 = std::cos(theta) * std::cos(theta);
  rep.rhs = v / 4.0 * (k - 1 + 3.0 * c2) * inner(g, u, u) + k * inner(g, tuu, mean);
  rep.slack = rep.rhs - rep.lhs;
  rep.equality_expected = max_tensor_norm(geo, vb, vb, true) <= 1e-8;
  const bool ok = rep.slack >= -tolerance && (!rep.equality_expected || std::fabs(rep.slack) <= tolerance);
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

InequalityReport ricci_horizontal_check(const MapGeometry& geo, double v, const ScalarJet& lambda_jet, const Vec& x,
                                        double tolerance) {
  const Mat& g = geo.g();
  const Mat& j0 = geo.j_source().value;
  const Mat& p0 = geo.vertical().value;
  const Mat& h0 = geo.horizontal().value;
  const Mat& hb = geo.split().horizontal_basis;
  const int d = static_cast<int>(hb.cols());
  if (d == 0) throw GeometryError("horizontal space is trivial");
  const ScalarJet f = DilationField::inverse_square_of(lambda_jet);
  const Mat ginv = Eigen::PartialPivLU<Mat>(g).inverse();
  const Mat hc = f.hessian - gamma_slice_contracted(geo.gamma_source(), f.gradient);
  auto h = [&](const Vec& a, const Vec& b) { return a.dot(hc * b); };
  auto df = [&](const Vec& a) { return a.dot(f.gradient); };
  const double grad_sq = f.gradient.dot(ginv * f.gradient);
  const double l2 = lambda_jet.value * lambda_jet.value;
  const double l4 = l2 * l2;
  const double xx = inner(g, x, x);

  InequalityReport rep;
  rep.check_id = "ricci_horizontal";
  double sum_a = 0.0, sum_gh = 0.0, sum_hn = 0.0, sum_g2 = 0.0;
  for (int n = 0; n < d; ++n) {
    const Vec xn = hb.col(n);
    const double gxn = inner(g, x, xn);
    const double gnn = inner(g, xn, xn);
    const Vec b1 = geo.vertical_bracket(x, xn);
    const Vec b2 = geo.vertical_bracket(xn, x);
    const Vec bnn = geo.vertical_bracket(xn, xn);
    const Vec bxx = geo.vertical_bracket(x, x);
    const double bracket = -0.25 * (inner(g, b1, b2) - inner(g, bnn, bxx) + 2.0 * inner(g, b1, b2));
    const double hterm = -0.5 * l2 * (gxn * h(xn, x) - gnn * h(x, x) + gxn * h(x, xn) - xx * h(xn, xn));
    const Vec mix = df(x) * xn - df(xn) * x;
    const double fterm = -0.25 * l4 * ((xx * gnn - gxn * gxn) * grad_sq + inner(g, mix, mix));
    rep.lhs += space_form_curvature(v, g, j0, x, xn, xn, x) + bracket + hterm + fterm;
    rep.oracle_slack += 0.25 * l4 * inner(g, mix, mix);
    const Vec axn = geo.oneill_a(x, xn);
    sum_a += inner(g, axn, axn);
    sum_gh += gxn * h(x, xn);
    sum_hn += h(xn, xn);
    sum_g2 += gxn * gxn;
  }
  const Vec omega_bx = h0 * (j0 * (p0 * (j0 * x)));
  rep.rhs = v / 4.0 * ((d + 2) * xx + 3.0 * inner(g, omega_bx, x)) + 3.0 * sum_a -
            0.5 * l2 * (2.0 * sum_gh - d * h(x, x) - xx * sum_hn) - 0.25 * l4 * (d * xx - sum_g2) * grad_sq;
  rep.slack = rep.rhs - rep.lhs;
  const Vec grad_lambda = ginv * lambda_jet.gradient;
  rep.equality_expected = norm(g, h0 * grad_lambda) <= 1e-8 * std::max(1.0, lambda_jet.value);
  const bool ok = rep.slack >= -tolerance && (!rep.equality_expected || std::fabs(rep.slack) <= tolerance);
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

NormExpansion norm_expansion_check(const MapGeometry& geo, double theta, double y_theta, const ScalarJet& lambda_jet,
                                   const Vec& y) {
  const Mat& gn = geo.gn();
  const MatJet& am = geo.differential();
  const MatJet& hm = geo.horizontal();
  const MatJet& rm = geo.range();
  const MatJet& qm = geo.range_perp();
  const MatJet& jm = geo.j_target();
  const Mat& a0 = am.value;
  const Mat& r0 = rm.value;
  const Mat& q0 = qm.value;
  const double s = std::sin(theta);
  const double s2 = s * s;

  const MatJet gst = am * hm;
  const MatJet m_varpi = qm * jm * gst;
  const MatJet m_varpirho = qm * jm * rm * jm * gst;
  const MatJet m_evarpi = qm * jm * m_varpi;
  const MatJet lift = scaled(DilationField::inverse_square_of(lambda_jet), geo.adjoint());
  const FieldJet u_field = lift * (rm * jm * m_varpi * y);
  const Vec u = u_field.value;

  NormExpansion out;
  out.range_terms = {s_operator_at(geo, m_varpirho * y, y).s,
                     s_operator_at(geo, m_evarpi * y, y).s,
                     Vec(-(a0 * geo.cov_source(u_field, y))),
                     Vec(-(r0 * geo.sff(y, u))),
                     Vec(-std::sin(2.0 * theta) * y_theta * (a0 * y)),
                     Vec(-s2 * (a0 * geo.cov_source(hm * y, y)))};
  out.perp_terms = {Vec(-(q0 * geo.cov_pullback(m_varpirho * y, y))), Vec(-(q0 * geo.cov_pullback(m_evarpi * y, y))),
                    Vec(-(q0 * geo.sff(y, u)))};

  const Vec bxy = geo.sff(y, y);
  const Vec lhs_r = s2 * (r0 * bxy);
  const Vec lhs_p = s2 * (q0 * bxy);
  Vec sum_r = Vec::Zero(geo.n());
  Vec sum_p = Vec::Zero(geo.n());
  for (const Vec& t : out.range_terms) sum_r += t;
  for (const Vec& t : out.perp_terms) sum_p += t;
  auto gram = [&](const std::vector<Vec>& ts) {
    double total = 0.0;
    for (const Vec& a : ts) {
      for (const Vec& b : ts) total += inner(gn, a, b);
    }
    return total;
  };
  out.range_vector_gap = norm(gn, lhs_r - sum_r);
  out.perp_vector_gap = norm(gn, lhs_p - sum_p);
  out.range_norm_gap = std::fabs(inner(gn, lhs_r, lhs_r) - gram(out.range_terms));
  out.perp_norm_gap = std::fabs(inner(gn, lhs_p, lhs_p) - gram(out.perp_terms));
  return out;
}

}  // namespace slantgeo
