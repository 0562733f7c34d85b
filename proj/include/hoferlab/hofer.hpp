#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoferlab/expr.hpp"
#include "hoferlab/quadrature.hpp"
#include "hoferlab/surface.hpp"

namespace hoferlab {

/// H(p, t) on a surface state. Gradients are ambient (x, y, z) gradients.
class PathFunction {
 public:
  virtual ~PathFunction() = default;
  virtual double value(const Eigen::Vector3d& p, double t) const = 0;
  virtual Eigen::Vector3d gradient(const Eigen::Vector3d& p, double t) const = 0;
  virtual Eigen::Matrix3d hessian(const Eigen::Vector3d& p, double t) const;
  virtual bool autonomous() const = 0;
  virtual std::string text() const = 0;
};

class ExprFunction final : public PathFunction {
 public:
  explicit ExprFunction(expr::ScalarField f) : f_(std::move(f)) {}
  double value(const Eigen::Vector3d& p, double t) const override;
  Eigen::Vector3d gradient(const Eigen::Vector3d& p, double t) const override;
  Eigen::Matrix3d hessian(const Eigen::Vector3d& p, double t) const override;
  bool autonomous() const override { return f_.autonomous(); }
  std::string text() const override { return f_.text(); }
  const expr::ScalarField& field() const { return f_; }

 private:
  expr::ScalarField f_;
};

struct Extremum {
  double value = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

struct Extrema {
  Extremum max;
  Extremum min;
  /// Distinct local optima whose value is within tolerance of the global one.
  std::vector<Eigen::Vector3d> max_candidates;
  std::vector<Eigen::Vector3d> min_candidates;
};

struct SearchOptions {
  int grid = 24;
  int grid_starts = 32;
  int random_starts = 32;
  bool check_stability = true;
  double stability_tol = 1e-5;
};

/// A compactly supported time-dependent Hamiltonian on a surface.
class HamiltonianPath {
 public:
  HamiltonianPath();
  HamiltonianPath(Surface s, std::shared_ptr<const PathFunction> fn, Box support, double t0 = 0.0,
                  double t1 = 1.0);

  static HamiltonianPath parse(const Surface& s, std::string_view text, Box support,
                               double t0 = 0.0, double t1 = 1.0);
  static HamiltonianPath parse(const Surface& s, std::string_view text) {
    return parse(s, text, s.default_box());
  }

  const Surface& surface() const { return surface_; }
  const PathFunction& function() const { return *fn_; }
  std::shared_ptr<const PathFunction> function_ptr() const { return fn_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  const Box& support() const { return support_; }
  bool autonomous() const { return fn_->autonomous(); }
  bool normalized() const { return normalized_; }
  std::string text() const { return fn_->text(); }

  const std::string& label() const { return label_; }
  HamiltonianPath& set_label(std::string l) {
    label_ = std::move(l);
    return *this;
  }
  /// Subtract inf_x H_t from every value.
  HamiltonianPath normalize() const;
  HamiltonianPath with_search(SearchOptions o) const;
  /// Extra starting points for extremum searches.
  HamiltonianPath with_hints(std::vector<Eigen::Vector3d> hints) const;
  const SearchOptions& search_options() const { return search_; }

  double raw(const Eigen::Vector3d& p, double t) const { return fn_->value(p, t); }
  double value(const Eigen::Vector3d& p, double t) const;
  Eigen::Vector3d gradient(const Eigen::Vector3d& p, double t) const { return fn_->gradient(p, t); }
  Eigen::Vector3d vector_field(const Eigen::Vector3d& p, double t) const {
    return surface_.vector_field_from_gradient(fn_->gradient(p, t), p);
  }

  /// Global extrema of the raw H_t (cached per t).
  const Extrema& extrema(double t) const;
  double oscillation(double t) const {
    const Extrema& e = extrema(t);
    return e.max.value - e.min.value;
  }

  /// Identifies the path for certificate/bracket bookkeeping.
  std::string fingerprint() const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<double, Extrema> by_time;
  };

  Surface surface_;
  std::shared_ptr<const PathFunction> fn_;
  Box support_;
  double t0_ = 0.0;
  double t1_ = 1.0;
  bool normalized_ = false;
  std::string label_;
  SearchOptions search_;
  std::vector<Eigen::Vector3d> hints_;
  std::shared_ptr<Cache> cache_;
};

/// Multi-start local optimisation; exposed for tests.
Extrema search_extrema(const Surface& s, const PathFunction& f, double t, const Box& box,
                       const SearchOptions& opt, const std::vector<Eigen::Vector3d>& hints = {});

// Length ----------------------------------------------------------------

quad::Result length_with_error(const HamiltonianPath& H, double abs_tol = 1e-10);
double length(const HamiltonianPath& H);

/// max_t (max_x H_t - min_x H_t) over a sample of t.
double sup_norm(const HamiltonianPath& H, int samples = 33);

struct PathSummary {
  double length = 0.0;
  double length_error = 0.0;
  std::vector<double> t;
  std::vector<double> max;
  std::vector<double> min;
  std::vector<Eigen::Vector3d> argmax;
  std::vector<Eigen::Vector3d> argmin;
  bool quasi_autonomous = false;
  int windows = 0;
};

PathSummary summarize(const HamiltonianPath& H, int samples = 65, int windows = 16);

// Fixed extrema and the geodesic criterion ------------------------------

struct FixedExtrema {
  Eigen::Vector3d P;
  Eigen::Vector3d p;
};

std::optional<FixedExtrema> fixed_extrema(const HamiltonianPath& H, double a, double b,
                                          int samples = 9);

struct WindowVerdict {
  double a = 0.0;
  double b = 0.0;
  bool quasi_autonomous = false;
  std::optional<FixedExtrema> extrema;
};

struct GeodesicReport {
  std::vector<WindowVerdict> windows;
  bool satisfies_criterion = false;
  std::string note;
};

/// Throws NotRegular when some H_t has zero oscillation.
GeodesicReport geodesic_check(const HamiltonianPath& H, int windows = 16);

// Calabi and brackets ---------------------------------------------------

quad::Result calabi(const HamiltonianPath& H, double abs_tol = 1e-10);

/// Lower bound on a norm supplied by a capacity certificate.
struct CapacityBound {
  double value = 0.0;
  std::string kind;
  std::string path_fingerprint;
};

struct NormBracket {
  double upper = 0.0;
  double lower = 0.0;
  bool equality = false;
  std::vector<std::string> notes;
};

NormBracket norm_bracket(const HamiltonianPath& path, const std::optional<CapacityBound>& cert,
                         double rel_tol = 1e-6);

}  // namespace hoferlab
