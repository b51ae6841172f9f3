#pragma once

// Refinement studies: discrete objects on a refining family of critical maps
// compared with their continuous counterparts, with fitted orders.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dch/calculus.hpp"

namespace dch {

enum class FamilyKind { Rect, Chain };

/// Rect: delta_l = delta0 2^-l on a fixed rows0 x cols0 (at delta0) patch.
/// Chain: n_l = 2^l rhombi on [0, 1], delta_l = 1 / n_l.
struct RefiningFamily {
  FamilyKind kind = FamilyKind::Rect;
  double theta = kPi / 4;
  double delta0 = 1.0;
  int rows0 = 1;
  int cols0 = 1;
  Complex origin{};  // must be a lattice point at delta0
  double eta_floor = kDefaultEtaFloor;
  int max_level = 8;

  static RefiningFamily rect(double theta = kPi / 4);
  static RefiningFamily chain();

  double delta(int level) const;
};

struct LevelRange {
  int first = 0;
  int last = 0;
};

MapPtr refine(const RefiningFamily& family, int level);

/// Truncated power series sum a_k z^k in the local coordinate z = Z - Z(O).
struct PowerSeries {
  std::vector<Complex> coefficients;
  std::string label;

  Complex operator()(Complex z) const;
  /// sum a_k z^{k+1} / (k+1).
  PowerSeries primitive() const;
  /// Root-test estimate over the upper half of the coefficients; lists with
  /// fewer than 16 coefficients count as polynomials (infinite radius).
  double radius_estimate() const;

  static PowerSeries exponential(Complex lambda = 1.0, int terms = 80);
};

struct ConvergenceRow {
  int level = 0;
  double delta = 0.0;
  double sup_error = 0.0;
};

struct OrderFit {
  double order = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  // max |log10 misfit|
  bool exact = false;  // every error at rounding level
};

inline constexpr double kExactThreshold = 1e-12;

/// Least squares of log10(error) against log10(delta) over the finest
/// `finest` rows.
OrderFit fit_order(std::span<const ConvergenceRow> rows, std::size_t finest = 4);

struct ConvergenceReport {
  std::string target;
  std::vector<ConvergenceRow> rows;
  OrderFit fit;
  std::vector<std::string> notes;
  std::vector<ConvergenceRow> raw_rows;  // primitive_convergence, unprojected
  OrderFit raw_fit;
  std::vector<int> truncation;  // series_approximation: N(level)
  double lambda_bound = std::numeric_limits<double>::quiet_NaN();
  bool warning = false;

  /// Errors strictly decrease with level.
  bool monotone() const;
};

struct StudyOptions {
  unsigned threads = 1;
};

ConvergenceReport monomial_convergence(const RefiningFamily& family, int k, LevelRange levels,
                                       StudyOptions options = {});

ConvergenceReport primitive_convergence(const RefiningFamily& family, const PowerSeries& f,
                                        LevelRange levels, StudyOptions options = {});

ConvergenceReport series_approximation(const RefiningFamily& family, const PowerSeries& f,
                                       LevelRange levels, StudyOptions options = {});

ConvergenceReport exp_convergence(const RefiningFamily& family, Complex lambda, LevelRange levels,
                                  StudyOptions options = {});

/// Diagonal rule for N(level), before series_approximation caps it where
/// |a_k| |Z^{:k:}|_inf stops decaying.
int truncation_degree(const PowerSeries& f, int level, double delta, double domain_radius);

/// CSV: header `level,delta,sup_error`, rows, notes as `# ` lines, then the
/// trailing `# order=...,resid=...` line.
std::string to_csv(const ConvergenceReport& report);

}  // namespace dch
