#pragma once

#include "sphap/bijectivity.hpp"
#include "sphap/diagnostics.hpp"
#include "sphap/fpi.hpp"
#include "sphap/rgd.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace sphap {

enum class CorrectionStage { off, fpi, rgd, both };

struct ParameterizeOptions {
  int fpi_iters = 10;
  bool fpi_stop_on_increase = true;
  double radius = 1.2;  // FPI and bijectivity interior radius
  RgdConfig rgd;
  CorrectionStage correction = CorrectionStage::both;
  ConformalOptions initializer;
  Execution exec = Execution::parallel;
  /// Forwarded to the warm-start iteration, called after every harmonic solve.
  std::function<void(const PlanarMapping&, const PlanarMapping&, const RadiusSplit&)>
      fpi_observer;
};

struct ParameterizeResult {
  SphericalMapping f;
  /// FPI rows first (grad_norm and alpha NaN), then RGD rows, numbered 1, 2, ...
  std::vector<IterationRecord> records{};
  int fpi_rows = 0;
  std::optional<int> fpi_first_increase{};
  RgdStatus status = RgdStatus::max_iters;
  int rgd_iterations = 0;
  std::optional<BijectivityResult> after_fpi{};
  std::optional<BijectivityResult> after_rgd{};
  EnergyReport energy{};
  AreaRatioStats ratios{};
  Index folds = 0;
  double init_seconds = 0.0;
  double fpi_seconds = 0.0;
  double rgd_seconds = 0.0;  // RGD alone, excluding FPI and corrections
  double total_seconds = 0.0;
};

/// conformal init -> FPI warm start -> correction -> RGD -> correction
ParameterizeResult parameterize(const SimplicialSurface& surface,
                                const ParameterizeOptions& options = {});

/// Same, starting from a given spherical map instead of the conformal initializer.
ParameterizeResult parameterize_from(const SimplicialSurface& surface, const SphericalMapping& f0,
                                     const ParameterizeOptions& options = {});

/// `iter,E_S,E_A,E,sd_over_mean,grad_norm,alpha,folds,elapsed_s`; with
/// `with_timing` false the elapsed column is written as 0.
void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records,
                       bool with_timing = true);

}  // namespace sphap
