#include "sphap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace sphap {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ParameterizeResult parameterize(const SimplicialSurface& surface,
                                const ParameterizeOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const SphericalMapping f0 = conformal_initial_map(surface, options.initializer);
  const double init = seconds_since(t0);
  ParameterizeResult r = parameterize_from(surface, f0, options);
  r.init_seconds = init;
  r.total_seconds += init;
  return r;
}

ParameterizeResult parameterize_from(const SimplicialSurface& surface, const SphericalMapping& f0,
                                     const ParameterizeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ParameterizeResult r{.f = f0};
  SphericalMapping f = f0;

  if (options.fpi_iters > 0) {
    const auto t = std::chrono::steady_clock::now();
    FpiOptions fo;
    fo.max_iters = options.fpi_iters;
    fo.radius = options.radius;
    fo.stop_on_increase = options.fpi_stop_on_increase;
    fo.exec = options.exec;
    fo.on_solve = options.fpi_observer;
    auto fr = fixed_point_iteration(surface, f, fo);
    r.fpi_seconds = seconds_since(t);
    r.fpi_first_increase = fr.first_increase_iter;
    for (const auto& x : fr.records) {
      IterationRecord rec;
      rec.iter = x.iter;
      rec.stretch = x.stretch;
      rec.authalic = x.authalic;
      rec.normalized = x.normalized;
      rec.sd_over_mean = x.sd_over_mean;
      rec.grad_norm = nan;
      rec.alpha = nan;
      rec.folds = x.folds;
      rec.elapsed_s = x.elapsed_s;
      r.records.push_back(rec);
    }
    r.fpi_rows = static_cast<int>(fr.records.size());
    f = fr.f;
  }

  BijectivityOptions bo;
  bo.radius = options.radius;
  bo.exec = options.exec;
  if (options.correction == CorrectionStage::fpi || options.correction == CorrectionStage::both) {
    r.after_fpi = correct_bijectivity(surface, f, bo);
    f = r.after_fpi->f;
  }

  if (options.rgd.max_iters > 0) {
    const auto t = std::chrono::steady_clock::now();
    auto mr = minimize_stretch(surface, f, options.rgd, options.exec);
    r.rgd_seconds = seconds_since(t);
    r.status = mr.status;
    r.rgd_iterations = mr.iterations;
    for (auto rec : mr.records) {
      rec.iter += r.fpi_rows;
      r.records.push_back(rec);
    }
    f = mr.f;
  }

  if (options.correction == CorrectionStage::rgd || options.correction == CorrectionStage::both) {
    r.after_rgd = correct_bijectivity(surface, f, bo);
    f = r.after_rgd->f;
  }

  r.f = f;
  r.energy = stretch_energy(surface, f.rows(), options.exec);
  r.ratios = area_ratio_stats(surface, f.rows(), options.exec);
  r.folds = count_folds(surface, f, options.exec);
  r.total_seconds = seconds_since(start);
  return r;
}

void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records,
                       bool with_timing) {
  out << "iter,E_S,E_A,E,sd_over_mean,grad_norm,alpha,folds,elapsed_s\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.iter << ',' << r.stretch << ',' << r.authalic << ',' << r.normalized << ','
        << r.sd_over_mean << ',' << r.grad_norm << ',' << r.alpha << ',' << r.folds << ','
        << (with_timing ? r.elapsed_s : 0.0) << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

}  // namespace sphap
