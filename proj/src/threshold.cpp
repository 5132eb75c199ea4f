// Copyright 2026 The opophase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "opophase/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "opophase/angles.hpp"
#include "opophase/errors.hpp"

namespace opophase {

namespace {

// |advantage| below this fraction of the no-OPO variance counts as zero.
constexpr double kNeutralRelTol = 1e-12;
constexpr double kBisectionWidth = 1e-10;

enum class Sign { Negative, Zero, Positive };

Sign advantage_sign(double beta, double sigma, const OpoCoupling& coupling,
                    const OpoDrive& drive) {
  const double adv = variance_advantage(beta, sigma, coupling, drive);
  const double scale = phase_variance_no_opo(beta, sigma);
  if (std::abs(adv) <= kNeutralRelTol * scale) return Sign::Zero;
  return adv > 0.0 ? Sign::Positive : Sign::Negative;
}

Classification classify(Sign s) {
  switch (s) {
    case Sign::Positive: return Classification::AlwaysBeneficial;
    case Sign::Negative: return Classification::NeverBeneficial;
    case Sign::Zero: return Classification::Neutral;
  }
  return Classification::Neutral;
}

std::vector<double> inclusive_axis(double min, double max, double step) {
  std::vector<double> out;
  const double span = max - min;
  const auto n = static_cast<std::size_t>(std::floor(span / step + 1e-9));
  out.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(min + static_cast<double>(i) * step);
  if (std::abs(out.back() - max) <= 1e-9 * step) {
    out.back() = max;
  } else if (out.back() < max) {
    out.push_back(max);
  }
  return out;
}

}  // namespace

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Threshold: return "Threshold";
    case Classification::AlwaysBeneficial: return "AlwaysBeneficial";
    case Classification::NeverBeneficial: return "NeverBeneficial";
    case Classification::Neutral: return "Neutral";
  }
  return "Unknown";
}

std::string_view to_string(ThresholdMethod m) {
  return m == ThresholdMethod::ClosedForm ? "closed_form" : "bisection";
}

void SigmaGrid::validate() const {
  if (!(min > 0.0 && max > min && step > 0.0 && std::isfinite(max))) {
    fail(ErrorCode::InvalidParameter, "sigma grid needs 0 < min < max and step > 0");
  }
  if (max * max > kMaxSigmaSquared) {
    fail(ErrorCode::OutOfModelRange, "sigma grid extends beyond the model range");
  }
}

std::vector<double> SigmaGrid::points() const {
  validate();
  return inclusive_axis(min, max, step);
}

void GainRange::validate() const {
  if (!(min >= 1.0)) fail(ErrorCode::GainBelowUnity, "gain range must start at G >= 1");
  if (!(max >= min && step > 0.0 && std::isfinite(max))) {
    fail(ErrorCode::InvalidParameter, "gain range needs max >= min and step > 0");
  }
}

std::vector<double> GainRange::points() const {
  validate();
  if (max == min) return {min};
  return inclusive_axis(min, max, step);
}

double SweepRow::sigma_th_deg() const {
  switch (closed_form.classification) {
    case Classification::Threshold: return rad_to_deg(closed_form.sigma_th);
    case Classification::NeverBeneficial: return std::numeric_limits<double>::infinity();
    default: return 0.0;
  }
}

double phase_variance_with_opo(double beta, double sigma, const OpoCoupling& coupling,
                               const OpoDrive& drive) {
  if (!(beta > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "phase variance needs beta > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidParameter, "sigma must be >= 0");
  const double s2 = sigma * sigma;
  if (s2 > kMaxSigmaSquared) fail(ErrorCode::OutOfModelRange, "sigma^2 exceeds the model range");
  const auto [alpha_x, alpha_y] = opo_amplitudes(beta, coupling, drive);
  const double sy = output_noise(coupling.eta_esc(), drive).var_y;
  const double damp = std::exp(-s2);
  return (sy + alpha_y * alpha_y * damp * std::sinh(s2)) / (alpha_x * alpha_x * damp);
}

double variance_advantage(double beta, double sigma, const OpoCoupling& coupling,
                          const OpoDrive& drive) {
  return phase_variance_no_opo(beta, sigma) - phase_variance_with_opo(beta, sigma, coupling, drive);
}

ThresholdResult threshold_closed_form(double beta, const OpoCoupling& coupling,
                                      const OpoDrive& drive) {
  if (!(beta > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "threshold needs beta > 0");
  ThresholdResult result{.method = ThresholdMethod::ClosedForm};

  const auto [alpha_x, alpha_y] = opo_amplitudes(beta, coupling, drive);
  const double sy = output_noise(coupling.eta_esc(), drive).var_y;
  const double two_b2 = 2.0 * beta * beta;
  const double split = alpha_x * alpha_x - alpha_y * alpha_y;
  const double numerator = two_b2 * split;
  const double denominator = alpha_x * alpha_x + two_b2 * (split - 2.0 * sy);

  // d = 0 (alpha_x == alpha_y) and non-positive denominators have no
  // crossing; the sign of the advantage decides.
  if (drive.d() == 0.0 || !(denominator > 0.0) || !(numerator > 0.0)) {
    result.classification = classify(advantage_sign(beta, kSigmaProbe, coupling, drive));
    return result;
  }
  const double rho = numerator / denominator;
  if (rho <= 1.0) {
    const Sign s = advantage_sign(beta, kSigmaProbe, coupling, drive);
    result.classification =
        s == Sign::Positive ? Classification::AlwaysBeneficial : Classification::NeverBeneficial;
    return result;
  }
  result.classification = Classification::Threshold;
  result.sigma_th = std::sqrt(0.5 * std::log(rho));
  return result;
}

ThresholdResult threshold_bisection(double beta, const OpoCoupling& coupling,
                                    const OpoDrive& drive, const SigmaGrid& grid) {
  if (!(beta > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "threshold needs beta > 0");
  const std::vector<double> sigmas = grid.points();
  ThresholdResult result{.method = ThresholdMethod::Bisection};

  std::vector<Sign> signs;
  signs.reserve(sigmas.size());
  for (double s : sigmas) signs.push_back(advantage_sign(beta, s, coupling, drive));

  // Zero-valued grid points are skipped when counting sign changes.
  std::vector<std::size_t> crossings;
  std::size_t last_nonzero = sigmas.size();
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] == Sign::Zero) continue;
    if (last_nonzero < sigmas.size() && signs[i] != signs[last_nonzero]) {
      crossings.push_back(last_nonzero);
      crossings.push_back(i);
    }
    last_nonzero = i;
  }

  if (crossings.empty()) {
    const Sign s = last_nonzero < sigmas.size() ? signs[last_nonzero] : Sign::Zero;
    result.classification = classify(s);
    return result;
  }
  if (crossings.size() > 2) {
    std::ostringstream os;
    os << "variance advantage changes sign " << crossings.size() / 2
       << " times on the sigma grid (beta=" << beta << ", d=" << drive.d() << ")";
    fail(ErrorCode::MultipleCrossings, os.str());
  }

  double lo = sigmas[crossings[0]];
  double hi = sigmas[crossings[1]];
  const bool rising = signs[crossings[0]] == Sign::Negative;
  while (hi - lo >= kBisectionWidth) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double adv = variance_advantage(beta, mid, coupling, drive);
    if ((adv > 0.0) == rising) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (!rising) {
    // The OPO helps at small sigma and hurts above: not a threshold in the
    // sense used here, and not expected for physical parameters.
    std::ostringstream os;
    os << "variance advantage falls through zero at sigma=" << 0.5 * (lo + hi);
    fail(ErrorCode::MultipleCrossings, os.str());
  }
  result.classification = Classification::Threshold;
  result.sigma_th = 0.5 * (lo + hi);
  return result;
}

bool methods_agree(const ThresholdResult& closed_form, const ThresholdResult& bisection,
                   const SigmaGrid& grid, double tolerance) {
  if (closed_form.classification == Classification::Threshold) {
    if (closed_form.sigma_th < grid.min) {
      return bisection.classification == Classification::AlwaysBeneficial;
    }
    if (closed_form.sigma_th > grid.max) {
      return bisection.classification == Classification::NeverBeneficial;
    }
    return bisection.classification == Classification::Threshold &&
           std::abs(closed_form.sigma_th - bisection.sigma_th) <= tolerance;
  }
  return closed_form.classification == bisection.classification;
}

std::vector<SweepRow> threshold_sweep(const SweepSpec& spec, unsigned threads) {
  const std::vector<double> gains = spec.gains.points();
  std::vector<double> betas = spec.betas;
  if (betas.empty()) fail(ErrorCode::InvalidParameter, "sweep needs at least one beta");
  for (double b : betas) {
    if (!(b > 0.0)) fail(ErrorCode::NonPositiveAmplitude, "sweep amplitudes must be > 0");
  }
  std::sort(betas.begin(), betas.end());
  spec.sigma_grid.validate();

  std::vector<SweepRow> rows(gains.size() * betas.size());
  for (std::size_t g = 0; g < gains.size(); ++g) {
    for (std::size_t b = 0; b < betas.size(); ++b) {
      SweepRow& row = rows[g * betas.size() + b];
      row.gain = gains[g];
      row.beta = betas[b];
      row.eta_in = spec.coupling.eta_in();
      row.eta_esc = spec.coupling.eta_esc();
    }
  }

  auto evaluate = [&](SweepRow& row) {
    const OpoDrive drive = drive_from_gain(row.gain);
    row.closed_form = threshold_closed_form(row.beta, spec.coupling, drive);
    row.bisection = threshold_bisection(row.beta, spec.coupling, drive, spec.sigma_grid);
    row.methods_agree = methods_agree(row.closed_form, row.bisection, spec.sigma_grid);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows.size()));
  if (threads <= 1) {
    for (SweepRow& row : rows) evaluate(row);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < rows.size(); i = next++) evaluate(rows[i]);
        } catch (...) {
          errors[t] = std::current_exception();
          next = rows.size();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<VariancePoint> variance_curves(double beta, const OpoCoupling& coupling,
                                           const OpoDrive& drive,
                                           const std::vector<double>& sigmas) {
  std::vector<VariancePoint> out;
  out.reserve(sigmas.size());
  for (double s : sigmas) {
    out.push_back({
        .sigma_deg = rad_to_deg(s),
        .var_no_opo = phase_variance_no_opo(beta, s),
        .var_with_opo = phase_variance_with_opo(beta, s, coupling, drive),
    });
  }
  return out;
}

}  // namespace opophase
