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

#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <random>

#include "opophase/angles.hpp"
#include "opophase/configurations.hpp"
#include "opophase/errors.hpp"
#include "quadrature_oracle.hpp"

namespace opophase {
namespace {

const OpoCoupling kIdentity(0.5, 0.5);

// Two-copy estimator variance from mixture moments obtained by quadrature.
double oracle_variance(const testing::MixtureMoments& m) {
  const double n2 = m.mean_x * m.mean_x + m.mean_y * m.mean_y;
  return (m.mean_y * m.mean_y * m.var_x + m.mean_x * m.mean_x * m.var_y) / (n2 * n2);
}

double oracle_advantage(double beta, double sigma, double eta_in, double eta_esc, double d) {
  const auto no = testing::integrate_phase_mixture(
      [&](double phi) { return testing::coherent_at(beta, phi); }, 0.0, sigma);
  const auto with = testing::integrate_phase_mixture(
      [&](double phi) { return testing::opo_at(beta, phi, eta_in, eta_esc, d); }, 0.0, sigma);
  return oracle_variance(no) - oracle_variance(with);
}

TEST(PhaseVarianceWithOpo, Examples) {
  const OpoCoupling a = kConfigA.coupling();
  const OpoDrive drive = kConfigA.drive();
  EXPECT_NEAR(phase_variance_with_opo(5.70, 0.0, a, drive), 0.022171, 1e-6);
  EXPECT_NEAR(phase_variance_with_opo(2.0, 0.0, kIdentity, OpoDrive(0.0)), 0.0625, 1e-15);
  EXPECT_NEAR(phase_variance_with_opo(5.70, deg_to_rad(14.8), a, drive), 0.03614, 1e-5);
}

TEST(PhaseVarianceWithOpo, EqualsPropagatedEstimatorVariance) {
  for (const auto& cfg : kConfigurations) {
    for (double beta : {0.5, 1.0, 2.0, 5.7}) {
      for (double sigma : {0.01, 0.1, 0.5, 1.0}) {
        const double direct = phase_variance_with_opo(beta, sigma, cfg.coupling(), cfg.drive());
        const double chained =
            estimate_phase(opo_diffused_moments(beta, PhaseDiffusion(sigma), cfg.coupling(),
                                                cfg.drive()))
                .variance;
        EXPECT_NEAR(chained / direct, 1.0, 1e-12);
      }
    }
  }
}

TEST(VarianceAdvantage, Examples) {
  EXPECT_NEAR(variance_advantage(5.70, 0.0, kConfigA.coupling(), kConfigA.drive()), -0.014476,
              2e-6);
  EXPECT_GT(variance_advantage(2.05, 0.0, kConfigB.coupling(), kConfigB.drive()), 0.0);
  for (double sigma : {0.0, 0.3, 1.0}) {
    EXPECT_NEAR(variance_advantage(2.0, sigma, kIdentity, OpoDrive(0.0)), 0.0, 1e-15);
  }
}

TEST(VarianceAdvantage, MatchesQuadratureOracle) {
  for (double sigma : {0.05, 0.2, 0.6}) {
    EXPECT_NEAR(variance_advantage(5.7, sigma, kConfigA.coupling(), kConfigA.drive()),
                oracle_advantage(5.7, sigma, kConfigA.eta_in, kConfigA.eta_esc,
                                 kConfigA.drive().d()),
                1e-10);
  }
}

TEST(Threshold, ConfigurationA) {
  const auto closed = threshold_closed_form(kConfigA.beta, kConfigA.coupling(), kConfigA.drive());
  const auto bisect = threshold_bisection(kConfigA.beta, kConfigA.coupling(), kConfigA.drive());
  ASSERT_EQ(closed.classification, Classification::Threshold);
  ASSERT_EQ(bisect.classification, Classification::Threshold);
  EXPECT_EQ(closed.method, ThresholdMethod::ClosedForm);
  EXPECT_EQ(bisect.method, ThresholdMethod::Bisection);
  EXPECT_NEAR(closed.sigma_th, 0.1346, 5e-5);
  EXPECT_NEAR(rad_to_deg(closed.sigma_th), 7.71, 5e-3);
  EXPECT_NEAR(closed.sigma_th, bisect.sigma_th, 1e-10);

  // Independent root of the quadrature-based advantage.
  auto f = [&](double s) {
    return oracle_advantage(kConfigA.beta, s, kConfigA.eta_in, kConfigA.eta_esc,
                            kConfigA.drive().d());
  };
  std::uintmax_t iters = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, 0.05, 0.5, boost::math::tools::eps_tolerance<double>(45), iters);
  EXPECT_NEAR(closed.sigma_th, 0.5 * (lo + hi), 1e-8);
}

TEST(Threshold, ConfigurationBHasNone) {
  const auto closed = threshold_closed_form(kConfigB.beta, kConfigB.coupling(), kConfigB.drive());
  const auto bisect = threshold_bisection(kConfigB.beta, kConfigB.coupling(), kConfigB.drive());
  EXPECT_EQ(closed.classification, Classification::AlwaysBeneficial);
  EXPECT_EQ(bisect.classification, Classification::AlwaysBeneficial);
}

TEST(Threshold, IdentityChannelIsNeutral) {
  EXPECT_EQ(threshold_closed_form(2.0, kIdentity, OpoDrive(0.0)).classification,
            Classification::Neutral);
  EXPECT_EQ(threshold_bisection(2.0, kIdentity, OpoDrive(0.0)).classification,
            Classification::Neutral);
}

TEST(Threshold, PumpOffLossyCavityNeverHelps) {
  const OpoCoupling lossy(0.08, 0.87);
  EXPECT_EQ(threshold_closed_form(2.0, lossy, OpoDrive(0.0)).classification,
            Classification::NeverBeneficial);
  EXPECT_EQ(threshold_bisection(2.0, lossy, OpoDrive(0.0)).classification,
            Classification::NeverBeneficial);
}

TEST(Threshold, HighGainAlwaysHelps) {
  const auto r = threshold_bisection(5.70, kConfigA.coupling(), OpoDrive(0.9));
  EXPECT_EQ(r.classification, Classification::AlwaysBeneficial);
  EXPECT_EQ(threshold_closed_form(5.70, kConfigA.coupling(), OpoDrive(0.9)).classification,
            Classification::AlwaysBeneficial);
}

TEST(Threshold, Errors) {
  try {
    threshold_closed_form(0.0, kIdentity, OpoDrive(0.3));
    ADD_FAILURE();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveAmplitude);
  }
  try {
    threshold_bisection(1.0, kIdentity, OpoDrive(0.3), SigmaGrid{.min = 0.0, .max = 1.0});
    ADD_FAILURE();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
  }
}

TEST(Threshold, MethodsAgreeOnRandomParameters) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SigmaGrid grid{};
  int thresholds = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const double beta = 0.3 + 6.0 * unit(rng);
    const double eta_esc = 0.5 + 0.49 * unit(rng);
    const double eta_in = (1.0 - eta_esc) * (0.05 + 0.9 * unit(rng));
    const OpoCoupling c(eta_in, eta_esc);
    const OpoDrive drive(0.02 + 0.95 * unit(rng));
    const auto closed = threshold_closed_form(beta, c, drive);
    const auto bisect = threshold_bisection(beta, c, drive, grid);
    EXPECT_TRUE(methods_agree(closed, bisect, grid))
        << "beta=" << beta << " eta_in=" << eta_in << " eta_esc=" << eta_esc
        << " d=" << drive.d() << " closed=" << to_string(closed.classification) << " "
        << closed.sigma_th << " bisect=" << to_string(bisect.classification) << " "
        << bisect.sigma_th;
    if (closed.classification == Classification::Threshold) {
      ++thresholds;
      EXPECT_GT(closed.sigma_th, 0.0);
      // Strictly increasing advantage through the crossing.
      EXPECT_LT(variance_advantage(beta, 0.9 * closed.sigma_th, c, drive), 0.0);
      EXPECT_GT(variance_advantage(beta, 1.1 * closed.sigma_th, c, drive), 0.0);
    }
  }
  EXPECT_GT(thresholds, 20);
}

TEST(MethodsAgree, ThresholdOutsideGrid) {
  const SigmaGrid grid{.min = 0.01, .max = 1.0, .step = 0.01};
  const ThresholdResult beyond{Classification::Threshold, 1.5, ThresholdMethod::ClosedForm};
  const ThresholdResult below{Classification::Threshold, 0.001, ThresholdMethod::ClosedForm};
  EXPECT_TRUE(methods_agree(beyond, {Classification::NeverBeneficial, 0.0,
                                     ThresholdMethod::Bisection}, grid));
  EXPECT_FALSE(methods_agree(beyond, {Classification::AlwaysBeneficial, 0.0,
                                      ThresholdMethod::Bisection}, grid));
  EXPECT_TRUE(methods_agree(below, {Classification::AlwaysBeneficial, 0.0,
                                    ThresholdMethod::Bisection}, grid));
}

TEST(Grids, InclusiveEndpoints) {
  const auto g = GainRange{.min = 1.1, .max = 6.0, .step = 0.05}.points();
  ASSERT_EQ(g.size(), 99u);
  EXPECT_EQ(g.front(), 1.1);
  EXPECT_EQ(g.back(), 6.0);
  const auto s = SigmaGrid{}.points();
  EXPECT_EQ(s.front(), 1e-4);
  EXPECT_EQ(s.back(), 2.0);
  EXPECT_EQ(GainRange({.min = 3.12, .max = 3.12, .step = 1.0}).points().size(), 1u);
  EXPECT_THROW(GainRange({.min = 0.9, .max = 2.0, .step = 0.1}).points(), ModelError);
}

TEST(Sweep, OrderingAndDeterminism) {
  const SweepSpec spec{.gains = {.min = 1.0, .max = 3.0, .step = 0.25},
                       .betas = {5.0, 1.0, 2.0},
                       .coupling = OpoCoupling(0.01, 0.93)};
  const auto serial = threshold_sweep(spec, 1);
  const auto parallel = threshold_sweep(spec, 4);
  ASSERT_EQ(serial.size(), 27u);
  ASSERT_EQ(parallel.size(), serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].gain, parallel[i].gain);
    EXPECT_EQ(serial[i].beta, parallel[i].beta);
    EXPECT_EQ(serial[i].closed_form.classification, parallel[i].closed_form.classification);
    EXPECT_EQ(serial[i].closed_form.sigma_th, parallel[i].closed_form.sigma_th);
    EXPECT_EQ(serial[i].bisection.sigma_th, parallel[i].bisection.sigma_th);
    EXPECT_TRUE(serial[i].methods_agree);
    if (i > 0) {
      const bool ordered = serial[i - 1].gain < serial[i].gain ||
                           (serial[i - 1].gain == serial[i].gain &&
                            serial[i - 1].beta < serial[i].beta);
      EXPECT_TRUE(ordered);
    }
  }
  // G = 1 rows: pump off through a lossy cavity.
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(serial[i].closed_form.classification, Classification::NeverBeneficial);
    EXPECT_TRUE(std::isinf(serial[i].sigma_th_deg()));
  }
}

TEST(Sweep, ConfigurationBSingleRow) {
  const SweepSpec spec{.gains = {.min = 3.12, .max = 3.12, .step = 1.0},
                       .betas = {2.05},
                       .coupling = kConfigB.coupling()};
  const auto rows = threshold_sweep(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].closed_form.classification, Classification::AlwaysBeneficial);
  EXPECT_EQ(rows[0].sigma_th_deg(), 0.0);
}

TEST(Sweep, GainCeilingOnFigureFourGrids) {
  for (const auto& [eta_in, eta_esc] : {std::pair{0.01, 0.93}, std::pair{0.08, 0.87}}) {
    const SweepSpec spec{.gains = {.min = 1.1, .max = 6.0, .step = 0.05},
                         .betas = {1.0, 2.0, 5.0},
                         .coupling = OpoCoupling(eta_in, eta_esc)};
    const auto rows = threshold_sweep(spec);
    for (double beta : spec.betas) {
      std::vector<const SweepRow*> series;
      for (const auto& r : rows) {
        if (r.beta == beta) series.push_back(&r);
      }
      // Once AlwaysBeneficial, it stays so for every larger gain, and the
      // threshold shrinks with gain before that point.
      bool reached = false;
      double previous = std::numeric_limits<double>::infinity();
      for (const auto* r : series) {
        EXPECT_TRUE(r->methods_agree);
        if (r->closed_form.classification == Classification::AlwaysBeneficial) reached = true;
        if (reached) {
          EXPECT_EQ(r->closed_form.classification, Classification::AlwaysBeneficial);
        } else {
          EXPECT_LE(r->sigma_th_deg(), previous);
          previous = r->sigma_th_deg();
        }
      }
      EXPECT_TRUE(reached) << eta_in << " beta=" << beta;
    }
  }
}

TEST(VarianceCurves, ConfigurationBBelowReference) {
  std::vector<double> sigmas;
  for (int i = 0; i <= 300; ++i) sigmas.push_back(deg_to_rad(0.1 * i));
  for (const auto& p :
       variance_curves(kConfigB.beta, kConfigB.coupling(), kConfigB.drive(), sigmas)) {
    EXPECT_LT(p.var_with_opo, p.var_no_opo) << p.sigma_deg;
  }
}

TEST(VarianceCurves, ConfigurationACrossesAtThreshold) {
  std::vector<double> sigmas;
  for (int i = 0; i <= 300; ++i) sigmas.push_back(deg_to_rad(0.1 * i));
  const auto curves =
      variance_curves(kConfigA.beta, kConfigA.coupling(), kConfigA.drive(), sigmas);
  const double th =
      rad_to_deg(threshold_bisection(kConfigA.beta, kConfigA.coupling(), kConfigA.drive())
                     .sigma_th);
  int crossings = 0;
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const bool before = curves[i - 1].var_with_opo > curves[i - 1].var_no_opo;
    const bool after = curves[i].var_with_opo > curves[i].var_no_opo;
    if (before != after) {
      ++crossings;
      EXPECT_LE(curves[i - 1].sigma_deg, th);
      EXPECT_GE(curves[i].sigma_deg, th);
    }
  }
  EXPECT_EQ(crossings, 1);
}

TEST(VarianceCurves, IdentityChannelCurvesCoincide) {
  for (const auto& p : variance_curves(2.0, kIdentity, OpoDrive(0.0), {0.0, 0.2, 0.9})) {
    EXPECT_NEAR(p.var_with_opo, p.var_no_opo, 1e-14 * p.var_no_opo);
  }
}

}  // namespace
}  // namespace opophase
