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

#include "cli/commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "opophase/angles.hpp"
#include "opophase/configurations.hpp"
#include "opophase/errors.hpp"
#include "opophase/montecarlo.hpp"
#include "opophase/noise_model.hpp"
#include "opophase/opo_model.hpp"

namespace opophase::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kFigures = {
    "fig4-top", "fig4-bottom", "fig6-varA", "fig6-varB", "fig6-compression"};

struct Stage {
  std::string name;
  QuadratureMoments moments;
};

ordered_json moments_json(const Stage& stage) {
  ordered_json j;
  j["stage"] = stage.name;
  j["mean_x"] = stage.moments.mean_x;
  j["mean_y"] = stage.moments.mean_y;
  j["var_x"] = stage.moments.var_x;
  j["var_y"] = stage.moments.var_y;
  try {
    const PhaseEstimate est = estimate_phase(stage.moments);
    j["phi_hat_deg"] = rad_to_deg(est.phi_hat);
    j["phase_variance"] = est.variance;
  } catch (const ModelError& e) {
    if (e.code() != ErrorCode::ZeroMeanVector) throw;
    j["phi_hat_deg"] = nullptr;
    j["phase_variance"] = nullptr;
  }
  return j;
}

ordered_json opo_json(const OpoCoupling& coupling, const OpoDrive& drive) {
  ordered_json j;
  j["d"] = drive.d();
  j["gain"] = drive.gain();
  j["eta_in"] = coupling.eta_in();
  j["eta_esc"] = coupling.eta_esc();
  j["transmissivity"] = cavity_transmissivity(coupling);
  return j;
}

// The no-OPO stage and, when configured, the OPO stage of the state chain.
std::vector<StateSpec> state_chain(const RunConfig& config) {
  const CoherentSignal signal(config.require_beta(), config.phi);
  std::vector<StateSpec> chain;
  if (config.sigma) {
    chain.push_back(StateSpec::diffused(signal, PhaseDiffusion(*config.sigma)));
  } else {
    chain.push_back(StateSpec::coherent(signal));
  }
  if (config.has_opo()) {
    if (config.sigma) {
      chain.push_back(StateSpec::opo_diffused(signal, PhaseDiffusion(*config.sigma),
                                              config.coupling(), config.drive()));
    } else {
      chain.push_back(StateSpec::opo_output(signal, config.coupling(), config.drive()));
    }
  }
  return chain;
}

ordered_json threshold_json(const ThresholdResult& r) {
  ordered_json j;
  j["classification"] = std::string(to_string(r.classification));
  if (r.classification == Classification::Threshold) {
    j["sigma_th_rad"] = r.sigma_th;
  } else {
    j["sigma_th_rad"] = nullptr;
  }
  return j;
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string line;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) line += ',';
    line += f;
    first = false;
  }
  return line;
}

std::vector<SweepRow> figure4_rows(double eta_in, double eta_esc) {
  const SweepSpec spec{
      .gains = {.min = 1.1, .max = 6.0, .step = 0.05},
      .betas = {1.0, 2.0, 5.0},
      .coupling = OpoCoupling(eta_in, eta_esc),
  };
  return threshold_sweep(spec);
}

void write_variance_curves(const ExperimentConfiguration& c, std::ostream& out) {
  std::vector<double> sigmas;
  for (int i = 0; i <= 60; ++i) sigmas.push_back(deg_to_rad(0.5 * i));
  const auto curves = variance_curves(c.beta, c.coupling(), c.drive(), sigmas);
  out << "sigma_deg,var_no_opo,var_with_opo\n";
  for (const auto& p : curves) {
    out << csv_row({format_sig(p.sigma_deg), format_sig(p.var_no_opo), format_sig(p.var_with_opo)})
        << '\n';
  }
}

void write_compression_table(std::ostream& out) {
  constexpr double kGain = 3.1;
  const OpoDrive drive = drive_from_gain(kGain);
  out << "theta0_deg,gain,d,theta_d_deg\n";
  for (double theta0 : {-40.0, 0.0, 40.0}) {
    const double theta_d = rad_to_deg(phase_compression(deg_to_rad(theta0), drive));
    out << csv_row({format_sig(theta0), format_sig(kGain), format_sig(drive.d()),
                    format_sig(theta_d)})
        << '\n';
  }
}

}  // namespace

std::string format_sig(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value == 0.0 ? 0.0 : value);
  return buf;
}

double round_sig(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  return std::stod(format_sig(value, digits));
}

std::span<const std::string_view> figure_ids() { return kFigures; }

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << csv_row({format_sig(r.gain), format_sig(r.beta), format_sig(r.eta_in),
                    format_sig(r.eta_esc), std::string(to_string(r.closed_form.classification)),
                    format_sig(r.sigma_th_deg())})
        << '\n';
  }
}

void write_figure_csv(std::string_view figure, std::ostream& out) {
  if (figure == "fig4-top") {
    write_sweep_csv(figure4_rows(0.01, 0.93), out);
  } else if (figure == "fig4-bottom") {
    write_sweep_csv(figure4_rows(0.08, 0.87), out);
  } else if (figure == "fig6-varA") {
    write_variance_curves(kConfigA, out);
  } else if (figure == "fig6-varB") {
    write_variance_curves(kConfigB, out);
  } else if (figure == "fig6-compression") {
    write_compression_table(out);
  } else {
    fail(ErrorCode::UnknownFigure, "unknown figure '" + std::string(figure) + "'");
  }
}

int cmd_moments(const RunConfig& config, std::ostream& out) {
  const CoherentSignal signal(config.require_beta(), config.phi);
  std::vector<Stage> stages;
  stages.push_back({"coherent", coherent_moments(signal)});
  if (config.sigma) {
    stages.push_back({"diffused", diffused_moments(signal, PhaseDiffusion(*config.sigma))});
  }
  if (config.has_opo()) {
    const OpoCoupling coupling = config.coupling();
    const OpoDrive drive = config.drive();
    if (config.sigma && *config.sigma > 0.0) {
      if (signal.phi() != 0.0) {
        fail(ErrorCode::InvalidParameter,
             "a phase-diffused seed through the OPO is modelled for phi = 0 only");
      }
      stages.push_back({"opo_diffused", opo_diffused_moments(signal.beta(),
                                                            PhaseDiffusion(*config.sigma),
                                                            coupling, drive)});
    } else {
      stages.push_back({"opo", opo_output_moments(signal, coupling, drive)});
    }
  }

  if (config.format == OutputFormat::Csv) {
    out << "stage,mean_x,mean_y,var_x,var_y,phi_hat_deg,phase_variance\n";
    for (const auto& s : stages) {
      const ordered_json j = moments_json(s);
      auto num = [&](const char* key) {
        return j[key].is_null() ? std::string("nan") : format_sig(j[key].get<double>());
      };
      out << csv_row({s.name, num("mean_x"), num("mean_y"), num("var_x"), num("var_y"),
                      num("phi_hat_deg"), num("phase_variance")})
          << '\n';
    }
    return kExitOk;
  }

  ordered_json doc;
  doc["command"] = "moments";
  doc["input"]["beta"] = signal.beta();
  doc["input"]["phi_deg"] = rad_to_deg(signal.phi());
  if (config.sigma) {
    doc["input"]["sigma_deg"] = rad_to_deg(*config.sigma);
  } else {
    doc["input"]["sigma_deg"] = nullptr;
  }
  if (config.has_opo()) {
    doc["opo"] = opo_json(config.coupling(), config.drive());
  } else {
    doc["opo"] = nullptr;
  }
  doc["states"] = ordered_json::array();
  for (const auto& s : stages) doc["states"].push_back(moments_json(s));
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_threshold(const RunConfig& config, std::ostream& out) {
  const double beta = config.require_beta();
  const OpoCoupling coupling = config.coupling();
  const OpoDrive drive = config.drive();
  const SigmaGrid grid{};
  const ThresholdResult closed = threshold_closed_form(beta, coupling, drive);
  const ThresholdResult bisect = threshold_bisection(beta, coupling, drive, grid);
  const bool agree = methods_agree(closed, bisect, grid);

  if (config.format == OutputFormat::Csv) {
    SweepRow row{.gain = drive.gain(),
                 .beta = beta,
                 .eta_in = coupling.eta_in(),
                 .eta_esc = coupling.eta_esc(),
                 .closed_form = closed,
                 .bisection = bisect,
                 .methods_agree = agree};
    write_sweep_csv({row}, out);
    return agree ? kExitOk : kExitModel;
  }

  ordered_json doc;
  doc["command"] = "threshold";
  doc["beta"] = beta;
  doc["opo"] = opo_json(coupling, drive);
  doc["classification"] = std::string(to_string(closed.classification));
  if (closed.classification == Classification::Threshold) {
    doc["sigma_th_deg"] = round_sig(rad_to_deg(closed.sigma_th), 4);
    doc["sigma_th_rad"] = closed.sigma_th;
  } else {
    doc["sigma_th_deg"] = nullptr;
    doc["sigma_th_rad"] = nullptr;
  }
  doc["closed_form"] = threshold_json(closed);
  doc["bisection"] = threshold_json(bisect);
  doc["method_agreement"] = agree;
  out << doc.dump(2) << '\n';
  return agree ? kExitOk : kExitModel;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  GainRange gains;
  if (config.gain_range) {
    gains = *config.gain_range;
  } else if (config.gain || config.d) {
    const double g = config.drive().gain();
    gains = {.min = g, .max = g, .step = 1.0};
  } else {
    throw UsageError("sweep needs --gain MIN:MAX:STEP (or a preset)");
  }
  const SweepSpec spec{.gains = gains, .betas = config.sweep_betas(), .coupling = config.coupling()};
  const auto rows = threshold_sweep(spec, config.threads);

  if (config.format == OutputFormat::Csv) {
    write_sweep_csv(rows, out);
  } else {
    ordered_json doc = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["gain"] = r.gain;
      j["beta"] = r.beta;
      j["eta_in"] = r.eta_in;
      j["eta_esc"] = r.eta_esc;
      j["classification"] = std::string(to_string(r.closed_form.classification));
      j["sigma_th_deg"] = r.sigma_th_deg();
      j["method_agreement"] = r.methods_agree;
      doc.push_back(j);
    }
    out << doc.dump(2) << '\n';
  }

  int status = kExitOk;
  for (const auto& r : rows) {
    if (!r.methods_agree) {
      err << "closed form and bisection disagree at gain=" << r.gain << " beta=" << r.beta
          << '\n';
      status = kExitModel;
    }
  }
  return status;
}

int cmd_mc(const RunConfig& config, std::ostream& out) {
  const SamplerConfig sampler{.seed = config.seed,
                              .n_samples = config.samples,
                              .n_batches = 1,
                              .threads = config.threads};
  sampler.validate();
  const auto chain = state_chain(config);

  ordered_json doc;
  doc["command"] = "mc";
  doc["seed"] = config.seed;
  doc["samples"] = config.samples;
  doc["batches"] = config.batches;
  doc["entries"] = ordered_json::array();
  double max_abs_z = 0.0;

  auto record = [&](const StateSpec& state, const std::string& quantity, double analytic,
                    double empirical, double se, double z) {
    ordered_json j;
    j["state"] = std::string(to_string(state.kind()));
    j["quantity"] = quantity;
    j["analytic"] = analytic;
    j["empirical"] = empirical;
    j["std_error"] = se;
    j["z"] = z;
    doc["entries"].push_back(j);
    max_abs_z = std::max(max_abs_z, std::abs(z));
  };

  for (const auto& state : chain) {
    for (const auto& e : calibrate_moments(state, sampler)) {
      record(state, e.name, e.analytic, e.empirical, e.std_error, e.z);
    }
    if (config.batches > 0) {
      const SamplerConfig est{.seed = config.seed,
                              .n_samples = config.estimator_samples,
                              .n_batches = config.batches,
                              .threads = config.threads};
      const auto exp = mc_phase_estimator_experiment(state, est);
      record(state, "scaled_phase_variance", exp.analytic, exp.scaled_variance, exp.std_error,
             exp.z());
    }
  }

  const bool pass = max_abs_z <= kMaxAbsZ;
  doc["max_abs_z"] = max_abs_z;
  doc["self_check"] = pass ? "pass" : "fail";
  if (config.format == OutputFormat::Csv) {
    out << "state,quantity,analytic,empirical,std_error,z\n";
    for (const auto& j : doc["entries"]) {
      out << csv_row({j["state"].get<std::string>(), j["quantity"].get<std::string>(),
                      format_sig(j["analytic"].get<double>(), 10),
                      format_sig(j["empirical"].get<double>(), 10),
                      format_sig(j["std_error"].get<double>(), 6),
                      format_sig(j["z"].get<double>(), 6)})
          << '\n';
    }
  } else {
    out << doc.dump(2) << '\n';
  }
  return pass ? kExitOk : kExitSelfCheck;
}

int cmd_reproduce(std::string_view figure, const std::string& out_dir, std::ostream& out) {
  if (out_dir == "-") {
    write_figure_csv(figure, out);
    return kExitOk;
  }
  std::ostringstream buffer;
  write_figure_csv(figure, buffer);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / (std::string(figure) + ".csv");
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write '" + path.string() + "'");
  file << buffer.str();
  out << path.string() << '\n';
  return kExitOk;
}

}  // namespace opophase::cli
