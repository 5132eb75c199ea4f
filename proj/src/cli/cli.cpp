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

#include "cli/cli.hpp"

#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "opophase/errors.hpp"

namespace opophase::cli {

namespace {

// Raw flag values; resolved into a RunConfig after parsing so that presets
// and config files can be layered underneath.
struct Flags {
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::optional<std::string> angle_unit;
  std::optional<std::string> beta;
  std::optional<std::string> phi;
  std::optional<std::string> sigma;
  std::optional<std::string> gain;
  std::optional<double> d;
  std::optional<double> eta_in;
  std::optional<double> eta_esc;
  std::optional<std::string> mirrors;
  std::optional<std::string> opo;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> batches;
  std::optional<std::size_t> estimator_samples;
  std::optional<unsigned> threads;
  std::optional<std::string> format;
};

void add_model_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--preset", f.preset, "Experimental configuration: configA or configB");
  cmd.add_option("--config", f.config_path, "JSON config file");
  cmd.add_option("--angle-unit", f.angle_unit, "Unit for unsuffixed angles: deg (default) or rad");
  cmd.add_option("--beta", f.beta, "Coherent amplitude (sweep: comma-separated list)");
  cmd.add_option("--phi", f.phi, "Signal phase, e.g. 45deg or 0.785rad");
  cmd.add_option("--sigma", f.sigma, "Phase-diffusion amplitude, e.g. 10deg");
  cmd.add_option("--gain", f.gain, "OPO gain G (sweep: MIN:MAX:STEP)");
  cmd.add_option("--d", f.d, "OPO pump parameter d = sqrt(P/P_th)");
  cmd.add_option("--eta-in", f.eta_in, "OPO input efficiency");
  cmd.add_option("--eta-esc", f.eta_esc, "OPO escape efficiency");
  cmd.add_option("--mirrors", f.mirrors, "R_ic,R_oc,crystal_loss");
  cmd.add_option("--opo", f.opo, "OPO shorthand, e.g. d=0.4,eta-in=0.08,eta-esc=0.87");
  cmd.add_option("--format", f.format, "Output format: json or csv");
  cmd.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_sampler_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--seed", f.seed, "Sampler seed");
  cmd.add_option("--samples", f.samples, "Homodyne samples per quadrature");
  cmd.add_option("--batches", f.batches,
                 "Batches for the two-copy estimator experiment (0 = skip, else >= 100)");
  cmd.add_option("--estimator-samples", f.estimator_samples,
                 "Samples per quadrature per batch in the estimator experiment");
}

RunConfig resolve(const Flags& f, bool sweep, OutputFormat default_format) {
  RunConfig config;
  config.format = default_format;
  if (f.preset) apply_preset(config, *f.preset);
  if (f.config_path) apply_json(config, load_json_file(*f.config_path));
  if (f.angle_unit) config.angle_unit = parse_angle_unit(*f.angle_unit);

  if (f.beta) {
    if (sweep) {
      config.betas = parse_list(*f.beta);
      config.beta.reset();
    } else {
      config.beta = parse_number(*f.beta, "beta");
    }
  }
  if (f.phi) config.phi = parse_angle(*f.phi, config.angle_unit);
  if (f.sigma) config.sigma = parse_angle(*f.sigma, config.angle_unit);

  if (f.gain && f.d) throw UsageError("give --gain or --d, not both");
  if (f.gain) {
    if (sweep && f.gain->find(':') != std::string::npos) {
      config.gain_range = parse_gain_range(*f.gain);
      config.set_gain(config.gain_range->min);
    } else {
      config.set_gain(parse_number(*f.gain, "gain"));
      config.gain_range.reset();
    }
  }
  if (f.d) {
    config.set_d(*f.d);
    config.gain_range.reset();
  }
  if (f.mirrors && (f.eta_in || f.eta_esc)) {
    throw UsageError("give --mirrors or --eta-in/--eta-esc, not both");
  }
  if (f.eta_in || f.eta_esc) {
    if (!f.eta_in || !f.eta_esc) throw UsageError("--eta-in and --eta-esc go together");
    config.set_etas(*f.eta_in, *f.eta_esc);
  }
  if (f.mirrors) {
    const auto v = parse_list(*f.mirrors);
    if (v.size() != 3) throw UsageError("--mirrors takes R_ic,R_oc,crystal_loss");
    config.set_mirrors(OpoMirrorSpec(v[0], v[1], v[2]));
  }
  if (f.opo) apply_opo_shorthand(config, *f.opo);

  if (f.seed) config.seed = *f.seed;
  if (f.samples) config.samples = *f.samples;
  if (f.batches) config.batches = *f.batches;
  if (f.estimator_samples) config.estimator_samples = *f.estimator_samples;
  if (f.threads) config.threads = *f.threads;
  if (f.format) config.format = parse_format(*f.format);
  return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"opophase: phase-diffused coherent signals through a degenerate OPO", "opophase"};
  app.require_subcommand(1);

  Flags moments_flags, threshold_flags, sweep_flags, mc_flags;
  auto* moments = app.add_subcommand("moments", "Quadrature moments of the state chain");
  add_model_options(*moments, moments_flags);
  auto* threshold = app.add_subcommand("threshold", "Phase-noise threshold of the OPO");
  add_model_options(*threshold, threshold_flags);
  auto* sweep = app.add_subcommand("sweep", "Threshold versus gain table (CSV)");
  add_model_options(*sweep, sweep_flags);
  auto* mc = app.add_subcommand("mc", "Monte Carlo check of the analytic moments");
  add_model_options(*mc, mc_flags);
  add_sampler_options(*mc, mc_flags);

  std::string figure;
  std::string out_dir = ".";
  auto* reproduce = app.add_subcommand("reproduce", "Write a figure dataset as CSV");
  reproduce->add_option("figure", figure, "fig4-top, fig4-bottom, fig6-varA, fig6-varB, fig6-compression")
      ->required();
  reproduce->add_option("--out-dir", out_dir, "Output directory ('-' for stdout)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (moments->parsed()) {
      return cmd_moments(resolve(moments_flags, false, OutputFormat::Json), out);
    }
    if (threshold->parsed()) {
      return cmd_threshold(resolve(threshold_flags, false, OutputFormat::Json), out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(resolve(sweep_flags, true, OutputFormat::Csv), out, err);
    }
    if (mc->parsed()) return cmd_mc(resolve(mc_flags, false, OutputFormat::Json), out);
    if (reproduce->parsed()) return cmd_reproduce(figure, out_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::UnknownFigure ? kExitUsage : kExitModel;
  }
  return kExitUsage;
}

}  // namespace opophase::cli
