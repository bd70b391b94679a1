#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "qcap/io.hpp"
#include "qcap/protosim.hpp"
#include "qcap/rates.hpp"
#include "qcap/verify.hpp"
#include "qcap/version.hpp"

#include "svg_plot.hpp"

namespace {

using namespace qcap;

constexpr int kExitOk = 0;
constexpr int kExitSuiteFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitCapExceeded = 3;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  SlackParams slacks{0.1, 0.1, 0.05, 0.05, 0.05};
  int grid = 3;
  std::uint64_t seed = 0;
  int dim_cap_flag = 0;  // 0 = keep default/env
  bool svg = false;
  CodeSizes sizes{1, 1, 1};
};

// Every output file opens with this header; identical configs give identical
// bytes.
std::string config_header(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# oneshot-qcap " << kVersion << "\n";
  out << "# seed: " << cfg.seed << "\n";
  out << "# config: command=" << cfg.command << " input=" << cfg.input
      << " output=" << cfg.output << " eps=" << format_float(cfg.slacks.eps)
      << " eps-prime=" << format_float(cfg.slacks.epsPrime)
      << " delta=" << format_float(cfg.slacks.delta)
      << " delta-prime=" << format_float(cfg.slacks.deltaPrime)
      << " gamma=" << format_float(cfg.slacks.gamma) << " grid=" << cfg.grid
      << " dim-cap=" << dim_cap() << " svg=" << (cfg.svg ? 1 : 0) << " M=" << cfg.sizes.M
      << " L=" << cfg.sizes.L << " K=" << cfg.sizes.K << "\n";
  return out.str();
}

void emit(const RunConfig& cfg, const std::string& body) {
  const std::string text = config_header(cfg) + body;
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    write_text_file(cfg.output, text);
  }
}

int cmd_divergence(const RunConfig& cfg) {
  const DivergenceInput input = load_divergence_input(cfg.input);
  const double eps = cfg.slacks.eps;

  double d = relative_entropy(input.rho, input.sigma);
  double v;
  try {
    v = relative_entropy_variance(input.rho, input.sigma);
  } catch (const InputError&) {
    v = std::numeric_limits<double>::quiet_NaN();
  }
  const double dm = dmax(input.rho, input.sigma);
  const DhResult dh = dh_eps(input.rho, input.sigma, eps);
  const Interval smooth = dmax_smooth(input.rho, input.sigma, eps);

  std::ostringstream body;
  body << "D,V,Dmax,DH_eps,Dmax_smooth_lower,Dmax_smooth_upper,typeI,typeII\n";
  body << csv_row({d, v, dm, dh.bits, smooth.lower, smooth.upper, dh.test.typeI, dh.test.typeII})
       << "\n";
  emit(cfg, body.str());
  return kExitOk;
}

int cmd_region(const RunConfig& cfg) {
  const FixtureDoc doc = load_fixture(cfg.input);
  EncoderGridSpec grid;
  grid.prob_points = cfg.grid;
  grid.bloch_points = cfg.grid;
  const auto samples = sweep_region(doc.channel, grid, cfg.slacks);

  std::ostringstream body;
  body << "px0,py0_x0,py0_x1,theta00,theta01,theta10,theta11,"
          "r_ach,R_ach,r_con,R_con,r_ds,R_ds,eps,epsPrime,delta,deltaPrime,gamma\n";
  for (const auto& s : samples) {
    std::vector<double> row = s.encoder_params;
    row.insert(row.end(),
               {s.achievable.public_rate, s.achievable.private_rate, s.converse.public_rate,
                s.converse.private_rate, s.asymptotic.public_rate, s.asymptotic.private_rate,
                cfg.slacks.eps, cfg.slacks.epsPrime, cfg.slacks.delta, cfg.slacks.deltaPrime,
                cfg.slacks.gamma});
    body << csv_row(row) << "\n";
  }
  emit(cfg, body.str());

  if (cfg.svg && !cfg.output.empty()) {
    auto clamp0 = [](double x) { return std::max(0.0, x); };
    qcap_tool::SvgSeries ach{"achievable", "#1f77b4", {}};
    qcap_tool::SvgSeries con{"converse", "#d62728", {}};
    qcap_tool::SvgSeries ds{"asymptotic", "#2ca02c", {}};
    for (const auto& s : samples) {
      ach.points.push_back({clamp0(s.achievable.public_rate), clamp0(s.achievable.private_rate)});
      con.points.push_back({clamp0(s.converse.public_rate), clamp0(s.converse.private_rate)});
      ds.points.push_back({clamp0(s.asymptotic.public_rate), clamp0(s.asymptotic.private_rate)});
    }
    const std::string svg_path = cfg.output + ".svg";
    write_text_file(svg_path, qcap_tool::render_scatter({ach, con, ds}, "public rate r [bits]",
                                                        "private rate R [bits]"));
  }
  return kExitOk;
}

nlohmann::json report_to_json(const ProtocolReport& r) {
  nlohmann::json j;
  j["sizes"] = {{"M", r.sizes.M}, {"L", r.sizes.L}, {"K", r.sizes.K}};
  j["slacks"] = {{"eps", r.slacks.eps},
                 {"epsPrime", r.slacks.epsPrime},
                 {"delta", r.slacks.delta},
                 {"deltaPrime", r.slacks.deltaPrime},
                 {"gamma", r.slacks.gamma}};
  j["public_error"] = r.public_error;
  j["public_bound"] = r.public_bound;
  j["public_pass"] = r.public_pass;
  j["private_error"] = r.private_error;
  j["privacy_error"] = r.privacy_error;
  j["privacy_bound"] = r.privacy_bound;
  j["privacy_pass"] = r.privacy_pass;
  j["secrecy_bound"] = r.secrecy_bound;
  j["log2_lk"] = r.log2_lk;
  j["lk_limit"] = r.lk_limit;
  j["log2_k"] = r.log2_k;
  j["k_requirement"] = r.k_requirement;
  j["sizes_ok"] = r.sizes_ok;
  j["secrecy"] = nlohmann::json::array();
  for (const auto& row : r.secrecy) {
    j["secrecy"].push_back(
        {{"m", row.m}, {"l", row.l}, {"distance", row.distance}, {"pass", row.pass}});
  }
  return j;
}

int cmd_simulate(const RunConfig& cfg) {
  const FixtureDoc doc = load_fixture(cfg.input);
  const ProtocolReport report = privacy_error(doc.ensemble, doc.channel, cfg.sizes, cfg.slacks);

  std::ostringstream body;
  body << "m,l,public_error,public_bound,public_pass,private_error,privacy_error,privacy_bound,"
          "privacy_pass,secrecy_distance,secrecy_bound,secrecy_pass\n";
  for (const auto& row : report.secrecy) {
    body << row.m << "," << row.l << ","
         << csv_row({report.public_error, report.public_bound}) << ","
         << (report.public_pass ? 1 : 0) << ","
         << csv_row({report.private_error, report.privacy_error, report.privacy_bound}) << ","
         << (report.privacy_pass ? 1 : 0) << ","
         << csv_row({row.distance, report.secrecy_bound}) << "," << (row.pass ? 1 : 0) << "\n";
  }
  emit(cfg, body.str());

  if (!cfg.output.empty()) {
    nlohmann::json j = report_to_json(report);
    j["tool"] = std::string("oneshot-qcap ") + kVersion;
    j["seed"] = cfg.seed;
    write_text_file(cfg.output + ".json", j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyOptions options;
  options.seed = cfg.seed;
  options.slacks = cfg.slacks;
  if (!cfg.input.empty()) options.fixture_paths.push_back(cfg.input);
  const auto results = run_verify_suites(options);
  emit(cfg, format_suite_table(results));
  for (const auto& r : results) {
    if (!r.pass) return kExitSuiteFailure;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-shot public/private wiretap rate toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("ONESHOT_QCAP_DIM_CAP")) {
    cfg.dim_cap_flag = std::atoi(env);
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "input document (JSON)");
    sub->add_option("--output", cfg.output, "output path (default stdout)");
    sub->add_option("--eps", cfg.slacks.eps, "type-I error budget");
    sub->add_option("--eps-prime", cfg.slacks.epsPrime, "secrecy budget");
    sub->add_option("--delta", cfg.slacks.delta, "achievability slack in (0, eps)");
    sub->add_option("--delta-prime", cfg.slacks.deltaPrime, "smoothing slack in (0, sqrt(eps'))");
    sub->add_option("--gamma", cfg.slacks.gamma, "bridge slack");
    sub->add_option("--grid", cfg.grid, "encoder grid resolution");
    sub->add_option("--seed", cfg.seed, "random seed recorded in outputs");
    sub->add_option("--dim-cap", cfg.dim_cap_flag, "max composite dimension");
    sub->add_flag("--svg", cfg.svg, "also write an SVG scatter of the region");
  };

  CLI::App* divergence = app.add_subcommand("divergence", "entropic quantities of a state pair");
  CLI::App* region = app.add_subcommand("region", "rate-region sweep for a channel");
  CLI::App* simulate = app.add_subcommand("simulate", "exact small-instance protocol run");
  CLI::App* verify = app.add_subcommand("verify", "run the property suites");
  for (CLI::App* sub : {divergence, region, simulate, verify}) add_common(sub);
  simulate->add_option("--M", cfg.sizes.M, "public message count");
  simulate->add_option("--L", cfg.sizes.L, "private message count");
  simulate->add_option("--K", cfg.sizes.K, "local key size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (cfg.dim_cap_flag > 0) qcap::set_dim_cap(cfg.dim_cap_flag);
    cfg.slacks.validate();
    if (divergence->parsed()) {
      cfg.command = "divergence";
      return cmd_divergence(cfg);
    }
    if (region->parsed()) {
      cfg.command = "region";
      return cmd_region(cfg);
    }
    if (simulate->parsed()) {
      cfg.command = "simulate";
      return cmd_simulate(cfg);
    }
    if (verify->parsed()) {
      cfg.command = "verify";
      return cmd_verify(cfg);
    }
  } catch (const qcap::CapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const qcap::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSuiteFailure;
  }
  return kExitInputError;
}
