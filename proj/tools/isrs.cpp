// isrs: command-line front end for the power-profile library.
//
//   isrs <command> --config FILE [--output DIR] [--steps N] [--order N] [--format csv|json]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "isrs/io/config.hpp"
#include "isrs/io/table.hpp"
#include "isrs/isrs.hpp"

namespace fs = std::filesystem;
using namespace isrs;

namespace {

struct Options {
  std::string config;
  std::string output;
  int steps = 0;
  int order = 0;
  std::string format = "csv";
  bool timing = false;
};

struct Context {
  io::RunConfig cfg;
  fs::path out;
  io::Format format = io::Format::csv;

  void write(const io::Table& t, const std::string& stem) const {
    const auto path = io::write_table(t, out, stem, format);
    std::cout << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
  }
};

Context load(const Options& o) {
  Context c;
  c.cfg = io::load_config(o.config);
  if (o.steps > 0) {
    c.cfg.solver.steps_per_span = o.steps;
    if (c.cfg.sweep) c.cfg.sweep->solver.steps_per_span = o.steps;
  }
  if (o.order > 0) {
    c.cfg.order = o.order;
    if (c.cfg.osnr) c.cfg.osnr->options.order = o.order;
  }
  c.out = o.output.empty() ? fs::path(c.cfg.output_dir) : fs::path(o.output);
  c.format = o.format == "json" ? io::Format::json : io::Format::csv;
  return c;
}

/// Closed-form samples along a multi-span result, both sides of every amplifier.
std::vector<PowerSpectrum> sample_closedform(const MultiSpanResult& r, int per_span) {
  std::vector<PowerSpectrum> samples;
  for (std::size_t k = 0; k < r.span_params.size(); ++k) {
    const double len = r.span_params[k].length_km;
    for (int s = 0; s <= per_span; ++s) {
      const double z = s == per_span ? len : len * s / per_span;
      samples.push_back(power_profile(r.trace.spans[k].input, r.span_params[k], r.span_params[k].raman_slope, z)
                            .at_position(r.span_start_km[k] + z));
    }
  }
  if (r.trace.received) samples.push_back(*r.trace.received);
  return samples;
}

io::Table osnr_table(const PowerSpectrum& launch, const std::vector<double>& osnr_cf,
                     const std::vector<double>& osnr_numerical) {
  io::Table t{{"index", "frequency_thz", "band", "launch_dbm", "osnr_db", "osnr_db_numerical"}, {}};
  for (std::size_t i = 0; i < launch.size(); ++i)
    t.add({static_cast<long long>(i), launch.grid().frequency(i), launch.grid().band_name(i), io::power_dbm(launch[i]),
           linear_to_db(osnr_cf[i]), linear_to_db(osnr_numerical[i])});
  return t;
}

int cmd_solve(const Context& c) {
  const auto r = propagate_link_numerical(c.cfg.launch_spectrum(), c.cfg.link, c.cfg.solver);
  c.write(io::longitudinal_table(r.longitudinal.spectra), "longitudinal");
  c.write(io::spectral_table(r.trace.final_output()), "spectral");
  return 0;
}

int cmd_closed_form(const Context& c) {
  const PowerSpectrum launch = c.cfg.launch_spectrum();
  const FiberSpec& fiber = c.cfg.link.spans.front();
  const auto params = derive_closedform_params(launch, fiber, c.cfg.order, c.cfg.gamma_ref_mode);
  std::vector<PowerSpectrum> samples;
  const int n = c.cfg.longitudinal_samples;
  for (int s = 0; s <= n; ++s)
    samples.push_back(power_profile(launch, params, params.raman_slope, s == n ? fiber.length_km : fiber.length_km * s / n));
  c.write(io::longitudinal_table(samples), "longitudinal");
  c.write(io::spectral_table(samples.back()), "spectral");
  return 0;
}

int cmd_multispan(const Context& c) {
  const auto r = propagate_multispan_closedform(c.cfg.launch_spectrum(), c.cfg.link, c.cfg.order, c.cfg.gamma_ref_mode);
  c.write(io::longitudinal_table(sample_closedform(r, c.cfg.longitudinal_samples)), "longitudinal");
  c.write(io::spectral_table(r.final_output()), "spectral");
  return 0;
}

int cmd_sweep(const Context& c, bool timing) {
  if (!c.cfg.sweep) throw ConfigError(c.cfg.scenario + ": config has no 'sweep' section");
  const SweepResult r = run_order_sweep(*c.cfg.sweep);
  io::Table rec{{"band", "peak_gain", "launch_dbm", "length_km", "order", "error_ratio", "max_deviation_db"}, {}};
  if (timing) {
    rec.columns.push_back("oracle_seconds");
    rec.columns.push_back("closedform_seconds");
  }
  rec.columns.push_back("error");
  for (const auto& x : r.records) {
    std::vector<io::Cell> row{x.band, x.peak_gain, x.launch_dbm, x.length_km, static_cast<long long>(x.order),
                              x.error_ratio, x.max_deviation_db};
    if (timing) {
      row.emplace_back(x.oracle_seconds);
      row.emplace_back(x.closedform_seconds);
    }
    row.emplace_back(x.error);
    rec.add(std::move(row));
  }
  c.write(rec, "sweep");

  io::Table sum{{"band", "order", "count", "median", "q1", "q3", "whisker_low", "whisker_high", "outliers",
                 "mean_abs_error"},
                {}};
  for (const auto& s : r.summaries) {
    std::string outliers;
    for (double v : s.outliers) outliers += (outliers.empty() ? "" : ";") + io::format_number(v);
    sum.add({s.band, static_cast<long long>(s.order), static_cast<long long>(s.count), s.median, s.q1, s.q3,
             s.whisker_low, s.whisker_high, outliers, s.mean_abs_error});
  }
  c.write(sum, "sweep_summary");
  return 0;
}

int cmd_preemph(const Context& c) {
  if (!c.cfg.launch || !std::holds_alternative<io::PreemphasisRequest>(*c.cfg.launch))
    throw ConfigError(c.cfg.scenario + ": preemph needs launch.preemphasis");
  const auto& req = std::get<io::PreemphasisRequest>(*c.cfg.launch);
  const auto& grid = c.cfg.grid;
  std::vector<double> shape = req.target.empty() ? std::vector<double>(grid->size(), 1.0) : req.target;
  const double total = dbm_to_watt(req.total_dbm);

  PowerSpectrum launch = PowerSpectrum::flat(grid, 0.0);
  if (req.mode == io::PreemphasisMode::output_absolute) {
    if (c.cfg.link.span_count() != 1)
      throw ConfigError(c.cfg.scenario + ": absolute output targets are only defined for a single span");
    const TargetSpectrum norm = TargetSpectrum::shape(grid, shape);
    PowerSpectrum out(grid, norm.fractions());
    launch = preemphasis_single_span(TargetSpectrum::absolute(out.scaled(total)), c.cfg.link.spans.front(), c.cfg.order,
                                     OutputAbsolute{});
  } else {
    launch = preemphasis_multispan(TargetSpectrum::shape(grid, shape), c.cfg.link, total, c.cfg.order);
  }
  c.write(io::spectral_table(launch), "launch");
  const auto numerical = propagate_link_numerical(launch, c.cfg.link, c.cfg.solver);
  const auto closed = propagate_multispan_closedform(launch, c.cfg.link, c.cfg.order, c.cfg.gamma_ref_mode);
  io::Table rx{{"index", "frequency_thz", "band", "closedform_dbm", "numerical_dbm"}, {}};
  for (std::size_t i = 0; i < grid->size(); ++i)
    rx.add({static_cast<long long>(i), grid->frequency(i), grid->band_name(i), io::power_dbm(closed.final_output()[i]),
            io::power_dbm(numerical.trace.final_output()[i])});
  c.write(rx, "received");
  return 0;
}

int cmd_osnr_target(const Context& c) {
  if (!c.cfg.osnr) throw ConfigError(c.cfg.scenario + ": config has no 'osnr' section");
  const auto& s = *c.cfg.osnr;
  const auto& grid = c.cfg.grid;
  const std::vector<double> target = s.target.empty() ? std::vector<double>(grid->size(), 1.0) : s.target;
  const double total = dbm_to_watt(s.total_dbm);

  io::Table hist{{"iteration", "rmse"}, {}};
  std::optional<OsnrTargetRun> run;
  try {
    run = target_osnr(grid, target, c.cfg.link, total, s.options);
  } catch (const NonConvergenceError& e) {
    for (std::size_t i = 0; i < e.history().size(); ++i) hist.add({static_cast<long long>(i + 1), e.history()[i]});
    c.write(hist, "history");
    throw;
  }
  for (std::size_t i = 0; i < run->history.size(); ++i) hist.add({static_cast<long long>(i + 1), run->history[i]});
  c.write(hist, "history");

  auto numerical_osnr = [&](const PowerSpectrum& launch) {
    const auto r = propagate_link_numerical(launch, c.cfg.link, c.cfg.solver);
    return osnr_profile(r.trace.final_output(), ase_accumulate(c.cfg.link, r.trace, s.options.ase));
  };
  c.write(osnr_table(run->launch, run->estimated_osnr, numerical_osnr(run->launch)), "osnr");

  const PowerSpectrum flat = PowerSpectrum::flat(grid, total / static_cast<double>(grid->size()));
  const auto flat_cf = closedform_link_osnr(flat, c.cfg.link, s.options.order, s.options.ase);
  c.write(osnr_table(flat, flat_cf, numerical_osnr(flat)), "osnr_flat");
  std::printf("converged in %d iterations, final rmse %s\n", run->iterations(),
              io::format_number(run->history.back()).c_str());
  return 0;
}

int cmd_validate(const Context& c) {
  std::printf("%s: %zu channels, %zu bands, %zu span(s), %.9g km\n", c.cfg.scenario.c_str(), c.cfg.grid->size(),
              c.cfg.bands.size(), c.cfg.link.span_count(), c.cfg.link.total_length());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISRS power-profile modeling: numerical oracle, closed form, pre-emphasis and OSNR targeting"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "Output directory (overrides output_dir)");
    sub->add_option("--steps", o.steps, "RK4 steps per span")->check(CLI::PositiveNumber);
    sub->add_option("--order", o.order, "Closed-form approximation order n")->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  struct Cmd {
    const char* name;
    const char* help;
  };
  const std::vector<Cmd> cmds = {{"solve", "Numerical (RK4) link propagation"},
                                 {"closed-form", "Closed-form single-span profile"},
                                 {"multispan", "Closed-form multi-span propagation"},
                                 {"sweep", "Closed form vs RK4 sweep over orders"},
                                 {"preemph", "Launch pre-emphasis for a target output shape"},
                                 {"osnr-target", "Iterative pre-emphasis for a target OSNR shape"},
                                 {"validate-config", "Parse and check a scenario"}};
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (std::string(c.name) == "sweep") sub->add_flag("--timing", o.timing, "Include runtimes in the sweep CSV");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  std::string scenario = o.config;
  try {
    const Context c = load(o);
    scenario = c.cfg.scenario;
    if (name == "solve") return cmd_solve(c);
    if (name == "closed-form") return cmd_closed_form(c);
    if (name == "multispan") return cmd_multispan(c);
    if (name == "sweep") return cmd_sweep(c, o.timing);
    if (name == "preemph") return cmd_preemph(c);
    if (name == "osnr-target") return cmd_osnr_target(c);
    return cmd_validate(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error in scenario '" << scenario << "': " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
