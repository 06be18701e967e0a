#include <algorithm>
#include <charconv>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "desat/harness.hpp"
#include "desat/stream_io.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDense = 4;
constexpr int kExitNumerical = 5;

double parse_number_token(const std::string& raw, const char* what) {
  std::string s = raw;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }),
          s.end());
  if (s.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty value");
  }
  double factor = 1.0;
  if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    if (s.empty()) {
      return factor;
    }
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string(what) + ": cannot parse '" + raw + "'");
  }
  return factor * v;
}

desat::BandSpec parse_band(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("band: expected 'lo:hi' (e.g. 0:0.53pi)");
  }
  const double lo = parse_number_token(text.substr(0, colon), "band low edge");
  const double hi = parse_number_token(text.substr(colon + 1), "band high edge");
  return desat::BandSpec(lo, hi);
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& tok : split_on(text, ',')) {
    out.push_back(parse_number_token(tok, what));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& tok : split_on(text, ',')) {
    const double v = parse_number_token(tok, what);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9) {
      throw std::invalid_argument(std::string(what) + ": '" + tok + "' is not an integer");
    }
    out.push_back(i);
  }
  return out;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const desat::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitParse;
  } catch (const desat::DenseSaturationError& e) {
    std::cerr << "declip failure: " << e.what() << '\n';
    return kExitDense;
  } catch (const desat::SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  }
}

// Optional overrides shared by simulate and sweep.
struct Overrides {
  std::optional<double> cr;
  std::optional<double> snr_db;
  std::optional<double> epsilon;
  std::optional<double> sample_rate;
  std::optional<double> sinad_db;
  std::optional<int> window_n;
  std::optional<int> margin;
  std::optional<int> qam;
  std::optional<int> taps;
  std::optional<int> cp;
  std::optional<int> quant_bits;
  std::optional<std::string> mode;
  std::optional<std::string> band;
  std::optional<std::string> carriers;
  std::optional<std::string> channel_csv;
  int dc_flag = -1;
  int tables_flag = -1;
  int drop_channel = 0;
};

void add_override_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--cr", o.cr, "Target clipping ratio");
  sub->add_option("--snr-db", o.snr_db, "Signal-to-noise ratio in dB (inf = noiseless)");
  sub->add_option("--window-n", o.window_n, "Unsaturated neighbors per regression window");
  sub->add_option("--margin", o.margin, "Extra nearest samples searched before skipping");
  sub->add_option("--epsilon", o.epsilon, "Ridge added to the Gram diagonal");
  sub->add_option("--qam", o.qam, "QAM order (even power of two)");
  sub->add_option("--taps", o.taps, "IDFT size");
  sub->add_option("--cp", o.cp, "Cyclic-prefix length");
  sub->add_option("--mode", o.mode, "wireless or wireline");
  sub->add_option("--carriers", o.carriers, "Comma-separated active carrier indices");
  sub->add_option("--band", o.band, "Kernel band lo:hi in rad/sample ('pi' suffix allowed)");
  sub->add_option("--channel-csv", o.channel_csv, "Channel response CSV (freq_hz,mag_db[,phase_rad])");
  sub->add_flag("--no-channel", o.drop_channel, "Remove the preset's channel response");
  sub->add_option("--quant-bits", o.quant_bits, "ADC bits (0 disables; wireline only)");
  sub->add_option("--sinad-db", o.sinad_db, "ADC SINAD target in dB");
  sub->add_option("--fs", o.sample_rate, "Sample rate in Hz");
  sub->add_flag("--dc-zeroed{1},--no-dc-zeroed{0}", o.dc_flag, "Force the DC carrier to zero");
  sub->add_flag("--tables{1},--no-tables{0}", o.tables_flag, "Use precomputed inverse tables");
}

void apply_overrides(desat::ExperimentConfig& cfg, const Overrides& o) {
  if (o.taps) cfg.ofdm.n_taps = *o.taps;
  if (o.qam) cfg.ofdm.qam_order = *o.qam;
  if (o.cp) cfg.ofdm.cp_len = *o.cp;
  if (o.mode) {
    if (*o.mode == "wireless") {
      cfg.ofdm.mode = desat::OfdmMode::Wireless;
    } else if (*o.mode == "wireline") {
      cfg.ofdm.mode = desat::OfdmMode::Wireline;
    } else {
      throw std::invalid_argument("mode must be 'wireless' or 'wireline'");
    }
  }
  if (o.carriers) {
    auto list = parse_int_list(*o.carriers, "carriers");
    std::sort(list.begin(), list.end());
    cfg.ofdm.active_carriers = std::move(list);
  }
  if (o.dc_flag != -1) cfg.ofdm.dc_zeroed = o.dc_flag == 1;
  if (o.window_n) cfg.window.window_n = *o.window_n;
  if (o.margin) cfg.window.margin = *o.margin;
  if (o.epsilon) cfg.window.epsilon = *o.epsilon;
  if (o.band) cfg.band = parse_band(*o.band);
  if (o.cr) cfg.cr_target = *o.cr;
  if (o.snr_db) cfg.snr_db = *o.snr_db;
  if (o.drop_channel != 0) cfg.channel.reset();
  if (o.channel_csv) cfg.channel = desat::read_channel_csv(fs::path(*o.channel_csv));
  if (o.sample_rate) cfg.sample_rate_hz = *o.sample_rate;
  if (o.quant_bits) {
    if (*o.quant_bits == 0) {
      cfg.adc.reset();
    } else {
      desat::AdcConfig adc = cfg.adc.value_or(desat::AdcConfig{});
      adc.bits = *o.quant_bits;
      cfg.adc = adc;
    }
  }
  if (o.sinad_db) {
    desat::AdcConfig adc = cfg.adc.value_or(desat::AdcConfig{});
    adc.sinad_db = *o.sinad_db;
    cfg.adc = adc;
  }
  if (o.tables_flag != -1) cfg.use_tables = o.tables_flag == 1;
}

void maybe_dump_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) {
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << sub->config_to_str(false, false);
}

void print_trial(std::ostream& out, const desat::TrialResult& r) {
  using desat::format_double;
  out << "seed " << r.seed << '\n'
      << "tx_bits " << r.tx_bits << '\n'
      << "errors_baseline " << r.errors_baseline << '\n'
      << "errors_saturated " << r.errors_saturated << '\n'
      << "errors_declipped " << r.errors_declipped << '\n'
      << "ber_baseline " << format_double(r.ber_baseline) << '\n'
      << "ber_saturated " << format_double(r.ber_saturated) << '\n'
      << "ber_declipped " << format_double(r.ber_declipped) << '\n'
      << "gamma " << format_double(r.gamma) << '\n'
      << "achieved_cr " << format_double(r.achieved_cr) << '\n'
      << "papr_original " << format_double(r.papr_original) << '\n'
      << "papr_saturated " << format_double(r.papr_saturated) << '\n'
      << "saturated_samples " << r.saturated_samples << '\n'
      << "max_clipped_per_channel " << r.max_clipped_per_channel << '\n'
      << "declip_skipped " << r.declip_skipped << '\n'
      << "declip_solver_failures " << r.declip_solver_failures << '\n'
      << "declip_dense_failures " << r.declip_dense_failures << '\n';
}

void write_sweep_row(std::ostream& out, const desat::SweepRow& row) {
  using desat::format_double;
  out << row.axis << ',' << format_double(row.value) << ',' << row.trials << ','
      << format_double(row.ber_sat) << ',' << format_double(row.ber_declip) << ','
      << format_double(row.ber_base) << ',' << format_double(row.ci_lo) << ','
      << format_double(row.ci_hi) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Declipping of band-limited signals and OFDM link simulation"};
  app.set_version_flag("--version", "desat 0.1.0");
  app.require_subcommand(1);
  int rc = 0;

  // declip: file-level wrapper around the sliding-window reconstruction.
  auto* declip_cmd = app.add_subcommand("declip", "Reconstruct saturated samples in a stream CSV");
  struct {
    std::string input;
    std::string output;
    std::string band;
    std::string table;
    std::string dump;
    int window_n = 8;
    std::optional<int> margin;
    std::optional<double> epsilon;
    std::optional<double> frame_len;
  } dc;
  declip_cmd->set_config("--config");
  declip_cmd->add_option("--input", dc.input, "Input stream CSV")->required();
  declip_cmd->add_option("--output", dc.output, "Output stream CSV")->required();
  declip_cmd->add_option("--band", dc.band, "Kernel band lo:hi in rad/sample")->required();
  declip_cmd->add_option("--window-n", dc.window_n, "Unsaturated neighbors per window");
  declip_cmd->add_option("--margin", dc.margin, "Search margin (default: window-n)");
  declip_cmd->add_option("--epsilon", dc.epsilon, "Ridge added to the Gram diagonal");
  declip_cmd->add_option("--frame-len", dc.frame_len, "Declip in independent frames of this length");
  declip_cmd->add_option("--table", dc.table, "Precomputed inverse-table file");
  declip_cmd->add_option("--dump-config", dc.dump, "Write the effective flags to an INI file");
  declip_cmd->callback([&] {
    rc = run_guarded([&] {
      maybe_dump_config(declip_cmd, dc.dump);
      const desat::BandSpec band = parse_band(dc.band);
      desat::WindowConfig window;
      window.window_n = dc.window_n;
      window.margin = dc.margin.value_or(dc.window_n);
      window.epsilon = dc.epsilon;
      std::optional<desat::InverseTable> table;
      if (!dc.table.empty()) {
        table = desat::load_inverse_table(fs::path(dc.table));
      }
      const desat::InverseTable* table_ptr = table.has_value() ? &*table : nullptr;
      const desat::SaturatedStream stream = desat::read_stream_csv(fs::path(dc.input));
      const desat::DeclipReport report =
          dc.frame_len.has_value()
              ? desat::declip_frames(stream, band, window, *dc.frame_len, table_ptr)
              : desat::declip_stream(stream, band, window, table_ptr);
      desat::write_declipped_csv(fs::path(dc.output), stream, report);
      std::cout << "estimated " << report.estimates.size() << '\n'
                << "skipped " << report.skipped << '\n'
                << "solver_failures " << report.solver_failures << '\n'
                << "dense_frame_failures " << report.dense_frame_failures << '\n'
                << "inside_threshold " << report.inside_threshold_count << '\n'
                << "high_cond_windows " << report.high_cond_windows << '\n'
                << "table_hits " << report.table_hits << '\n'
                << "table_misses " << report.table_misses << '\n';
    });
  });

  // simulate: one seeded trial with artifact dumps.
  auto* sim_cmd = app.add_subcommand("simulate", "Run one seeded link trial");
  struct {
    std::string preset = "ideal-case";
    std::string out_dir;
    std::string dump;
    std::uint64_t seed = 1;
  } sim;
  Overrides sim_over;
  sim_cmd->set_config("--config");
  sim_cmd->add_option("--preset", sim.preset, "Experiment preset name");
  sim_cmd->add_option("--seed", sim.seed, "Trial seed");
  sim_cmd->add_option("--out-dir", sim.out_dir, "Write trials.jsonl, constellation.csv, trace.csv");
  sim_cmd->add_option("--dump-config", sim.dump, "Write the effective flags to an INI file");
  add_override_flags(sim_cmd, sim_over);
  sim_cmd->callback([&] {
    rc = run_guarded([&] {
      maybe_dump_config(sim_cmd, sim.dump);
      desat::ExperimentConfig cfg = desat::preset(sim.preset);
      apply_overrides(cfg, sim_over);
      cfg.validate();
      std::optional<desat::InverseTable> table;
      if (cfg.use_tables) {
        table = desat::precompute_inverse_tables(
            cfg.resolved_band(), cfg.window,
            desat::isolated_patterns(cfg.ofdm.n_taps + cfg.ofdm.cp_len, cfg.window));
      }
      desat::TrialCapture capture;
      const desat::TrialResult result =
          desat::run_trial(cfg, sim.seed, table.has_value() ? &*table : nullptr, &capture);
      print_trial(std::cout, result);
      if (!sim.out_dir.empty()) {
        const std::vector<desat::TrialResult> results{result};
        desat::emit_artifacts(fs::path(sim.out_dir), results, &capture);
      }
    });
  });

  // sweep: aggregated Monte-Carlo over one axis.
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis over seeded trials");
  struct {
    std::string preset = "ideal-case";
    std::string axis = "cr";
    std::string values;
    std::string out_dir;
    std::string dump;
    long trials = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
  } sw;
  Overrides sweep_over;
  sweep_cmd->set_config("--config");
  sweep_cmd->add_option("--preset", sw.preset, "Experiment preset name");
  sweep_cmd->add_option("--axis", sw.axis, "cr, window-n or snr-db");
  sweep_cmd->add_option("--values", sw.values, "Comma-separated axis values")->required();
  sweep_cmd->add_option("--trials", sw.trials, "Trials per axis point");
  sweep_cmd->add_option("--seed", sw.seed, "Base seed");
  sweep_cmd->add_option("--workers", sw.workers, "Worker threads (output-invariant)");
  sweep_cmd->add_option("--out-dir", sw.out_dir, "Write summary.csv and clipped_hist.csv");
  sweep_cmd->add_option("--dump-config", sw.dump, "Write the effective flags to an INI file");
  add_override_flags(sweep_cmd, sweep_over);
  sweep_cmd->callback([&] {
    rc = run_guarded([&] {
      maybe_dump_config(sweep_cmd, sw.dump);
      desat::SweepSpec spec;
      spec.base = desat::preset(sw.preset);
      apply_overrides(spec.base, sweep_over);
      if (sw.axis == "cr") {
        spec.axis = desat::SweepAxis::CrTarget;
      } else if (sw.axis == "window-n" || sw.axis == "window_n") {
        spec.axis = desat::SweepAxis::WindowN;
      } else if (sw.axis == "snr-db" || sw.axis == "snr_db") {
        spec.axis = desat::SweepAxis::SnrDb;
      } else {
        throw std::invalid_argument("axis must be cr, window-n or snr-db");
      }
      spec.values = parse_double_list(sw.values, "values");
      spec.trials = sw.trials;
      spec.base_seed = sw.seed;
      spec.workers = sw.workers;
      std::cout << "axis,value,trials,ber_sat,ber_declip,ber_base,ci_lo,ci_hi\n";
      const std::vector<desat::SweepRow> rows =
          desat::sweep(spec, [&](const desat::SweepRow& row) {
            write_sweep_row(std::cout, row);
            std::cout.flush();
          });
      if (!sw.out_dir.empty()) {
        fs::create_directories(fs::path(sw.out_dir));
        desat::write_sweep_csv(fs::path(sw.out_dir) / "summary.csv", rows);
        desat::write_clipped_hist_csv(fs::path(sw.out_dir) / "clipped_hist.csv", rows);
      }
    });
  });

  // kernel: closed-form kernel and Gram dumps.
  auto* kernel_cmd = app.add_subcommand("kernel", "Dump kernel values or a Gram matrix");
  struct {
    std::string band;
    std::string at;
    std::string range;
    std::string gram;
    std::string output;
    std::string dump;
  } kn;
  kernel_cmd->set_config("--config");
  kernel_cmd->add_option("--band", kn.band, "Kernel band lo:hi in rad/sample")->required();
  kernel_cmd->add_option("--at", kn.at, "Comma-separated offsets to evaluate");
  kernel_cmd->add_option("--range", kn.range, "Offset range lo:hi:step");
  kernel_cmd->add_option("--gram", kn.gram, "Comma-separated locations for a Gram matrix");
  kernel_cmd->add_option("--output", kn.output, "Output CSV (default: stdout)");
  kernel_cmd->add_option("--dump-config", kn.dump, "Write the effective flags to an INI file");
  kernel_cmd->callback([&] {
    rc = run_guarded([&] {
      maybe_dump_config(kernel_cmd, kn.dump);
      const desat::BandSpec band = parse_band(kn.band);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!kn.output.empty()) {
        file.open(kn.output, std::ios::binary);
        if (!file) {
          throw std::runtime_error("cannot open " + kn.output + " for writing");
        }
        out = &file;
      }
      if (!kn.gram.empty()) {
        const std::vector<double> locs = parse_double_list(kn.gram, "gram locations");
        const Eigen::MatrixXd g = desat::gram_matrix(band, locs);
        *out << "row,col,t_row,t_col,value\n";
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
          for (Eigen::Index c = 0; c < g.cols(); ++c) {
            *out << r << ',' << c << ','
                 << desat::format_double(locs[static_cast<std::size_t>(r)]) << ','
                 << desat::format_double(locs[static_cast<std::size_t>(c)]) << ','
                 << desat::format_double(g(r, c)) << '\n';
          }
        }
        return;
      }
      std::vector<double> points;
      if (!kn.at.empty()) {
        points = parse_double_list(kn.at, "offsets");
      }
      if (!kn.range.empty()) {
        const auto parts = split_on(kn.range, ':');
        if (parts.size() != 3) {
          throw std::invalid_argument("range: expected lo:hi:step");
        }
        const double lo = parse_number_token(parts[0], "range low");
        const double hi = parse_number_token(parts[1], "range high");
        const double step = parse_number_token(parts[2], "range step");
        if (!(step > 0.0) || hi < lo) {
          throw std::invalid_argument("range: need hi >= lo and step > 0");
        }
        for (double t = lo; t <= hi + 1e-12 * std::max(1.0, std::abs(hi)); t += step) {
          points.push_back(t);
        }
      }
      if (points.empty()) {
        throw std::invalid_argument("kernel: give --at, --range or --gram");
      }
      *out << "t,phi\n";
      for (double t : points) {
        *out << desat::format_double(t) << ','
             << desat::format_double(desat::kernel_value(band, t)) << '\n';
      }
    });
  });

  // tables: precompute and serialize inverse tables.
  auto* tables_cmd = app.add_subcommand("tables", "Precompute inverse regression tables");
  struct {
    std::string band;
    std::string output;
    std::string dump;
    std::vector<std::string> patterns;
    int window_n = 8;
    std::optional<int> margin;
    std::optional<double> epsilon;
    int frame_len = 32;
  } tb;
  tables_cmd->set_config("--config");
  tables_cmd->add_option("--band", tb.band, "Kernel band lo:hi in rad/sample")->required();
  tables_cmd->add_option("--window-n", tb.window_n, "Unsaturated neighbors per window");
  tables_cmd->add_option("--margin", tb.margin, "Search margin (default: window-n)");
  tables_cmd->add_option("--epsilon", tb.epsilon, "Ridge added to the Gram diagonal");
  tables_cmd->add_option("--frame-len", tb.frame_len, "Frame length generating isolated patterns");
  tables_cmd->add_option("--pattern", tb.patterns,
                         "Explicit offset pattern (comma-separated ints; repeatable)");
  tables_cmd->add_option("--output", tb.output, "Output table file")->required();
  tables_cmd->add_option("--dump-config", tb.dump, "Write the effective flags to an INI file");
  tables_cmd->callback([&] {
    rc = run_guarded([&] {
      maybe_dump_config(tables_cmd, tb.dump);
      const desat::BandSpec band = parse_band(tb.band);
      desat::WindowConfig window;
      window.window_n = tb.window_n;
      window.margin = tb.margin.value_or(tb.window_n);
      window.epsilon = tb.epsilon;
      std::vector<std::vector<int>> patterns;
      if (tb.patterns.empty()) {
        patterns = desat::isolated_patterns(tb.frame_len, window);
      } else {
        patterns.reserve(tb.patterns.size());
        for (const auto& p : tb.patterns) {
          patterns.push_back(parse_int_list(p, "pattern"));
        }
      }
      const desat::InverseTable table = desat::precompute_inverse_tables(band, window, patterns);
      desat::save_inverse_table(fs::path(tb.output), table);
      std::cout << "entries " << table.entries.size() << '\n';
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  return rc;
}
