// optslide: generate instances, run solver suites, and emit CSV/JSON results.
//
// Exit codes: 0 success (non-converged runs are data, not failure),
//             2 config error, 3 I/O error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include <optslide/optslide.hpp>

namespace {

int log_level() {
  const char* env = std::getenv("OPTSLIDE_LOG");
  if (!env) return 0;
  const std::string v = env;
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_rows(const std::vector<optslide::ResultRow>& rows) {
  if (log_level() < 1) return;
  for (const auto& r : rows)
    std::cerr << "[optslide] " << r.method << " m=" << r.m << " seed=" << r.seed
              << " grad_f=" << r.grad_f_calls << " grad_gk=" << r.grad_gk_calls
              << " gap=" << r.final_gap << (r.converged ? "" : " (not converged)")
              << "\n";
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oracle-separated sliding solver benchmark"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv", axis = "m", values_csv, in_path;
  long long seed_override = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config JSON")->required();
    sub->add_option("--out", out_path, "output path")->required();
    sub->add_option("--seed", seed_override, "override config seeds with one seed");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured method/seed grid");
  add_common(run);
  run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* scale = app.add_subcommand("scale", "scaling study along an axis");
  add_common(scale);
  scale->add_option("--axis", axis, "axis parameter (m|mu)");
  scale->add_option("--values", values_csv, "comma-separated axis values");

  CLI::App* table1 = app.add_subcommand("table1", "FGM vs sliding weighted-cost comparison");
  add_common(table1);

  CLI::App* plot = app.add_subcommand("plot", "gnuplot-ready data from a results JSON");
  plot->add_option("--in", in_path, "results JSON from `run`")->required();
  plot->add_option("--out", out_path, "output .dat path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot->parsed()) {
      std::ifstream in(in_path);
      if (!in) {
        std::cerr << "io error: cannot open '" << in_path << "'\n";
        return 3;
      }
      nlohmann::json rows = nlohmann::json::parse(in);
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "io error: cannot write '" << out_path << "'\n";
        return 3;
      }
      out << "# method m grad_f_calls grad_gk_calls final_gap\n";
      for (const auto& r : rows)
        out << r["method"].get<std::string>() << ' ' << r["m"] << ' '
            << r["grad_f_calls"] << ' ' << r["grad_gk_calls"] << ' ' << r["final_gap"]
            << "\n";
      return 0;
    }

    optslide::ExperimentConfig cfg = optslide::load_config(config_path);
    if (seed_override >= 0)
      cfg.seeds = {static_cast<std::uint64_t>(seed_override)};

    if (run->parsed()) {
      auto rows = optslide::run_experiment(cfg);
      log_rows(rows);
      optslide::emit_results(rows, format, out_path);
    } else if (scale->parsed()) {
      cfg.axis_name = axis;
      if (!values_csv.empty()) cfg.axis_values = parse_values(values_csv);
      std::vector<optslide::ResultRow> rows;
      auto summary = optslide::scaling_study(cfg, &rows);
      log_rows(rows);
      nlohmann::json j = optslide::scaling_summary_to_json(summary, cfg.axis_name);
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& r : rows) jr.push_back(optslide::row_to_json(r));
      j["rows"] = jr;
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "io error: cannot write '" << out_path << "'\n";
        return 3;
      }
      out << j.dump(2) << "\n";
    } else if (table1->parsed()) {
      auto summary = optslide::table1_comparison(cfg);
      log_rows(summary.rows);
      if (!summary.regime_ok)
        std::cerr << "warning: instance outside the intended comparison regime\n";
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "io error: cannot write '" << out_path << "'\n";
        return 3;
      }
      out << optslide::table1_summary_to_json(summary).dump(2) << "\n";
    }
  } catch (const optslide::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    std::cerr << msg << "\n";
    return msg.rfind("io error", 0) == 0 ? 3 : 1;
  }
  return 0;
}
