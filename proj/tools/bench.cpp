#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bench_core.hpp"

int main(int argc, char** argv) {
  bench::WorkloadConfig cfg;
  CLI::App app{"Concurrent data-structure workload runner"};
  app.add_option("--structure", cfg.structure, "list | hash | bst | dlqueue")
      ->capture_default_str();
  app.add_option("--scheme", cfg.scheme, "ebr | ibr | hp | rc-ebr | rc-ibr | rc-hp")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_option("--duration", cfg.duration_s, "seconds per run (10% warmup)")
      ->capture_default_str();
  app.add_option("--init-size", cfg.init_size, "prefill element count")
      ->capture_default_str();
  app.add_option("--key-range", cfg.key_range, "key universe (default 2x init-size)");
  app.add_option("--update-pct", cfg.update_pct,
                 "percent updates (half insert, half delete)")
      ->capture_default_str();
  app.add_option("--rq-pct", cfg.rq_pct, "percent range queries (bst only)")
      ->capture_default_str();
  app.add_option("--rq-size", cfg.rq_size, "range query width")->capture_default_str();
  app.add_option("--epoch-freq", cfg.epoch_freq,
                 "allocations per epoch advance (0 = backend default)")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "rng seed")->capture_default_str();
  app.add_option("--repeat", cfg.repeat, "runs per configuration")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "csv | json")->capture_default_str();
  app.add_option("--out", cfg.out, "output path (default stdout)");
  CLI11_PARSE(app, argc, argv);

  std::vector<bench::RunResult> results;
  if (auto err = bench::run(cfg, results); !err.empty()) {
    std::cerr << "error: " << err << "\n";
    return 1;
  }

  std::string text =
      cfg.format == "json" ? bench::emit_json(results) : bench::emit_csv(results);
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out);
    if (!f) {
      std::cerr << "error: cannot open output file: " << cfg.out << "\n";
      return 1;
    }
    f << text;
    if (!f.good()) {
      std::cerr << "error: write failed: " << cfg.out << "\n";
      return 1;
    }
  }
  return 0;
}
