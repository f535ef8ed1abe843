// caper: multilevel network alignment from the command line.
//
//   caper synth   --input g.edges --noise 0.1 --seed 7 --out-graph g2.edges --out-truth truth.tsv
//   caper coarsen --input g.edges --levels 3 --out-dir hierarchy/
//   caper align   --graph1 a.edges --graph2 b.edges --output base.align
//   caper caper   --graph1 a.edges --graph2 b.edges --output caper.align [--levels 3 ...]
//   caper eval    --alignment caper.align --truth truth.tsv
//   caper bench   --config bench.conf [--trials 5 ...]
//
// Exit codes: 0 ok, 1 usage/config error, 2 I/O error, 3 external aligner failure.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "caper/coarsen.hpp"
#include "caper/config.hpp"
#include "caper/error.hpp"
#include "caper/graph.hpp"
#include "caper/harness.hpp"
#include "caper/multilevel.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kExternal = 3 };

// Registers one --<key> flag per setting; values given on the command line
// override the config file.
struct SettingFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app, std::initializer_list<std::string_view> skip = {}) {
    app->add_option("--config", config_path, "key=value settings file");
    for (auto key : caper::settings_keys()) {
      if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
      const std::string name(key);
      options[name] = app->add_option("--" + name, values[name], "setting " + name);
    }
  }

  caper::Settings resolve() const {
    caper::Settings settings;
    if (!config_path.empty()) settings = caper::load_settings(config_path);
    for (const auto& [name, opt] : options)
      if (opt->count() > 0) settings[name] = values.at(name);
    return settings;
  }
};

caper::ExperimentConfig make_config(const SettingFlags& flags) {
  caper::ExperimentConfig cfg;
  caper::apply_settings(flags.resolve(), cfg);
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw caper::IoError("cannot write '" + path + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel network alignment"};
  app.require_subcommand(1);

  std::string input, graph1, graph2, output, out_graph, out_truth, out_dir, alignment_path, truth_path;
  bool weighted = false;
  bool bijective = false;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t levels = 3;

  auto* synth = app.add_subcommand("synth", "Write a noisy permuted copy of a graph and its ground truth");
  synth->add_option("--input", input, "input edge list")->required();
  synth->add_flag("--weighted", weighted, "read a third column as edge weight");
  synth->add_option("--noise", noise, "edge removal probability")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--out-graph", out_graph, "output edge list of the copy")->required();
  synth->add_option("--out-truth", out_truth, "output ground truth (u<TAB>v)")->required();

  auto* coarsen = app.add_subcommand("coarsen", "Build and write the coarsening hierarchy");
  coarsen->add_option("--input", input, "input edge list")->required();
  coarsen->add_flag("--weighted", weighted, "read a third column as edge weight");
  coarsen->add_option("--levels", levels, "number of coarsening levels");
  coarsen->add_option("--out-dir", out_dir, "output directory")->required();

  SettingFlags align_flags, caper_flags, bench_flags;
  auto* align = app.add_subcommand("align", "Run the base aligner on the full graphs");
  auto* run = app.add_subcommand("caper", "Run the full multilevel pipeline");
  for (auto [cmd, flags] : {std::pair{align, &align_flags}, std::pair{run, &caper_flags}}) {
    cmd->add_option("--graph1", graph1, "first graph")->required();
    cmd->add_option("--graph2", graph2, "second graph")->required();
    cmd->add_option("--output", output, "output alignment (i j s)")->required();
    flags->attach(cmd, {"input", "output"});
  }

  auto* eval = app.add_subcommand("eval", "Score an alignment against a ground truth");
  eval->add_option("--alignment", alignment_path, "alignment file (i j s)")->required();
  eval->add_option("--truth", truth_path, "ground truth (u<TAB>v)")->required();
  eval->add_flag("--bijective", bijective, "greedy one-to-one extraction instead of row argmax");

  auto* bench = app.add_subcommand("bench", "Noise sweep over a graph, written as CSV");
  bench_flags.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      const auto g = caper::load_edge_list(input, weighted);
      const auto [copy, truth] = caper::permuted_noisy_copy(g.graph, caper::NoiseSpec{noise, seed});
      const auto copy_labels = caper::numeric_labels(copy.num_nodes());
      caper::save_edge_list(out_graph, copy, copy_labels);
      auto out = open_output(out_truth);
      caper::write_ground_truth(out, truth, g.labels, copy_labels);
      std::cout << "wrote " << copy.num_nodes() << " nodes, " << copy.num_edges() << " edges (from "
                << g.graph.num_edges() << ")\n";
    } else if (*coarsen) {
      const auto g = caper::load_edge_list(input, weighted);
      const auto h = caper::build_hierarchy(g.graph, levels);
      std::filesystem::create_directories(out_dir);
      caper::save_hierarchy(out_dir, h, g.labels);
      for (std::size_t l = 0; l < h.graphs.size(); ++l)
        std::cout << "level " << l << ": " << h.graphs[l].num_nodes() << " nodes, " << h.graphs[l].num_edges()
                  << " edges\n";
    } else if (*align || *run) {
      const auto cfg = make_config(*align ? align_flags : caper_flags);
      const auto g1 = caper::load_edge_list(graph1, cfg.weighted);
      const auto g2 = caper::load_edge_list(graph2, cfg.weighted);
      caper::AlignmentMatrix s;
      if (*align) {
        const auto padded = caper::pad_to_common_size(g1.graph, g2.graph);
        s = caper::base_align(padded.g1, padded.g2, cfg.caper.base)
                .stripped(g1.graph.num_nodes(), g2.graph.num_nodes());
      } else {
        const auto result = caper::run_caper(g1.graph, g2.graph, cfg.caper);
        std::cerr << "levels " << result.levels_used << ", coarsest " << result.coarsest_n1 << " x "
                  << result.coarsest_n2 << ", time coarsen " << result.times.coarsen_s << "s align "
                  << result.times.align_s << "s refine " << result.times.refine_s << "s\n";
        s = result.alignment;
      }
      caper::save_alignment(output, s, g1.labels, g2.labels);
    } else if (*eval) {
      std::ifstream a(alignment_path), t(truth_path);
      if (!a || !t) throw caper::IoError("cannot open input files");
      const double acc = caper::evaluate_alignment(
          a, t, bijective ? caper::MatchingMode::Bijective : caper::MatchingMode::RowArgmax);
      std::cout << acc << '\n';
    } else if (*bench) {
      const auto cfg = make_config(bench_flags);
      if (cfg.input.empty()) throw caper::ConfigError("bench needs an input graph (input=...)");
      const auto report = caper::run_experiment(cfg);
      if (!cfg.output.empty()) {
        auto out = open_output(cfg.output);
        report.write_csv(out);
      } else {
        report.write_csv(std::cout);
      }
      std::cerr << report.summary();
    }
  } catch (const caper::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const caper::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const caper::ExternalAlignerError& e) {
    std::cerr << e.what() << '\n';
    return kExternal;
  } catch (const caper::ExternalOutputError& e) {
    std::cerr << e.what() << '\n';
    return kExternal;
  } catch (const caper::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIo;
  } catch (const caper::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
