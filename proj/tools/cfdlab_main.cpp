// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfdlab/commands.hpp"
#include "cfdlab/error.hpp"

using namespace cfdlab;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> folds;
  std::optional<std::string> flags;
};

void add_common(CLI::App* cmd, Common& c, bool need_config) {
  auto* opt = cmd->add_option("--config", c.config, "JSON run configuration");
  if (need_config) opt->required();
  cmd->add_option("--seed", c.seed, "overrides train.seed and synth.seed");
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--folds", c.folds, "number of cross-validation folds");
  cmd->add_option("--flags", c.flags, "enabled switches, e.g. dis_ps,moe,ling or none");
}

RunConfig build_config(const Common& c) {
  RunConfig rc = c.config.empty() ? parse_run_config(Json::object()) : load_run_config(c.config);
  Overrides o;
  o.seed = c.seed;
  if (c.out) o.out = *c.out;
  o.folds = c.folds;
  o.flags = c.flags;
  apply_overrides(rc, o);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Completed feature disentanglement + dynamic MoE fusion lab"};
  app.require_subcommand(1);

  Common gen, train, ablate, exp;
  std::string checkpoint, data;
  bool use_final = false;

  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic dataset (CFDL1)");
  add_common(gen_cmd, gen, false);
  auto* train_cmd = app.add_subcommand("train", "k-fold training with full artifacts");
  add_common(train_cmd, train, true);
  auto* ablate_cmd = app.add_subcommand("ablate", "dis_ps x moe x ling ablation grid");
  add_common(ablate_cmd, ablate, true);

  std::vector<CLI::App*> exporters;
  for (const char* name : {"export-gates", "export-similarity", "eval"}) {
    auto* cmd = app.add_subcommand(name, std::string(name) == "eval"
                                             ? "metrics of a checkpoint on a dataset"
                                             : "analysis export from a checkpoint");
    add_common(cmd, exp, false);
    cmd->add_option("--checkpoint", checkpoint, "CFDC1 checkpoint")->required();
    cmd->add_option("--data", data, "CFDL1 dataset (default: the config's data)");
    cmd->add_flag("--final", use_final, "use the final rather than the best parameters");
    exporters.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  return run_guarded(
      [&] {
        if (*gen_cmd) {
          const RunConfig rc = build_config(gen);
          cmd_gen_data(rc, gen.out ? std::filesystem::path(*gen.out) : rc.out / "data.cfdl",
                       std::cout);
        } else if (*train_cmd) {
          cmd_train(build_config(train), std::cout);
        } else if (*ablate_cmd) {
          cmd_ablate(build_config(ablate), std::cout);
        } else {
          ExportRequest req;
          req.checkpoint = checkpoint;
          if (!data.empty()) req.data = data;
          if (!exp.config.empty() || data.empty()) req.config = build_config(exp);
          req.use_best = !use_final;
          if (*exporters[0]) {
            req.out = exp.out.value_or("gates.csv");
            cmd_export_gates(req, std::cout);
          } else if (*exporters[1]) {
            req.out = exp.out.value_or("similarity.csv");
            cmd_export_similarity(req, std::cout);
          } else {
            req.out = exp.out.value_or("");
            cmd_eval(req, std::cout);
          }
        }
      },
      std::cerr);
}
