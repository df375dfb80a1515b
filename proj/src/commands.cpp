// Copyright (c) 2026, The cfdlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfdlab/commands.hpp"

#include <iomanip>
#include <ostream>

#include "cfdlab/binary_io.hpp"
#include "cfdlab/checkpoint.hpp"
#include "cfdlab/csv.hpp"
#include "cfdlab/dataset_io.hpp"
#include "cfdlab/error.hpp"
#include "cfdlab/kfold.hpp"

namespace cfdlab {

namespace fs = std::filesystem;

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return e.kind() == FormatError::Kind::kConfigMismatch ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  bin::write_file_atomic(path, text);
}

Json summary_json(const std::vector<MetricSummary>& summary) {
  Json j = Json::object();
  for (const MetricSummary& s : summary) j[s.name] = {{"mean", s.mean}, {"std", s.std}};
  return j;
}

std::string histogram_text(const Dataset& d) {
  std::string out;
  const auto hist = d.class_histogram();
  for (std::size_t c = 0; c < hist.size(); ++c) {
    out += (c ? " " : "") + std::to_string(c) + ":" + std::to_string(hist[c]);
  }
  return out;
}

void print_summary(const std::vector<MetricSummary>& summary, std::ostream& log) {
  for (const MetricSummary& s : summary) {
    log << "  " << std::left << std::setw(14) << s.name << std::right << std::fixed
        << std::setprecision(4) << s.mean << " +- " << s.std << '\n';
  }
  log.unsetf(std::ios::floatfield);
}

std::string flag_cell(bool relevant, bool on) { return relevant ? (on ? "on" : "off") : "-"; }

}  // namespace

TrainOutcome run_training(const RunConfig& rc, const Dataset& data, const ModelConfig& model,
                          const fs::path& out_dir, std::ostream& log) {
  data.validate();
  fs::create_directories(out_dir);
  Json snapshot = to_json(rc);
  snapshot["model"] = to_json(model);
  write_text(out_dir / "config.json", snapshot.dump(2) + "\n");

  const std::vector<Fold> folds = kfold_split(data.labels, rc.folds, rc.train.seed);
  const SubsetLattice lattice = model.lattice();
  TrainOutcome outcome;
  outcome.model = model;
  Json fold_json = Json::array();
  std::vector<MetricsReport> reports;

  for (std::size_t k = 0; k < folds.size(); ++k) {
    const fs::path dir = out_dir / ("fold_" + std::to_string(k));
    fs::create_directories(dir);
    const Dataset train = data.subset(folds[k].train);
    const Dataset val = data.subset(folds[k].val);
    log << "fold " << k << ": train " << train.size() << ", val " << val.size() << '\n';

    const FitResult fr = fit(train, val, model, rc.train);
    save_checkpoint(fr.final_state, dir / "final.cfdc");
    save_checkpoint(fr.best_state, dir / "best.cfdc");
    write_text(dir / "history.csv", fr.history.to_csv());

    CfdModel best = fr.best_state.make_model();
    const Prediction pred = predict(best, val);
    FoldOutcome fo;
    fo.best_epoch = fr.best_state.best_epoch;
    fo.metrics = evaluate_predictions(pred.probs, val.labels);
    write_text(dir / "metrics.json", fo.metrics.to_json() + "\n");
    if (model.flags.moe) {
      fo.gates = pred.gates;
      write_text(dir / "gates.csv", gates_csv(pred.gates, lattice.feature_names()));
    }
    const auto features = extract_features(best, val);
    fo.similarity = similarity_matrix(features);
    for (const NamedFeature& f : features) fo.similarity_names.push_back(f.name);
    write_text(dir / "similarity.csv", similarity_csv(features, fo.similarity));
    write_text(dir / "features.csv", features_csv(features, val.labels));

    Json fj;
    fj["fold"] = k;
    fj["best_epoch"] = fo.best_epoch;
    fj["metrics"] = Json::parse(fo.metrics.to_json());
    fold_json.push_back(fj);
    reports.push_back(fo.metrics);
    outcome.folds.push_back(std::move(fo));
  }

  outcome.summary = summarize(reports);
  Json metrics;
  metrics["flags"] = model.flags.to_string();
  metrics["folds"] = fold_json;
  metrics["summary"] = summary_json(outcome.summary);
  write_text(out_dir / "metrics.json", metrics.dump(2) + "\n");

  csv::Writer w({"metric", "mean", "std"});
  for (const MetricSummary& s : outcome.summary) w.row(s.name, {s.mean, s.std});
  write_text(out_dir / "summary.csv", w.str());
  log << "mean +- std over " << folds.size() << " folds (" << model.flags.to_string() << "):\n";
  print_summary(outcome.summary, log);
  return outcome;
}

std::vector<AblationFlags> ablation_rows(int num_modalities) {
  std::vector<AblationFlags> rows;
  for (bool dis_ps : {false, true}) {
    if (num_modalities < 3 && !dis_ps) continue;
    rows.push_back({dis_ps, false, false});
    rows.push_back({dis_ps, true, false});
    rows.push_back({dis_ps, true, true});
  }
  return rows;
}

void cmd_gen_data(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  const Dataset d = load_data(rc.data);
  fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path());
  save_dataset(d, out);
  log << "wrote " << out.string() << ": M=" << d.num_modalities() << " n=" << d.size()
      << " in_dim=" << d.in_dim() << " classes " << histogram_text(d) << '\n';
}

void cmd_train(const RunConfig& rc, std::ostream& log) {
  const Dataset data = load_data(rc.data);
  const ModelConfig model = resolve_model(rc, data);
  run_training(rc, data, model, rc.out, log);
}

void cmd_ablate(const RunConfig& rc, std::ostream& log) {
  const Dataset data = load_data(rc.data);
  const ModelConfig base = resolve_model(rc, data);
  const auto rows = ablation_rows(base.num_modalities);
  if (base.num_modalities < 3) {
    log << "notice: M=2 has no partial-shared subsets; dis_ps rows collapse, running "
        << rows.size() << " rows\n";
  }
  std::vector<TrainOutcome> outcomes;
  for (const AblationFlags& flags : rows) {
    ModelConfig mc = base;
    mc.flags = flags;
    std::string dir = "row_" + flags.to_string();
    for (char& ch : dir) ch = ch == ',' ? '_' : ch;
    outcomes.push_back(run_training(rc, data, mc, rc.out / dir, log));
  }

  std::vector<std::string> header{"dis_ps", "moe", "ling"};
  for (const MetricSummary& s : outcomes.front().summary) {
    header.push_back(s.name + "_mean");
    header.push_back(s.name + "_std");
  }
  csv::Writer w(header);
  log << "\ndis_ps  moe  ling";
  for (const MetricSummary& s : outcomes.front().summary) log << "  " << s.name;
  log << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const AblationFlags& f = rows[r];
    std::vector<std::string> cells{flag_cell(base.num_modalities >= 3, f.dis_ps),
                                   flag_cell(true, f.moe), flag_cell(f.moe, f.ling)};
    log << std::left << std::setw(8) << cells[0] << std::setw(5) << cells[1] << std::setw(4)
        << cells[2] << std::right;
    for (const MetricSummary& s : outcomes[r].summary) {
      cells.push_back(csv::format_double(s.mean));
      cells.push_back(csv::format_double(s.std));
      log << "  " << std::fixed << std::setprecision(4) << s.mean;
    }
    log.unsetf(std::ios::floatfield);
    log << '\n';
    w.row(cells);
  }
  write_text(rc.out / "ablation.csv", w.str());
}

namespace {

struct Loaded {
  Checkpoint ckpt;
  Dataset data;
};

Loaded load_for_export(const ExportRequest& req) {
  Loaded l;
  l.ckpt = load_checkpoint(req.checkpoint);
  if (req.data) {
    l.data = load_dataset(*req.data);
  } else if (req.config) {
    l.data = load_data(req.config->data);
  } else {
    throw ConfigError("no dataset: pass --data or --config");
  }
  const ModelConfig& m = l.ckpt.model;
  if (l.data.num_modalities() != m.num_modalities || l.data.in_dim() != m.in_dim ||
      l.data.num_cls != m.num_cls) {
    throw ConfigError("checkpoint expects M=" + std::to_string(m.num_modalities) +
                      ", in_dim=" + std::to_string(m.in_dim) + ", " + std::to_string(m.num_cls) +
                      " classes; dataset has M=" + std::to_string(l.data.num_modalities()) +
                      ", in_dim=" + std::to_string(l.data.in_dim()) + ", " +
                      std::to_string(l.data.num_cls) + " classes");
  }
  return l;
}

}  // namespace

void cmd_export_gates(const ExportRequest& req, std::ostream& log) {
  Loaded l = load_for_export(req);
  if (!l.ckpt.model.flags.moe) throw ConfigError("export-gates: checkpoint was trained without moe");
  CfdModel model = l.ckpt.make_model(req.use_best);
  const Prediction p = predict(model, l.data);
  write_text(req.out, gates_csv(p.gates, model.lattice().feature_names()));
  const auto mean = mean_gates(p.gates);
  const auto names = model.lattice().feature_names();
  log << "mean gate weights over " << l.data.size() << " samples:\n";
  for (std::size_t k = 0; k < names.size(); ++k) log << "  " << names[k] << " " << mean[k] << '\n';
}

void cmd_export_similarity(const ExportRequest& req, std::ostream& log) {
  Loaded l = load_for_export(req);
  CfdModel model = l.ckpt.make_model(req.use_best);
  const auto features = extract_features(model, l.data);
  const Matrix sim = similarity_matrix(features);
  write_text(req.out, similarity_csv(features, sim));
  const fs::path dump = req.out.parent_path() / "features.csv";
  write_text(dump, features_csv(features, l.data.labels));
  log << "wrote " << features.size() << "x" << features.size() << " similarity matrix to "
      << req.out.string() << " and features to " << dump.string() << '\n';
}

void cmd_eval(const ExportRequest& req, std::ostream& log) {
  Loaded l = load_for_export(req);
  CfdModel model = l.ckpt.make_model(req.use_best);
  const MetricsReport rep = evaluate(model, l.data);
  if (req.out.empty()) {
    log << rep.to_json() << '\n';
  } else {
    write_text(req.out, rep.to_json() + "\n");
    log << "wrote " << req.out.string() << '\n';
  }
}

}  // namespace cfdlab
