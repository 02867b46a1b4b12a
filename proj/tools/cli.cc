/* Copyright 2026 The PruneKit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prunekit/baseline.h"
#include "prunekit/complexity.h"
#include "prunekit/errors.h"
#include "prunekit/model_store.h"
#include "prunekit/rank1_approx.h"
#include "prunekit/reference_net.h"
#include "prunekit/selector.h"
#include "prunekit/similarity.h"
#include "prunekit/surgery.h"

namespace prunekit::cli {
namespace {

using Json = nlohmann::ordered_json;

// Raised for invalid flag combinations detected after parsing.
struct UsageError : Error {
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

struct Config {
  std::string model;
  std::string against;
  std::string plan;
  std::string input;
  std::string output;
  std::string merged_model;
  std::vector<std::string> layers;
  std::string metric = "cosine";
  std::string method;
  std::optional<double> ratio;
  std::string macs_mode = "exact";
  int bins = 10;
  uint64_t seed = 0;
  bool plain = false;
};

Json error_object(const std::string& kind, const std::string& message) {
  return {{"schema_version", kSchemaVersion},
          {"error", {{"kind", kind}, {"message", message}}}};
}

void emit(const std::string& text, const Config& cfg, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::trunc);
  if (!file) throw IoError("cannot open '" + cfg.output + "' for writing");
  file << text;
  if (!file) throw IoError("write failed for '" + cfg.output + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Conv layers to operate on: all of them, or the --layers subset.
std::vector<const Layer*> conv_layers(const Model& model, const Config& cfg) {
  std::vector<const Layer*> out;
  for (const std::string& name : cfg.layers) {
    const Layer* layer = nullptr;
    for (const Layer& l : model.layers) {
      if (l.name == name) layer = &l;
    }
    if (!layer) throw UsageError("no layer named '" + name + "'");
    if (layer->kind() != LayerKind::kConv2D) {
      throw UsageError("layer '" + name + "' is not a conv2d layer");
    }
  }
  for (const Layer& l : model.layers) {
    if (l.kind() != LayerKind::kConv2D) continue;
    if (cfg.layers.empty() ||
        std::find(cfg.layers.begin(), cfg.layers.end(), l.name) != cfg.layers.end()) {
      out.push_back(&l);
    }
  }
  return out;
}

Json pair_json(const ClosestPair& p) {
  return {{"anchor", p.anchor}, {"partner", p.partner}, {"distance", p.distance}};
}

int cmd_analyze(const Config& cfg, std::ostream& out) {
  Model model = load_model(cfg.model);
  Metric metric = parse_metric(cfg.metric);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = std::string(to_string(metric));
  j["layers"] = Json::array();
  std::ostringstream plain;
  for (const Layer* layer : conv_layers(model, cfg)) {
    std::vector<FilterTensor> filters = layer_filters(model, *layer);
    std::vector<int> degenerate;
    std::vector<FilterRepresentative> reps = representatives(filters, &degenerate);
    Json lj;
    lj["name"] = layer->name;
    lj["filters"] = filters.size();
    lj["degenerate_filters"] = degenerate;
    lj["l1_norms"] = l1_norms(filters);
    Json rj = Json::array();
    for (const FilterRepresentative& r : reps) {
      rj.push_back({{"filter", r.source_filter_index}, {"vector", r.vector}});
    }
    lj["representatives"] = rj;
    plain << layer->name << ": " << filters.size() << " filters";
    if (reps.size() >= 2) {
      SimilarityMatrix w = distance_matrix(reps, metric);
      Json wj = Json::array();
      for (int i = 0; i < w.size(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < w.size(); ++k) row.push_back(w(i, k));
        wj.push_back(row);
      }
      lj["matrix_filters"] = w.filter_indices();
      lj["distance_matrix"] = wj;
      Json pj = Json::array();
      for (const ClosestPair& p : closest_pairs(w)) pj.push_back(pair_json(p));
      lj["closest_pairs"] = pj;
      ClosestPairStats stats = closest_pair_stats(w, cfg.bins);
      lj["closest_pair_stats"] = {
          {"mean", stats.mean},
          {"std", stats.std},
          {"closest", stats.closest},
          {"histogram",
           {{"edges", stats.histogram.edges}, {"counts", stats.histogram.counts}}}};
      plain << std::fixed << std::setprecision(4) << ", closest-pair distance mean "
            << stats.mean << " std " << stats.std;
    }
    plain << "\n";
    j["layers"].push_back(lj);
  }
  emit(cfg.plain ? plain.str() : j.dump(2) + "\n", cfg, out);
  return 0;
}

int cmd_select(const Config& cfg, std::ostream& out) {
  Model model = load_model(cfg.model);
  SelectionMethod method = parse_method(cfg.method);
  if (method == SelectionMethod::kL1Norm && !cfg.ratio) {
    throw UsageError("--method l1 requires --ratio");
  }
  if (method != SelectionMethod::kL1Norm && cfg.ratio) {
    throw UsageError("--ratio is only accepted with --method l1");
  }
  if (method != SelectionMethod::kAverage && !cfg.merged_model.empty()) {
    throw UsageError("--merged-model is only accepted with --method average");
  }

  Removals removals;
  Model merged = model;
  Json selections = Json::array();
  for (const Layer* layer : conv_layers(model, cfg)) {
    std::vector<FilterTensor> filters = layer_filters(model, *layer);
    LayerSelection sel = select_layer(filters, method, cfg.ratio);
    removals[layer->name] = sel.selection.removed;
    Json diag = Json::object();
    for (const auto& [f, v] : sel.selection.diagnostics) diag[std::to_string(f)] = v;
    selections.push_back({{"name", layer->name},
                          {"selection_order", sel.selection.kept},
                          {sel.selection.diagnostic_name, diag}});
    if (sel.merged) {
      Tensor* kernel = merged.find_tensor(layer->weights.at("kernel"));
      size_t offset = 0;
      for (const FilterTensor& f : *sel.merged) {
        for (double v : f.values) kernel->values[offset++] = static_cast<float>(v);
      }
    }
  }
  PruningPlan plan = build_plan(model, removals);
  Json j = Json::parse(plan_to_json(plan));
  j["method"] = std::string(to_string(method));
  if (cfg.ratio) j["ratio"] = *cfg.ratio;
  j["selections"] = selections;
  if (!cfg.merged_model.empty()) save_model(merged, cfg.merged_model);

  if (cfg.plain) {
    std::ostringstream plain;
    for (const LayerPlan& lp : plan.layers) {
      plain << lp.name << ": keep " << lp.kept.size() << ", remove " << lp.removed.size()
            << "\n";
    }
    emit(plain.str(), cfg, out);
  } else {
    emit(j.dump(2) + "\n", cfg, out);
  }
  return 0;
}

int cmd_prune(const Config& cfg, std::ostream& out) {
  Model model = load_model(cfg.model);
  PruningPlan plan = rebind_plan(model, plan_from_json(read_text(cfg.plan)));
  Model pruned = apply_plan(model, plan);
  save_model(pruned, cfg.output);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["output"] = cfg.output;
  j["layers"] = Json::array();
  for (const Layer& l : pruned.layers) {
    if (const auto* c = std::get_if<Conv2D>(&l.params)) {
      j["layers"].push_back({{"name", l.name}, {"filters", c->out_channels}});
    }
  }
  out << j.dump(2) << "\n";
  return 0;
}

std::string report_table(const ComplexityReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "layer" << std::setw(11) << "kind" << std::right
     << std::setw(10) << "params" << std::setw(10) << "->" << std::setw(14) << "MACs"
     << std::setw(14) << "->" << "\n";
  for (const LayerDelta& d : r.per_layer) {
    if (d.params_before == 0 && d.macs_before == 0) continue;
    os << std::left << std::setw(12) << d.name << std::setw(11) << to_string(d.kind)
       << std::right << std::setw(10) << d.params_before << std::setw(10) << d.params_after
       << std::setw(14) << d.macs_before << std::setw(14) << d.macs_after << "\n";
  }
  os << std::fixed << std::setprecision(2);
  os << "total params " << r.params_before << " -> " << r.params_after << " ("
     << r.params_reduction_percent() << "% reduction)\n";
  os << "total MACs   " << r.macs_before << " -> " << r.macs_after << " ("
     << r.macs_reduction_percent() << "% reduction, " << to_string(r.macs_mode)
     << " accounting, " << static_cast<double>(r.macs_before) / 1e6 << "M -> "
     << static_cast<double>(r.macs_after) / 1e6 << "M)\n";
  return os.str();
}

Json report_json(const ComplexityReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["macs_mode"] = std::string(to_string(r.macs_mode));
  j["before"] = {{"params", r.params_before}, {"macs", r.macs_before}};
  j["after"] = {{"params", r.params_after}, {"macs", r.macs_after}};
  j["reduction"] = {{"params", r.params_removed()},
                    {"params_percent", r.params_reduction_percent()},
                    {"macs", r.macs_removed()},
                    {"macs_percent", r.macs_reduction_percent()}};
  j["layers"] = Json::array();
  for (const LayerDelta& d : r.per_layer) {
    j["layers"].push_back({{"name", d.name},
                           {"kind", std::string(to_string(d.kind))},
                           {"params_before", d.params_before},
                           {"params_after", d.params_after},
                           {"macs_before", d.macs_before},
                           {"macs_after", d.macs_after}});
  }
  return j;
}

int cmd_report(const Config& cfg, std::ostream& out) {
  if (!cfg.against.empty() && !cfg.plan.empty()) {
    throw UsageError("--against and --plan are mutually exclusive");
  }
  MacsMode mode = parse_macs_mode(cfg.macs_mode);
  Model before = load_model(cfg.model);
  ComplexityReport report;
  if (!cfg.against.empty()) {
    report = reduction_report(before, load_model(cfg.against), mode);
  } else if (!cfg.plan.empty()) {
    report = reduction_report(before, rebind_plan(before, plan_from_json(read_text(cfg.plan))),
                              mode);
  } else {
    report = reduction_report(before, before, mode);
  }
  emit(cfg.plain ? report_table(report) : report_json(report).dump(2) + "\n", cfg, out);
  return 0;
}

int cmd_forward(const Config& cfg, std::ostream& out) {
  Model model = load_model(cfg.model);
  FeatureMap input = load_feature_map(cfg.input);
  ForwardResult result = run_forward(model, input);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["output"] = result.output.values;
  j["macs"] = result.macs;
  emit(j.dump(2) + "\n", cfg, out);
  return 0;
}

int cmd_make_baseline(const Config& cfg, std::ostream& out) {
  save_model(dcase_baseline(cfg.seed), cfg.output);
  out << Json{{"schema_version", kSchemaVersion}, {"output", cfg.output}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Passive filter pruning for sequential CNNs", "prunekit"};
  app.require_subcommand(1);
  Config cfg;

  auto* analyze = app.add_subcommand("analyze", "Filter representatives, distances and closest pairs");
  analyze->add_option("--model", cfg.model, "Model container")->required()->check(CLI::ExistingFile);
  analyze->add_option("--layers", cfg.layers, "Conv layers to analyze (default: all)")->delimiter(',');
  analyze->add_option("--metric", cfg.metric, "Distance metric")
      ->check(CLI::IsMember({"cosine", "chebyshev"}));
  analyze->add_option("--bins", cfg.bins, "Histogram bins")->check(CLI::PositiveNumber);
  analyze->add_option("--output", cfg.output, "Write to file instead of stdout");
  analyze->add_flag("--plain", cfg.plain, "Human-readable summary");

  auto* select = app.add_subcommand("select", "Select redundant filters and emit a pruning plan");
  select->add_option("--model", cfg.model, "Model container")->required()->check(CLI::ExistingFile);
  select->add_option("--method", cfg.method, "Selection method")
      ->required()
      ->check(CLI::IsMember({"cosine", "cosine_greedy", "chebyshev", "chebyshev_greedy", "l1",
                             "l1_norm", "average"}));
  select->add_option("--ratio", cfg.ratio, "Pruning ratio in (0, 1), l1 only");
  select->add_option("--layers", cfg.layers, "Conv layers to prune (default: all)")->delimiter(',');
  select->add_option("--output", cfg.output, "Write plan to file instead of stdout");
  select->add_option("--merged-model", cfg.merged_model, "Write averaged weights (average only)");
  select->add_flag("--plain", cfg.plain, "Human-readable summary");

  auto* prune = app.add_subcommand("prune", "Apply a pruning plan");
  prune->add_option("--model", cfg.model, "Model container")->required()->check(CLI::ExistingFile);
  prune->add_option("--plan", cfg.plan, "Pruning plan JSON")->required()->check(CLI::ExistingFile);
  prune->add_option("--output", cfg.output, "Pruned model container")->required();

  auto* report = app.add_subcommand("report", "Parameter and MAC counts and reductions");
  report->add_option("--model", cfg.model, "Unpruned model")->required()->check(CLI::ExistingFile);
  report->add_option("--against", cfg.against, "Pruned model to compare")->check(CLI::ExistingFile);
  report->add_option("--plan", cfg.plan, "Pruning plan to evaluate")->check(CLI::ExistingFile);
  report->add_option("--macs-mode", cfg.macs_mode, "MAC accounting")
      ->check(CLI::IsMember({"paper", "exact"}));
  report->add_option("--output", cfg.output, "Write to file instead of stdout");
  report->add_flag("--plain", cfg.plain, "Human-readable table");

  auto* fwd = app.add_subcommand("forward", "Run the reference forward pass");
  fwd->add_option("--model", cfg.model, "Model container")->required()->check(CLI::ExistingFile);
  fwd->add_option("--input", cfg.input, "Single-tensor container")->required()->check(CLI::ExistingFile);
  fwd->add_option("--output", cfg.output, "Write to file instead of stdout");

  auto* baseline = app.add_subcommand("make-baseline", "Write the baseline model with synthetic weights");
  baseline->add_option("--output", cfg.output, "Model container")->required();
  baseline->add_option("--seed", cfg.seed, "Weight seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_object("usage", e.what()).dump() << "\n";
    return 2;
  }

  try {
    if (*analyze) return cmd_analyze(cfg, out);
    if (*select) return cmd_select(cfg, out);
    if (*prune) return cmd_prune(cfg, out);
    if (*report) return cmd_report(cfg, out);
    if (*fwd) return cmd_forward(cfg, out);
    if (*baseline) return cmd_make_baseline(cfg, out);
  } catch (const UsageError& e) {
    err << error_object(e.kind(), e.what()).dump() << "\n";
    return 2;
  } catch (const Error& e) {
    err << error_object(e.kind(), e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_object("internal", e.what()).dump() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace prunekit::cli
