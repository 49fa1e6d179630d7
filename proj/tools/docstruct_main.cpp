#include <atomic>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "docstruct/eval.hpp"
#include "docstruct/grammar.hpp"
#include "docstruct/json_io.hpp"
#include "docstruct/refinement.hpp"
#include "docstruct/relations.hpp"
#include "docstruct/synth.hpp"
#include "docstruct/table_grid.hpp"
#include "docstruct/weak_labels.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace docstruct;

namespace {

struct Options {
  double theta1 = 0.45;         // nesting overlap fraction
  double theta2 = 1.2;          // nesting area ratio
  double tau_ovlp = 0.7;        // column membership
  double gamma = 0.5;           // cell/text coverage
  double min_confidence = 0.7;
  double iou = 0.5;
  double centroid_gap = 5.0;
  int max_iterations = 30;
  bool no_refine = false;
  bool eleven_point = false;
  bool timing = false;
  bool print_config = false;
  int jobs = 1;
  std::uint64_t seed = 0;
  double page_width = 1200.0;
  double page_height = 1600.0;
  std::string grammar_path;
};

Grammar load_grammar(const Options& opt) {
  if (opt.grammar_path.empty()) return Grammar::default_grammar();
  return Grammar::from_file(opt.grammar_path);
}

RelationConfig relation_config(const Options& opt) {
  RelationConfig config;
  config.nesting.min_overlap = opt.theta1;
  config.nesting.min_area_ratio = opt.theta2;
  config.tau_overlap = opt.tau_ovlp;
  return config;
}

ordered_json config_json(const Options& opt) {
  ordered_json j;
  j["theta1"] = opt.theta1;
  j["theta2"] = opt.theta2;
  j["tau_ovlp"] = opt.tau_ovlp;
  j["gamma"] = opt.gamma;
  j["min_confidence"] = opt.min_confidence;
  j["iou"] = opt.iou;
  j["centroid_gap"] = opt.centroid_gap;
  j["max_iterations"] = opt.max_iterations;
  j["refine"] = !opt.no_refine;
  j["eleven_point"] = opt.eleven_point;
  j["jobs"] = opt.jobs;
  j["seed"] = opt.seed;
  j["page_width"] = opt.page_width;
  j["page_height"] = opt.page_height;
  j["grammar"] = opt.grammar_path.empty() ? "<builtin>" : opt.grammar_path;
  return j;
}

ordered_json bbox_json(const BBox& b) {
  return ordered_json::array({b.x0, b.y0, b.x1, b.y1});
}

class StageClock {
 public:
  StageClock(bool enabled, std::string label)
      : enabled_(enabled), label_(std::move(label)) {}

  template <typename F>
  auto time(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    const auto stop = std::chrono::steady_clock::now();
    if (enabled_) {
      const double ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
      std::lock_guard<std::mutex> lock(mutex());
      std::cerr << "timing" << label_ << ": " << stage << " " << ms << " ms\n";
    }
    return result;
  }

 private:
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
  bool enabled_;
  std::string label_;
};

PageGeometry page_of(const DocStructure& s, const Options& opt) {
  PageGeometry page{s.page_width, s.page_height};
  if (page.width <= 0.0) page.width = opt.page_width;
  if (page.height <= 0.0) page.height = opt.page_height;
  return page;
}

void print_warnings(const std::vector<std::string>& warnings,
                    const std::string& label) {
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  for (const std::string& w : warnings)
    std::cerr << "warning" << label << ": " << w << "\n";
}

void parse_one(const std::string& in_path, const std::string& out_path,
               const Options& opt, const Grammar& grammar,
               const std::string& label) {
  StageClock clock(opt.timing, label);
  DocStructure input = clock.time("read", [&] { return read_structure_file(in_path); });
  const PageGeometry page = page_of(input, opt);
  const RelationConfig config = relation_config(opt);
  std::vector<std::string> warnings;

  std::vector<Entity> kept = clock.time("confidence_filter", [&] {
    return confidence_filter(input.entities, opt.min_confidence);
  });
  DocStructure result = clock.time("classify_relations", [&] {
    return classify_relations(kept, grammar, config, page, &warnings);
  });
  if (!opt.no_refine) {
    RefinementConfig refinement;
    refinement.max_iterations = opt.max_iterations;
    result = clock.time("refine", [&] {
      return refine(std::move(result.entities), grammar, config, page, refinement,
                    &warnings);
    });
  }
  clock.time("write", [&] {
    write_structure_file(out_path, result);
    return 0;
  });
  print_warnings(warnings, label);
}

// Sorted *.json regular files directly inside `dir`.
std::vector<fs::path> json_files_in(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

int run_parse(const Options& opt, const std::string& input, const std::string& output) {
  const Grammar grammar = load_grammar(opt);
  if (!fs::is_directory(input)) {
    parse_one(input, output, opt, grammar, "");
    return 0;
  }

  const std::vector<fs::path> files = json_files_in(input);
  fs::create_directories(output);
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::vector<std::string> errors;

  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      const std::string label = "[" + files[i].filename().string() + "]";
      try {
        parse_one(files[i].string(), (fs::path(output) / files[i].filename()).string(),
                  opt, grammar, label);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        errors.push_back(files[i].filename().string() + ": " + e.what());
      }
    }
  };

  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
  return errors.empty() ? 0 : 1;
}

int run_tables(const Options& opt, const std::string& input, const std::string& output,
               const std::string& text_boxes_path) {
  const DocStructure detections = read_structure_file(input);
  const TableGrid grid = parse_table(detections.entities, opt.centroid_gap);

  ordered_json j;
  j["tabular"] = bbox_json(grid.tabular);
  j["rows"] = ordered_json::array();
  for (const BBox& r : grid.rows) j["rows"].push_back(bbox_json(r));
  j["columns"] = ordered_json::array();
  for (const BBox& c : grid.columns) j["columns"].push_back(bbox_json(c));
  j["cells"] = ordered_json::array();
  for (const Entity& cell : grid.cells) {
    ordered_json jc;
    jc["id"] = cell.id;
    jc["bbox"] = bbox_json(cell.bbox);
    if (cell.cell_range) {
      jc["cell_range"] = {{"row_start", cell.cell_range->row_start},
                          {"row_end", cell.cell_range->row_end},
                          {"col_start", cell.cell_range->col_start},
                          {"col_end", cell.cell_range->col_end}};
    }
    j["cells"].push_back(std::move(jc));
  }
  if (!text_boxes_path.empty()) {
    const DocStructure text = read_structure_file(text_boxes_path);
    j["matches"] = ordered_json::array();
    for (const CellTextMatch& m :
         match_cells_to_text(grid, text.entities, opt.gamma)) {
      j["matches"].push_back(
          {{"cell", m.cell_id}, {"text", m.text_id}, {"gamma", m.gamma}});
    }
  }
  write_text_file_atomic(output, j.dump(2) + "\n");
  return 0;
}

int run_weaklabel(const Options& opt, const std::string& input,
                  const std::string& output) {
  const std::vector<RenderRecord> records = read_records_file(input);
  WeakConfig config;
  config.tau_overlap = opt.tau_ovlp;
  config.centroid_gap = opt.centroid_gap;
  std::vector<std::string> warnings;
  const WeakLabelResult result = generate_weak_labels(
      records, {opt.page_width, opt.page_height}, config, &warnings);
  write_structure_file(output, result.structure, /*noisy=*/true);
  print_warnings(warnings, "");
  return 0;
}

ordered_json report_json(const EvalReport& report) {
  ordered_json j;
  j["iou_threshold"] = report.iou_threshold;
  j["mean_ap"] = report.mean_ap;
  j["per_category"] = ordered_json::object();
  for (const auto& [cat, score] : report.per_category) {
    j["per_category"][cat] = {{"ap", score.ap},
                              {"num_gt", score.num_gt},
                              {"num_pred", score.num_pred},
                              {"num_tp", score.num_tp}};
  }
  j["predictions_without_gt"] = report.predictions_without_gt;
  j["relations"] = ordered_json::object();
  for (const char* name : {"parent_of", "followed_by", "all"}) {
    const auto it = report.relation_scores.find(name);
    if (it == report.relation_scores.end()) continue;
    const RelationScore& s = it->second;
    j["relations"][name] = {{"precision", s.precision}, {"recall", s.recall},
                            {"f1", s.f1},               {"tp", s.tp},
                            {"fp", s.fp},               {"fn", s.fn}};
  }
  return j;
}

int run_eval(const Options& opt, const std::string& pred_path,
             const std::string& gt_path, const std::string& json_out) {
  std::vector<std::pair<DocStructure, DocStructure>> documents;
  if (fs::is_directory(pred_path) != fs::is_directory(gt_path))
    throw std::invalid_argument(
        "eval: prediction and ground truth must both be files or both directories");

  auto load_pair = [&](const std::string& pred_file, const std::string& gt_file) {
    DocStructure pred = read_structure_file(pred_file);
    pred.entities = confidence_filter(pred.entities, opt.min_confidence);
    documents.emplace_back(std::move(pred), read_structure_file(gt_file));
  };

  if (fs::is_directory(pred_path)) {
    for (const fs::path& pred_file : json_files_in(pred_path)) {
      const fs::path gt_file = fs::path(gt_path) / pred_file.filename();
      if (!fs::exists(gt_file))
        throw std::invalid_argument("eval: no ground truth for " +
                                    pred_file.filename().string());
      load_pair(pred_file.string(), gt_file.string());
    }
  } else {
    load_pair(pred_path, gt_path);
  }

  const EvalReport report = evaluate_corpus(documents, opt.iou, opt.eleven_point);
  std::cout << format_report_table(report);
  if (!json_out.empty())
    write_text_file_atomic(json_out, report_json(report).dump(2) + "\n");
  return 0;
}

int run_synth(const Options& opt, const std::string& out_dir, int count,
              const NoiseSpec& noise_template) {
  fs::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    const PageSpec spec = random_page_spec(opt.seed + static_cast<std::uint64_t>(i));
    const GeneratedPage page = generate_page(spec);

    NoiseSpec noise = noise_template;
    noise.seed = opt.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1);
    DocStructure detections;
    detections.page_width = page.ground_truth.page_width;
    detections.page_height = page.ground_truth.page_height;
    detections.entities = perturb(page.ground_truth, noise);

    char name[32];
    std::snprintf(name, sizeof(name), "page_%04d", i);
    const fs::path dir = fs::path(out_dir) / name;
    fs::create_directories(dir);
    write_structure_file((dir / "ground_truth.json").string(), page.ground_truth);
    write_records_file((dir / "records.jsonl").string(), page.records);
    write_structure_file((dir / "detections.json").string(), detections);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical document structure tools"};
  app.require_subcommand(1);

  Options opt;
  std::string input, output, gt_path, text_boxes, json_out;
  int count = 1;
  NoiseSpec noise;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--print-config", opt.print_config,
                  "print the effective configuration and exit");
    cmd->add_option("--grammar", opt.grammar_path, "grammar config JSON");
  };

  CLI::App* parse = app.add_subcommand("parse", "detections -> structure");
  parse->add_option("input", input, "detections JSON file or directory");
  parse->add_option("output", output, "structure JSON file or directory");
  parse->add_option("--min-confidence", opt.min_confidence, "detection confidence floor");
  parse->add_option("--theta1", opt.theta1, "nesting overlap fraction");
  parse->add_option("--theta2", opt.theta2, "nesting area ratio");
  parse->add_option("--tau-ovlp", opt.tau_ovlp, "column membership overlap");
  parse->add_option("--max-iterations", opt.max_iterations, "refinement budget");
  parse->add_flag("--no-refine", opt.no_refine, "emit unrefined relations");
  parse->add_flag("--timing", opt.timing, "per-stage wall time on stderr");
  parse->add_option("--jobs", opt.jobs, "worker threads for directory input");
  add_common(parse);

  CLI::App* tables = app.add_subcommand("tables", "table detections -> grid report");
  tables->add_option("input", input, "table detections JSON");
  tables->add_option("output", output, "grid report JSON");
  tables->add_option("--text-boxes", text_boxes, "text boxes JSON to match into cells");
  tables->add_option("--gamma", opt.gamma, "cell/text coverage threshold");
  tables->add_option("--centroid-gap", opt.centroid_gap,
                     "max centroid gap when grouping cells");
  add_common(tables);

  CLI::App* weaklabel = app.add_subcommand("weaklabel", "render records -> noisy structure");
  weaklabel->add_option("input", input, "render records JSONL");
  weaklabel->add_option("output", output, "structure JSON");
  weaklabel->add_option("--page-width", opt.page_width, "page width in px");
  weaklabel->add_option("--page-height", opt.page_height, "page height in px");
  weaklabel->add_option("--tau-ovlp", opt.tau_ovlp, "column membership overlap");
  weaklabel->add_option("--centroid-gap", opt.centroid_gap,
                        "max centroid gap when grouping cells");
  add_common(weaklabel);

  CLI::App* eval_cmd = app.add_subcommand("eval", "prediction vs ground truth");
  eval_cmd->add_option("prediction", input, "predicted structure file or directory");
  eval_cmd->add_option("ground_truth", gt_path,
                       "ground-truth structure file or directory");
  eval_cmd->add_option("--iou", opt.iou, "IoU threshold for a match");
  eval_cmd->add_option("--min-confidence", opt.min_confidence,
                       "confidence floor applied to predictions");
  eval_cmd->add_flag("--eleven-point", opt.eleven_point,
                     "11-point interpolated average precision");
  eval_cmd->add_option("--json-out", json_out, "also write the report as JSON");
  add_common(eval_cmd);

  CLI::App* synth = app.add_subcommand("synth", "generate fixture pages");
  synth->add_option("output", output, "fixture directory");
  synth->add_option("--seed", opt.seed, "base seed");
  synth->add_option("--count", count, "number of pages");
  synth->add_option("--jitter", noise.jitter, "box edge jitter in px");
  synth->add_option("--drop-rate", noise.drop_rate, "entity drop probability");
  synth->add_option("--relabel-rate", noise.relabel_rate, "category flip probability");
  synth->add_option("--confidence-base", noise.confidence_base, "base confidence");
  synth->add_option("--confidence-jitter", noise.confidence_jitter,
                    "confidence jitter half-width");
  add_common(synth);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt.print_config) {
      std::cout << config_json(opt).dump(2) << "\n";
      return 0;
    }
    auto need = [](const std::string& value, const char* what) {
      if (value.empty())
        throw std::invalid_argument(std::string("missing required argument: ") + what);
    };
    if (parse->parsed()) {
      need(input, "input");
      need(output, "output");
      return run_parse(opt, input, output);
    }
    if (tables->parsed()) {
      need(input, "input");
      need(output, "output");
      return run_tables(opt, input, output, text_boxes);
    }
    if (weaklabel->parsed()) {
      need(input, "input");
      need(output, "output");
      return run_weaklabel(opt, input, output);
    }
    if (eval_cmd->parsed()) {
      need(input, "prediction");
      need(gt_path, "ground_truth");
      return run_eval(opt, input, gt_path, json_out);
    }
    if (synth->parsed()) {
      need(output, "output");
      return run_synth(opt, output, count, noise);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
