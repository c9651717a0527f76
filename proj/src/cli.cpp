#include "gg/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "gg/codegen.hpp"
#include "gg/config.hpp"
#include "gg/error.hpp"
#include "gg/evaluation.hpp"
#include "gg/service.hpp"
#include "gg/store.hpp"

namespace gg {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())))
    throw Error(Errc::IoError, "cannot write '" + path + "'");
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::optional<double> as_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Shared state filled by the CLI11 parser.
struct Args {
  std::optional<std::string> config_path;
  std::optional<std::string> store_path;

  std::string in;
  std::string out;
  std::string model;
  std::string model_out;
  std::string algo;
  bool keep_unlabeled = false;
  bool serial = false;
  std::optional<std::size_t> min_leaf;
  std::optional<bool> prune;
  std::optional<double> cf;

  std::string merit;
  std::string gender;
  std::string percent;
  std::string type;

  std::string dialect = "pseudo";
  std::string function_name = "dtalgo";
  bool keep_unused = false;
};

class Runner {
 public:
  Runner(const Args& args, std::ostream& out, std::ostream& err) : args_(args), out_(out), err_(err) {}

  AppConfig config() const {
    auto c = load_config(args_.config_path);
    if (args_.store_path) c.store_path = *args_.store_path;
    return c;
  }

  std::unique_ptr<Store> open_store(const AppConfig& c) const {
    StoreOptions options;
    options.path = c.store_path;
    options.pbkdf2_iterations = c.pbkdf2_iterations;
    options.session_ttl = std::chrono::seconds(c.session_ttl_seconds);
    return std::make_unique<Store>(std::move(options));
  }

  Execution execution() const { return args_.serial ? Execution::Serial : Execution::Parallel; }

  void preprocess_cmd() {
    const auto c = config();
    const auto raw = parse_csv(read_file(args_.in), raw_student_schema());
    const auto result = preprocess_detailed(raw, {c.thresholds, !args_.keep_unlabeled});
    write_file(args_.out, write_csv(result.dataset));
    out_ << "rows: " << result.dataset.size() << "\n";
    out_ << "dropped: " << result.dropped.size() << "\n";
  }

  void train_cmd() {
    const auto c = config();
    const auto algorithm = parse_algorithm(args_.algo);
    if (!algorithm) throw Error(Errc::InvalidConfig, "unknown algorithm '" + args_.algo + "'");
    auto tc = c.train_defaults(*algorithm);
    if (args_.min_leaf) tc.min_leaf_size = *args_.min_leaf;
    if (args_.prune) tc.prune = *args_.prune;
    if (args_.cf) tc.confidence_factor = *args_.cf;

    auto data = parse_student_csv(read_file(args_.in));
    std::size_t dropped = 0;
    if (data.schema() == raw_student_schema()) {
      auto p = preprocess_detailed(data, {c.thresholds, true});
      dropped = p.dropped.size();
      data = std::move(p.dataset);
    } else {
      auto cleaned = clean(data);
      dropped = cleaned.dropped.size();
      data = std::move(cleaned.dataset);
    }
    const auto model = train(*algorithm, data, processed_feature_names(), tc, execution());
    auto store = open_store(c);
    const auto id = store->save_model(
        model, args_.model_out.empty() ? std::nullopt : std::optional<std::string>(args_.model_out));
    out_ << "model: " << id << "\n";
    out_ << "algorithm: " << to_string(model.algorithm) << "\n";
    out_ << "rows: " << model.stats.training_rows << "\n";
    out_ << "dropped: " << dropped << "\n";
    out_ << "nodes: " << model.stats.node_count << "\n";
    out_ << "leaves: " << model.stats.leaf_count << "\n";
  }

  void predict_cmd() {
    const auto c = config();
    const auto model = open_store(c)->load_model(args_.model);
    ProcessedStudentRecord r;
    if (auto m = parse_merit(args_.merit)) r.merit = *m;
    else if (auto v = as_number(args_.merit)) r.merit = discretize_merit(*v, c.thresholds);
    else throw Error(Errc::DomainViolation, "merit '" + args_.merit + "' is neither good/bad nor a number");
    if (auto p = parse_percent_class(args_.percent)) r.percent = *p;
    else if (auto v = as_number(args_.percent)) r.percent = discretize_percent(*v, c.thresholds);
    else throw Error(Errc::DomainViolation, "percent '" + args_.percent + "' is neither a class nor a number");
    const auto g = parse_gender(args_.gender);
    if (!g) throw Error(Errc::DomainViolation, "gender must be Male or Female");
    r.gender = *g;
    r.type = normalize_admission_type(args_.type);
    out_ << predict_single(model, r, args_.model).predicted << "\n";
  }

  void evaluate_cmd() {
    const auto c = config();
    const auto model = open_store(c)->load_model(args_.model);
    const auto data = parse_student_csv(read_file(args_.in));
    const auto result = evaluate_bulk(model, data, {c.thresholds, execution(), args_.model});

    auto attrs = data.schema().attributes();
    attrs.push_back({"predicted", Text{}, Role::Identifier});
    std::vector<Row> rows = data.rows();
    for (auto& row : rows) row.cells.emplace_back(Missing{});
    for (const auto& p : result.predictions) rows[p.row].cells.back() = p.predicted;
    const auto csv = write_csv(Dataset(Schema(std::move(attrs)), std::move(rows)));
    if (args_.out.empty()) out_ << csv;
    else write_file(args_.out, csv);

    for (const auto& s : result.skipped) err_ << "skipped row " << s.row + 1 << ": " << s.reason << "\n";
    if (!args_.out.empty()) {
      out_ << "predicted: " << result.predictions.size() << "\n";
      out_ << "skipped: " << result.skipped.size() << "\n";
    }
  }

  void verify_cmd() {
    const auto c = config();
    const auto model = open_store(c)->load_model(args_.model);
    const auto data = parse_student_csv(read_file(args_.in));
    const auto report = verify(model, data, {c.thresholds, execution(), args_.model});
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", report.wall_time_ms);
    out_ << "total: " << report.total << "\n";
    out_ << "correct: " << report.correct << "\n";
    out_ << "accuracy: " << format_percent(report.accuracy_percent) << "\n";
    out_ << "wall_ms: " << wall << "\n";
    out_ << "mismatches: " << report.mismatches.size() << "\n";
    if (report.mismatches.empty()) return;

    const auto& schema = data.schema();
    out_ << "row";
    for (std::size_t a = 0; a < schema.size(); ++a)
      if (a != schema.class_index()) out_ << "," << csv_field(schema[a].name);
    out_ << ",actual,predicted\n";
    for (const auto& m : report.mismatches) {
      out_ << m.row + 1;
      for (std::size_t a = 0; a < schema.size(); ++a)
        if (a != schema.class_index()) out_ << "," << csv_field(to_display(m.record.cells[a]));
      out_ << "," << csv_field(m.actual) << "," << csv_field(m.predicted) << "\n";
    }
  }

  void codegen_cmd() {
    const auto c = config();
    const auto model = open_store(c)->load_model(args_.model);
    const auto dialect = parse_dialect(args_.dialect);
    if (!dialect) throw Error(Errc::InvalidConfig, "unknown dialect '" + args_.dialect + "'");
    const auto source = emit(model, {*dialect, args_.function_name, args_.keep_unused});
    if (args_.out.empty()) out_ << source;
    else write_file(args_.out, source);
  }

  void serve_cmd() {
    const auto c = config();
    Service service(c);
    const int port = service.bind();
    spdlog::info("listening on {}:{}", c.bind_address, port);
    out_ << "listening on " << c.bind_address << ":" << port << std::endl;
    service.run();
  }

 private:
  const Args& args_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Args args;
  CLI::App app{"Decision-tree pass/fail prediction for student records", "gradegauge"};
  app.require_subcommand(1);
  app.add_option("--config", args.config_path, "key=value configuration file");
  app.add_option("--store", args.store_path, "store file (overrides store_path)");

  auto* pre = app.add_subcommand("preprocess", "Discretize a raw student CSV");
  pre->add_option("--in", args.in, "raw CSV")->required();
  pre->add_option("--out", args.out, "processed CSV")->required();
  pre->add_flag("--keep-unlabeled", args.keep_unlabeled, "keep rows without a class label");

  auto* tr = app.add_subcommand("train", "Train and store a model");
  tr->add_option("--algo", args.algo, "id3 or c45")->required();
  tr->add_option("--in", args.in, "training CSV (raw or processed)")->required();
  tr->add_option("--model-out", args.model_out, "model id to store under");
  tr->add_option("--min-leaf", args.min_leaf, "minimum rows per leaf");
  tr->add_option("--cf", args.cf, "pruning confidence factor");
  tr->add_flag("--prune,!--no-prune", args.prune, "pessimistic pruning on or off");
  tr->add_flag("--serial", args.serial, "use the serial reference kernels");

  auto* pr = app.add_subcommand("predict", "Classify one student");
  pr->add_option("--model", args.model, "model id")->required();
  pr->add_option("--merit", args.merit, "good, bad, or merit marks")->required();
  pr->add_option("--gender", args.gender, "Male or Female")->required();
  pr->add_option("--percent", args.percent, "distinction, first_class, second_class, or PCM percent")->required();
  pr->add_option("--type", args.type, "admission type code")->required();

  auto* ev = app.add_subcommand("evaluate", "Predict every row of a CSV");
  ev->add_option("--model", args.model, "model id")->required();
  ev->add_option("--in", args.in, "input CSV")->required();
  ev->add_option("--out", args.out, "output CSV (default: stdout)");
  ev->add_flag("--serial", args.serial, "classify serially");

  auto* ve = app.add_subcommand("verify", "Accuracy and mismatches on a labeled CSV");
  ve->add_option("--model", args.model, "model id")->required();
  ve->add_option("--in", args.in, "labeled CSV")->required();
  ve->add_flag("--serial", args.serial, "classify serially");

  auto* cg = app.add_subcommand("codegen", "Emit the model as source code");
  cg->add_option("--model", args.model, "model id")->required();
  cg->add_option("--dialect", args.dialect, "pseudo, c, or python");
  cg->add_option("--name", args.function_name, "function name");
  cg->add_option("--out", args.out, "output file (default: stdout)");
  cg->add_flag("--keep-unused", args.keep_unused, "list untested features as parameters");

  auto* sv = app.add_subcommand("serve", "Run the HTTP API");
  sv->add_option("--config", args.config_path, "key=value configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  Runner runner(args, out, err);
  try {
    if (pre->parsed()) runner.preprocess_cmd();
    else if (tr->parsed()) runner.train_cmd();
    else if (pr->parsed()) runner.predict_cmd();
    else if (ev->parsed()) runner.evaluate_cmd();
    else if (ve->parsed()) runner.verify_cmd();
    else if (cg->parsed()) runner.codegen_cmd();
    else if (sv->parsed()) runner.serve_cmd();
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gg
