// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "gg/codegen.hpp"
#include "gg/evaluation.hpp"
#include "gg/model_document.hpp"
#include "gg/service.hpp"
#include "gg/store.hpp"
#include "support.hpp"

using namespace gg;
using json = nlohmann::json;
using Steady = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

void expect(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.ok) {
    o.ok = false;
    o.detail = what;
  }
}

double seconds_since(Steady::time_point t0) { return std::chrono::duration<double>(Steady::now() - t0).count(); }

Schema binary_schema(std::size_t nf) {
  std::vector<AttributeSchema> attrs;
  for (std::size_t f = 0; f < nf; ++f) attrs.push_back({"f" + std::to_string(f), Categorical{{"0", "1"}}});
  attrs.push_back({"class", Categorical{{"fail", "pass"}}, Role::ClassLabel});
  return Schema(std::move(attrs));
}

std::vector<std::string> feature_names(std::size_t nf) {
  std::vector<std::string> out;
  for (std::size_t f = 0; f < nf; ++f) out.push_back("f" + std::to_string(f));
  return out;
}

double h2(double a, double b) {
  double out = 0.0;
  for (double c : {a, b})
    if (c > 0) out -= c / (a + b) * std::log2(c / (a + b));
  return out;
}

Outcome gain_oracle() {
  Outcome o;
  const auto t0 = Steady::now();
  test::Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t nf = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(12);
    std::vector<std::vector<int>> x(n, std::vector<int>(nf));
    std::vector<int> y(n);
    std::vector<Row> rows;
    for (std::size_t r = 0; r < n; ++r) {
      Row row;
      for (std::size_t f = 0; f < nf; ++f) {
        x[r][f] = rng.coin();
        row.cells.emplace_back(std::to_string(x[r][f]));
      }
      y[r] = rng.coin();
      row.cells.emplace_back(std::string(y[r] ? "pass" : "fail"));
      rows.push_back(std::move(row));
    }
    const Dataset d(binary_schema(nf), rows);
    const double pos = std::accumulate(y.begin(), y.end(), 0.0);
    std::vector<double> gain(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      double c[2][2] = {{0, 0}, {0, 0}};
      for (std::size_t r = 0; r < n; ++r) c[x[r][f]][y[r]] += 1;
      const double n0 = c[0][0] + c[0][1], n1 = c[1][0] + c[1][1];
      gain[f] = h2(pos, n - pos) - n0 / n * h2(c[0][0], c[0][1]) - n1 / n * h2(c[1][0], c[1][1]);
      const double got = information_gain(d, CategoricalSplit{"f" + std::to_string(f)});
      expect(o, std::abs(got - gain[f]) <= 1e-9, "gain mismatch in case " + std::to_string(trial));
    }
    std::size_t best = 0;
    for (std::size_t f = 1; f < nf; ++f)
      if (gain[f] > gain[best] + 1e-12) best = f;
    const auto model = train_id3(d, feature_names(nf), TrainConfig::id3_defaults());
    if (pos == 0 || pos == static_cast<double>(n)) {
      expect(o, model.root.is_leaf(), "pure set did not give a leaf in case " + std::to_string(trial));
    } else {
      expect(o, model.root.test && attribute_of(*model.root.test) == "f" + std::to_string(best),
             "root differs from brute force in case " + std::to_string(trial));
    }
  }
  const double s = seconds_since(t0);
  expect(o, s < 10.0, "took " + std::to_string(s) + " s");
  if (o.ok) o.detail = "1000 cases in " + std::to_string(s) + " s";
  return o;
}

Outcome known_entropy() {
  Outcome o;
  ClassDistribution nine_five, uniform, pure;
  nine_five.add("pass", 9);
  nine_five.add("fail", 5);
  uniform.add("pass", 7);
  uniform.add("fail", 7);
  pure.add("pass", 4);
  pure.declare("fail");
  const double h = entropy(nine_five);
  expect(o, std::abs(h - 0.940286) <= 1e-6, "entropy(9,5) = " + std::to_string(h));
  expect(o, entropy(uniform) == 1.0, "uniform binary entropy is not exactly 1");
  expect(o, entropy(pure) == 0.0, "pure entropy is not exactly 0");
  if (o.ok) o.detail = "entropy(9,5) = " + std::to_string(h);
  return o;
}

Outcome ladder_recovery() {
  Outcome o;
  const auto data = test::ladder_rows(200, 7);
  const auto t0 = Steady::now();
  const auto model = train_c45(data, processed_feature_names(), TrainConfig::c45_defaults());
  const double s = seconds_since(t0);
  for (const auto& combo : test::all_combinations())
    expect(o, classify(model.root, combo.to_record()).label == test::ladder_label(combo),
           "combination misclassified");
  expect(o, leaf_count(model.root) <= 5, "leaf_count " + std::to_string(leaf_count(model.root)));
  expect(o, s < 1.0, "took " + std::to_string(s) + " s");
  if (o.ok) o.detail = "24/24 combinations, " + std::to_string(leaf_count(model.root)) + " leaves";
  return o;
}

Outcome accuracy_arithmetic() {
  Outcome o;
  const auto model = test::ladder_model();
  const auto big = verify(model, test::planted_verification(173, 130, 1));
  const auto small = verify(model, test::planted_verification(9, 7, 2));
  const std::vector<EvaluationReport> both = {big, small};
  const auto a = format_percent(big.accuracy_percent);
  const auto b = format_percent(small.accuracy_percent);
  const auto c = format_percent(combined_accuracy(both));
  expect(o, a == "75.145", "173-row accuracy " + a);
  expect(o, b == "77.778", "9-row accuracy " + b);
  expect(o, c == "75.275", "combined " + c);
  if (o.ok) o.detail = a + " / " + b + " / combined " + c;
  return o;
}

Outcome mismatch_accounting() {
  Outcome o;
  const auto r = verify(test::ladder_model(), test::planted_verification(173, 130, 1));
  expect(o, r.mismatches.size() == 43, "mismatches " + std::to_string(r.mismatches.size()));
  expect(o, r.correct + r.mismatches.size() == r.total, "correct + mismatches != total");
  if (o.ok) o.detail = "43 mismatches, 130 + 43 = 173";
  return o;
}

Outcome memorization() {
  Outcome o;
  test::Rng rng(696);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nf = 1 + rng.below(5);
    std::map<std::string, std::string> seen;
    std::vector<Row> rows;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t r = 0; r < n; ++r) {
      Row row;
      std::string key;
      for (std::size_t f = 0; f < nf; ++f) {
        key += rng.coin() ? '1' : '0';
        row.cells.emplace_back(std::string(1, key.back()));
      }
      row.cells.emplace_back(seen.emplace(key, rng.coin() ? "pass" : "fail").first->second);
      rows.push_back(std::move(row));
    }
    const Dataset d(binary_schema(nf), rows);
    const auto model = train_id3(d, feature_names(nf), {1, false, 0.25});
    const auto r = verify(model, d);
    expect(o, format_percent(r.accuracy_percent) == "100.000",
           "case " + std::to_string(trial) + " verified at " + format_percent(r.accuracy_percent));
  }
  if (o.ok) o.detail = "100 cases at 100.000";
  return o;
}

// Seeded corpus: noisy ladder data over the student features plus random
// multi-valued categorical tables.
std::vector<std::pair<Dataset, std::vector<std::string>>> size_corpus() {
  std::vector<std::pair<Dataset, std::vector<std::string>>> out;
  test::Rng rng(697);
  const auto combos = test::all_combinations();
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 20 + rng.below(280);
    const double noise = 0.05 * static_cast<double>(i % 7);
    std::vector<Row> rows;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& c = combos[rng.below(combos.size())];
      auto label = test::ladder_label(c);
      if (rng.unit() < noise) label = label == "pass" ? "fail" : "pass";
      rows.push_back(test::processed_row(c, label));
    }
    out.emplace_back(Dataset(processed_student_schema(), std::move(rows)), processed_feature_names());
  }
  for (int i = 0; i < 40; ++i) {
    const std::size_t nf = 2 + rng.below(5);
    std::vector<AttributeSchema> attrs;
    std::vector<std::string> names;
    for (std::size_t f = 0; f < nf; ++f) {
      names.push_back("a" + std::to_string(f));
      attrs.push_back({names.back(), Categorical{{"p", "q", "r"}}});
    }
    attrs.push_back({"class", Categorical{{"fail", "pass"}}, Role::ClassLabel});
    std::vector<Row> rows;
    const std::size_t n = 30 + rng.below(200);
    for (std::size_t r = 0; r < n; ++r) {
      Row row;
      int score = 0;
      for (std::size_t f = 0; f < nf; ++f) {
        const auto v = rng.below(3);
        if (f < 2) score += static_cast<int>(v);
        row.cells.emplace_back(std::string(1, static_cast<char>('p' + v)));
      }
      const bool pass = (score >= 2) != (rng.unit() < 0.15);
      row.cells.emplace_back(std::string(pass ? "pass" : "fail"));
      rows.push_back(std::move(row));
    }
    out.emplace_back(Dataset(Schema(std::move(attrs)), std::move(rows)), names);
  }
  return out;
}

Outcome size_property() {
  Outcome o;
  std::size_t cases = 0, worst = 0;
  for (const auto& [d, names] : size_corpus()) {
    const auto id3 = train_id3(d, names, TrainConfig::id3_defaults());
    const auto c45 = train_c45(d, names, TrainConfig::c45_defaults());
    const auto a = leaf_count(id3.root), b = leaf_count(c45.root);
    if (b > a) worst = std::max(worst, b - a);
    expect(o, b <= a, "case " + std::to_string(cases) + ": C4.5 " + std::to_string(b) + " > ID3 " + std::to_string(a));
    ++cases;
  }
  if (o.ok) o.detail = std::to_string(cases) + " cases";
  return o;
}

Outcome codegen_round_trip() {
  Outcome o;
  const auto ladder = test::ladder_model();
  const auto program = PseudoProgram::parse(emit(ladder));
  for (const auto& combo : test::all_combinations()) {
    const auto record = combo.to_record();
    expect(o, program.evaluate(record) == classify(ladder.root, record).label, "ladder combination differs");
  }
  test::Rng rng(698);
  for (int t = 0; t < 20; ++t) {
    const auto model = test::random_mixed_model(rng, t % 4 != 3);
    const auto p = PseudoProgram::parse(emit(model));
    for (int i = 0; i < 10000; ++i) {
      const auto record = test::random_mixed_record(rng);
      if (p.evaluate(record) != classify(model.root, record).label) {
        expect(o, false, "random tree " + std::to_string(t) + " differs");
        break;
      }
    }
  }
  if (o.ok) o.detail = "24 ladder combinations, 20 trees x 10000 records";
  return o;
}

Outcome persistence_round_trip() {
  Outcome o;
  const auto path = test::temp_path("acceptance") += ".db";
  {
    Store store({path.string()});
    test::Rng rng(699);
    for (int i = 0; i < 50; ++i) {
      const auto model = test::random_mixed_model(rng, i % 3 != 0);
      const auto doc = serialize_model(model);
      const auto id = store.save_model(model);
      expect(o, store.load_model_document(id) == doc, "stored document differs for model " + std::to_string(i));
      const auto back = store.load_model(id);
      expect(o, serialize_model(back) == doc, "reserialized document differs for model " + std::to_string(i));
      for (int r = 0; r < 200; ++r) {
        const auto record = test::random_mixed_record(rng);
        expect(o, classify(back.root, record).label == classify(model.root, record).label,
               "classification differs for model " + std::to_string(i));
      }
    }
  }
  for (const char* suffix : {"", "-wal", "-shm"}) std::filesystem::remove(path.string() + suffix);
  if (o.ok) o.detail = "50 models";
  return o;
}

Outcome service_contract() {
  Outcome o;
  const auto path = test::temp_path("acceptance-service") += ".db";
  AppConfig config;
  config.store_path = path.string();
  config.port = 0;
  config.log_level = "off";
  Service service(config);
  const int port = service.bind();
  std::thread runner([&] { service.run(); });
  service.wait_until_ready();

  try {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    auto post = [&](const std::string& route, const json& body, const std::string& token, int want) {
      httplib::Headers h;
      if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
      auto r = c.Post(route, h, body.dump(), "application/json");
      const bool ok = r && r->status == want;
      expect(o, ok, route + " returned " + (r ? std::to_string(r->status) + " " + r->body : "no response"));
      return ok && !r->body.empty() ? json::parse(r->body) : json{};
    };

    post("/api/register",
         {{"name", "Staff"}, {"gender", "Male"}, {"branch", "IT"}, {"email", "s@example.edu"},
          {"password", "long-password"}, {"password_confirm", "long-password"}},
         "", 201);
    const auto token =
        post("/api/login", {{"email", "s@example.edu"}, {"password", "long-password"}}, "", 200).value("token", "");
    const httplib::Headers auth = {{"Authorization", "Bearer " + token}};

    auto upload = [&](const std::string& csv) {
      httplib::MultipartFormDataItems items = {{"file", csv, "data.csv", "text/csv"}};
      auto r = c.Post("/api/datasets", auth, items);
      expect(o, r && r->status == 201, "upload failed");
      return r && r->status == 201 ? json::parse(r->body).value("dataset_id", "") : std::string();
    };
    const auto train_set = upload(write_csv(test::ladder_rows(200, 7)));
    const auto model_id =
        post("/api/models", {{"dataset_id", train_set}, {"algorithm", "c45"}}, token, 201).value("model_id", "");
    const auto pred = post("/api/predict",
                           {{"model_id", model_id}, {"name", "Row One"}, {"app_id", "EN1"}, {"gender", "Male"},
                            {"percent", 89.17}, {"merit", 157}, {"type", "OTHER"}},
                           token, 200);
    expect(o, pred.value("predicted", "") == "pass", "predict on (89.17, 157, OTHER) did not return pass");

    const auto raw_set = upload(test::raw_ladder_csv(40, 3));
    const auto eval = post("/api/evaluate", {{"model_id", model_id}, {"dataset_id", raw_set}}, token, 200);
    expect(o, eval.contains("predictions") && eval["predictions"].size() == 40, "evaluate row count");
    const auto ver = post("/api/verify", {{"model_id", model_id}, {"dataset_id", raw_set}}, token, 200);
    expect(o, ver.value("accuracy_text", "") == "100.000", "verify accuracy");

    auto r = c.Get("/api/history", auth);
    expect(o, r && r->status == 200, "history list failed");
    const auto entries = r ? json::parse(r->body).value("entries", json::array()) : json::array();
    expect(o, entries.size() == 1, "history size");
    if (!entries.empty()) {
      r = c.Delete("/api/history/" + entries[0].value("entry_id", ""), auth);
      expect(o, r && r->status == 204, "history delete failed");
      r = c.Get("/api/history", auth);
      expect(o, r && json::parse(r->body)["entries"].empty(), "history not empty after delete");
    }
  } catch (const std::exception& e) {
    expect(o, false, std::string("exception: ") + e.what());
  }

  service.stop();
  runner.join();
  for (const char* suffix : {"", "-wal", "-shm"}) std::filesystem::remove(path.string() + suffix);
  if (o.ok) o.detail = "register, login, upload, train, predict, evaluate, verify, history list and delete";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"entropy/gain oracle equivalence", gain_oracle},
      {"known entropy values", known_entropy},
      {"ladder recovery", ladder_recovery},
      {"accuracy arithmetic", accuracy_arithmetic},
      {"mismatch accounting", mismatch_accounting},
      {"memorization property", memorization},
      {"size property", size_property},
      {"codegen round trip", codegen_round_trip},
      {"persistence round trip", persistence_round_trip},
      {"service contract", service_contract},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << (o.detail.empty() ? "" : " - " + o.detail) << std::endl;
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
