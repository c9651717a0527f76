// Serial reference kernels against their OpenMP counterparts.
#include <numeric>

#include <benchmark/benchmark.h>

#include "gg/evaluation.hpp"
#include "gg/split_kernels.hpp"
#include "support.hpp"

using namespace gg;

namespace {

Dataset wide_dataset(std::size_t rows, std::size_t features) {
  test::Rng rng(42);
  std::vector<AttributeSchema> attrs;
  for (std::size_t f = 0; f < features; ++f) {
    if (f % 2) attrs.push_back({"n" + std::to_string(f), Continuous{"u"}});
    else attrs.push_back({"c" + std::to_string(f), Categorical{{"a", "b", "c", "d", "e"}}});
  }
  attrs.push_back({"class", Categorical{{"fail", "pass"}}, Role::ClassLabel});
  Schema schema(std::move(attrs));
  std::vector<Row> out;
  for (std::size_t r = 0; r < rows; ++r) {
    Row row;
    for (std::size_t f = 0; f < features; ++f) {
      if (f % 2) row.cells.emplace_back(std::round(rng.between(0, 200) * 2) / 2);
      else row.cells.emplace_back(std::string(1, static_cast<char>('a' + rng.below(5))));
    }
    row.cells.emplace_back(std::string(rng.coin() ? "pass" : "fail"));
    out.push_back(std::move(row));
  }
  return Dataset(schema, std::move(out));
}

template <bool Parallel>
void BM_ScoreCandidates(benchmark::State& state) {
  const auto d = wide_dataset(static_cast<std::size_t>(state.range(0)), 16);
  const kernels::EncodedData data(d);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> attrs(16);
  std::iota(attrs.begin(), attrs.end(), std::size_t{0});
  for (auto _ : state) {
    auto scores = Parallel ? kernels::score_candidates_parallel(data, rows, attrs, kernels::Criterion::GainRatio)
                           : kernels::score_candidates_serial(data, rows, attrs, kernels::Criterion::GainRatio);
    benchmark::DoNotOptimize(scores);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution Exec>
void BM_Train(benchmark::State& state) {
  const auto d = test::ladder_rows(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    auto m = train_c45(d, processed_feature_names(), TrainConfig::c45_defaults(), Exec);
    benchmark::DoNotOptimize(m);
  }
}

template <Execution Exec>
void BM_EvaluateBulk(benchmark::State& state) {
  const auto model = test::ladder_model();
  const auto d = test::planted_verification(static_cast<std::size_t>(state.range(0)), state.range(0) / 2, 9);
  for (auto _ : state) {
    auto r = evaluate_bulk(model, d, {Thresholds{}, Exec, ""});
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ScoreCandidates<false>)->Name("score/serial")->Arg(1000)->Arg(20000)->Arg(100000);
BENCHMARK(BM_ScoreCandidates<true>)->Name("score/openmp")->Arg(1000)->Arg(20000)->Arg(100000);
BENCHMARK(BM_Train<Execution::Serial>)->Name("train_c45/serial")->Arg(2000)->Arg(50000);
BENCHMARK(BM_Train<Execution::Parallel>)->Name("train_c45/openmp")->Arg(2000)->Arg(50000);
BENCHMARK(BM_EvaluateBulk<Execution::Serial>)->Name("evaluate/serial")->Arg(10000)->Arg(200000);
BENCHMARK(BM_EvaluateBulk<Execution::Parallel>)->Name("evaluate/openmp")->Arg(10000)->Arg(200000);

BENCHMARK_MAIN();
