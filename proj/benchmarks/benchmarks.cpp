#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "dedalus/correspondence.hpp"
#include "dedalus/eval.hpp"
#include "dedalus/transform.hpp"

using namespace dedalus;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus_file(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

DedalusProgram load(const std::string& name) {
  return parse_dedalus(read_file(corpus_file(name + ".dedalus")));
}

DistributedInstance load_instance(const DedalusProgram& d, const std::string& name) {
  return parse_instance(read_file(corpus_file("instances/" + name + ".json")), d);
}

void bm_transitive_closure(benchmark::State& state) {
  Program p = parse_program(
      "t(U,V) <- r(U,V).\n"
      "t(U,V) <- t(U,W), r(W,V).\n");
  Instance i;
  for (int k = 0; k < state.range(0); ++k)
    i.insert(Fact{"r", {Value::sym("n" + std::to_string(k)),
                        Value::sym("n" + std::to_string(k + 1))}});
  for (auto _ : state) benchmark::DoNotOptimize(semi_positive_fixpoint(p, i));
}
BENCHMARK(bm_transitive_closure)->Arg(16)->Arg(64);

void bm_transform(benchmark::State& state) {
  DedalusProgram d = load("example2");
  for (auto _ : state) benchmark::DoNotOptimize(transform_causfin(d));
}
BENCHMARK(bm_transform);

void bm_simulate(benchmark::State& state) {
  DedalusProgram d = load("example1");
  DistributedInstance h = load_instance(d, "example1");
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate(d, h, Scheduler{}, state.range(0)));
}
BENCHMARK(bm_simulate)->Arg(8)->Arg(24);

void bm_windowed_stable_check(benchmark::State& state) {
  DedalusProgram d = load("example1");
  DistributedInstance h = load_instance(d, "example1");
  ModelCandidate m = run_to_model(simulate(d, h, Scheduler{}, 10));
  TransformedProgram tp = transform_causfin(d);
  Instance input = decl_input(h, TimeWindow{m.window.t_ground});
  for (auto _ : state)
    benchmark::DoNotOptimize(windowed_stable_check(tp, input, m));
}
BENCHMARK(bm_windowed_stable_check);

void bm_verify_theorem(benchmark::State& state) {
  DedalusProgram d = load("noncausal");
  DistributedInstance h = load_instance(d, "noncausal");
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_theorem(d, h, Scheduler{}, 12));
}
BENCHMARK(bm_verify_theorem);

}  // namespace

BENCHMARK_MAIN();
