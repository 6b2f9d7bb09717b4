// Serial reference kernels against their OpenMP counterparts on a graph of
// the size of the trust network. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <sstream>

#include "support.hpp"
#include "tasgnn/graph.hpp"
#include "tasgnn/kernels.hpp"
#include "tasgnn/model.hpp"
#include "tasgnn/synthetic.hpp"

using namespace tasgnn;
using kernels::Exec;

namespace {

struct Fixture {
  SignedGraph graph;
  MessageGraph messages;
  kernels::Csr adjacency;  // in-edges, signed weights
  Matrix features;   // N x 38
  Matrix weight;     // 38 x 32
  Matrix projected;  // N x 32
  std::vector<double> attention;
  kernels::AttentionForward fwd;
  Matrix d_out;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    std::stringstream csv;
    synthetic::write_csv(csv, synthetic::generate(synthetic::Config{}));
    x.graph = parse_edge_list(csv);
    x.messages = MessageGraph::build(x.graph);
    std::vector<kernels::Csr::Triplet> triplets;
    for (const auto& e : x.graph.edges()) triplets.push_back({e.target, e.source, e.weight()});
    x.adjacency = kernels::Csr::from_triplets(x.graph.num_nodes(), x.graph.num_nodes(), triplets);
    const std::size_t n = x.graph.num_nodes();
    x.features = testing::random_matrix(n, 38, 1);
    x.weight = testing::random_matrix(38, 32, 2, 0.2);
    x.projected = testing::random_matrix(n, 32, 3);
    x.attention = testing::random_matrix(1, 65, 4, 0.3).data();
    kernels::serial::attention_forward(x.messages.positive, x.projected, x.attention, 0.2, x.fwd);
    x.d_out = testing::random_matrix(n, 32, 5);
    return x;
  }();
  return f;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

void BM_Matmul(benchmark::State& state) {
  const auto& f = fixture();
  Matrix out;
  for (auto _ : state) {
    kernels::matmul(exec_of(state), f.features, f.weight, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_MatmulAtB(benchmark::State& state) {
  const auto& f = fixture();
  Matrix out;
  for (auto _ : state) {
    kernels::matmul_at_b(exec_of(state), f.features, f.projected, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_Spmm(benchmark::State& state) {
  const auto& f = fixture();
  Matrix out;
  for (auto _ : state) {
    kernels::spmm(exec_of(state), f.adjacency, f.projected, out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_AttentionForward(benchmark::State& state) {
  const auto& f = fixture();
  kernels::AttentionForward fwd;
  for (auto _ : state) {
    kernels::attention_forward(exec_of(state), f.messages.positive, f.projected, f.attention, 0.2, fwd);
    benchmark::DoNotOptimize(fwd.out.data());
  }
  label(state);
}

void BM_AttentionBackward(benchmark::State& state) {
  const auto& f = fixture();
  kernels::AttentionGrad grad;
  for (auto _ : state) {
    kernels::attention_backward(exec_of(state), f.messages.positive, f.projected, f.attention, 0.2,
                                f.fwd, f.d_out, grad);
    benchmark::DoNotOptimize(grad.d_projected.data());
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_Matmul)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatmulAtB)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Spmm)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AttentionForward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AttentionBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
