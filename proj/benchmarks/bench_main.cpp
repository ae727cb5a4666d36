#include <benchmark/benchmark.h>

#include <random>

#include "npqsim/pipeline.hpp"
#include "npqsim/qmgr.hpp"
#include "npqsim/sched.hpp"
#include "npqsim/traffic.hpp"

namespace {

using namespace npqsim;

void BM_QmgrEnqueueDequeue(benchmark::State& state) {
    QueueManager qm({4096, 1024});
    const SegmentData data{};
    std::mt19937 rng(1);
    for (auto _ : state) {
        const FlowId f = rng() % 1024;
        qm.enqueue_segment(f, data, 64, true);
        benchmark::DoNotOptimize(qm.dequeue_segment(f));
    }
    state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_QmgrEnqueueDequeue);

void BM_QmgrMovePacket(benchmark::State& state) {
    QueueManager qm({4096, 64});
    const SegmentData data{};
    for (FlowId f = 0; f < 64; ++f) {
        for (int s = 0; s < 4; ++s) qm.enqueue_segment(f, data, 64, s == 3);
    }
    FlowId src = 0;
    for (auto _ : state) {
        qm.move_packet(src, (src + 1) % 64);
        src = (src + 1) % 64;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QmgrMovePacket);

void BM_ThroughputLoss(benchmark::State& state) {
    DramConfig cfg;
    cfg.banks = static_cast<unsigned>(state.range(0));
    cfg.interleave_penalty = true;
    const Policy policy = state.range(1) ? Policy::Optimized : Policy::Naive;
    for (auto _ : state) {
        benchmark::DoNotOptimize(measure_throughput_loss(policy, cfg, {}, 100000, 1));
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_ThroughputLoss)->ArgsProduct({{4, 8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PipelineLoad(benchmark::State& state) {
    WorkloadSpec spec;
    spec.offered_gbps = static_cast<double>(state.range(0)) / 100.0;
    spec.duration_cycles = 100000;
    const auto stream = generate(spec);
    for (auto _ : state) {
        Pipeline p;
        benchmark::DoNotOptimize(run_stream(p, stream));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_PipelineLoad)->Arg(160)->Arg(480)->Arg(614)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state) {
    WorkloadSpec spec;
    spec.offered_gbps = 6.14;
    spec.duration_cycles = 100000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(spec));
    }
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
