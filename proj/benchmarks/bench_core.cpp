#include <benchmark/benchmark.h>

#include <random>

#include "renewal/density_grid.hpp"
#include "renewal/line_geometry.hpp"
#include "renewal/renewal_hmm.hpp"
#include "renewal/stats.hpp"
#include "renewal/synthetic.hpp"
#include "renewal/track_detector.hpp"

using namespace renewal;

namespace {

Catalog benchmark_plate(std::size_t n_background) {
    GeneratorConfig gen;
    gen.bounds = Rect{0.0, 320000.0, 0.0, 320000.0};
    gen.background.kind = BackgroundSpec::Kind::Constant;
    gen.background.rate = static_cast<double>(n_background) / gen.bounds.area();
    gen.birth_mean = std::numeric_limits<double>::infinity();
    ForcedTrack track;
    track.angle_deg = 30.0;
    track.class_index = 0;
    track.n_points = 60;
    track.offset_d = 0.0;
    track.t_start = 200000.0;
    gen.forced_tracks = {track};
    gen.seed = 7;
    return sample_plate(gen);
}

}  // namespace

static void ForwardBackward(benchmark::State& state) {
    const auto n_obs = static_cast<std::size_t>(state.range(0));
    const RenewalHmmModel model = default_model();
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> gap(1e-4);
    std::vector<Observation> obs(n_obs);
    for (auto& o : obs) o = {gap(rng), 1e-4, std::nullopt, false};
    for (auto _ : state) {
        auto table = forward_backward(obs, model);
        benchmark::DoNotOptimize(table.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_obs));
}
BENCHMARK(ForwardBackward)->RangeMultiplier(8)->Range(64, 1 << 18);

static void BuildLineBins(benchmark::State& state) {
    const Catalog plate = benchmark_plate(static_cast<std::size_t>(state.range(0)));
    const LineFamily family = make_line_family(plate.bounds, 37.5, 50.0);
    for (auto _ : state) {
        LineBins bins = build_line_bins(plate, family);
        benchmark::DoNotOptimize(bins.total_memberships());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plate.size()));
}
BENCHMARK(BuildLineBins)->Arg(10000)->Arg(100000);

static void EstimateGrid(benchmark::State& state) {
    const Catalog plate = benchmark_plate(100000);
    for (auto _ : state) {
        DensityGrid grid = estimate_grid(plate, 200, 200);
        benchmark::DoNotOptimize(grid.rate_at(0, 0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plate.size()));
}
BENCHMARK(EstimateGrid);

static void SweepAngles(benchmark::State& state) {
    const Catalog plate = benchmark_plate(20000);
    DetectorConfig config;
    config.n_angles = static_cast<std::size_t>(state.range(0));
    config.threads = 1;
    for (auto _ : state) {
        DetectionResult result = sweep(plate, config);
        benchmark::DoNotOptimize(result.p_track.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.n_angles) *
                            static_cast<std::int64_t>(plate.size()));
}
BENCHMARK(SweepAngles)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void PoissonTail(benchmark::State& state) {
    double mu = 11.0;
    std::int64_t n = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(poisson_tail(n, mu));
        mu += 1.0;
        if (mu > 1e6) mu = 11.0;
        n = static_cast<std::int64_t>(mu) + 20;
    }
}
BENCHMARK(PoissonTail);

BENCHMARK_MAIN();
