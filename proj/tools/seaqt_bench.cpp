// Benchmark of the batch layer: serial reference vs OpenMP over the corpus
// inequality suite and over independent trajectory integrations.

#include <chrono>
#include <cstdio>
#include <vector>

#include "seaqt/batch.hpp"
#include "seaqt/io.hpp"
#include "seaqt/metrics.hpp"

using namespace seaqt;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double bench_suite(ExecPolicy policy, const std::vector<DensityOperator>& corpus,
                   const SeaModel& model, const std::vector<NamedObservable>& obs,
                   double* checksum) {
  std::vector<double> worst(corpus.size(), 0.0);
  const auto t0 = Clock::now();
  for_each_index(corpus.size(), policy, [&](std::size_t i) {
    worst[i] = inequality_suite(corpus[i], model, obs).worst_bound_residual();
  });
  const double elapsed = ms_since(t0);
  *checksum = 0.0;
  for (double w : worst) *checksum += w;
  return elapsed;
}

double bench_trajectories(ExecPolicy policy, const std::vector<DensityOperator>& corpus,
                          const SeaModel& model, double* checksum) {
  std::vector<double> final_entropy(corpus.size(), 0.0);
  const auto t0 = Clock::now();
  for_each_index(corpus.size(), policy, [&](std::size_t i) {
    EvolutionSpec spec{.initial = corpus[i],
                       .model = model,
                       .t_start = 0.0,
                       .t_end = 5.0,
                       .stepper = FixedRk4{1e-3},
                       .sample_every = 100,
                       .mode = EvolutionMode::DiagonalFastPath};
    const Trajectory traj = integrate(spec);
    double s = 0.0;
    const auto& p = traj.probabilities.back();
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      if (p[j] > 0.0) s -= p[j] * std::log(p[j]);
    }
    final_entropy[i] = s;
  });
  const double elapsed = ms_since(t0);
  *checksum = 0.0;
  for (double s : final_entropy) *checksum += s;
  return elapsed;
}

}  // namespace

int main(int argc, char** argv) {
  int corpus_size = 600;
  int traj_count = 120;
  if (argc > 1) corpus_size = std::atoi(argv[1]);
  if (argc > 2) traj_count = std::atoi(argv[2]);

  std::printf("seaqt batch benchmark (max threads: %d)\n", max_threads());

  Eigen::VectorXd levels(6);
  for (int i = 0; i < 6; ++i) levels[i] = i / 5.0;
  const SeaModel model6(HermitianOperator::diagonal(levels), {}, {}, TauPolicy::constant(1.0));
  const auto obs = default_observables(model6);
  const auto corpus = random_state_corpus(6, corpus_size, 2024, CorpusKind::Full);

  double sum_serial = 0.0, sum_parallel = 0.0;
  const double t_serial = bench_suite(ExecPolicy::Serial, corpus, model6, obs, &sum_serial);
  const double t_parallel = bench_suite(ExecPolicy::Parallel, corpus, model6, obs, &sum_parallel);
  std::printf("inequality suite over %d dim-6 states:\n", corpus_size);
  std::printf("  serial   %8.1f ms (checksum % .12e)\n", t_serial, sum_serial);
  std::printf("  openmp   %8.1f ms (checksum % .12e)  speedup %.2fx\n", t_parallel, sum_parallel,
              t_serial / t_parallel);
  if (sum_serial != sum_parallel) {
    std::printf("  MISMATCH: serial and parallel results differ\n");
    return 1;
  }

  Eigen::VectorXd levels4(4);
  for (int i = 0; i < 4; ++i) levels4[i] = i / 3.0;
  const SeaModel model4(HermitianOperator::diagonal(levels4), {}, {}, TauPolicy::constant(1.0));
  const auto states = random_state_corpus(4, traj_count, 77, CorpusKind::Diagonal);

  double se_serial = 0.0, se_parallel = 0.0;
  const double tt_serial = bench_trajectories(ExecPolicy::Serial, states, model4, &se_serial);
  const double tt_parallel = bench_trajectories(ExecPolicy::Parallel, states, model4, &se_parallel);
  std::printf("%d independent dim-4 trajectories (horizon 5, dt 1e-3):\n", traj_count);
  std::printf("  serial   %8.1f ms (checksum % .12e)\n", tt_serial, se_serial);
  std::printf("  openmp   %8.1f ms (checksum % .12e)  speedup %.2fx\n", tt_parallel, se_parallel,
              tt_serial / tt_parallel);
  if (se_serial != se_parallel) {
    std::printf("  MISMATCH: serial and parallel results differ\n");
    return 1;
  }
  return 0;
}
