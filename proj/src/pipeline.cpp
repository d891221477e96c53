#include "nbsc/pipeline.hpp"

#include "nbsc/error.hpp"
#include "nbsc/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace nbsc {

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

namespace {

SweepRecord sweep_point(const Graph& base, std::uint64_t seed, double beta, const StructuralOptions& so) {
  const Graph g = percolate(base, beta, mix_seed(seed, 1));
  SweepRecord rec;
  rec.seed = seed;
  rec.beta = beta;
  rec.m = g.num_edges();
  rec.c_emp = g.mean_degree();
  const Spectrum s = spectrum_B_via_ihara(g);
  rec.route = s.route;
  rec.structural = structural_eigenvalues(s, rec.c_emp, so);
  rec.k0 = static_cast<int>(rec.structural.size());
  rec.bulk_radius = bulk_radius(s, rec.c_emp, so);
  return rec;
}

// Runs task(i) for i in [0, count) on a small pool; rethrows the first error.
template <typename Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SweepRecord> beta_sweep(const SbmParams& params, int n, const SweepOptions& opts) {
  params.validate();
  const std::vector<double> grid = opts.grid.empty() ? default_beta_grid() : opts.grid;
  for (double b : grid)
    if (!(b > 0.0 && b <= 1.0)) throw ValidationError("sweep grid values must lie in (0, 1]");
  if (opts.seeds.empty()) throw ValidationError("sweep needs at least one seed");

  const SbmParams full = params.with_beta(1.0);
  std::vector<Graph> bases(opts.seeds.size());
  parallel_for(bases.size(), opts.threads,
               [&](std::size_t s) { bases[s] = sample_graph(full, n, mix_seed(opts.seeds[s], 0)).graph; });

  std::vector<SweepRecord> records(opts.seeds.size() * grid.size());
  parallel_for(records.size(), opts.threads, [&](std::size_t t) {
    const std::size_t s = t / grid.size();
    records[t] = sweep_point(bases[s], opts.seeds[s], grid[t % grid.size()], opts.structural);
  });
  return records;
}

Transitions detect_transitions(const std::vector<SweepRecord>& records) {
  std::vector<SweepRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SweepRecord& a, const SweepRecord& b) { return a.beta < b.beta; });
  Transitions tr;
  int running = 0;
  for (const auto& rec : sorted) {
    if (rec.k0 < running) tr.dips.push_back(rec.beta);
    running = std::max(running, rec.k0);
    tr.cleaned_k0.push_back(running);
    while (static_cast<int>(tr.first_seen.size()) < running) tr.first_seen.push_back(rec.beta);
  }
  return tr;
}

PipelineReport pipeline(const Graph& g, const PipelineOptions& opts) {
  PipelineReport rep;
  rep.n = g.num_nodes();
  rep.m = g.num_edges();
  rep.c_emp = g.mean_degree();
  if (rep.n > 0) {
    std::size_t largest = 0;
    for (const auto& comp : connected_components(g)) largest = std::max(largest, comp.size());
    rep.largest_component = static_cast<double>(largest) / rep.n;
  }

  const Spectrum s = spectrum_B_via_ihara(g);
  rep.route = s.route;
  rep.structural = structural_eigenvalues(s, rep.c_emp, opts.structural);
  rep.k0 = static_cast<int>(rep.structural.size());
  rep.bulk_radius = bulk_radius(s, rep.c_emp, opts.structural);
  for (Index i = 0; i < rep.structural.size(); ++i)
    rep.predicted_thresholds.push_back(rep.c_emp / (rep.structural(i) * rep.structural(i)));

  if (rep.k0 == 0) {
    rep.diagnosis = "below beta_1: no structural eigenvalue outside the bulk";
    return rep;
  }
  Embedding emb;
  rep.clustering = spectral_clustering(g, rep.structural, rep.k0, opts.kmeans, &emb);
  rep.embedding_degenerate = emb.degenerate;
  rep.labels = rep.clustering.labels;
  if (opts.refine) {
    rep.em = em_run(g, rep.k0, rep.clustering.labels, opts.em);
    rep.labels = rep.em->labels;
  }
  return rep;
}

}  // namespace nbsc
