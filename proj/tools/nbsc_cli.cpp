// nbsc: command-line front end for sampling, spectra, BP, EM, clustering and
// beta sweeps. Exit codes: 0 ok, 2 bad input, 3 numerical failure.

#include "nbsc/bp.hpp"
#include "nbsc/cluster.hpp"
#include "nbsc/em.hpp"
#include "nbsc/error.hpp"
#include "nbsc/io.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/pipeline.hpp"
#include "nbsc/sbm.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace nbsc;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string params_path;
  std::string out_dir = ".";
  std::string format = "csv";
};

struct GraphSource {
  std::string graph_path;
  int n = 900;
};

void add_graph_source(CLI::App* cmd, GraphSource& src) {
  cmd->add_option("--graph", src.graph_path, "edge-list file (otherwise sample from --params)");
  cmd->add_option("-n,--nodes", src.n, "nodes to sample when no --graph is given")->check(CLI::PositiveNumber);
}

SbmParams need_params(const Globals& g) {
  if (g.params_path.empty()) throw ValidationError("--params <json> is required");
  return read_params(g.params_path);
}

// Reads --graph, or samples a planted graph from --params with --seed.
Graph load_graph(const Globals& g, const GraphSource& src, std::vector<int>* planted = nullptr) {
  if (!src.graph_path.empty()) return read_edge_list(fs::path(src.graph_path));
  PlantedGraph pg = sample_graph(need_params(g), src.n, g.seed);
  if (planted) *planted = pg.labels;
  return std::move(pg.graph);
}

fs::path out_path(const Globals& g, const std::string& name) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create " + dir.string());
  return dir / name;
}

// Writes a table as name.csv or name.json depending on --format.
template <typename Csv>
void emit(const Globals& g, const std::string& name, Csv csv, const nlohmann::json& j) {
  if (g.format == "json") {
    write_text(out_path(g, name + ".json"), j.dump(2) + "\n");
  } else {
    std::ostringstream ss;
    csv(ss);
    write_text(out_path(g, name + ".csv"), ss.str());
  }
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v(i));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-backtracking spectral community detection"};
  app.require_subcommand(1);
  Globals glob;
  app.add_option("--seed", glob.seed, "master seed");
  app.add_option("--params", glob.params_path, "model parameters JSON");
  app.add_option("--out", glob.out_dir, "output directory");
  app.add_option("--format", glob.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.fallthrough();

  // gen
  auto* gen = app.add_subcommand("gen", "sample a planted graph: graph.txt and labels.txt");
  int gen_n = 900;
  std::optional<double> gen_beta;
  gen->add_option("-n,--nodes", gen_n, "number of nodes")->check(CLI::PositiveNumber);
  gen->add_option("--beta", gen_beta, "override the retention probability");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "eigenvalues of B: spectrum.csv");
  GraphSource spec_src;
  std::string spec_method = "ihara";
  add_graph_source(spec, spec_src);
  spec->add_option("--method", spec_method, "ihara or direct")->check(CLI::IsMember({"ihara", "direct"}));

  // bp
  auto* bp = app.add_subcommand("bp", "belief propagation with known params: marginals.csv, labels.txt");
  GraphSource bp_src;
  BpOptions bp_opts;
  std::string bp_init = "random";
  add_graph_source(bp, bp_src);
  bp->add_option("--damping", bp_opts.damping);
  bp->add_option("--tol", bp_opts.tol);
  bp->add_option("--max-iter", bp_opts.max_iter);
  bp->add_option("--init", bp_init)->check(CLI::IsMember({"random", "uniform"}));

  // em
  auto* em = app.add_subcommand("em", "fit the block model by EM: model.json, labels.txt");
  GraphSource em_src;
  EmOptions em_opts;
  int em_k = 0;
  std::string em_init;
  add_graph_source(em, em_src);
  em->add_option("-k,--clusters", em_k, "number of clusters (default: from the spectrum)");
  em->add_option("--init-labels", em_init, "initial labels file (default: spectral labels)");
  em->add_flag("--random-init", "random initial labels drawn with --seed");
  em->add_flag("--hard", em_opts.hard, "hard assignments in the E-step");
  em->add_option("--tol", em_opts.tol);
  em->add_option("--max-iter", em_opts.max_iter);

  // cluster
  auto* cl = app.add_subcommand("cluster", "spectral embedding and k-means: embedding.csv, labels.txt");
  GraphSource cl_src;
  int cl_k = 0;
  KMeansOptions km;
  add_graph_source(cl, cl_src);
  cl->add_option("-k,--clusters", cl_k, "number of clusters (default: k0)");
  cl->add_option("--restarts", km.restarts)->check(CLI::PositiveNumber);

  // sweep
  auto* sw = app.add_subcommand("sweep", "beta sweep of structural eigenvalues: sweep.csv");
  int sw_n = 900;
  std::vector<std::uint64_t> sw_seeds;
  std::vector<double> sw_grid;
  unsigned sw_threads = 0;
  sw->add_option("-n,--nodes", sw_n)->check(CLI::PositiveNumber);
  sw->add_option("--seeds", sw_seeds, "seeds (default: --seed, --seed+1, --seed+2)");
  sw->add_option("--grid", sw_grid, "beta grid (default 0.05..1.00 step 0.05)");
  sw->add_option("--threads", sw_threads);

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "spectrum, clustering and EM: report.json, labels.txt");
  GraphSource pl_src;
  bool pl_no_em = false;
  add_graph_source(pl, pl_src);
  pl->add_flag("--no-em", pl_no_em, "skip the EM refinement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      SbmParams p = need_params(glob);
      if (gen_beta) p.beta = *gen_beta;
      const PlantedGraph pg = sample_graph(p, gen_n, glob.seed);
      write_edge_list(out_path(glob, "graph.txt"), pg.graph);
      write_labels(out_path(glob, "labels.txt"), pg.labels);
      std::cout << "n=" << pg.graph.num_nodes() << " m=" << pg.graph.num_edges() << '\n';
    } else if (spec->parsed()) {
      const Graph g = load_graph(glob, spec_src);
      const Spectrum s = spec_method == "direct" ? spectrum_B_direct(g) : spectrum_B_via_ihara(g);
      emit(glob, "spectrum", [&](std::ostream& o) { write_spectrum_csv(o, s); }, spectrum_json(s));
      const double c = g.mean_degree();
      std::cout << "route=" << route_name(s.route) << " c_emp=" << format_double(c)
                << " structural=" << join(structural_eigenvalues(s, c)) << '\n';
    } else if (bp->parsed()) {
      const SbmParams p = need_params(glob);
      const Graph g = load_graph(glob, bp_src);
      bp_opts.seed = glob.seed;
      bp_opts.init = bp_init == "uniform" ? MessageInit::uniform : MessageInit::random;
      const BpResult res = bp_run(g, p, bp_opts);
      emit(glob, "marginals", [&](std::ostream& o) { write_marginals_csv(o, res.marginals); },
           marginals_json(res.marginals));
      write_labels(out_path(glob, "labels.txt"), argmax_labels(res.marginals));
      std::cout << "converged=" << (res.converged ? "true" : "false") << " iters=" << res.iters << '\n';
    } else if (em->parsed()) {
      const Graph g = load_graph(glob, em_src);
      EmResult res;
      if (!em_init.empty()) {
        const auto init = read_labels(fs::path(em_init));
        int k = em_k;
        for (int l : init) k = std::max(k, l + 1);
        res = em_run(g, k, init, em_opts);
      } else if (em->count("--random-init") > 0) {
        if (em_k < 1) throw ValidationError("--random-init needs -k");
        res = em_run_random(g, em_k, glob.seed, em_opts);
      } else {
        PipelineOptions po;
        po.refine = false;
        po.kmeans.seed = glob.seed;
        const PipelineReport rep = pipeline(g, po);
        if (rep.k0 == 0) throw ValidationError("no structural eigenvalue; pass -k with --random-init");
        res = em_run(g, em_k > 0 ? em_k : rep.k0, rep.labels, em_opts);
      }
      write_text(out_path(glob, "model.json"), fitted_model_json(res).dump(2) + "\n");
      write_labels(out_path(glob, "labels.txt"), res.labels);
      std::cout << "loglik=" << format_double(res.state.loglik) << " iters=" << res.iters << '\n';
    } else if (cl->parsed()) {
      const Graph g = load_graph(glob, cl_src);
      const double c = g.mean_degree();
      const Eigen::VectorXd mu = structural_eigenvalues(spectrum_B_via_ihara(g), c);
      if (mu.size() == 0) throw ValidationError("no structural eigenvalue above sqrt(c_emp); nothing to embed");
      km.seed = glob.seed;
      Embedding emb;
      const ClusterAssignment ca =
          spectral_clustering(g, mu, cl_k > 0 ? cl_k : static_cast<int>(mu.size()), km, &emb);
      emit(glob, "embedding", [&](std::ostream& o) { write_embedding_csv(o, emb); }, embedding_json(emb));
      write_labels(out_path(glob, "labels.txt"), ca.labels);
      std::cout << "k0=" << mu.size() << " objective=" << format_double(ca.objective) << '\n';
    } else if (sw->parsed()) {
      const SbmParams p = need_params(glob);
      SweepOptions so;
      so.seeds = sw_seeds.empty() ? std::vector<std::uint64_t>{glob.seed, glob.seed + 1, glob.seed + 2} : sw_seeds;
      so.grid = sw_grid;
      so.threads = sw_threads;
      const auto records = beta_sweep(p, sw_n, so);
      emit(glob, "sweep", [&](std::ostream& o) { write_sweep_csv(o, records); }, sweep_json(records));
      for (auto s : so.seeds) {
        std::vector<SweepRecord> mine;
        for (const auto& r : records)
          if (r.seed == s) mine.push_back(r);
        const Transitions tr = detect_transitions(mine);
        std::cout << "seed=" << s << " transitions=";
        for (std::size_t i = 0; i < tr.first_seen.size(); ++i)
          std::cout << (i ? " " : "") << format_double(tr.first_seen[i]);
        std::cout << " dips=" << tr.dips.size() << '\n';
      }
    } else if (pl->parsed()) {
      const Graph g = load_graph(glob, pl_src);
      PipelineOptions po;
      po.refine = !pl_no_em;
      po.kmeans.seed = glob.seed;
      const PipelineReport rep = pipeline(g, po);
      write_text(out_path(glob, "report.json"), report_json(rep).dump(2) + "\n");
      write_labels(out_path(glob, "labels.txt"), rep.labels);
      std::cout << "k0=" << rep.k0 << " structural=" << join(rep.structural);
      if (!rep.diagnosis.empty()) std::cout << " diagnosis=\"" << rep.diagnosis << '"';
      std::cout << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
