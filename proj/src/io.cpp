#include "nbsc/io.hpp"

#include "nbsc/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nbsc {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

// Next line that is neither blank nor a comment; false at end of input.
bool data_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

// Parses exactly `count` integers from the line, nothing else.
std::vector<long long> integers(const std::string& line, int count, int lineno) {
  std::istringstream ss(line);
  std::vector<long long> v(static_cast<std::size_t>(count));
  for (auto& x : v)
    if (!(ss >> x)) throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                                          std::to_string(count) + " integers");
  std::string rest;
  if (ss >> rest) throw ValidationError("line " + std::to_string(lineno) + ": trailing text");
  return v;
}

json matrix_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

}  // namespace

Graph read_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!data_line(in, line, lineno)) throw ValidationError("edge list is empty");
  const auto head = integers(line, 2, lineno);
  if (head[0] < 0 || head[0] > std::numeric_limits<int>::max() || head[1] < 0)
    throw ValidationError("line " + std::to_string(lineno) + ": bad node or edge count");
  const int n = static_cast<int>(head[0]);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(head[1]));
  while (data_line(in, line, lineno)) {
    const auto e = integers(line, 2, lineno);
    if (e[0] < 0 || e[1] >= n || e[0] >= e[1])
      throw ValidationError("line " + std::to_string(lineno) + ": edge must satisfy 0 <= i < j < n");
    edges.emplace_back(static_cast<int>(e[0]), static_cast<int>(e[1]));
  }
  if (static_cast<long long>(edges.size()) != head[1])
    throw ValidationError("edge list declares " + std::to_string(head[1]) + " edges but has " +
                          std::to_string(edges.size()));
  return build_graph(n, edges);
}

Graph read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (data_line(in, line, lineno)) {
    const auto v = integers(line, 1, lineno);
    if (v[0] < 0 || v[0] > std::numeric_limits<int>::max())
      throw ValidationError("line " + std::to_string(lineno) + ": label must be a nonnegative integer");
    labels.push_back(static_cast<int>(v[0]));
  }
  return labels;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
}

SbmParams params_from_json(const json& j) {
  try {
    SbmParams p;
    p.k = j.at("k").get<int>();
    if (p.k < 1) throw ValidationError("params: k must be at least 1");
    const auto r = j.at("r").get<std::vector<double>>();
    const auto c = j.at("C").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(r.size()) != p.k || static_cast<int>(c.size()) != p.k)
      throw ValidationError("params: r and C must have k entries");
    p.r = Eigen::Map<const Eigen::VectorXd>(r.data(), p.k);
    p.C.resize(p.k, p.k);
    for (int a = 0; a < p.k; ++a) {
      if (static_cast<int>(c[a].size()) != p.k) throw ValidationError("params: C must be k x k");
      for (int b = 0; b < p.k; ++b) p.C(a, b) = c[a][b];
    }
    p.beta = j.value("beta", 1.0);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("params: ") + e.what());
  }
}

json params_to_json(const SbmParams& p) {
  return {{"k", p.k}, {"r", vector_json(p.r)}, {"C", matrix_json(p.C)}, {"beta", p.beta}};
}

SbmParams read_params(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return params_from_json(j);
}

const char* route_name(SpectrumRoute r) {
  switch (r) {
    case SpectrumRoute::dense: return "dense";
    case SpectrumRoute::ihara: return "ihara";
    case SpectrumRoute::direct_core: return "direct_core";
  }
  return "unknown";
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "re,im\n";
  for (Index i = 0; i < s.size(); ++i)
    out << format_double(s.values(i).real()) << ',' << format_double(s.values(i).imag()) << '\n';
}

json spectrum_json(const Spectrum& s) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < s.size(); ++i) {
    re.push_back(s.values(i).real());
    im.push_back(s.values(i).imag());
  }
  return {{"route", route_name(s.route)}, {"re", re}, {"im", im}};
}

void write_marginals_csv(std::ostream& out, const Marginals& m) {
  for (Index a = 0; a < m.cols(); ++a) out << (a ? "," : "") << 'p' << a;
  out << '\n';
  write_matrix_csv(out, m);
}

json marginals_json(const Marginals& m) { return {{"marginals", matrix_json(m)}}; }

void write_embedding_csv(std::ostream& out, const Embedding& emb) {
  out << "# eigenvalues";
  for (Index j = 0; j < emb.eigenvalues.size(); ++j) out << ' ' << format_double(emb.eigenvalues(j));
  out << '\n';
  for (Index j = 0; j < emb.points.cols(); ++j) out << (j ? "," : "") << "mu_" << j + 1;
  out << '\n';
  write_matrix_csv(out, emb.points);
}

json embedding_json(const Embedding& emb) {
  return {{"eigenvalues", vector_json(emb.eigenvalues)},
          {"nodes", emb.nodes},
          {"points", matrix_json(emb.points)},
          {"degenerate", emb.degenerate}};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "seed,beta,m,c_emp,k0,mu1,mu2,mu3,bulk_radius\n";
  for (const auto& r : records) {
    out << r.seed << ',' << format_double(r.beta) << ',' << r.m << ',' << format_double(r.c_emp) << ','
        << r.k0;
    for (Index i = 0; i < 3; ++i) {
      out << ',';
      if (i < r.structural.size()) out << format_double(r.structural(i));
    }
    out << ',' << format_double(r.bulk_radius) << '\n';
  }
}

json sweep_json(const std::vector<SweepRecord>& records) {
  json out = json::array();
  for (const auto& r : records)
    out.push_back({{"seed", r.seed},
                   {"beta", r.beta},
                   {"m", r.m},
                   {"c_emp", r.c_emp},
                   {"k0", r.k0},
                   {"structural", vector_json(r.structural)},
                   {"bulk_radius", r.bulk_radius},
                   {"route", route_name(r.route)}});
  return out;
}

json fitted_model_json(const EmResult& res) {
  return {{"k", res.state.r.size()},
          {"r", vector_json(res.state.r)},
          {"P", matrix_json(res.state.P)},
          {"loglik", res.state.loglik},
          {"iters", res.iters}};
}

json report_json(const PipelineReport& rep) {
  json j = {{"n", rep.n},
            {"m", rep.m},
            {"c_emp", rep.c_emp},
            {"route", route_name(rep.route)},
            {"k0", rep.k0},
            {"structural", vector_json(rep.structural)},
            {"bulk_radius", rep.bulk_radius},
            {"predicted_thresholds", rep.predicted_thresholds},
            {"largest_component", rep.largest_component},
            {"diagnosis", rep.diagnosis}};
  if (rep.k0 > 0) {
    j["clustering"] = {{"labels", rep.clustering.labels},
                       {"centers", matrix_json(rep.clustering.centers)},
                       {"objective", rep.clustering.objective},
                       {"embedding_degenerate", rep.embedding_degenerate}};
  } else {
    j["clustering"] = nullptr;
  }
  if (rep.em) {
    j["em"] = fitted_model_json(*rep.em);
    j["em"]["converged"] = rep.em->converged;
  } else {
    j["em"] = nullptr;
  }
  j["labels"] = rep.labels;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace nbsc
