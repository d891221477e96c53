#pragma once

#include "nbsc/bp.hpp"
#include "nbsc/cluster.hpp"
#include "nbsc/em.hpp"
#include "nbsc/graph.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/pipeline.hpp"
#include "nbsc/sbm.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nbsc {

/// Shortest text that reads back to the same double.
std::string format_double(double x);

// Edge lists: "n m", then m lines "i j" with i < j; lines starting with '#'
// and blank lines are skipped. Writing emits the sorted canonical form, so
// a canonical file reads and writes back byte for byte.
Graph read_edge_list(std::istream& in);
Graph read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

std::vector<int> read_labels(std::istream& in);
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::ostream& out, const std::vector<int>& labels);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// {"k":3, "r":[...], "C":[[...]], "beta":1.0}; beta defaults to 1. Validated.
SbmParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const SbmParams& p);
SbmParams read_params(const std::filesystem::path& path);

const char* route_name(SpectrumRoute r);

void write_spectrum_csv(std::ostream& out, const Spectrum& s);
nlohmann::json spectrum_json(const Spectrum& s);

void write_marginals_csv(std::ostream& out, const Marginals& m);
nlohmann::json marginals_json(const Marginals& m);

/// "# eigenvalues ..." comment, header mu_1..mu_k0, then one row per
/// represented node in the order of `emb.nodes`.
void write_embedding_csv(std::ostream& out, const Embedding& emb);
nlohmann::json embedding_json(const Embedding& emb);

/// seed,beta,m,c_emp,k0,mu1,mu2,mu3,bulk_radius with blank missing mu's.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
nlohmann::json sweep_json(const std::vector<SweepRecord>& records);

/// {"k", "r", "P", "loglik", "iters"}.
nlohmann::json fitted_model_json(const EmResult& res);

nlohmann::json report_json(const PipelineReport& rep);

/// Writes text to a file, throwing ValidationError if it cannot be opened.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nbsc
