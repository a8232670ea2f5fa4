#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace pathgat {

/// Thrown on malformed input data (unknown names, bad files, schema errors).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Edge edit encoding a drug mechanism: remove or add one directed edge
/// under one relation.
struct Intervention {
  std::string relation;
  std::string source_gene;
  std::string target_gene;
  enum class Action { kRemove, kAdd } action = Action::kRemove;
};

/// Genes plus one binary adjacency per relation type. Row indexes the
/// attention target, column the source: adjacency(r)[target][source]==1
/// means the source gene may send a message to the target.
class PathwayGraph {
 public:
  PathwayGraph(std::vector<std::string> genes, std::vector<std::string> relations);

  static PathwayGraph fully_connected(std::vector<std::string> genes, bool include_self);

  std::size_t num_genes() const { return genes_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  const std::vector<std::string>& genes() const { return genes_; }
  const std::vector<std::string>& relations() const { return relations_; }

  std::size_t gene_index(const std::string& name) const;
  std::size_t relation_index(const std::string& name) const;

  uint8_t edge(std::size_t relation, std::size_t target, std::size_t source) const {
    return adjacency_.at(relation)[target * genes_.size() + source];
  }
  void set_edge(const std::string& relation, const std::string& source,
                const std::string& target, uint8_t value);

  /// Flat row-major copy of one relation's adjacency, as doubles for use as
  /// an attention mask.
  std::vector<double> adjacency_mask(std::size_t relation) const;

  /// Source indices permitted to attend to `target` under `relation`.
  std::set<std::size_t> neighbors(std::size_t relation, std::size_t target) const;

  /// Returns an edited copy; this graph is unchanged.
  PathwayGraph with_intervention(const Intervention& iv) const;
  PathwayGraph with_interventions(const std::vector<Intervention>& ivs) const;

  bool operator==(const PathwayGraph& other) const = default;

 private:
  std::vector<std::string> genes_;
  std::vector<std::string> relations_;
  std::vector<std::vector<uint8_t>> adjacency_;  // per relation, N*N row-major
};

/// Builds a graph from (source, target, relation) edge triples. A relation
/// named "self" is initialized to the identity.
PathwayGraph build_graph(const std::vector<std::string>& genes,
                         const std::vector<std::tuple<std::string, std::string, std::string>>& edges,
                         const std::vector<std::string>& relations = {"activatory", "inhibitory",
                                                                      "self"});

/// Pathway config: genes, relations, edges, and named intervention sets.
struct PathwayConfig {
  std::vector<std::string> genes;
  std::vector<std::string> relations;
  std::vector<std::tuple<std::string, std::string, std::string>> edges;  // source, target, relation
  std::map<std::string, std::vector<Intervention>> interventions;        // keyed by condition

  PathwayGraph build() const { return build_graph(genes, edges, relations); }

  std::string to_json() const;
  static PathwayConfig from_json(const std::string& text);
  static PathwayConfig load(const std::string& path);
  void save(const std::string& path) const;

  /// The shipped TP53-MDM2-MDM4 feedback loop with the Nutlin edge removal.
  static PathwayConfig canonical_p53();
};

}  // namespace pathgat
