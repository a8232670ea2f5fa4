#include "pathgat/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pathgat {

PathwayGraph::PathwayGraph(std::vector<std::string> genes, std::vector<std::string> relations)
    : genes_(std::move(genes)), relations_(std::move(relations)) {
  std::set<std::string> seen(genes_.begin(), genes_.end());
  if (seen.size() != genes_.size()) throw DataError("duplicate gene names in pathway");
  adjacency_.assign(relations_.size(), std::vector<uint8_t>(genes_.size() * genes_.size(), 0));
  for (std::size_t r = 0; r < relations_.size(); ++r)
    if (relations_[r] == "self")
      for (std::size_t i = 0; i < genes_.size(); ++i) adjacency_[r][i * genes_.size() + i] = 1;
}

PathwayGraph PathwayGraph::fully_connected(std::vector<std::string> genes, bool include_self) {
  if (genes.empty()) throw DataError("fully_connected: need at least one gene");
  PathwayGraph g(std::move(genes), {"all"});
  const std::size_t n = g.num_genes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.adjacency_[0][i * n + j] = (i != j || include_self) ? 1 : 0;
  return g;
}

std::size_t PathwayGraph::gene_index(const std::string& name) const {
  auto it = std::find(genes_.begin(), genes_.end(), name);
  if (it == genes_.end()) throw DataError("unknown gene name: " + name);
  return static_cast<std::size_t>(it - genes_.begin());
}

std::size_t PathwayGraph::relation_index(const std::string& name) const {
  auto it = std::find(relations_.begin(), relations_.end(), name);
  if (it == relations_.end()) throw DataError("unknown relation name: " + name);
  return static_cast<std::size_t>(it - relations_.begin());
}

void PathwayGraph::set_edge(const std::string& relation, const std::string& source,
                            const std::string& target, uint8_t value) {
  const std::size_t r = relation_index(relation);
  const std::size_t t = gene_index(target), s = gene_index(source);
  adjacency_[r][t * genes_.size() + s] = value ? 1 : 0;
}

std::vector<double> PathwayGraph::adjacency_mask(std::size_t relation) const {
  const auto& a = adjacency_.at(relation);
  return std::vector<double>(a.begin(), a.end());
}

std::set<std::size_t> PathwayGraph::neighbors(std::size_t relation, std::size_t target) const {
  std::set<std::size_t> out;
  for (std::size_t j = 0; j < genes_.size(); ++j)
    if (edge(relation, target, j)) out.insert(j);
  return out;
}

PathwayGraph PathwayGraph::with_intervention(const Intervention& iv) const {
  PathwayGraph copy = *this;
  copy.set_edge(iv.relation, iv.source_gene, iv.target_gene,
                iv.action == Intervention::Action::kAdd ? 1 : 0);
  return copy;
}

PathwayGraph PathwayGraph::with_interventions(const std::vector<Intervention>& ivs) const {
  PathwayGraph copy = *this;
  for (const auto& iv : ivs)
    copy.set_edge(iv.relation, iv.source_gene, iv.target_gene,
                  iv.action == Intervention::Action::kAdd ? 1 : 0);
  return copy;
}

PathwayGraph build_graph(
    const std::vector<std::string>& genes,
    const std::vector<std::tuple<std::string, std::string, std::string>>& edges,
    const std::vector<std::string>& relations) {
  PathwayGraph g(genes, relations);
  for (const auto& [source, target, relation] : edges) g.set_edge(relation, source, target, 1);
  return g;
}

namespace {

using json = nlohmann::ordered_json;

json intervention_to_json(const Intervention& iv) {
  return json{{"relation", iv.relation},
              {"source", iv.source_gene},
              {"target", iv.target_gene},
              {"action", iv.action == Intervention::Action::kAdd ? "add" : "remove"}};
}

Intervention intervention_from_json(const json& j) {
  Intervention iv;
  iv.relation = j.at("relation").get<std::string>();
  iv.source_gene = j.at("source").get<std::string>();
  iv.target_gene = j.at("target").get<std::string>();
  const std::string action = j.at("action").get<std::string>();
  if (action == "add")
    iv.action = Intervention::Action::kAdd;
  else if (action == "remove")
    iv.action = Intervention::Action::kRemove;
  else
    throw DataError("intervention action must be add or remove, got " + action);
  return iv;
}

}  // namespace

std::string PathwayConfig::to_json() const {
  json j;
  j["genes"] = genes;
  j["relations"] = relations;
  j["edges"] = json::array();
  for (const auto& [s, t, r] : edges) j["edges"].push_back({{"source", s}, {"target", t}, {"relation", r}});
  j["interventions"] = json::object();
  for (const auto& [name, ivs] : interventions) {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back(intervention_to_json(iv));
    j["interventions"][name] = arr;
  }
  return j.dump(2) + "\n";
}

PathwayConfig PathwayConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("pathway config parse error: ") + e.what());
  }
  PathwayConfig cfg;
  cfg.genes = j.at("genes").get<std::vector<std::string>>();
  cfg.relations = j.at("relations").get<std::vector<std::string>>();
  for (const auto& e : j.at("edges"))
    cfg.edges.emplace_back(e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                           e.at("relation").get<std::string>());
  if (j.contains("interventions"))
    for (const auto& [name, arr] : j.at("interventions").items()) {
      std::vector<Intervention> ivs;
      for (const auto& e : arr) ivs.push_back(intervention_from_json(e));
      cfg.interventions[name] = std::move(ivs);
    }
  return cfg;
}

PathwayConfig PathwayConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pathway config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void PathwayConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write pathway config: " + path);
  out << to_json();
}

PathwayConfig PathwayConfig::canonical_p53() {
  PathwayConfig cfg;
  cfg.genes = {"TP53", "MDM2", "MDM4"};
  cfg.relations = {"activatory", "inhibitory", "self"};
  cfg.edges = {{"TP53", "MDM2", "activatory"},
               {"TP53", "MDM4", "activatory"},
               {"MDM2", "TP53", "inhibitory"},
               {"MDM4", "TP53", "inhibitory"},
               {"MDM2", "MDM4", "inhibitory"}};
  cfg.interventions["Nutlin"] = {
      {"inhibitory", "MDM2", "TP53", Intervention::Action::kRemove}};
  return cfg;
}

}  // namespace pathgat
