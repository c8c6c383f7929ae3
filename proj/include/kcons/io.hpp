#pragma once

/**
 * @file io.hpp
 * @brief JSON instance files and report rendering.
 *
 * Instance keys: monoid, domains, relations, schema, b, c, cover, lifts,
 * witness. Relations use
 * {"name", "attributes", "tuples": [{"values": {attr: value}, "annotation": literal}]}.
 */

#include "covers.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace kcons {

/// Malformed instance content; carries a diagnostic code for the CLI.
class instance_error : public std::invalid_argument {
 public:
  instance_error(std::string code, const std::string& msg) : std::invalid_argument(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw instance_error("io-error", "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw instance_error("parse-error", path + ": " + e.what());
  }
}

inline DomainMap domains_from_json(const json& j) {
  DomainMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw instance_error("invalid-instance", "'domains' must map attributes to value lists");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array()) throw instance_error("invalid-instance", "domain of '" + it.key() + "' is not a list");
    Domain d;
    for (const auto& v : it.value()) d.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    if (d.empty()) throw instance_error("invalid-instance", "domain of '" + it.key() + "' is empty");
    out[it.key()] = d;
  }
  return out;
}

inline json domains_to_json(const DomainMap& d) {
  json out = json::object();
  for (const auto& [k, v] : d) out[k] = v;
  return out;
}

inline std::string value_string(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

inline KRelation relation_from_json(const json& j, const Monoid& m, const DomainMap& doms) {
  if (!j.is_object() || !j.contains("attributes")) {
    throw instance_error("invalid-instance", "relation objects need 'attributes'");
  }
  const std::string name = j.value("name", std::string("?"));
  try {
    KRelation r(m, AttributeSet(j.at("attributes").get<std::vector<std::string>>(), doms));
    for (const auto& t : j.value("tuples", json::array())) {
      std::map<std::string, std::string> values;
      for (auto it = t.at("values").begin(); it != t.at("values").end(); ++it) values[it.key()] = value_string(it.value());
      const Tuple tup = r.tuple(values);
      // zero annotations are dropped; repeated tuples accumulate
      r.accumulate(tup, m.parse(t.at("annotation")));
    }
    return r;
  } catch (const monoid_error& e) {
    throw instance_error("invalid-element", "relation " + name + ": " + e.what());
  } catch (const relation_error& e) {
    throw instance_error("invalid-instance", "relation " + name + ": " + e.what());
  } catch (const json::exception& e) {
    throw instance_error("invalid-instance", "relation " + name + ": " + e.what());
  }
}

inline json relation_to_json(const KRelation& r, const std::string& name) {
  json tuples = json::array();
  for (const auto& [t, v] : r.annotations()) {
    json values = json::object();
    for (const auto& [k, x] : r.values(t)) values[k] = x;
    tuples.push_back({{"values", values}, {"annotation", r.monoid().render(v)}});
  }
  return {{"name", name}, {"attributes", r.attrs().names()}, {"tuples", tuples}};
}

inline Hypergraph hypergraph_from_json(const json& j) {
  try {
    std::vector<std::vector<std::string>> edges = j.at("edges").get<std::vector<std::vector<std::string>>>();
    std::vector<std::string> vertices;
    if (j.contains("vertices")) {
      vertices = j.at("vertices").get<std::vector<std::string>>();
    } else {
      std::set<std::string> seen;
      for (const auto& e : edges) {
        for (const auto& v : e) {
          if (seen.insert(v).second) vertices.push_back(v);
        }
      }
    }
    return Hypergraph(vertices, edges);
  } catch (const json::exception& e) {
    throw instance_error("invalid-instance", std::string("schema: ") + e.what());
  } catch (const hypergraph_error& e) {
    throw instance_error("invalid-instance", std::string("schema: ") + e.what());
  }
}

inline json hypergraph_to_json(const Hypergraph& h) {
  json edges = json::array();
  for (const auto& e : h.edges) edges.push_back(h.names(e));
  return {{"vertices", h.vertices}, {"edges", edges}};
}

inline json matrix_to_json(const Monoid& m, const Matrix& d) {
  json out = json::array();
  for (const auto& row : d) {
    json r = json::array();
    for (const auto& x : row) r.push_back(m.render(x));
    out.push_back(r);
  }
  return out;
}

inline Monoid monoid_from_json(const json& j) {
  try {
    return make_monoid(j);
  } catch (const monoid_error& e) {
    throw instance_error("unknown-monoid", e.what());
  }
}

inline Cover cover_from_json(const json& j, const Monoid& down) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string("free"));
  if (kind == "free") return free_cover(down);
  if (kind == "identity") return identity_cover(down);
  if (kind == "truncation") {
    const Natural cap = j.is_object() ? j.value("cap", Natural{2}) : 2;
    Cover cv = truncation_cover(cap);
    if (!cv.downstairs.same_as(down)) throw instance_error("invalid-instance", "truncation cover needs monoid N2");
    return cv;
  }
  if (kind == "custom") {
    const Monoid up = monoid_from_json(j.at("upstairs"));
    std::map<Element, Element> table;
    for (const auto& entry : j.at("map")) table[up.parse(entry.at(0))] = down.parse(entry.at(1));
    try {
      return custom_cover(up, down, table);
    } catch (const cover_error& e) {
      throw instance_error("invalid-cover", e.what());
    }
  }
  throw instance_error("invalid-instance", "unknown cover kind '" + kind + "'");
}

inline json cover_to_json(const Cover& cv) {
  json j{{"kind", cv.name()}};
  if (cv.kind == Cover::Kind::truncation) j["cap"] = cv.downstairs.elements().size() - 1;
  return j;
}

struct Instance {
  json raw;
  Monoid monoid;
  DomainMap domains;
  std::vector<KRelation> relations;
  std::vector<std::string> names;
  std::optional<Hypergraph> schema;
  std::optional<TransportInstance> transport;
  std::optional<Cover> cover;
  std::vector<KRelation> lifts;
  std::optional<KRelation> witness;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    throw instance_error("usage", "no relation named '" + name + "'");
  }
};

inline Instance parse_instance(const json& j) {
  if (!j.is_object()) throw instance_error("invalid-instance", "instance must be a JSON object");
  Instance in;
  in.raw = j;
  if (j.contains("schema")) in.schema = hypergraph_from_json(j.at("schema"));
  if (!j.contains("monoid")) {
    if (j.contains("relations") || j.contains("b")) throw instance_error("invalid-instance", "instance needs a 'monoid'");
    return in;
  }
  in.monoid = monoid_from_json(j.at("monoid"));
  in.domains = domains_from_json(j.value("domains", json()));
  for (const auto& r : j.value("relations", json::array())) {
    in.relations.push_back(relation_from_json(r, in.monoid, in.domains));
    in.names.push_back(r.value("name", "R" + std::to_string(in.names.size() + 1)));
  }
  if (j.contains("b") || j.contains("c")) {
    TransportInstance t{in.monoid, {}, {}};
    try {
      for (const auto& x : j.at("b")) t.b.push_back(in.monoid.parse(x));
      for (const auto& x : j.at("c")) t.c.push_back(in.monoid.parse(x));
    } catch (const monoid_error& e) {
      throw instance_error("invalid-element", e.what());
    } catch (const json::exception& e) {
      throw instance_error("invalid-instance", std::string("transport instance: ") + e.what());
    }
    if (t.b.empty() || t.c.empty()) throw instance_error("invalid-instance", "b and c must be non-empty");
    in.transport = t;
  }
  if (j.contains("cover")) in.cover = cover_from_json(j.at("cover"), in.monoid);
  if (j.contains("lifts")) {
    if (!in.cover) throw instance_error("invalid-instance", "'lifts' need a 'cover'");
    for (const auto& r : j.at("lifts")) in.lifts.push_back(relation_from_json(r, in.cover->upstairs, in.domains));
  }
  if (j.contains("witness")) in.witness = relation_from_json(j.at("witness"), in.monoid, in.domains);
  return in;
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_json_file(path)); }

/// Relations plus monoid and domains, ready to be re-read as an instance.
inline json instance_to_json(const Monoid& m, const DomainMap& doms, const std::vector<KRelation>& rels,
                             const std::vector<std::string>& names) {
  json out{{"monoid", m.descriptor()}, {"domains", domains_to_json(doms)}, {"relations", json::array()}};
  for (std::size_t i = 0; i < rels.size(); ++i) out["relations"].push_back(relation_to_json(rels[i], names[i]));
  return out;
}

inline std::string subset_label(const IndexSet& idx, const std::vector<std::string>& names) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + names.at(idx[i]);
  return s + "}";
}

inline json verdict_to_json(const Verdict& v, const std::vector<std::string>& names,
                            const std::vector<KRelation>& rels) {
  json out{{"level", v.level}, {"k", v.k}, {"outcome", to_string(v.outcome)}};
  if (!v.method.empty()) out["method"] = v.method;
  out["nodes"] = v.nodes;
  if (v.candidates > 0 || !v.search_space.empty()) {
    out["candidates"] = v.candidates;
    out["search_space"] = v.search_space;
  }
  if (v.outcome != Outcome::consistent) {
    json failing = json::array();
    for (int i : v.failing) failing.push_back(names.at(i));
    out["failing"] = failing;
    out["reason"] = to_string(v.reason);
    if (v.block) out["block"] = v.block_label;
    return out;
  }
  json ws = json::array();
  for (const auto& [idx, w] : v.witnesses) {
    json subset = json::array();
    for (int i : idx) subset.push_back(names.at(i));
    ws.push_back({{"subset", subset},
                  {"verified", verify_witness(w, pick(rels, idx))},
                  {"relation", relation_to_json(w, "W" + subset_label(idx, names))}});
  }
  out["witnesses"] = ws;
  return out;
}

inline json step_to_json(const Hypergraph& h, const SafeDeletionStep& st) {
  if (st.kind == SafeDeletionStep::Kind::vertex) return {{"delete_vertex", h.vertices[st.vertex]}};
  return {{"delete_edge", st.edge}, {"edge", h.label(h.edges[st.edge])}, {"covered_by", st.cover}};
}

inline json certificate_to_json(const Hypergraph& h, const AcyclicityCertificate& cert) {
  json out{{"verdict", cert.acyclic ? "acyclic" : "cyclic"}};
  const PrimalReport pr = primal_chordal_conformal(h);
  out["chordal"] = pr.chordal;
  out["conformal"] = pr.conformal;
  if (!pr.chordal) out["chordless_cycle"] = h.names(pr.cycle);
  if (!pr.conformal) out["uncovered_clique"] = h.names(pr.clique);
  if (cert.acyclic) {
    json order = json::array();
    for (int e : cert.order) order.push_back(h.label(h.edges[e]));
    out["order"] = order;
    json parent = json::object();
    for (std::size_t e = 0; e < cert.parent.size(); ++e) {
      parent[h.label(h.edges[e])] = cert.parent[e] == -1 ? json(nullptr) : json(h.label(h.edges[cert.parent[e]]));
    }
    out["join_tree"] = parent;
    return out;
  }
  out["core"] = std::string(1, cert.core) + std::to_string(cert.w.size());
  out["W"] = h.names(cert.w);
  json steps = json::array();
  for (const auto& st : cert.deletions) steps.push_back(step_to_json(h, st));
  out["deletions"] = steps;
  json core = json::array();
  for (int e : cert.core_edges) core.push_back(h.names(intersect(h.edges[e], cert.w)));
  out["core_edges"] = core;
  out["k"] = cert.k;
  out["d"] = cert.d;
  return out;
}

}  // namespace kcons
