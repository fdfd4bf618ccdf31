#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "epg/correspondence.hpp"
#include "epg/map_presentation.hpp"
#include "epg/paths.hpp"
#include "epg/presentation.hpp"

namespace epg {

using Json = nlohmann::json;

namespace io_detail {

inline const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::InvalidInput,
                std::string("missing field '") + key + "' in " + where);
  }
  return j.at(key);
}

inline std::string as_string(const Json& j, const char* where) {
  if (!j.is_string()) {
    throw Error(ErrorKind::InvalidInput, std::string(where) + " must be a string");
  }
  return j.get<std::string>();
}

inline Json graph_to_json(const FiniteGraph& g) {
  Json j;
  j["vertices"] = g.vertices;
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back(Json{{"id", e.id}, {"tail", e.tail}, {"head", e.head}});
  }
  j["edges"] = edges;
  return j;
}

inline FiniteGraph graph_from_json(const Json& j, const char* where) {
  FiniteGraph g;
  for (const auto& v : field(j, "vertices", where)) {
    g.vertices.push_back(as_string(v, "vertex name"));
  }
  for (const auto& e : field(j, "edges", where)) {
    g.edges.push_back(EdgeRec{as_string(field(e, "id", where), "edge id"),
                              as_string(field(e, "tail", where), "edge tail"),
                              as_string(field(e, "head", where), "edge head")});
  }
  return g;
}

}  // namespace io_detail

inline Json to_json(const EpgSystem& s) {
  Json j;
  j["core"] = io_detail::graph_to_json(s.graph.core);
  Json ends = Json::array();
  for (const auto& end : s.graph.ends) {
    Json e;
    e["id"] = end.id;
    e["domain"] = io_detail::graph_to_json(end.domain);
    e["inner"] = end.inner;
    e["outer"] = end.outer;
    e["attach"] = end.attach;
    e["core_attach"] = end.core_attach;
    ends.push_back(e);
  }
  j["ends"] = ends;
  Json m;
  m["depth"] = s.map.depth;
  m["end_targets"] = s.map.end_targets;
  Json vimg;
  for (const auto& [v, img] : s.map.vertex_images) {
    vimg[format_vertex(v)] = format_vertex(img);
  }
  m["vertices"] = vimg;
  Json eimg;
  for (const auto& [e, img] : s.map.edge_images) {
    eimg[format_edge(e)] = format_path(img);
  }
  m["edges"] = eimg;
  j["map"] = m;
  return j;
}

inline EpgSystem system_from_json(const Json& j) {
  using io_detail::as_string;
  using io_detail::field;
  EpgSystem s;
  s.graph.core = io_detail::graph_from_json(field(j, "core", "document"), "core");
  for (const auto& e : field(j, "ends", "document")) {
    EndPresentation end;
    end.id = as_string(field(e, "id", "end"), "end id");
    end.domain = io_detail::graph_from_json(field(e, "domain", "end"), "end domain");
    for (const auto& v : field(e, "inner", "end")) end.inner.push_back(as_string(v, "inner vertex"));
    for (const auto& v : field(e, "outer", "end")) end.outer.push_back(as_string(v, "outer vertex"));
    for (const auto& [k, v] : field(e, "attach", "end").items()) {
      end.attach[k] = as_string(v, "attach target");
    }
    for (const auto& [k, v] : field(e, "core_attach", "end").items()) {
      end.core_attach[k] = as_string(v, "core attach target");
    }
    s.graph.ends.push_back(std::move(end));
  }
  const Json& m = field(j, "map", "document");
  const Json& depth = field(m, "depth", "map");
  if (!depth.is_number_integer()) {
    throw Error(ErrorKind::InvalidInput, "map depth must be an integer");
  }
  s.map.depth = depth.get<int>();
  for (const auto& [k, v] : field(m, "end_targets", "map").items()) {
    s.map.end_targets[k] = as_string(v, "end target");
  }
  for (const auto& [k, v] : field(m, "vertices", "map").items()) {
    s.map.vertex_images[parse_vertex(k)] = parse_vertex(as_string(v, "vertex image"));
  }
  for (const auto& [k, v] : field(m, "edges", "map").items()) {
    s.map.edge_images[parse_edge(k)] = parse_path(as_string(v, "edge image"));
  }
  validate_system(s);
  return s;
}

inline Json corr_to_json(const Corr& c) {
  Json j;
  Json ce = Json::object();
  for (const auto& [id, img] : c.core_edges) ce[id] = format_path(img);
  j["core_edges"] = ce;
  Json ee = Json::object();
  for (const auto& [key, img] : c.end_edges) ee[key.first][key.second] = format_path(img);
  j["end_edges"] = ee;
  Json cv = Json::object();
  for (const auto& [id, v] : c.core_vertices) cv[id] = format_vertex(v);
  j["core_vertices"] = cv;
  Json ev = Json::object();
  for (const auto& [key, v] : c.end_vertices) ev[key.first][key.second] = format_vertex(v);
  j["end_vertices"] = ev;
  return j;
}

// Canonical text form: two-space indented JSON with sorted keys and a
// trailing newline.  Serializing a deserialized document is byte-identical.
inline std::string serialize(const EpgSystem& s) { return to_json(s).dump(2) + "\n"; }

inline EpgSystem deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("not valid JSON: ") + e.what());
  }
  return system_from_json(j);
}

inline EpgSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

inline void save_system(const std::string& path, const EpgSystem& s) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  }
  out << serialize(s);
}

}  // namespace epg
