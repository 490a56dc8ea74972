#include "hgp/case_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hgp/errors.hpp"

namespace hgp {

using nlohmann::json;

namespace {

constexpr double kTonsPerHourToKgPerS = 1000.0 / 3600.0;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw InputError(origin + ": " + msg);
}

const json& need(const json& obj, const char* key, const std::string& origin,
                 const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    fail(origin, where + ": missing required field '" + key + "'");
  return obj.at(key);
}

double need_number(const json& obj, const char* key, const std::string& origin,
                   const std::string& where) {
  const json& v = need(obj, key, origin, where);
  if (!v.is_number()) fail(origin, where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double mass_flow_kg_s(const json& obj, const std::string& origin,
                      const std::string& where) {
  const bool tph = obj.contains("mass_flow_t_per_h");
  const bool kgs = obj.contains("mass_flow_kg_per_s");
  if (tph == kgs)
    fail(origin, where +
                     ": give exactly one of mass_flow_t_per_h / mass_flow_kg_per_s");
  return tph ? obj.at("mass_flow_t_per_h").get<double>() * kTonsPerHourToKgPerS
             : obj.at("mass_flow_kg_per_s").get<double>();
}

Side parse_side(const std::string& s, const std::string& origin, const std::string& where) {
  if (s == "supply" || s == "S") return Side::Supply;
  if (s == "return" || s == "R") return Side::Return;
  fail(origin, where + ": side must be 'supply' or 'return', got '" + s + "'");
}

/// Per-period series: scalar broadcast or array of length T.
std::vector<double> series(const json& v, int periods, const std::string& origin,
                           const std::string& where) {
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(periods, v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) fail(origin, where + ": series entries must be numbers");
      out.push_back(x.get<double>());
    }
    if (static_cast<int>(out.size()) != periods)
      fail(origin, where + ": series has " + std::to_string(out.size()) +
                       " entries, expected " + std::to_string(periods));
  } else {
    fail(origin, where + ": expected a number or an array of numbers");
  }
  return out;
}

}  // namespace

CaseDefinition parse_case(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) fail(origin, "root must be a JSON object describing a case");

  const TempUnit file_unit =
      root.contains("unit") ? parse_unit(root.at("unit").get<std::string>())
                            : TempUnit::Celsius;
  auto to_c = [&](double v) {
    return convert_temperature(v, file_unit, TempUnit::Celsius);
  };

  const int periods = static_cast<int>(need_number(root, "periods", origin, "case"));
  const double dt_s = need_number(root, "delta_t_s", origin, "case");

  double heat_capacity = 4182.0, density = 1000.0;
  if (root.contains("water")) {
    const json& w = root.at("water");
    heat_capacity = need_number(w, "heat_capacity_j_per_kg_c", origin, "water");
    density = need_number(w, "density_kg_per_m3", origin, "water");
  }

  // nodes -> dense indices
  const json& jnodes = need(root, "nodes", origin, "case");
  if (!jnodes.is_array() || jnodes.empty())
    fail(origin, "'nodes' must be a non-empty array");
  std::map<long long, int> node_index;
  std::vector<std::string> node_names;
  std::vector<NodeKind> node_kinds;
  for (const auto& jn : jnodes) {
    const long long id = static_cast<long long>(need_number(jn, "id", origin, "node"));
    if (node_index.count(id)) fail(origin, "duplicate node id " + std::to_string(id));
    const std::string kind = need(jn, "kind", origin, "node").get<std::string>();
    if (kind != "source" && kind != "load")
      fail(origin, "node " + std::to_string(id) + ": kind must be 'source' or 'load'");
    node_index[id] = static_cast<int>(node_names.size());
    node_names.push_back(jn.contains("name") ? jn.at("name").get<std::string>()
                                             : "N" + std::to_string(id));
    node_kinds.push_back(kind == "source" ? NodeKind::Source : NodeKind::Load);
  }
  const int n = static_cast<int>(node_names.size());
  auto node_of = [&](const json& obj, const char* key, const std::string& where) {
    const long long id = static_cast<long long>(need_number(obj, key, origin, where));
    auto it = node_index.find(id);
    if (it == node_index.end())
      fail(origin, where + ": unknown node id " + std::to_string(id));
    return it->second;
  };

  // locations: supply = 2i, return = 2i+1
  std::vector<Location> locations;
  for (int i = 0; i < n; ++i) {
    locations.push_back(Location{2 * i, i, Side::Supply});
    locations.push_back(Location{2 * i + 1, i, Side::Return});
  }
  auto loc_of = [&](int node, Side side) { return 2 * node + (side == Side::Return); };

  // branches: pipes in file order, then exchangers
  std::vector<Branch> branches;
  const json& jpipes = need(root, "pipes", origin, "case");
  for (const auto& jp : jpipes) {
    Branch br;
    br.id = static_cast<int>(branches.size());
    br.name = jp.contains("id") ? jp.at("id").get<std::string>()
                                : "p" + std::to_string(br.id);
    br.kind = BranchKind::Pipe;
    const std::string where = "pipe '" + br.name + "'";
    const Side side = parse_side(need(jp, "network", origin, where).get<std::string>(),
                                 origin, where);
    br.from_location = loc_of(node_of(jp, "from_node", where), side);
    br.to_location = loc_of(node_of(jp, "to_node", where), side);
    br.length_m = need_number(jp, "length_m", origin, where);
    br.cross_section_m2 = need_number(jp, "cross_section_m2", origin, where);
    br.heat_transfer_w_per_m_c = need_number(jp, "heat_loss_w_per_m_c", origin, where);
    br.mass_flow_kg_s = mass_flow_kg_s(jp, origin, where);
    branches.push_back(br);
  }
  const json& jexch = need(root, "exchangers", origin, "case");
  for (const auto& je : jexch) {
    Branch br;
    br.id = static_cast<int>(branches.size());
    br.name = je.contains("id") ? je.at("id").get<std::string>()
                                : "x" + std::to_string(br.id);
    br.kind = BranchKind::Exchanger;
    const std::string where = "exchanger '" + br.name + "'";
    const int node = node_of(je, "node", where);
    br.mass_flow_kg_s = mass_flow_kg_s(je, origin, where);
    if (node_kinds[node] == NodeKind::Source) {
      br.from_location = loc_of(node, Side::Return);
      br.to_location = loc_of(node, Side::Supply);
    } else {
      br.from_location = loc_of(node, Side::Supply);
      br.to_location = loc_of(node, Side::Return);
    }
    branches.push_back(br);
  }

  CaseDefinition c;
  c.name = root.value("name", std::string("case"));
  c.comment = root.value("comment", std::string());
  c.network = HeatNetwork(locations, branches, heat_capacity, density);
  c.node_names = node_names;
  c.periods = periods;
  c.dt_s = dt_s;
  c.display_unit = file_unit;

  // loads
  c.loads_mw = Matrix(n, periods);
  if (root.contains("loads"))
    for (const auto& jl : root.at("loads")) {
      const int node = node_of(jl, "node", "load");
      const auto mw = series(need(jl, "mw", origin, "load"), periods, origin, "load");
      for (int t = 0; t < periods; ++t) c.loads_mw(node, t) += mw[t];
    }

  // sources
  if (root.contains("sources"))
    for (const auto& js : root.at("sources")) {
      SourceSpec s;
      s.node = node_of(js, "node", "source");
      const std::string kind = need(js, "kind", origin, "source").get<std::string>();
      if (kind == "chp" || kind == "CHP")
        s.kind = SourceKind::Chp;
      else if (kind == "boiler")
        s.kind = SourceKind::Boiler;
      else
        fail(origin, "source kind must be 'chp' or 'boiler', got '" + kind + "'");
      s.linear_usd_per_mwh = need_number(js, "linear_usd_per_mwh", origin, "source");
      s.quadratic_usd_per_mw2h =
          need_number(js, "quadratic_usd_per_mw2h", origin, "source");
      s.g_min_mw = need_number(js, "g_min_mw", origin, "source");
      s.g_max_mw = need_number(js, "g_max_mw", origin, "source");
      c.sources.push_back(s);
    }
  std::sort(c.sources.begin(), c.sources.end(),
            [](const SourceSpec& a, const SourceSpec& b) { return a.node < b.node; });

  // ambient: scalar / series / per-location map
  c.ambient_c = Matrix(2 * n, periods);
  const json& jamb = need(root, "ambient", origin, "case");
  if (jamb.is_object()) {
    for (int i = 0; i < n; ++i)
      for (Side side : {Side::Supply, Side::Return}) {
        const std::string key =
            std::to_string(static_cast<long long>(jnodes[i].at("id").get<double>())) +
            (side == Side::Supply ? "S" : "R");
        if (!jamb.contains(key))
          fail(origin, "ambient map is missing location '" + key + "'");
        const auto vals = series(jamb.at(key), periods, origin, "ambient." + key);
        for (int t = 0; t < periods; ++t)
          c.ambient_c(loc_of(i, side), t) = to_c(vals[t]);
      }
  } else {
    const auto vals = series(jamb, periods, origin, "ambient");
    for (int l = 0; l < 2 * n; ++l)
      for (int t = 0; t < periods; ++t) c.ambient_c(l, t) = to_c(vals[t]);
  }

  // requirements (others defaulted below)
  if (root.contains("requirements"))
    for (const auto& jr : root.at("requirements")) {
      TemperatureRequirement r;
      const int node = node_of(jr, "node", "requirement");
      const Side side =
          parse_side(need(jr, "side", origin, "requirement").get<std::string>(), origin,
                     "requirement");
      r.location = loc_of(node, side);
      r.min_c = to_c(need_number(jr, "min", origin, "requirement"));
      r.max_c = to_c(need_number(jr, "max", origin, "requirement"));
      c.requirements.push_back(r);
    }
  apply_default_requirements(c);

  // initial temperatures, keyed "<node-id>S"/"<node-id>R"
  const json& jinit = need(root, "initial_temperatures", origin, "case");
  c.initial_temperatures_c.assign(2 * n, 0.0);
  for (const auto& jn : jnodes) {
    const long long id = static_cast<long long>(jn.at("id").get<double>());
    const int node = node_index.at(id);
    for (Side side : {Side::Supply, Side::Return}) {
      const std::string key =
          std::to_string(id) + (side == Side::Supply ? "S" : "R");
      if (!jinit.contains(key))
        fail(origin, "initial_temperatures is missing location '" + key + "'");
      c.initial_temperatures_c[loc_of(node, side)] =
          to_c(jinit.at(key).get<double>());
    }
  }

  // fatal diagnostics (the CLI surfaces them all at once)
  const auto diags = validate_case(c);
  if (!diags.empty()) {
    std::ostringstream msg;
    msg << "case validation failed with " << diags.size() << " diagnostic(s):";
    for (const auto& d : diags) msg << "\n  [" << d.code << "] " << d.message;
    fail(origin, msg.str());
  }
  return c;
}

CaseDefinition load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str(), path);
}

std::string case_to_json(const CaseDefinition& c, TempUnit unit) {
  json root;
  root["name"] = c.name;
  if (!c.comment.empty()) root["comment"] = c.comment;
  root["unit"] = unit_name(unit);
  root["periods"] = c.periods;
  root["delta_t_s"] = c.dt_s;
  root["water"] = {{"heat_capacity_j_per_kg_c", c.network.water_heat_capacity()},
                   {"density_kg_per_m3", c.network.water_density()}};
  auto from_c = [&](double v) {
    return convert_temperature(v, TempUnit::Celsius, unit);
  };

  const int n = c.network.node_count();
  json jnodes = json::array();
  for (int i = 0; i < n; ++i)
    jnodes.push_back({{"id", i + 1},
                      {"name", c.node_name(i)},
                      {"kind", c.network.node_kind(i) == NodeKind::Source ? "source"
                                                                          : "load"}});
  root["nodes"] = jnodes;

  auto loc_key = [&](int location) {
    const Location& loc = c.network.locations()[location];
    return std::to_string(loc.node_id + 1) + (loc.side == Side::Supply ? "S" : "R");
  };

  json jpipes = json::array(), jexch = json::array();
  for (const Branch& br : c.network.branches()) {
    if (br.kind == BranchKind::Pipe) {
      const Location& from = c.network.locations()[br.from_location];
      const Location& to = c.network.locations()[br.to_location];
      jpipes.push_back({{"id", br.name},
                        {"network", from.side == Side::Supply ? "supply" : "return"},
                        {"from_node", from.node_id + 1},
                        {"to_node", to.node_id + 1},
                        {"length_m", br.length_m},
                        {"cross_section_m2", br.cross_section_m2},
                        {"heat_loss_w_per_m_c", br.heat_transfer_w_per_m_c},
                        {"mass_flow_kg_per_s", br.mass_flow_kg_s}});
    } else {
      const Location& from = c.network.locations()[br.from_location];
      jexch.push_back({{"id", br.name},
                       {"node", from.node_id + 1},
                       {"mass_flow_kg_per_s", br.mass_flow_kg_s}});
    }
  }
  root["pipes"] = jpipes;
  root["exchangers"] = jexch;

  json jsources = json::array();
  for (const SourceSpec& s : c.sources)
    jsources.push_back({{"node", s.node + 1},
                        {"kind", s.kind == SourceKind::Chp ? "chp" : "boiler"},
                        {"linear_usd_per_mwh", s.linear_usd_per_mwh},
                        {"quadratic_usd_per_mw2h", s.quadratic_usd_per_mw2h},
                        {"g_min_mw", s.g_min_mw},
                        {"g_max_mw", s.g_max_mw}});
  root["sources"] = jsources;

  json jloads = json::array();
  for (int i = 0; i < n; ++i) {
    if (c.network.node_kind(i) != NodeKind::Load) continue;
    json mw = json::array();
    for (int t = 0; t < c.periods; ++t) mw.push_back(c.loads_mw(i, t));
    jloads.push_back({{"node", i + 1}, {"mw", mw}});
  }
  root["loads"] = jloads;

  json jreq = json::array();
  for (const TemperatureRequirement& r : c.requirements) {
    const Location& loc = c.network.locations()[r.location];
    jreq.push_back({{"node", loc.node_id + 1},
                    {"side", loc.side == Side::Supply ? "supply" : "return"},
                    {"min", from_c(r.min_c)},
                    {"max", from_c(r.max_c)}});
  }
  root["requirements"] = jreq;

  json jamb = json::object();
  for (int l = 0; l < c.network.location_count(); ++l) {
    json ser = json::array();
    for (int t = 0; t < c.periods; ++t) ser.push_back(from_c(c.ambient_c(l, t)));
    jamb[loc_key(l)] = ser;
  }
  root["ambient"] = jamb;

  json jinit = json::object();
  for (int l = 0; l < c.network.location_count(); ++l)
    jinit[loc_key(l)] = from_c(c.initial_temperatures_c[l]);
  root["initial_temperatures"] = jinit;

  return root.dump(2) + "\n";
}

void save_case(const CaseDefinition& c, const std::string& path, TempUnit unit) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << case_to_json(c, unit);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hgp
