#include "gurarij/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gurarij/error.hpp"

namespace gurarij::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::io_error, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double as_number(const json& j) {
  if (!j.is_number()) bad("expected a number, got " + j.dump());
  return j.get<double>();
}

}  // namespace

json round12(json j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    double r = std::strtod(buf, nullptr);
    if (r == 0.0) r = 0.0;  // no negative zero
    return r;
  }
  if (j.is_array() || j.is_object())
    for (auto& v : j) v = round12(std::move(v));
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const json& j) { return round12(j).dump(2); }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) bad("cannot write '" + path.string() + "'");
  out << dump(j) << '\n';
  if (!out) bad("write to '" + path.string() + "' failed");
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  Vector v;
  for (const auto& x : j) v.push_back(as_number(x));
  return v;
}

std::vector<Vector> vectors_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of arrays");
  std::vector<Vector> out;
  for (const auto& x : j) out.push_back(vector_from_json(x));
  return out;
}

Vector parse_vector(const std::string& text) {
  Vector v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw Error(ErrorCode::invalid_input, "cannot parse number '" + tok + "'");
    while (*end == ' ') ++end;
    if (*end != '\0') throw Error(ErrorCode::invalid_input, "cannot parse number '" + tok + "'");
    v.push_back(x);
  }
  if (v.empty()) throw Error(ErrorCode::invalid_input, "empty vector");
  return v;
}

std::vector<Vector> parse_vectors(const std::string& text) {
  std::vector<Vector> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ';')) out.push_back(parse_vector(tok));
  return out;
}

json space_to_json(const space::PolyNormedSpace& s) {
  return {{"label", s.label()},
          {"dim", s.dim()},
          {"dual_generators", s.listed_generators()},
          {"symmetric_closure", s.symmetric_closure()}};
}

json space_summary(const space::NormedSpace& s) {
  if (const auto* p = dynamic_cast<const space::PolyNormedSpace*>(&s)) return space_to_json(*p);
  json j = {{"label", s.label()}, {"dim", s.dim()}, {"explicit", false}, {"positive_definite", s.positive_definite()}};
  if (const auto* o = dynamic_cast<const space::OracleNormedSpace*>(&s))
    j["provenance"] = {{"kind", o->provenance().kind}, {"detail", o->provenance().detail}, {"round", o->provenance().round}};
  j["dual_ball_rows"] = s.dual_ball().rows.size();
  return j;
}

SpacePtr space_from_json(const json& j, const SpaceLookup& lookup) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.rfind("l1:", 0) == 0 || s.rfind("linf:", 0) == 0) return space::parse_inline(s);
    if (lookup) return lookup(s);
    bad("unknown space reference '" + s + "'");
  }
  if (j.is_object()) {
    if (j.contains("explicit") && j["explicit"] == false) bad("oracle space summaries cannot be loaded directly");
    const auto label = field(j, "label").get<std::string>();
    const auto dim = field(j, "dim").get<std::size_t>();
    auto gens = vectors_from_json(field(j, "dual_generators"));
    const bool closure = j.value("symmetric_closure", true);
    for (const auto& g : gens)
      if (g.size() != dim) throw Error(ErrorCode::dimension_mismatch, "generator length differs from dim");
    auto s = std::make_shared<space::PolyNormedSpace>(label, dim, std::move(gens), closure);
    auto viol = space::validate(*s);
    if (!viol.empty()) throw Error(ErrorCode::invalid_generators, viol.front().kind + ": " + viol.front().detail);
    return s;
  }
  bad("space reference must be a string or a space object");
}

json katetov_to_json(const katetov::ConvexKatetovEnvelope& ck, const json& space_ref) {
  return {{"space", space_ref}, {"support", ck.points()}, {"values", ck.values()}, {"canonical", true}};
}

json katetov_to_json(const katetov::FiniteKatetov& fk, const json& space_ref) {
  return {{"space", space_ref}, {"support", fk.support}, {"values", fk.values}, {"canonical", false}};
}

katetov::FiniteKatetov katetov_from_json(const json& j, const SpaceLookup& lookup) {
  katetov::FiniteKatetov fk;
  fk.space = space_from_json(field(j, "space"), lookup);
  fk.support = vectors_from_json(field(j, "support"));
  fk.values = vector_from_json(field(j, "values"));
  if (fk.support.size() != fk.values.size())
    throw Error(ErrorCode::length_mismatch, "support and values have different lengths");
  for (const auto& y : fk.support) space::check_dim(*fk.space, y, "support point");
  return fk;
}

katetov::ConvexKatetovEnvelope envelope_from_json(const json& j, const SpaceLookup& lookup) {
  auto fk = katetov_from_json(j, lookup);
  if (j.value("canonical", false)) return {fk.space, fk.support, fk.values};
  return katetov::convexify(fk);
}

json metric_to_json(const aells::PointedFiniteMetric& m) {
  return {{"labels", m.labels}, {"distances", m.d}, {"base", m.labels.at(m.base)}};
}

aells::PointedFiniteMetric metric_from_json(const json& j) {
  aells::PointedFiniteMetric m;
  m.labels = field(j, "labels").get<std::vector<std::string>>();
  for (const auto& row : field(j, "distances")) m.d.push_back(vector_from_json(row));
  m.base = m.index(field(j, "base").get<std::string>());
  aells::validate(m);
  return m;
}

json molecule_to_json(const MoleculeFile& mf) {
  json entries = json::object();
  for (const auto& [k, v] : mf.molecule) entries[k] = v;
  return {{"metric", metric_to_json(mf.metric)}, {"entries", entries}};
}

MoleculeFile molecule_from_json(const json& j) {
  MoleculeFile mf;
  mf.metric = metric_from_json(field(j, "metric"));
  for (const auto& [k, v] : field(j, "entries").items()) {
    mf.metric.index(k);
    mf.molecule[k] = as_number(v);
  }
  return mf;
}

json relative_to_json(const aells::RelativeSpaceOverE& rs, const json& base_ref) {
  json adj = json::array();
  for (const auto& ck : rs.adjoined) adj.push_back(katetov_to_json(ck, base_ref));
  return {{"base_space", base_ref}, {"adjoined", adj}};
}

aells::RelativeSpaceOverE relative_from_json(const json& j) {
  aells::RelativeSpaceOverE rs;
  rs.base = space_from_json(field(j, "base_space"));
  const SpacePtr base = rs.base;
  const std::string base_label = base->label();
  // adjoined files may name the base by label or repeat it inline
  SpaceLookup lookup = [base, base_label](const std::string& s) -> SpacePtr {
    if (s == base_label) return base;
    bad("adjoined envelope refers to unknown space '" + s + "'");
  };
  for (const auto& k : field(j, "adjoined")) {
    auto ck = envelope_from_json(k, lookup);
    if (ck.space()->label() == base_label) ck = katetov::ConvexKatetovEnvelope(base, ck.points(), ck.values());
    rs.adjoined.push_back(std::move(ck));
  }
  aells::validate(rs);
  return rs;
}

json group_to_json(const universal::FiniteGroupPresentation& g) {
  json table = json::array();
  for (const auto& row : g.table) {
    json r = json::array();
    for (auto c : row) r.push_back(g.elements[c]);
    table.push_back(r);
  }
  json gens = json::object();
  for (const auto& [k, w] : g.generators) gens[k] = w;
  return {{"elements", g.elements}, {"table", table}, {"identity", g.elements.at(g.identity)}, {"generators", gens}};
}

universal::FiniteGroupPresentation group_from_json(const json& j) {
  universal::FiniteGroupPresentation g;
  g.elements = field(j, "elements").get<std::vector<std::string>>();
  for (const auto& row : field(j, "table")) {
    std::vector<std::size_t> r;
    for (const auto& c : row) r.push_back(g.index(c.get<std::string>()));
    g.table.push_back(std::move(r));
  }
  g.identity = g.index(field(j, "identity").get<std::string>());
  for (const auto& [k, v] : field(j, "generators").items()) g.generators[k] = as_number(v);
  universal::validate(g);
  return g;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

Matrix matrix_from_json(const json& j) {
  auto rows = vectors_from_json(j);
  if (rows.empty()) bad("empty matrix");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) bad("ragged matrix");
  return Matrix::from_rows(rows);
}

json manifest_to_json(const tower::BuildState& state, const tower::BuildParams& params) {
  const auto* start = dynamic_cast<const space::PolyNormedSpace*>(params.start.get());
  if (!start) throw Error(ErrorCode::invalid_input, "manifests need an explicit start space");
  json sym = json::array();
  for (const auto& g : params.symmetry) sym.push_back(matrix_to_json(g));
  json rounds = json::array(), spaces = json::array(), adjoined = json::array();
  for (const auto& s : state.chain) spaces.push_back(space_summary(*s));
  for (std::size_t n = 0; n < state.log.size(); ++n) {
    rounds.push_back({{"round", n},
                      {"seed", state.seed_trace.at(n)},
                      {"radius", params.radius(n)},
                      {"adjoined", state.log[n].size()},
                      {"space", state.chain[n + 1]->label()}});
    for (const auto& ck : state.log[n]) {
      json k = katetov_to_json(ck, state.chain[n]->label());
      k["round"] = n;
      adjoined.push_back(std::move(k));
    }
  }
  return {{"tool", "gurarij"},
          {"version", kVersion},
          {"seed", params.seed},
          {"params",
           {{"rounds", params.rounds},
            {"envelopes_per_round", params.envelopes_per_round},
            {"support_size", params.support_size},
            {"radii", params.radii}}},
          {"start_space", space_to_json(*start)},
          {"symmetry", sym},
          {"rounds", rounds},
          {"spaces", spaces},
          {"adjoined", adjoined}};
}

LoadedManifest manifest_from_json(const json& j) {
  LoadedManifest lm;
  auto& p = lm.params;
  p.start = space_from_json(field(j, "start_space"));
  p.seed = field(j, "seed").get<std::uint64_t>();
  const auto& pj = field(j, "params");
  p.rounds = field(pj, "rounds").get<std::size_t>();
  p.envelopes_per_round = field(pj, "envelopes_per_round").get<std::size_t>();
  p.support_size = field(pj, "support_size").get<std::size_t>();
  p.radii = vector_from_json(field(pj, "radii"));
  for (const auto& m : j.value("symmetry", json::array())) p.symmetry.push_back(matrix_from_json(m));
  tower::validate(p);

  const auto& rounds = field(j, "rounds");
  std::vector<std::vector<tower::LoggedEnvelope>> log(rounds.size());
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rounds) seeds.push_back(field(r, "seed").get<std::uint64_t>());
  for (const auto& k : field(j, "adjoined")) {
    const auto n = field(k, "round").get<std::size_t>();
    if (n >= log.size()) bad("adjoined envelope names a round that is not logged");
    tower::LoggedEnvelope le{vectors_from_json(field(k, "support")), vector_from_json(field(k, "values"))};
    if (le.points.size() != le.values.size())
      throw Error(ErrorCode::length_mismatch, "support and values differ in length");
    log[n].push_back(std::move(le));
  }
  lm.state = tower::replay(p.start, log, seeds, p.symmetry);
  return lm;
}

}  // namespace gurarij::io
