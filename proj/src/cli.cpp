#include "gurarij/cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "gurarij/acceptance.hpp"
#include "gurarij/aells.hpp"
#include "gurarij/amalgam.hpp"
#include "gurarij/error.hpp"
#include "gurarij/io.hpp"
#include "gurarij/katetov.hpp"
#include "gurarij/tower.hpp"
#include "gurarij/universal.hpp"

namespace gurarij::cli {

namespace fs = std::filesystem;
using io::json;
using space::SpacePtr;

namespace {

struct Config {
  std::string space = "l1:2";
  std::vector<std::string> in;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t rounds = 1;
  std::vector<double> radius;
  double epsilon = 0.1;
  double tolerance = 1e-8;
  std::string format = "json";

  // per-command
  std::string vector, other_vector, points, group = "z2";
  double alpha = 1.0, beta = 0.0, distance = -1.0, weight = 1.0;
  std::size_t k = 2, per_pair = 64, envelopes = 2, support = 3;
  bool exact = false;
  bool seed_given = false;
  std::vector<int> only;
};

struct Outcome {
  json result = json::object();
  int code = kExitOk;
};

// Files referenced from inside other files resolve against the cwd first,
// then against the directory of the referencing file.
io::SpaceLookup file_lookup(const fs::path& from) {
  return [from](const std::string& ref) -> SpacePtr {
    fs::path p = ref;
    if (!fs::exists(p) && !from.empty()) p = from.parent_path() / ref;
    if (!fs::exists(p)) throw Error(ErrorCode::invalid_input, "unknown space reference '" + ref + "'");
    return io::space_from_json(io::read_json(p), file_lookup(p));
  };
}

SpacePtr load_space(const std::string& ref) { return io::space_from_json(json(ref), file_lookup({})); }

const std::string& need_in(const Config& c, std::size_t n) {
  if (c.in.size() <= n) throw Error(ErrorCode::invalid_input, "expected " + std::to_string(n + 1) + " --in file(s)");
  return c.in[n];
}

json load_in(const Config& c, std::size_t n = 0) { return io::read_json(need_in(c, n)); }

katetov::FiniteKatetov load_katetov(const Config& c, std::size_t n = 0) {
  return io::katetov_from_json(load_in(c, n), file_lookup(need_in(c, n)));
}

katetov::ConvexKatetovEnvelope load_envelope(const Config& c, std::size_t n = 0) {
  return io::envelope_from_json(load_in(c, n), file_lookup(need_in(c, n)));
}

Vector need_vector(const std::string& text, const char* flag) {
  if (text.empty()) throw Error(ErrorCode::invalid_input, std::string("missing ") + flag);
  return io::parse_vector(text);
}

json violations_json(const std::vector<katetov::KatetovViolation>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"kind", x.kind}, {"i", x.i}, {"j", x.j}, {"excess", x.excess}});
  return out;
}

Outcome katetov_violation_outcome(const std::vector<katetov::KatetovViolation>& v) {
  Outcome o;
  o.result = {{"katetov", false}, {"violations", violations_json(v)}};
  o.result["error"] = {{"code", "invariant-violation"},
                       {"message", std::to_string(v.size()) + " Katetov inequality violation(s)"}};
  o.code = kExitDomain;
  return o;
}

// --- commands ---------------------------------------------------------------

Outcome norm_eval(const Config& c) {
  auto s = load_space(c.space);
  auto w = s->norm_with_functional(need_vector(c.vector, "--vector"));
  return {{{"value", w.value}, {"functional", w.functional}}};
}

Outcome dual_norm(const Config& c) {
  auto s = load_space(c.space);
  return {{{"value", space::dual_norm(*s, need_vector(c.vector, "--vector"))}}};
}

Outcome katetov_check(const Config& c) {
  auto fk = load_katetov(c);
  auto v = katetov::is_katetov(fk, c.tolerance);
  if (!v.empty()) return katetov_violation_outcome(v);
  return {{{"katetov", true}, {"violations", json::array()}, {"support_size", fk.support.size()}}};
}

Outcome katetov_extend(const Config& c) {
  auto fk = load_katetov(c);
  if (c.points.empty()) throw Error(ErrorCode::invalid_input, "missing --points");
  json vals = json::array();
  for (const auto& x : io::parse_vectors(c.points)) vals.push_back(katetov::extend_min_plus(fk, x));
  return {{{"values", vals}}};
}

Outcome katetov_convexify(const Config& c) {
  const json j = load_in(c);
  auto fk = io::katetov_from_json(j, file_lookup(need_in(c, 0)));
  auto v = katetov::is_katetov(fk, c.tolerance);
  if (!v.empty()) return katetov_violation_outcome(v);
  auto ck = katetov::convexify(fk);
  json file = io::katetov_to_json(ck, j["space"]);
  if (!c.out.empty()) io::write_json(c.out, file);
  return {{{"envelope", file}, {"lowered", [&] {
             std::size_t n = 0;
             for (std::size_t i = 0; i < fk.values.size(); ++i) n += ck.values()[i] < fk.values[i] - 1e-12;
             return n;
           }()}}};
}

Outcome katetov_dist(const Config& c) {
  return {{{"value", katetov::sup_distance(load_envelope(c, 0), load_envelope(c, 1))}}};
}

Outcome katetov_one_point(const Config& c) {
  auto ck = load_envelope(c);
  return {{{"value", katetov::one_point_norm(ck, c.alpha, need_vector(c.vector, "--vector"))}}};
}

Outcome amalgam_bounds(const Config& c) {
  auto b = amalgam::amalgam_bounds(load_envelope(c, 0), load_envelope(c, 1));
  return {{{"r0", b.r0}, {"r1", b.r1}}};
}

Outcome amalgam_norm(const Config& c) {
  auto ck0 = load_envelope(c, 0), ck1 = load_envelope(c, 1);
  const double r = c.distance >= 0.0 ? c.distance : amalgam::amalgam_bounds(ck0, ck1).r1;
  auto tpe = amalgam::make_two_point(ck0, ck1, r);
  const double v = amalgam::two_point_norm(tpe, need_vector(c.vector, "--vector"), c.alpha, c.beta);
  return {{{"value", v}, {"r", r}, {"r0", tpe.bounds.r0}, {"r1", tpe.bounds.r1}, {"t", tpe.t}}};
}

struct HensonInput {
  SpacePtr e, f;
  std::vector<Vector> xs, ys;
  double r = -1.0;
};

HensonInput load_henson(const Config& c) {
  const json j = load_in(c);
  auto lookup = file_lookup(need_in(c, 0));
  HensonInput h;
  h.e = io::space_from_json(j.at("e"), lookup);
  h.f = io::space_from_json(j.at("f"), lookup);
  h.xs = io::vectors_from_json(j.at("xs"));
  h.ys = io::vectors_from_json(j.at("ys"));
  if (j.contains("r")) h.r = j["r"].get<double>();
  return h;
}

Outcome henson_dist(const Config& c) {
  auto h = load_henson(c);
  if (c.exact) {
    auto ex = amalgam::henson_distance_exact(h.e, h.xs, h.f, h.ys);
    return {{{"value", ex.result.value}, {"direction", ex.result.direction}, {"e_side", ex.result.e_side},
             {"exactly_zero", ex.is_zero}}};
  }
  auto r = amalgam::henson_distance(h.e, h.xs, h.f, h.ys);
  return {{{"value", r.value}, {"direction", r.direction}, {"e_side", r.e_side}}};
}

Outcome henson_amalgam_norm(const Config& c) {
  auto h = load_henson(c);
  double r = c.distance >= 0.0 ? c.distance : h.r;
  if (r < 0.0) r = amalgam::henson_distance(h.e, h.xs, h.f, h.ys).value;
  amalgam::TupleAmalgam ta{h.e, h.f, h.xs, h.ys, r};
  const Vector ze = need_vector(c.vector, "--vector"), zf = need_vector(c.other_vector, "--other-vector");
  return {{{"value", amalgam::tuple_amalgam_norm(ta, ze, zf)}, {"r", r}}};
}

Outcome ae_norm(const Config& c) {
  auto mf = io::molecule_from_json(load_in(c));
  auto r = aells::ae_norm(mf.metric, mf.molecule);
  json plan = json::array();
  for (const auto& a : r.plan)
    plan.push_back({{"from", mf.metric.labels[a.from]}, {"to", mf.metric.labels[a.to]}, {"mass", a.mass}});
  json witness = json::object();
  for (std::size_t i = 0; i < r.witness.size(); ++i) witness[mf.metric.labels[i]] = r.witness[i];
  return {{{"value", r.value}, {"dual_value", r.dual_value}, {"plan", plan}, {"witness", witness}}};
}

Outcome ae_extend_lip(const Config& c) {
  const json j = load_in(c);
  auto m = io::metric_from_json(j.at("metric"));
  std::map<std::string, double> partial;
  for (const auto& [k, v] : j.at("partial").items()) partial[k] = v.get<double>();
  auto ext = aells::lipschitz_extend(m, partial, j.value("L", 1.0));
  json vals = json::object();
  for (std::size_t i = 0; i < ext.size(); ++i) vals[m.labels[i]] = ext[i];
  return {{{"values", vals}}};
}

Outcome ae_relative_norm(const Config& c) {
  auto rs = io::relative_from_json(load_in(c));
  const Vector a = need_vector(c.vector, "--vector");
  const Vector al = need_vector(c.other_vector, "--other-vector");
  return {{{"value", aells::relative_ae_norm(rs, a, al)}}};
}

Outcome ae_adjoin(const Config& c) {
  auto rs = io::relative_from_json(load_in(c));
  auto s = aells::adjoin(rs);
  json file;
  if (s->dim() <= 4) {
    file = io::space_to_json(*aells::extract_explicit(*s));
  } else {
    file = io::space_summary(*s);
  }
  if (!c.out.empty()) io::write_json(c.out, file);
  return {{{"dim", s->dim()}, {"space", file}}};
}

tower::BuildParams build_params(const Config& c) {
  tower::BuildParams p;
  p.start = load_space(c.space);
  p.rounds = c.rounds;
  p.envelopes_per_round = c.envelopes;
  p.support_size = c.support;
  if (!c.radius.empty()) p.radii = c.radius;
  p.seed = c.seed;
  return p;
}

Outcome build(const Config& c) {
  auto p = build_params(c);
  auto st = tower::build(p);
  json manifest = io::manifest_to_json(st, p);
  if (!c.out.empty()) io::write_json(c.out, manifest);
  json dims = json::array();
  for (const auto& s : st.chain) dims.push_back(s->dim());
  json res = {{"dims", dims}, {"embedding_defect", tower::embedding_defect(st, 20, c.seed)}};
  if (c.out.empty()) res["manifest"] = manifest;
  return {res};
}

json extension_json(const tower::ExtensionResult& r) {
  return {{"epsilon", r.epsilon}, {"epsilon_inside", r.epsilon_inside}, {"bound", r.bound},
          {"net_points", r.net_points}, {"dim", r.space->dim()}, {"within_bound", r.epsilon <= r.bound + 1e-6}};
}

Outcome gurarij_test(const Config& c) {
  const double R = c.radius.empty() ? 3.0 : c.radius.front();
  tower::NetOptions net;
  net.per_pair = c.per_pair;
  if (!c.in.empty()) {
    // {"space": E, "basis": [...], "xi": katetov file over the coefficient space}
    const json j = load_in(c);
    auto lookup = file_lookup(need_in(c, 0));
    auto e = io::space_from_json(j.at("space"), lookup);
    auto xi = io::envelope_from_json(j.at("xi"), lookup);
    return {extension_json(tower::gurarij_extension_test(e, io::vectors_from_json(j.at("basis")), xi, R, net))};
  }
  std::mt19937_64 rng(c.seed);
  auto inst = tower::random_extension_instance(rng, c.k);
  std::vector<Vector> basis;
  for (std::size_t i = 0; i < c.k; ++i) basis.push_back(inst.psi.column(i));
  auto e = space::make_standard(space::StandardKind::linf, inst.psi.rows());
  json res = extension_json(tower::gurarij_extension_test(e, basis, inst.xi, R, net));
  res["instance"] = {{"k", c.k}, {"e_dim", inst.psi.rows()}};
  return {res};
}

Outcome perturb_constants(const Config& c) {
  SpacePtr f1;
  std::vector<Vector> basis;
  Vector v;
  if (!c.in.empty()) {
    const json j = load_in(c);
    f1 = io::space_from_json(j.at("space"), file_lookup(need_in(c, 0)));
    basis = io::vectors_from_json(j.at("basis"));
    v = io::vector_from_json(j.at("v"));
  } else {
    std::mt19937_64 rng(c.seed);
    auto inst = tower::random_extension_instance(rng, c.k);
    f1 = inst.f1;
    basis = inst.basis;
    v = inst.v;
  }
  auto pc = tower::perturbation_constants(f1, basis, v);
  return {{{"C", pc.c}, {"C_prime", pc.c_prime}, {"lower_bound", pc.lower_bound}, {"epsilon", c.epsilon},
           {"delta", pc.delta(c.epsilon)}}};
}

universal::FiniteGroupPresentation pick_group(const Config& c) {
  if (!c.in.empty()) return io::group_from_json(load_in(c));
  if (c.group == "s3") return universal::symmetric_group_3(c.weight);
  if (c.group.size() > 1 && c.group[0] == 'z') return universal::cyclic_group(std::stoul(c.group.substr(1)), c.weight);
  throw Error(ErrorCode::invalid_input, "unknown group '" + c.group + "' (z<n> or s3)");
}

Outcome teleman_demo(const Config& c) {
  auto g = pick_group(c);
  auto t = universal::teleman_embed(g);
  auto rep = universal::check_teleman(g, t);
  Outcome o;
  o.result = {{"group_order", g.size()}, {"space_dim", t.space->dim()}, {"homomorphism", rep.homomorphism},
              {"injective", rep.injective}, {"isometry_defect", rep.isometry_defect},
              {"orbit_defect", rep.orbit_defect}, {"failures", rep.failures}, {"pass", rep.pass(c.tolerance)}};
  if (!rep.pass(c.tolerance)) o.code = kExitDomain;
  return o;
}

Outcome gembed_check(const Config& c) {
  auto p = build_params(c);
  const std::size_t d = p.start->dim();
  std::vector<Matrix> gens;
  if (!c.in.empty()) {
    for (const auto& m : load_in(c).at("matrices")) gens.push_back(io::matrix_from_json(m));
  } else {
    Matrix flip = Matrix::identity(d);
    flip(0, 0) = -1.0;
    gens.push_back(flip);
  }
  p.symmetry = gens;
  auto st = tower::build(p);
  std::vector<universal::LinearIsometryWitness> action = {{Matrix::identity(d), st.chain[0]}};
  for (const auto& m : gens) action.push_back({m, st.chain[0]});
  auto rep = universal::verify_g_embedding(st, action);
  Outcome o;
  o.result = {{"top_dim", st.top()->dim()}, {"extension", rep.extension}, {"homomorphism", rep.homomorphism},
              {"injective", rep.injective}, {"modulus", rep.modulus}, {"isometry_defect", rep.isometry_defect},
              {"failures", rep.failures}, {"pass", rep.pass(c.tolerance)}};
  if (!rep.pass(c.tolerance)) o.code = kExitDomain;
  return o;
}

Outcome run_acceptance(const Config& c, std::ostream& err) {
  acceptance::Options opts;
  if (c.seed_given) opts.seed = c.seed;
  opts.only = c.only;
  bool ok = true;
  json rows = json::array();
  acceptance::run(opts, [&](const acceptance::CriterionResult& r) {
    err << acceptance::format_line(r) << std::endl;
    ok = ok && r.pass;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds},
                    {"time_limit", r.time_limit}, {"detail", r.detail}, {"metrics", r.metrics}});
  });
  Outcome o;
  o.result = {{"criteria", rows}, {"all_pass", ok}, {"suite_seed", opts.seed}};
  if (!ok) o.code = kExitInternal;
  return o;
}

// --- report emission --------------------------------------------------------

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object() || j.is_array()) {
    if (j.empty()) rows.emplace_back(prefix, j.dump());
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      const std::string key = j.is_object() ? it.key() : std::to_string(i);
      flatten(*it, prefix.empty() ? key : prefix + "." + key, rows);
    }
    return;
  }
  rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string render(const json& report, const std::string& format) {
  if (format == "json") return io::dump(report) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(io::round12(report), "", rows);
  std::string out = "key,value\n";
  for (const auto& [k, v] : rows) out += csv_field(k) + "," + csv_field(v) + "\n";
  return out;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Finite Katetov-style constructions of one-point extensions and the Gurarij tower", "gurarij"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);

  auto tolerance_check = CLI::Validator(
      [](std::string& s) -> std::string {
        const double t = std::stod(s);
        return t > 0.0 && t <= 1e-3 ? "" : "tolerance must lie in (0, 1e-3]";
      },
      "(0, 1e-3]");
  auto common = [&](CLI::App* sc) {
    sc->add_option("--space", c.space, "space: l1:d, linf:d or a space file")->capture_default_str();
    sc->add_option("--in", c.in, "input file(s)")->check(CLI::ExistingFile);
    sc->add_option("--out", c.out, "output file");
    sc->add_option("--seed", c.seed, "random seed")->capture_default_str();
    sc->add_option("--rounds", c.rounds, "tower rounds")->capture_default_str();
    sc->add_option("-R,--radius", c.radius, "ball radius R (per round for build)");
    sc->add_option("--epsilon", c.epsilon, "target epsilon")->capture_default_str();
    sc->add_option("--tolerance", c.tolerance, "numerical tolerance")->check(tolerance_check)->capture_default_str();
    sc->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    return sc;
  };

  std::function<Outcome()> handler;
  std::string command;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, auto fn) {
    auto* sc = common(parent->add_subcommand(name, desc));
    const std::string full = parent == &app ? name : parent->get_name() + " " + name;
    sc->callback([&, fn, full] {
      command = full;
      handler = [&, fn] { return fn(c); };
    });
    return sc;
  };

  leaf(&app, "norm-eval", "norm of a vector", norm_eval)->add_option("--vector", c.vector, "e.g. 3,-4");
  leaf(&app, "dual-norm", "dual norm of a functional", dual_norm)->add_option("--vector", c.vector, "functional");

  auto* kat = app.add_subcommand("katetov", "finite Katetov functions and envelopes")->require_subcommand(1);
  leaf(kat, "check", "check the Katetov inequalities", katetov_check);
  leaf(kat, "extend", "min-plus extension at points", katetov_extend)
      ->add_option("--points", c.points, "points, e.g. 0,0;1,2");
  leaf(kat, "convexify", "canonical convex envelope", katetov_convexify);
  leaf(kat, "dist", "sup distance of two envelopes", katetov_dist);
  auto* opn = leaf(kat, "one-point-norm", "||alpha x - a|| in E(x)", katetov_one_point);
  opn->add_option("--alpha", c.alpha, "coefficient of x");
  opn->add_option("--vector", c.vector, "a");

  auto* am = app.add_subcommand("amalgam", "two one-point extensions glued at distance r")->require_subcommand(1);
  leaf(am, "bounds", "admissible range [r0, r1]", amalgam_bounds);
  auto* amn = leaf(am, "norm", "||a + alpha x0 + beta x1||_r", amalgam_norm);
  amn->add_option("--vector", c.vector, "a");
  amn->add_option("--alpha", c.alpha, "coefficient of x0");
  amn->add_option("--beta", c.beta, "coefficient of x1");
  amn->add_option("--distance", c.distance, "r (default r1)");

  auto* he = app.add_subcommand("henson", "Henson distance of tuples and the tuple amalgam")->require_subcommand(1);
  leaf(he, "dist", "Henson distance", henson_dist)->add_flag("--exact", c.exact, "rational arithmetic");
  auto* han = leaf(he, "amalgam-norm", "norm of (zE, zF) in the amalgam", henson_amalgam_norm);
  han->add_option("--vector", c.vector, "E component");
  han->add_option("--other-vector", c.other_vector, "F component");
  han->add_option("--distance", c.distance, "r (default: file value or the Henson distance)");

  auto* ae = app.add_subcommand("ae", "Arens-Eells norms")->require_subcommand(1);
  leaf(ae, "norm", "Arens-Eells norm of a molecule", ae_norm);
  leaf(ae, "extend-lip", "McShane extension of a partial Lipschitz function", ae_extend_lip);
  auto* arn = leaf(ae, "relative-norm", "||a + sum alpha_i xi_i|| over E", ae_relative_norm);
  arn->add_option("--vector", c.vector, "a in E");
  arn->add_option("--other-vector", c.other_vector, "alpha");
  leaf(ae, "adjoin", "the space E[X]", ae_adjoin);

  auto* bu = leaf(&app, "build", "iterated one-point-extension tower", build);
  bu->add_option("--envelopes", c.envelopes, "envelopes per round")->capture_default_str();
  bu->add_option("--support", c.support, "support size")->capture_default_str();

  auto* gt = leaf(&app, "gurarij-test", "one-point extension epsilon against 2/(R-1)", gurarij_test);
  gt->add_option("--k", c.k, "dimension of the random instance")->capture_default_str();
  gt->add_option("--per-pair", c.per_pair, "net directions per coordinate pair")->capture_default_str();
  leaf(&app, "perturb-constants", "C, C' and delta", perturb_constants)
      ->add_option("--k", c.k, "dimension of the random instance")
      ->capture_default_str();
  auto* td = leaf(&app, "teleman-demo", "isometric action of a finite group", teleman_demo);
  td->add_option("--group", c.group, "z<n> or s3")->capture_default_str();
  td->add_option("--weight", c.weight, "generator weight")->capture_default_str();
  auto* ge = leaf(&app, "gembed-check", "g-embedding of a symmetrized build", gembed_check);
  ge->add_option("--envelopes", c.envelopes, "envelopes per round")->capture_default_str();
  ge->add_option("--support", c.support, "support size")->capture_default_str();
  auto* ac = app.add_subcommand("acceptance", "run the acceptance suite");
  common(ac)->add_option("--only", c.only, "criterion ids");
  ac->callback([&, ac] {
    command = "acceptance";
    c.seed_given = ac->count("--seed") > 0;
    handler = [&] { return run_acceptance(c, err); };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << io::kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  json report = {{"tool", "gurarij"}, {"version", io::kVersion}, {"command", command}, {"seed", c.seed},
                 {"tolerances", {{"tolerance", c.tolerance}}}};
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitOk;
  try {
    Outcome o = handler();
    report.update(o.result);
    code = o.code;
  } catch (const Error& e) {
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    const bool internal = e.code() == ErrorCode::numerical_failure || e.code() == ErrorCode::lp_failure ||
                          e.code() == ErrorCode::certificate_violation;
    code = internal ? kExitInternal : kExitDomain;
  } catch (const std::exception& e) {
    report["error"] = {{"code", "internal"}, {"message", e.what()}};
    code = kExitInternal;
  }
  report["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << render(report, c.format);
  return code;
}

}  // namespace gurarij::cli
