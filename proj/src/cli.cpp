#include "momentwave/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "momentwave/charsys.hpp"
#include "momentwave/error.hpp"
#include "momentwave/kinetic.hpp"
#include "momentwave/minkowski_tensor.hpp"
#include "momentwave/speed_solver.hpp"
#include "momentwave/subluminal.hpp"

namespace momentwave {

namespace {

using json = nlohmann::ordered_json;

constexpr int speeds_cap = 6;
constexpr int oracle_cap = 4;
constexpr int independence_cap = 4;
constexpr int tensor_rank_cap = 6;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Report {
  json doc;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  bool pass = true;
};

json rational_json(const Rational& q) {
  return json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

std::string approx_text(const Real& x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

json exact_json(const SpeedRoot& r) {
  switch (r.kind) {
    case ExactKind::rational:
      return rational_json(r.value);
    case ExactKind::sqrt_rational:
      return json{{"sqrt_of", rational_json(r.value)}, {"sign", r.sign}};
    case ExactKind::interval:
      break;
  }
  return json{{"interval", json{{"lo", rational_json(r.lo)}, {"hi", rational_json(r.hi)}}}};
}

std::string cell_text(const json& cell) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "yes" : "no";
  if (cell.is_object()) {
    if (cell.contains("num")) {
      const auto num = cell["num"].get<std::string>();
      const auto den = cell["den"].get<std::string>();
      return den == "1" ? num : num + "/" + den;
    }
    if (cell.contains("sqrt_of")) {
      return std::string(cell["sign"].get<int>() < 0 ? "-" : "") + "sqrt(" + cell_text(cell["sqrt_of"]) + ")";
    }
    if (cell.contains("interval")) {
      return "[" + cell_text(cell["interval"]["lo"]) + ", " + cell_text(cell["interval"]["hi"]) + "]";
    }
  }
  if (cell.is_null()) return "";
  return cell.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Report& rep, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json doc = rep.doc;
    json table = json::array();
    for (const auto& row : rep.rows) {
      json obj;
      for (std::size_t i = 0; i < rep.columns.size(); ++i) obj[rep.columns[i]] = row[i];
      table.push_back(obj);
    }
    doc["rows"] = table;
    os << doc.dump(2) << "\n";
  } else if (format == "csv") {
    for (std::size_t i = 0; i < rep.columns.size(); ++i) os << (i ? "," : "") << csv_escape(rep.columns[i]);
    os << "\n";
    for (const auto& row : rep.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
      os << "\n";
    }
  } else {
    for (const auto& [key, value] : rep.doc.items()) {
      if (key == "schema") continue;
      os << key << ": " << (value.is_primitive() ? cell_text(value) : value.dump()) << "\n";
    }
    if (!rep.columns.empty()) {
      std::vector<std::size_t> width(rep.columns.size());
      std::vector<std::vector<std::string>> text;
      for (std::size_t i = 0; i < rep.columns.size(); ++i) width[i] = rep.columns[i].size();
      for (const auto& row : rep.rows) {
        text.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
          text.back().push_back(cell_text(row[i]));
          width[i] = std::max(width[i], text.back().back().size());
        }
      }
      os << "\n";
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          os << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
          if (i + 1 < cells.size()) os << "  ";
        }
        os << "\n";
      };
      line(rep.columns);
      for (const auto& t : text) line(t);
    }
  }
  return os.str();
}

json new_doc(const std::string& command) {
  return json{{"schema", "momentwave/1"}, {"command", command}};
}

void require_cap(int N, int cap, bool force, const std::string& what) {
  if (N < 0) throw UsageError("N must be non-negative");
  if (N > cap && !force) {
    throw UsageError(what + " is capped at N=" + std::to_string(cap) + "; pass --force to run N=" + std::to_string(N));
  }
}

// ---------------------------------------------------------------------------
// speeds

struct SpeedsOptions {
  int N = 2;
  std::optional<int> p;
  std::string method = "reduced";
  std::string closure = "kinetic";
  std::string closure_file;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  bool force = false;
};

MomentMatrix closure_matrix(const SpeedsOptions& o) {
  if (o.closure == "kinetic") return kinetic_G_exact(o.N);
  if (o.closure == "random") {
    std::mt19937_64 rng(o.seed);
    int resamples = 0;
    return random_admissible_G(o.N, rng, resamples);
  }
  if (o.closure_file.empty()) throw UsageError("--closure file needs --closure-file PATH");
  MomentMatrix G = MomentMatrix::load(o.closure_file);
  if (G.order() != o.N) {
    throw UsageError("closure file has N=" + std::to_string(G.order()) + " but --N is " + std::to_string(o.N));
  }
  return G;
}

Report cmd_speeds(const SpeedsOptions& o) {
  require_cap(o.N, speeds_cap, o.force, "speeds");
  if (o.p && (*o.p < 0 || *o.p > o.N)) throw UsageError("--p must lie in 0..N");
  if (!(o.tol > 0)) throw UsageError("--tol must be positive");
  Report rep;
  rep.doc = new_doc("speeds");
  rep.doc["N"] = o.N;
  if (o.p) rep.doc["p"] = *o.p;
  rep.doc["method"] = o.method;
  std::optional<MomentMatrix> G;
  if (o.method == "full") {
    rep.doc["closure"] = o.closure;
    if (o.closure == "random") rep.doc["seed"] = o.seed;
    G = closure_matrix(o);
  }
  rep.columns = {"block", "weight", "speed", "approx", "multiplicity"};
  int total = 0;
  bool bounded = true;
  const int first = o.p ? *o.p : 0;
  const int last = o.p ? *o.p : o.N;
  for (int p = first; p <= last; ++p) {
    const SpeedSet set = G ? block_speeds_full(p, *G, o.tol) : block_speeds(p, o.N, o.tol);
    const int weight = block_multiplicity(p);
    for (const auto& r : set.roots) {
      rep.rows.push_back({p, weight, exact_json(r), approx_text(r.approx), r.multiplicity});
      total += weight * r.multiplicity;
      if (abs(r.approx) > 1 + Real(o.tol)) bounded = false;
    }
  }
  if (!o.p) {
    for (const auto& r : model_speeds(o.N, o.tol).roots) {
      rep.rows.push_back({"all", 1, exact_json(r), approx_text(r.approx), r.multiplicity});
    }
  }
  rep.doc["total_count"] = total;
  rep.doc["light_speed_bound"] = bounded;
  rep.pass = bounded;
  return rep;
}

// ---------------------------------------------------------------------------
// verify

Report verify_tensors(int max_rank, bool contraction_grid, bool force) {
  if (max_rank < 1) throw UsageError("--max-rank must be at least 1");
  require_cap(max_rank, tensor_rank_cap, force, "verify tensors");
  Report rep;
  rep.doc = new_doc("verify tensors");
  rep.doc["max_rank"] = max_rank;
  rep.columns = {"identity", "params", "frame", "pass", "max_component_diff", "dense_route", "note"};
  const std::vector<std::pair<std::string, FrameProjectors>> frames = {{"canonical", canonical_frame()},
                                                                       {"boosted", reference_boosted_frame()}};
  auto dense_cell = [](const TheoremReport& t) -> json {
    if (!t.dense_checked) return "skipped";
    return t.routes_agree ? "agrees" : "DISAGREES";
  };
  for (const auto& [name, frame] : frames) {
    for (int p = 2; p <= max_rank; ++p) {
      const auto t = verify_theorem1(p, frame);
      rep.rows.push_back({"trace-free projector", "p=" + std::to_string(p), name, t.pass,
                          rational_json(t.max_abs_component_diff), dense_cell(t), t.note});
      rep.pass = rep.pass && t.pass && t.routes_agree;
    }
    for (int r = 1; r <= max_rank; ++r) {
      const auto t = verify_theorem2(r, frame);
      rep.rows.push_back({"inverse expansion", "r=" + std::to_string(r), name, t.pass,
                          rational_json(t.max_abs_component_diff), dense_cell(t), t.note});
      rep.pass = rep.pass && t.pass && t.routes_agree;
    }
  }
  if (contraction_grid) {
    // Outcomes must also agree between the two frames.
    bool stable = true;
    for (int p = 0; p <= 2; ++p)
      for (int s = p; s <= 3; ++s)
        for (int c = 0; c <= 2; ++c)
          for (int d = 0; d <= 2; ++d) {
            std::optional<bool> first;
            for (const auto& [name, frame] : frames) {
              const auto t = verify_theorem3(p, s, c, d, frame);
              std::ostringstream params, note;
              params << "p=" << p << " s=" << s << " c=" << c << " d=" << d;
              note << "prefactor " << t.prefactor;
              if (t.proportional) note << "; left/right = " << t.ratio;
              if (!t.note.empty()) note << "; " << t.note;
              rep.rows.push_back({"projected contraction", params.str(), name, t.pass,
                                  rational_json(t.max_abs_component_diff), dense_cell(t), note.str()});
              rep.pass = rep.pass && t.pass && t.routes_agree;
              if (first && *first != t.pass) stable = false;
              first = t.pass;
            }
          }
    rep.doc["projected_contraction_stable_across_frames"] = stable;
    rep.doc["projected_contraction_index_balance"] = verify_theorem3(2, 2, 0, 0, canonical_frame()).index_balance;
    rep.pass = rep.pass && stable;
  }
  rep.doc["pass"] = rep.pass;
  return rep;
}

Report verify_independence_cmd(int N, int trials, std::uint64_t seed, bool force) {
  require_cap(N, independence_cap, force, "verify independence");
  if (trials < 1) throw UsageError("--trials must be at least 1");
  const auto r = verify_independence(N, trials, seed);
  Report rep;
  rep.doc = new_doc("verify independence");
  rep.doc["N"] = N;
  rep.doc["trials"] = trials;
  rep.doc["seed"] = seed;
  rep.columns = {"trial", "seed", "resamples", "blocks_equal", "equal"};
  for (const auto& t : r.trials) {
    std::string blocks;
    for (bool b : t.block_equal) blocks += b ? '1' : '0';
    rep.rows.push_back({t.trial, t.seed, t.resamples, blocks, t.equal});
  }
  rep.pass = r.pass;
  rep.doc["pass"] = r.pass;
  return rep;
}

StateParams parse_state(const std::string& text) {
  StateParams s;
  if (text.empty()) return s;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--state expects lam,gamma,kB");
  try {
    s.lam = Real(parts[0]);
    s.gamma = Real(parts[1]);
    s.kB = Real(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--state entries must be numbers");
  }
  check_state(s);
  return s;
}

Report verify_oracle_cmd(int N, double tol, const std::string& state_text, bool force) {
  require_cap(N, oracle_cap, force, "verify oracle4d");
  if (!(tol > 0)) throw UsageError("--tol must be positive");
  const StateParams state = parse_state(state_text);
  const auto r = verify_oracle_match(N, tol, state);
  Report rep;
  rep.doc = new_doc("verify oracle4d");
  rep.doc["N"] = N;
  rep.doc["tol"] = tol;
  rep.doc["precision_bits"] = oracle_precision_bits();
  rep.doc["pencil_size"] = r.oracle.count();
  rep.doc["max_deviation"] = r.max_deviation;
  rep.doc["multiplicities_equal"] = r.multiplicities_equal;
  if (!r.adjudication.empty()) rep.doc["adjudication"] = r.adjudication;
  rep.columns = {"model", "model_approx", "oracle_approx", "deviation", "model_mult", "oracle_mult", "ok"};
  for (std::size_t i = 0; i < r.matches.size(); ++i) {
    const auto& m = r.matches[i];
    std::ostringstream dev;
    dev << std::setprecision(3) << m.deviation;
    rep.rows.push_back({exact_json(r.model.roots[i]), approx_text(r.model.roots[i].approx), approx_text(Real(m.oracle)),
                        dev.str(), m.model_multiplicity, m.oracle_multiplicity, m.ok});
  }
  rep.pass = r.pass;
  rep.doc["pass"] = r.pass;
  return rep;
}

Report verify_hankel_cmd(int a_max, int d_max, int states, std::uint64_t seed) {
  if (a_max < 0 || d_max < 0) throw UsageError("--a-max and --d-max must be non-negative");
  if (states < 0) throw UsageError("--states must be non-negative");
  const auto h = verify_hankel(a_max, d_max);
  Report rep;
  rep.doc = new_doc("verify hankel");
  rep.doc["a_max"] = a_max;
  rep.doc["d_max"] = d_max;
  rep.doc["determinants_match"] = h.pass;
  rep.doc["trailing_blocks_match_D_t^E"] = h.exponents_ok;
  rep.doc["stated_row_exponent_mismatches"] = h.stated_mismatches;
  std::mt19937_64 rng(seed);
  int pd_checked = 0, pd_failed = 0;
  for (int N = 2; N <= 5; ++N)
    for (int i = 0; i < states; ++i) {
      ++pd_checked;
      if (!verify_positive_definite(kinetic_G(N, random_state(rng)))) ++pd_failed;
    }
  rep.doc["positive_definite_checked"] = pd_checked;
  rep.doc["positive_definite_failed"] = pd_failed;
  rep.columns = {"p", "eta", "N", "derived_row_exponent", "stated_row_exponent", "total_exponent", "symbolic_ok"};
  for (const auto& c : h.exponents) {
    rep.rows.push_back({c.p, c.eta, c.N, c.derived_row_exponent, c.stated_row_exponent, c.total_exponent,
                        c.symbolic_ok});
  }
  for (const auto& f : h.failures) rep.doc["failures"].push_back(f);
  // The stated exponent is a diagnostic; the identities are the verdict.
  rep.pass = h.pass && h.exponents_ok && pd_failed == 0;
  rep.doc["pass"] = rep.pass;
  return rep;
}

Report verify_sublum_cmd(int samples, std::uint64_t seed, double tol, int N) {
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (!(tol > 0)) throw UsageError("--tol must be positive");
  require_cap(N, speeds_cap, false, "k values");
  const auto r = verify_subluminality(samples, seed, tol, model_k_values(N));
  Report rep;
  rep.doc = new_doc("verify sublum");
  rep.doc["samples"] = samples;
  rep.doc["seed"] = seed;
  rep.doc["tol"] = tol;
  rep.doc["k_values_from_N"] = N;
  rep.doc["max_discriminant_error"] = approx_text(r.max_discriminant_error);
  rep.doc["max_excess_over_light_speed"] = approx_text(r.max_excess);
  rep.doc["monotonicity_flags"] = r.monotonicity_flags;
  rep.columns = {"k", "U0", "U1", "U2", "U3", "failure"};
  for (const auto& s : r.failures) {
    rep.rows.push_back({approx_text(s.k), approx_text(s.U.U0), approx_text(s.U.U1), approx_text(s.U.U2),
                        approx_text(s.U.U3), s.failure});
  }
  rep.pass = r.pass;
  rep.doc["pass"] = r.pass;
  return rep;
}

Report verify_coeffs_cmd(int N, bool force) {
  require_cap(N, 5, force, "verify coeffs");
  const auto c = compare_generators(N);
  Report rep;
  rep.doc = new_doc("verify coeffs");
  rep.doc["N"] = N;
  rep.doc["checked"] = c.checked;
  rep.columns = {"mismatch"};
  for (const auto& m : c.mismatches) rep.rows.push_back({m});
  rep.pass = c.pass();
  rep.doc["pass"] = rep.pass;
  return rep;
}

// ---------------------------------------------------------------------------
// coeffs

Report cmd_coeffs(int p, int b, int n, std::optional<int> m) {
  Report rep;
  rep.doc = new_doc("coeffs");
  rep.doc["p"] = p;
  rep.doc["b"] = b;
  rep.doc["n"] = n;
  std::vector<YTerm> terms;
  if (m) {
    rep.doc["m"] = *m;
    rep.doc["generator"] = "general";
    terms = y_coeff_general(p, *m, *m - p - b, b, n);
  } else {
    rep.doc["generator"] = "case formulas";
    terms = y_coeff(p, b, n);
  }
  rep.columns = {"h", "k", "mu_coeff", "phi_coeff"};
  for (const auto& t : terms) rep.rows.push_back({t.h, t.k, rational_json(t.mu_coeff), rational_json(t.phi_coeff)});
  return rep;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Characteristic wave speeds of the moment hierarchy for the ultrarelativistic gas", "momentwave"};
  app.require_subcommand(1);

  std::string format = "table";
  std::string output;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "table, json or csv")->check(CLI::IsMember({"table", "json", "csv"}));
    sub->add_option("--output", output, "write the report to this file instead of stdout");
  };

  SpeedsOptions so;
  auto* speeds = app.add_subcommand("speeds", "characteristic speeds per block or for the whole model");
  speeds->add_option("--N", so.N, "model order")->required();
  speeds->add_option("--p", so.p, "single block rank");
  speeds->add_option("--method", so.method, "reduced subsystems or full block matrices")
      ->check(CLI::IsMember({"reduced", "full"}));
  speeds->add_option("--closure", so.closure, "closure for --method full")
      ->check(CLI::IsMember({"kinetic", "random", "file"}));
  speeds->add_option("--closure-file", so.closure_file, "JSON closure {\"N\":..,\"G\":[..]}");
  speeds->add_option("--seed", so.seed, "seed for --closure random");
  speeds->add_option("--tol", so.tol, "root isolation width");
  speeds->add_flag("--force", so.force, "lift the N cap");
  add_common(speeds);

  auto* verify = app.add_subcommand("verify", "verification suites");
  verify->require_subcommand(1);

  int max_rank = 4;
  bool contraction_grid = false, force = false;
  auto* tensors = verify->add_subcommand("tensors", "projector identities in the canonical and a boosted frame");
  tensors->add_option("--max-rank", max_rank, "largest p and r");
  tensors->add_flag("--contraction-grid", contraction_grid, "also run the projected-contraction grid p<=2, s<=3, c,d<=2");
  tensors->add_flag("--force", force, "lift the rank cap");
  add_common(tensors);

  int N = 2, trials = 50;
  std::uint64_t seed = 7;
  auto* independence = verify->add_subcommand("independence", "closure independence on random admissible G");
  independence->add_option("--N", N, "model order")->required();
  independence->add_option("--trials", trials, "number of random closures");
  independence->add_option("--seed", seed, "base seed; trial t uses seed + t");
  independence->add_flag("--force", force, "lift the N cap");
  add_common(independence);

  double tol = 1e-9;
  std::string state;
  auto* oracle = verify->add_subcommand("oracle4d", "4D kinetic pencil against the block speeds");
  oracle->add_option("--N", N, "model order")->required();
  oracle->add_option("--tol", tol, "match tolerance");
  oracle->add_option("--state", state, "lam,gamma,kB (default 0,1,1)");
  oracle->add_flag("--force", force, "lift the N cap");
  add_common(oracle);

  int a_max = 8, d_max = 6, states = 10;
  auto* hankel = verify->add_subcommand("hankel", "factorial Hankel determinants and positive definiteness");
  hankel->add_option("--a-max", a_max);
  hankel->add_option("--d-max", d_max);
  hankel->add_option("--states", states, "random states per N = 2..5");
  hankel->add_option("--seed", seed);
  add_common(hankel);

  int samples = 1000, k_from = 6;
  double sublum_tol = 1e-12;
  auto* sublum = verify->add_subcommand("sublum", "speeds seen from random time-like directions");
  sublum->add_option("--samples", samples);
  sublum->add_option("--seed", seed);
  sublum->add_option("--tol", sublum_tol);
  sublum->add_option("--N", k_from, "take half of the k values from the model of this order");
  add_common(sublum);

  int coeffs_N = 5;
  auto* vcoeffs = verify->add_subcommand("coeffs", "case formulas against the general coefficient sum");
  vcoeffs->add_option("--N", coeffs_N);
  vcoeffs->add_flag("--force", force);
  add_common(vcoeffs);

  int cp = 0, cb = 0, cn = 0;
  std::optional<int> cm;
  auto* coeffs = app.add_subcommand("coeffs", "coefficient table of Y_{b,n} for block p");
  coeffs->add_option("--p", cp)->required();
  coeffs->add_option("--b", cb)->required();
  coeffs->add_option("--n", cn)->required();
  coeffs->add_option("--m", cm, "evaluate the general sum for equation row m");
  add_common(coeffs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  Report rep;
  bool verification = false;
  try {
    if (speeds->parsed()) {
      rep = cmd_speeds(so);
    } else if (coeffs->parsed()) {
      rep = cmd_coeffs(cp, cb, cn, cm);
    } else {
      verification = true;
      if (tensors->parsed()) {
        rep = verify_tensors(max_rank, contraction_grid, force);
      } else if (independence->parsed()) {
        rep = verify_independence_cmd(N, trials, seed, force);
      } else if (oracle->parsed()) {
        rep = verify_oracle_cmd(N, tol, state, force);
      } else if (hankel->parsed()) {
        rep = verify_hankel_cmd(a_max, d_max, states, seed);
      } else if (sublum->parsed()) {
        rep = verify_sublum_cmd(samples, seed, sublum_tol, k_from);
      } else {
        rep = verify_coeffs_cmd(coeffs_N, force);
      }
    }
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::domain:
      case ErrorKind::closure:
      case ErrorKind::io:
      case ErrorKind::frame:
        return 2;
      default:
        return 1;
    }
  }

  const std::string text = render(rep, format);
  if (output.empty()) {
    out << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!(f << text)) {
      err << "io: cannot write " << output << "\n";
      return 2;
    }
  }
  if (verification && !rep.pass) {
    err << "verification failed\n";
    return 1;
  }
  return 0;
}

}  // namespace momentwave
