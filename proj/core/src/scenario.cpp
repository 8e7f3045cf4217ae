#include "eerds/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eerds {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, int line, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ScenarioParseError(line, field, "expected a number, got '" + tok + "'");
  }
}

int to_int(const std::string& tok, int line, const std::string& field) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ScenarioParseError(line, field, "expected an integer, got '" + tok + "'");
  }
}

std::vector<double> to_doubles(const std::string& value, int line,
                               const std::string& field) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(value)) {
    out.push_back(to_double(tok, line, field));
  }
  return out;
}

Profile parse_profile(const std::string& value, int line, const std::string& field) {
  const std::vector<std::string> toks = split_ws(value);
  if (toks.empty()) throw ScenarioParseError(line, field, "empty profile");
  Profile p;
  if (toks[0] == "constant") {
    if (toks.size() != 2) {
      throw ScenarioParseError(line, field, "constant profile takes one value");
    }
    return Profile::constant(to_double(toks[1], line, field));
  }
  if (toks[0] == "linear") {
    if (toks.size() != 3) {
      throw ScenarioParseError(line, field, "linear profile takes two coefficients");
    }
    return Profile::linear(to_double(toks[1], line, field),
                           to_double(toks[2], line, field));
  }
  if (toks[0] == "tabulated") {
    p.kind = Profile::Kind::Tabulated;
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto colon = toks[i].find(':');
      if (colon == std::string::npos) {
        throw ScenarioParseError(line, field, "tabulated entries are x:value pairs");
      }
      p.table.emplace_back(to_double(toks[i].substr(0, colon), line, field),
                           to_double(toks[i].substr(colon + 1), line, field));
    }
    if (p.table.size() < 2) {
      throw ScenarioParseError(line, field, "tabulated profile needs >= 2 points");
    }
    for (std::size_t i = 1; i < p.table.size(); ++i) {
      if (!(p.table[i - 1].first < p.table[i].first)) {
        throw ScenarioParseError(line, field, "tabulated abscissae must increase");
      }
    }
    return p;
  }
  throw ScenarioParseError(line, field,
                           "unknown profile type '" + toks[0] +
                               "' (expected constant|linear|tabulated)");
}

BoundarySpec parse_boundary(const std::string& value, int line,
                            const std::string& field) {
  const std::vector<std::string> toks = split_ws(value);
  if (toks.empty()) throw ScenarioParseError(line, field, "empty boundary spec");
  if (toks[0] == "dirichlet" && toks.size() == 1) return BoundarySpec::dirichlet();
  if (toks[0] == "neumann" && toks.size() == 1) return BoundarySpec::neumann();
  if (toks[0] == "robin" && toks.size() == 2) {
    return BoundarySpec::robin(to_double(toks[1], line, field));
  }
  throw ScenarioParseError(
      line, field, "expected dirichlet | neumann | robin <omega>, got '" + value + "'");
}

Reaction parse_reaction(const std::string& value, int line) {
  // k | alpha_1 ... alpha_I | beta_1 ... beta_I
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : value) {
    if (ch == '|') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3) {
    throw ScenarioParseError(line, "reaction",
                             "expected 'k | alpha... | beta...' with two '|'");
  }
  Reaction r;
  const auto ks = split_ws(parts[0]);
  if (ks.size() != 1) {
    throw ScenarioParseError(line, "reaction", "expected a single rate constant");
  }
  r.rate = to_double(ks[0], line, "reaction");
  for (const std::string& tok : split_ws(parts[1])) {
    r.alpha.push_back(to_int(tok, line, "reaction"));
  }
  for (const std::string& tok : split_ws(parts[2])) {
    r.beta.push_back(to_int(tok, line, "reaction"));
  }
  return r;
}

}  // namespace

ScenarioParseError::ScenarioParseError(int line, const std::string& field,
                                       const std::string& what)
    : std::runtime_error("scenario line " + std::to_string(line) + ", field '" +
                         field + "': " + what),
      line_(line),
      field_(field) {}

double Profile::operator()(double x) const {
  switch (kind) {
    case Kind::Constant:
      return c0;
    case Kind::Linear:
      return c0 + c1 * x;
    case Kind::Tabulated: {
      if (x <= table.front().first) return table.front().second;
      if (x >= table.back().first) return table.back().second;
      for (std::size_t i = 1; i < table.size(); ++i) {
        if (x <= table[i].first) {
          const double t =
              (x - table[i - 1].first) / (table[i].first - table[i - 1].first);
          return (1.0 - t) * table[i - 1].second + t * table[i].second;
        }
      }
      return table.back().second;
    }
  }
  return 0.0;
}

Field Profile::sample(const MeshHandle& mesh) const {
  Field f(mesh);
  for (int j = 0; j < f.size(); ++j) f[j] = (*this)(mesh->node(j));
  return f;
}

Profile Profile::constant(double v) {
  Profile p;
  p.kind = Kind::Constant;
  p.c0 = v;
  return p;
}

Profile Profile::linear(double a, double b) {
  Profile p;
  p.kind = Kind::Linear;
  p.c0 = a;
  p.c1 = b;
  return p;
}

void Scenario::validate() const {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ScenarioParseError(0, field, what);
  };
  if (!(x_left < x_right)) fail("mesh", "x_left must be below x_right");
  if (nodes < 2) fail("mesh", "need at least two nodes");
  if (species < 1) fail("entropy", "need at least one species");
  if (static_cast<int>(charges.size()) != species) {
    fail("charges", "charge count must match species");
  }
  if (family == EntropyFamily::Boltzmann &&
      static_cast<int>(beta.size()) != species) {
    fail("beta", "beta count must match species");
  }
  for (const Reaction& r : reactions) {
    if (static_cast<int>(r.alpha.size()) != species ||
        static_cast<int>(r.beta.size()) != species) {
      fail("reaction", "stoichiometric vectors must match species count");
    }
  }
  if (!mobility.empty() && static_cast<int>(mobility.size()) != species) {
    fail("mobility", "mobility count must match species");
  }
  const bool any_dirichlet =
      left.kind == BcKind::Dirichlet || right.kind == BcKind::Dirichlet;
  double omega_sum = 0.0;
  if (left.kind == BcKind::Robin) omega_sum += left.omega;
  if (right.kind == BcKind::Robin) omega_sum += right.omega;
  if (!any_dirichlet && omega_sum == 0.0 && Q0 != 0.0) {
    fail("Q0", "pure Neumann scenarios require Q0 = 0");
  }
}

MeshHandle Scenario::make_mesh() const {
  return build_uniform_mesh(x_left, x_right, nodes, left, right);
}

BoltzmannEntropyModel Scenario::make_boltzmann_model() const {
  return BoltzmannEntropyModel(species, beta0, beta, w0, alpha, charges);
}

SizeExclusionEntropyModel Scenario::make_size_exclusion_model() const {
  return SizeExclusionEntropyModel(species, beta0, alpha, charges);
}

MobilityModel Scenario::make_mobility() const {
  MobilityModel m;
  m.species_mobility = mobility.empty() ? std::vector<double>(species, 1.0) : mobility;
  m.heat_conductivity = heat_conductivity;
  return m;
}

Scenario parse_scenario_text(const std::string& text) {
  Scenario sc;
  sc.beta.clear();
  sc.charges.clear();

  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool saw_stages_key = false;

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ScenarioParseError(line_no, "section", "unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      const std::vector<std::string> known = {"mesh",        "boundary",
                                              "entropy",     "reactions",
                                              "constraints", "solver",
                                              "evolution",   "stages"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw ScenarioParseError(line_no, section, "unknown section");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioParseError(line_no, section, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ScenarioParseError(line_no, key, "key outside any [section]");
    }

    if (section == "mesh") {
      if (key == "x_left") sc.x_left = to_double(value, line_no, key);
      else if (key == "x_right") sc.x_right = to_double(value, line_no, key);
      else if (key == "nodes") sc.nodes = to_int(value, line_no, key);
      else if (key == "epsilon") sc.epsilon = parse_profile(value, line_no, key);
      else if (key == "doping") sc.doping = parse_profile(value, line_no, key);
      else throw ScenarioParseError(line_no, key, "unknown key in [mesh]");
    } else if (section == "boundary") {
      if (key == "left") sc.left = parse_boundary(value, line_no, key);
      else if (key == "right") sc.right = parse_boundary(value, line_no, key);
      else if (key == "g_left") sc.g_left = to_double(value, line_no, key);
      else if (key == "g_right") sc.g_right = to_double(value, line_no, key);
      else throw ScenarioParseError(line_no, key, "unknown key in [boundary]");
    } else if (section == "entropy") {
      if (key == "family") {
        if (value == "boltzmann") sc.family = EntropyFamily::Boltzmann;
        else if (value == "size_exclusion") sc.family = EntropyFamily::SizeExclusion;
        else throw ScenarioParseError(line_no, key, "unknown entropy family");
      } else if (key == "species") sc.species = to_int(value, line_no, key);
      else if (key == "alpha") sc.alpha = to_double(value, line_no, key);
      else if (key == "beta0") sc.beta0 = to_double(value, line_no, key);
      else if (key == "w0") sc.w0 = to_double(value, line_no, key);
      else if (key == "beta") sc.beta = to_doubles(value, line_no, key);
      else if (key == "charges") sc.charges = to_doubles(value, line_no, key);
      else throw ScenarioParseError(line_no, key, "unknown key in [entropy]");
    } else if (section == "reactions") {
      if (key == "reaction") sc.reactions.push_back(parse_reaction(value, line_no));
      else if (key == "single_conservation_law") {
        sc.single_conservation_law = value == "true" || value == "1";
      } else throw ScenarioParseError(line_no, key, "unknown key in [reactions]");
    } else if (section == "constraints") {
      if (key == "E0") sc.E0 = to_double(value, line_no, key);
      else if (key == "Q0") sc.Q0 = to_double(value, line_no, key);
      else throw ScenarioParseError(line_no, key, "unknown key in [constraints]");
    } else if (section == "solver") {
      if (key == "tol_grad") sc.tol_grad = to_double(value, line_no, key);
      else if (key == "max_iterations") sc.max_iterations = to_int(value, line_no, key);
      else if (key == "direct_tol") sc.direct_tol = to_double(value, line_no, key);
      else if (key == "direct_max_iterations") {
        sc.direct_max_iterations = to_int(value, line_no, key);
      } else if (key == "seed") sc.seed = static_cast<unsigned>(to_int(value, line_no, key));
      else throw ScenarioParseError(line_no, key, "unknown key in [solver]");
    } else if (section == "evolution") {
      if (key == "t_end") sc.t_end = to_double(value, line_no, key);
      else if (key == "dt_initial") sc.dt_initial = to_double(value, line_no, key);
      else if (key == "dt_max") sc.dt_max = to_double(value, line_no, key);
      else if (key == "distance_tol") sc.distance_tol = to_double(value, line_no, key);
      else if (key == "entropy_slack") sc.entropy_slack = to_double(value, line_no, key);
      else if (key == "snapshot_stride") sc.snapshot_stride = to_int(value, line_no, key);
      else if (key == "mobility") sc.mobility = to_doubles(value, line_no, key);
      else if (key == "heat_conductivity") {
        sc.heat_conductivity = to_double(value, line_no, key);
      } else throw ScenarioParseError(line_no, key, "unknown key in [evolution]");
    } else if (section == "stages") {
      if (key == "stages") {
        saw_stages_key = true;
        sc.stages = StageToggles{false, false, false, false};
        std::string normalized = value;
        std::replace(normalized.begin(), normalized.end(), ',', ' ');
        for (const std::string& tok : split_ws(normalized)) {
          if (tok == "electro") sc.stages.electro = true;
          else if (tok == "dual") sc.stages.dual = true;
          else if (tok == "direct") sc.stages.direct = true;
          else if (tok == "evolve") sc.stages.evolve = true;
          else throw ScenarioParseError(line_no, key, "unknown stage '" + tok + "'");
        }
      } else {
        throw ScenarioParseError(line_no, key, "unknown key in [stages]");
      }
    }
  }
  (void)saw_stages_key;

  if (sc.family == EntropyFamily::Boltzmann && sc.beta.empty()) {
    sc.beta.assign(sc.species, 1.0);
  }
  if (sc.charges.empty()) sc.charges.assign(sc.species, 0.0);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace eerds
