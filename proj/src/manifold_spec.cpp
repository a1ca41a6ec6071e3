#include "gentwist/manifold_spec.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gentwist {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) b++;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) e--;
  return s.substr(b, e - b);
}

std::vector<std::string> splitWords(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw SpecError(os.str());
}

long parseInt(const std::string& origin, int line, const std::string& key,
              const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    fail(origin, line, "value for '" + key + "' is not an integer: '" + value + "'");
  return v;
}

unsigned long long parseU64(const std::string& origin, int line, const std::string& key,
                            const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    fail(origin, line, "value for '" + key + "' is not an unsigned integer: '" + value + "'");
  return v;
}

double parseDouble(const std::string& origin, int line, const std::string& key,
                   const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    fail(origin, line, "value for '" + key + "' is not a number: '" + value + "'");
  return v;
}

// Index pair from an entry key like "g12" / "t23" / "g1_12"; 1-based in the
// file, 0-based in the result.
std::pair<int, int> entryIndices(const std::string& origin, int line, const std::string& key,
                                 int dim) {
  const std::string body = key.substr(1);
  int i = 0, j = 0;
  const size_t us = body.find('_');
  if (us != std::string::npos) {
    i = static_cast<int>(parseInt(origin, line, key, body.substr(0, us)));
    j = static_cast<int>(parseInt(origin, line, key, body.substr(us + 1)));
  } else if (body.size() == 2 && std::isdigit(static_cast<unsigned char>(body[0])) &&
             std::isdigit(static_cast<unsigned char>(body[1]))) {
    i = body[0] - '0';
    j = body[1] - '0';
  } else {
    fail(origin, line, "entry key '" + key + "' must name two indices (e.g. g12 or g1_2)");
  }
  if (i < 1 || i > dim || j < 1 || j > dim)
    fail(origin, line, "entry key '" + key + "' is out of range for dimension " +
                           std::to_string(dim));
  return {i - 1, j - 1};
}

struct RawLine {
  int number;
  std::string key, value;
};

const std::map<std::string, std::string>& builtinMap() {
  static const std::map<std::string, std::string> m = {
      {"flat4", R"(# Euclidean metric on a 4-dimensional box.
[chart]
dim = 4
coords = x1 x2 x3 x4
box = -1 1 -1 1 -1 1 -1 1
orientation = +1

[metric]
g11 = 1
g22 = 1
g33 = 1
g44 = 1
)"},
      {"sphere4", R"(# Round metric of the unit 4-sphere in stereographic coordinates.
[chart]
dim = 4
coords = x1 x2 x3 x4
box = -0.9 0.9 -0.9 0.9 -0.9 0.9 -0.9 0.9
orientation = +1

[metric]
g11 = 4 / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g22 = 4 / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g33 = 4 / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g44 = 4 / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2

[expect]
same_orientation_integrability = fail
curvature_operator_identity ++ = fail
curvature_operator_identity -- = fail
curvature_commutation = fail
)"},
      {"flat4_theta", R"(# Euclidean metric with a non-closed torsion potential.
[chart]
dim = 4
coords = x1 x2 x3 x4
box = -1 1 -1 1 -1 1 -1 1
orientation = +1

[metric]
g11 = 1
g22 = 1
g33 = 1
g44 = 1

[theta]
t23 = x1

[equivalence]
partner = builtin:flat4

[expect]
horizontal_vanishing = fail
same_orientation_integrability = fail
mixed_orientation_integrability = fail
curvature_operator_identity = fail
b_transform_equivalence = fail
)"},
      {"flat4_btransform", R"(# Euclidean metric with a closed torsion potential.
[chart]
dim = 4
coords = x1 x2 x3 x4
box = -1 1 -1 1 -1 1 -1 1
orientation = +1

[metric]
g11 = 1
g22 = 1
g33 = 1
g44 = 1

[theta]
t12 = 1

[equivalence]
partner = builtin:flat4
)"},
      {"perturbed4", R"(# Conformally perturbed sphere metric; neither Einstein nor of
# constant sectional curvature.
[chart]
dim = 4
coords = x1 x2 x3 x4
box = -0.9 0.9 -0.9 0.9 -0.9 0.9 -0.9 0.9
orientation = +1

[metric]
g11 = 4 * (1 + 0.1 * x1) / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g22 = 4 * (1 + 0.1 * x1) / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g33 = 4 * (1 + 0.1 * x1) / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g44 = 4 * (1 + 0.1 * x1) / (1 + x1^2 + x2^2 + x3^2 + x4^2)^2

[expect]
same_orientation_integrability = fail
mixed_orientation_integrability = fail
curvature_operator_identity = fail
curvature_commutation = fail
)"}};
  return m;
}

}  // namespace

std::vector<std::string> builtinNames() {
  std::vector<std::string> names;
  for (const auto& kv : builtinMap()) names.push_back(kv.first);
  return names;
}

const std::string& builtinSpecText(const std::string& name) {
  const auto& m = builtinMap();
  const auto it = m.find(name);
  if (it == m.end()) {
    std::ostringstream os;
    os << "unknown builtin manifold '" << name << "'; available:";
    for (const auto& kv : m) os << " " << kv.first;
    throw SpecError(os.str());
  }
  return it->second;
}

ManifoldSpec parseManifoldSpec(const std::string& text, const std::string& origin) {
  // First pass: split into sections of key = value lines.
  std::map<std::string, std::vector<RawLine>> sections;
  std::string current;
  std::istringstream is(text);
  std::string lineText;
  int lineNo = 0;
  while (std::getline(is, lineText)) {
    lineNo++;
    const std::string line = trim(lineText);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineNo, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known = {"chart",    "metric", "theta",
                                                     "sampling", "expect", "equivalence"};
      if (std::find(known.begin(), known.end(), current) == known.end())
        fail(origin, lineNo, "unknown section '[" + current + "]'");
      sections[current];  // record even if empty
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineNo, "expected 'key = value'");
    if (current.empty()) fail(origin, lineNo, "entry before any section header");
    sections[current].push_back({lineNo, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }

  // [chart]
  if (!sections.count("chart")) throw SpecError(origin + ": missing [chart] section");
  int dim = 0, dimLine = 0;
  std::vector<std::string> coords;
  std::vector<double> boxVals;
  int boxLine = 0;
  int orientation = +1;
  for (const RawLine& rl : sections["chart"]) {
    if (rl.key == "dim") {
      dim = static_cast<int>(parseInt(origin, rl.number, rl.key, rl.value));
      dimLine = rl.number;
    } else if (rl.key == "coords") {
      coords = splitWords(rl.value);
    } else if (rl.key == "box") {
      for (const std::string& w : splitWords(rl.value))
        boxVals.push_back(parseDouble(origin, rl.number, rl.key, w));
      boxLine = rl.number;
    } else if (rl.key == "orientation") {
      std::string v = rl.value;
      if (!v.empty() && v[0] == '+') v = v.substr(1);
      const long o = parseInt(origin, rl.number, rl.key, v);
      if (o != 1 && o != -1) fail(origin, rl.number, "orientation must be +1 or -1");
      orientation = static_cast<int>(o);
    } else {
      fail(origin, rl.number, "unknown [chart] key '" + rl.key + "'");
    }
  }
  if (dim <= 0) throw SpecError(origin + ": [chart] must set a positive 'dim'");
  if (dim % 2 != 0) fail(origin, dimLine, "dimension must be even");
  if (coords.empty())
    for (int i = 1; i <= dim; i++) coords.push_back("x" + std::to_string(i));
  if (static_cast<int>(coords.size()) != dim)
    throw SpecError(origin + ": 'coords' names " + std::to_string(coords.size()) +
                    " coordinates but dim = " + std::to_string(dim));
  Chart chart;
  chart.coords = coords;
  chart.orientation = orientation;
  if (boxVals.empty()) {
    chart.box = Mat(dim, 2);
    for (int i = 0; i < dim; i++) {
      chart.box(i, 0) = -1.0;
      chart.box(i, 1) = 1.0;
    }
  } else {
    if (static_cast<int>(boxVals.size()) != 2 * dim)
      fail(origin, boxLine,
           "'box' must list " + std::to_string(2 * dim) + " numbers (lo hi per coordinate)");
    chart.box = Mat(dim, 2);
    for (int i = 0; i < dim; i++) {
      chart.box(i, 0) = boxVals[2 * i];
      chart.box(i, 1) = boxVals[2 * i + 1];
    }
  }
  try {
    chart.validate();
  } catch (const Error& e) {
    throw SpecError(origin + ": " + e.what());
  }

  // [metric] and [theta] entries.
  FieldGenMetric field;
  field.chart = chart;
  field.g.assign(static_cast<size_t>(dim) * dim, Expr::number(0.0));
  field.theta.assign(static_cast<size_t>(dim) * dim, Expr::number(0.0));
  std::vector<bool> diagSet(static_cast<size_t>(dim), false);

  auto parseEntry = [&](const RawLine& rl) {
    try {
      return parseExpr(rl.value, coords);
    } catch (const ParseError& e) {
      fail(origin, rl.number,
           "in expression for '" + rl.key + "' (column " + std::to_string(e.col) +
               "): " + e.what());
    }
  };

  if (!sections.count("metric")) throw SpecError(origin + ": missing [metric] section");
  for (const RawLine& rl : sections["metric"]) {
    if (rl.key.empty() || rl.key[0] != 'g')
      fail(origin, rl.number, "[metric] keys must look like gIJ");
    const auto [i, j] = entryIndices(origin, rl.number, rl.key, dim);
    if (i < j)
      fail(origin, rl.number, "metric entries use the lower triangle; write g" +
                                  std::to_string(j + 1) + std::to_string(i + 1) + " instead");
    const Expr e = parseEntry(rl);
    field.g[static_cast<size_t>(i) * dim + j] = e;
    field.g[static_cast<size_t>(j) * dim + i] = e;
    if (i == j) diagSet[static_cast<size_t>(i)] = true;
  }
  for (int i = 0; i < dim; i++)
    if (!diagSet[static_cast<size_t>(i)])
      throw SpecError(origin + ": [metric] is missing the diagonal entry g" +
                      std::to_string(i + 1) + std::to_string(i + 1));

  if (sections.count("theta"))
    for (const RawLine& rl : sections["theta"]) {
      if (rl.key.empty() || rl.key[0] != 't')
        fail(origin, rl.number, "[theta] keys must look like tIJ");
      const auto [i, j] = entryIndices(origin, rl.number, rl.key, dim);
      if (i >= j)
        fail(origin, rl.number,
             "theta entries use the strict upper triangle (tIJ with I < J)");
      const Expr e = parseEntry(rl);
      field.theta[static_cast<size_t>(i) * dim + j] = e;
      field.theta[static_cast<size_t>(j) * dim + i] = Expr::negate(e);
    }

  // [sampling]
  ManifoldSpec spec;
  spec.field = field;
  spec.source = text;
  if (sections.count("sampling"))
    for (const RawLine& rl : sections["sampling"]) {
      if (rl.key == "points")
        spec.sampling.points = static_cast<int>(parseInt(origin, rl.number, rl.key, rl.value));
      else if (rl.key == "fibers")
        spec.sampling.fibers = static_cast<int>(parseInt(origin, rl.number, rl.key, rl.value));
      else if (rl.key == "probes")
        spec.sampling.probes = static_cast<int>(parseInt(origin, rl.number, rl.key, rl.value));
      else if (rl.key == "seed")
        spec.sampling.seed = parseU64(origin, rl.number, rl.key, rl.value);
      else if (rl.key == "tol")
        spec.sampling.tol = parseDouble(origin, rl.number, rl.key, rl.value);
      else
        fail(origin, rl.number, "unknown [sampling] key '" + rl.key + "'");
    }
  if (spec.sampling.points < 1 || spec.sampling.fibers < 1 || spec.sampling.probes < 1)
    throw SpecError(origin + ": [sampling] counts must be at least 1");
  if (!(spec.sampling.tol > 0.0)) throw SpecError(origin + ": [sampling] tol must be positive");

  // [expect]
  if (sections.count("expect"))
    for (const RawLine& rl : sections["expect"]) {
      ExpectEntry ee;
      const std::vector<std::string> parts = splitWords(rl.key);
      if (parts.empty() || parts.size() > 2)
        fail(origin, rl.number, "[expect] keys are '<predicate> [component]'");
      ee.predicate = parts[0];
      if (parts.size() == 2) ee.component = parts[1];
      if (rl.value == "pass")
        ee.expectPass = true;
      else if (rl.value == "fail")
        ee.expectPass = false;
      else
        fail(origin, rl.number, "[expect] values must be 'pass' or 'fail'");
      spec.expectations.push_back(std::move(ee));
    }

  // [equivalence]
  if (sections.count("equivalence"))
    for (const RawLine& rl : sections["equivalence"]) {
      if (rl.key == "partner")
        spec.equivalencePartner = rl.value;
      else
        fail(origin, rl.number, "unknown [equivalence] key '" + rl.key + "'");
    }

  // Positive definiteness at 8 probe points.
  for (int k = 0; k < 8; k++) {
    const Vec p = chart.boxPoint(haltonPoint(static_cast<uint64_t>(k), dim));
    try {
      (void)field.eval(p);
    } catch (const Error& e) {
      std::ostringstream os;
      os << origin << ": metric is not positive definite at point (";
      for (int i = 0; i < dim; i++) os << (i ? ", " : "") << p(i);
      os << "): " << e.what();
      throw SpecError(os.str());
    }
  }

  return spec;
}

ManifoldSpec loadSpec(const std::string& ref) {
  const std::string prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    const std::string name = ref.substr(prefix.size());
    ManifoldSpec spec = parseManifoldSpec(builtinSpecText(name), prefix + name);
    spec.name = name;
    return spec;
  }
  std::ifstream in(ref);
  if (!in) throw SpecError("cannot read spec file '" + ref + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ManifoldSpec spec = parseManifoldSpec(buf.str(), ref);
  const std::filesystem::path path(ref);
  spec.name = path.stem().string();
  // Relative equivalence partners resolve against the spec file's directory.
  if (!spec.equivalencePartner.empty() && spec.equivalencePartner.rfind(prefix, 0) != 0) {
    const std::filesystem::path partner(spec.equivalencePartner);
    if (partner.is_relative())
      spec.equivalencePartner = (path.parent_path() / partner).string();
  }
  return spec;
}

}  // namespace gentwist
