#include "qcap/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qcap {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw InputError(what + ": complex entries must be numbers or [re, im] pairs");
}

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a matrix");
  const size_t rows = j.size();
  Matrix m(rows, rows);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != rows) {
      throw InputError(what + ": matrix must be square");
    }
    for (size_t c = 0; c < rows; ++c) m(r, c) = parse_complex(j[r][c], what);
  }
  return m;
}

Vector parse_ket(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a state vector");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = parse_complex(j[i], what);
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-9) throw InputError(what + ": ket is not normalized");
  return v;
}

Op parse_signal(const json& j, const std::string& what) {
  if (j.contains("bloch")) {
    const auto& b = j["bloch"];
    if (!b.is_array() || b.size() != 3) throw InputError(what + ": bloch vector needs 3 entries");
    const double x = b[0].get<double>(), y = b[1].get<double>(), z = b[2].get<double>();
    const double n = std::sqrt(x * x + y * y + z * z);
    if (n > 1.0 + 1e-10) throw InputError(what + ": bloch vector norm exceeds 1");
    Matrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + z);
    m(1, 1) = 0.5 * (1.0 - z);
    m(0, 1) = 0.5 * Complex(x, -y);
    m(1, 0) = 0.5 * Complex(x, y);
    return Op({{"A", 2}}, m);
  }
  if (j.contains("ket")) {
    const Vector v = parse_ket(j["ket"], what);
    return Op({{"A", static_cast<int>(v.size())}}, v * v.adjoint());
  }
  if (j.contains("matrix")) {
    const Matrix m = parse_matrix(j["matrix"], what);
    Op op({{"A", static_cast<int>(m.rows())}}, m);
    require_density(op, what);
    return op;
  }
  throw InputError(what + ": signal needs one of 'bloch', 'ket', 'matrix'");
}

std::vector<std::string> parse_alphabet(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": alphabet must be a nonempty array");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_number_integer()) {
      out.push_back(std::to_string(e.get<long long>()));
    } else {
      throw InputError(what + ": alphabet symbols must be strings or integers");
    }
  }
  return out;
}

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError(what + ": invalid JSON");
  return j;
}

std::vector<SystemLabel> parse_systems(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("'systems' must be a nonempty array");
  std::vector<SystemLabel> out;
  for (const auto& e : j) {
    if (!e.contains("name") || !e.contains("dim")) {
      throw InputError("each system needs 'name' and 'dim'");
    }
    out.push_back({e["name"].get<std::string>(), e["dim"].get<int>()});
  }
  return out;
}

} // namespace

FixtureDoc parse_fixture(const std::string& json_text) {
  const json j = parse_json(json_text, "fixture");
  FixtureDoc doc;
  doc.name = j.value("name", "fixture");

  if (!j.contains("channel")) throw InputError("fixture: missing 'channel'");
  const json& cj = j["channel"];
  if (cj.contains("kind")) {
    doc.channel = standard_channel(channel_kind_from_string(cj["kind"].get<std::string>()),
                                   cj.value("param", 0.0));
  } else if (cj.contains("isometry")) {
    if (!cj.contains("dim_b") || !cj.contains("dim_e")) {
      throw InputError("fixture: explicit isometry needs 'dim_b' and 'dim_e'");
    }
    Matrix v;
    {
      const json& vj = cj["isometry"];
      if (!vj.is_array() || vj.empty()) throw InputError("fixture: isometry must be a matrix");
      const size_t rows = vj.size();
      const size_t cols = vj[0].size();
      v.resize(rows, cols);
      for (size_t r = 0; r < rows; ++r) {
        if (!vj[r].is_array() || vj[r].size() != cols) {
          throw InputError("fixture: ragged isometry rows");
        }
        for (size_t c = 0; c < cols; ++c) v(r, c) = parse_complex(vj[r][c], "isometry");
      }
    }
    doc.channel = channel_from_isometry(v, cj["dim_b"].get<int>(), cj["dim_e"].get<int>());
  } else {
    throw InputError("fixture: channel needs 'kind' or 'isometry'");
  }

  if (!j.contains("ensemble")) throw InputError("fixture: missing 'ensemble'");
  const json& ej = j["ensemble"];
  doc.ensemble.x_alphabet = parse_alphabet(ej.at("x_alphabet"), "x_alphabet");
  doc.ensemble.y_alphabet = parse_alphabet(ej.at("y_alphabet"), "y_alphabet");
  const json& pj = ej.at("p_xy");
  const size_t nx = doc.ensemble.x_alphabet.size();
  const size_t ny = doc.ensemble.y_alphabet.size();
  if (!pj.is_array() || pj.size() != nx) throw InputError("fixture: p_xy row count mismatch");
  doc.ensemble.p_xy.resize(nx, ny);
  for (size_t x = 0; x < nx; ++x) {
    if (!pj[x].is_array() || pj[x].size() != ny) throw InputError("fixture: p_xy column mismatch");
    for (size_t y = 0; y < ny; ++y) doc.ensemble.p_xy(x, y) = pj[x][y].get<double>();
  }
  const json& sj = ej.at("signals");
  doc.ensemble.signals.resize(nx);
  for (size_t x = 0; x < nx; ++x) {
    for (size_t y = 0; y < ny; ++y) {
      const std::string key = doc.ensemble.x_alphabet[x] + "," + doc.ensemble.y_alphabet[y];
      if (!sj.contains(key)) throw InputError("fixture: missing signal '" + key + "'");
      doc.ensemble.signals[x].push_back(parse_signal(sj.at(key), "signal " + key));
    }
  }
  doc.ensemble.validate();
  doc.channel.validate();
  if (doc.ensemble.input_dim() != doc.channel.input_dim) {
    throw InputError("fixture: signal dimension does not match channel input");
  }
  return doc;
}

FixtureDoc load_fixture(const std::string& path) { return parse_fixture(read_text_file(path)); }

DivergenceInput parse_divergence_input(const std::string& json_text) {
  const json j = parse_json(json_text, "divergence input");
  DivergenceInput out;
  const auto systems = j.contains("systems")
                           ? parse_systems(j["systems"])
                           : std::vector<SystemLabel>{};
  if (j.contains("rho") && j.contains("sigma")) {
    Matrix rho = parse_matrix(j["rho"], "rho");
    Matrix sigma = parse_matrix(j["sigma"], "sigma");
    const auto sys = systems.empty()
                         ? std::vector<SystemLabel>{{"A", static_cast<int>(rho.rows())}}
                         : systems;
    out.rho = Op(sys, rho);
    out.sigma = Op(sys, sigma);
    out.bipartite = false;
  } else if (j.contains("state")) {
    if (systems.size() < 2) {
      throw InputError("divergence input: bipartite form needs at least two labeled systems");
    }
    Matrix state = parse_matrix(j["state"], "state");
    out.rho = Op(systems, state);
    std::vector<std::string> part_a;
    if (j.contains("part_a")) {
      for (const auto& e : j["part_a"]) part_a.push_back(e.get<std::string>());
    } else {
      part_a.push_back(systems[0].name);
    }
    std::vector<std::string> part_b;
    for (const auto& s : systems) {
      bool in_a = false;
      for (const auto& n : part_a) in_a = in_a || n == s.name;
      if (!in_a) part_b.push_back(s.name);
    }
    const Op a = partial_trace(out.rho, part_b);
    const Op b = partial_trace(out.rho, part_a);
    std::vector<std::string> order;
    for (const auto& s : out.rho.systems()) order.push_back(s.name);
    out.sigma = permute_systems(tensor(a, b), order);
    out.bipartite = true;
  } else {
    throw InputError("divergence input: need either 'rho'+'sigma' or 'state'");
  }
  require_density(out.rho, "divergence input rho");
  require_density(out.sigma, "divergence input sigma");
  return out;
}

DivergenceInput load_divergence_input(const std::string& path) {
  return parse_divergence_input(read_text_file(path));
}

std::string format_float(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_row(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_float(values[i]);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

} // namespace qcap
