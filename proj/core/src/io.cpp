#include "phdae/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phdae {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  if (!std::isfinite(v)) throw ShapeError("document contains a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_vector(std::ostream& os, const Vector& v) {
  os << '[';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << fmt_double(v(i));
  }
  os << ']';
}

void emit_matrix(std::ostream& os, const Matrix& c) {
  os << '[';
  for (Index i = 0; i < c.rows(); ++i) {
    if (i) os << ',';
    os << '[';
    for (Index j = 0; j < c.cols(); ++j) {
      if (j) os << ',';
      os << fmt_double(c(i, j));
    }
    os << ']';
  }
  os << ']';
}

void emit_matfun(std::ostream& os, const MatFun& f) {
  os << '[';
  for (std::size_t k = 0; k < f.coefficients().size(); ++k) {
    if (k) os << ',';
    emit_matrix(os, f.coefficients()[k]);
  }
  os << ']';
}

Matrix parse_matrix(const json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw ShapeError(where + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix c(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ShapeError(where + ": row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ShapeError(where + ": non-numeric entry");
      c(i, k) = v.get<double>();
    }
  }
  return c;
}

MatFun parse_matfun(const json& j, Index rows, Index cols, const std::string& name) {
  if (!j.is_array() || j.empty()) {
    throw ShapeError("coefficient " + name +
                     ": expected a nonempty list of coefficient matrices "
                     "(zero matrices must be explicit)");
  }
  std::vector<Matrix> coeffs;
  coeffs.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    coeffs.push_back(
        parse_matrix(j[k], rows, cols, "coefficient " + name + "[" + std::to_string(k) + "]"));
  }
  return MatFun(std::move(coeffs));
}

}  // namespace

SystemDocument parse_system_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ShapeError(std::string("system document: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ShapeError("system document: top level must be an object");

  const auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) {
      throw ShapeError(std::string("system document: missing field '") + key + "'");
    }
    return j.at(key);
  };

  const Index n = need("n").get<Index>();
  const Index m = need("m").get<Index>();
  if (n < 1 || m < 0) throw ShapeError("system document: need n >= 1 and m >= 0");
  const double t0 = need("t0").get<double>();
  const double tf = need("tf").get<double>();

  const json& co = need("coefficients");
  if (!co.is_object()) throw ShapeError("system document: 'coefficients' must be an object");
  const auto coeff = [&](const char* key, Index rows, Index cols) -> MatFun {
    if (!co.contains(key)) {
      throw ShapeError(std::string("system document: missing coefficient '") + key +
                       "' (zero matrices must be explicit)");
    }
    return parse_matfun(co.at(key), rows, cols, key);
  };

  SystemDocument doc{PHDAESystem::assemble(
      coeff("E", n, n), coeff("Q", n, n), coeff("J", n, n), coeff("R", n, n),
      coeff("K", n, n), coeff("B", n, m), coeff("P", n, m), coeff("S", m, m),
      coeff("N", m, m), t0, tf)};

  if (j.contains("initial_state")) {
    const json& x0 = j.at("initial_state");
    if (!x0.is_array() || static_cast<Index>(x0.size()) != n) {
      throw ShapeError("system document: initial_state must have n entries");
    }
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = x0[static_cast<std::size_t>(i)].get<double>();
    doc.initial_state = v;
  }

  if (j.contains("input")) {
    const json& in = j.at("input");
    const std::string type = in.value("type", "");
    if (type == "polynomial") {
      const json& cs = in.at("coefficients");
      if (!cs.is_array() || cs.empty()) {
        throw ShapeError("system document: polynomial input needs coefficients");
      }
      std::vector<Vector> coeffs;
      for (const json& c : cs) {
        if (!c.is_array() || static_cast<Index>(c.size()) != m) {
          throw ShapeError("system document: input coefficient must have m entries");
        }
        Vector v(m);
        for (Index i = 0; i < m; ++i) v(i) = c[static_cast<std::size_t>(i)].get<double>();
        coeffs.push_back(v);
      }
      doc.input = InputSignal::polynomial(std::move(coeffs));
    } else if (type == "samples") {
      const json& ts = in.at("times");
      const json& vs = in.at("values");
      if (!ts.is_array() || !vs.is_array() || ts.size() != vs.size()) {
        throw ShapeError("system document: sampled input needs matching times/values");
      }
      std::vector<double> times;
      std::vector<Vector> values;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        times.push_back(ts[i].get<double>());
        const json& c = vs[i];
        if (!c.is_array() || static_cast<Index>(c.size()) != m) {
          throw ShapeError("system document: input sample must have m entries");
        }
        Vector v(m);
        for (Index k = 0; k < m; ++k) v(k) = c[static_cast<std::size_t>(k)].get<double>();
        values.push_back(v);
      }
      doc.input = InputSignal::sampled(std::move(times), std::move(values));
    } else {
      throw ShapeError("system document: input.type must be 'polynomial' or 'samples'");
    }
  }
  return doc;
}

SystemDocument load_system_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapeError("cannot open system document '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_document(ss.str());
}

std::string write_system_document(const SystemDocument& doc) {
  const PHDAESystem& s = doc.system;
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": 1,\n";
  os << "  \"n\": " << s.n << ",\n";
  os << "  \"m\": " << s.m << ",\n";
  os << "  \"t0\": " << fmt_double(s.t0) << ",\n";
  os << "  \"tf\": " << fmt_double(s.tf) << ",\n";
  os << "  \"coefficients\": {\n";
  const std::pair<const char*, const MatFun*> fields[] = {
      {"E", &s.E}, {"Q", &s.Q}, {"J", &s.J}, {"R", &s.R}, {"K", &s.K},
      {"B", &s.B}, {"P", &s.P}, {"S", &s.S}, {"N", &s.N}};
  for (std::size_t i = 0; i < 9; ++i) {
    os << "    \"" << fields[i].first << "\": ";
    emit_matfun(os, *fields[i].second);
    os << (i + 1 < 9 ? ",\n" : "\n");
  }
  os << "  }";
  if (doc.initial_state) {
    os << ",\n  \"initial_state\": ";
    emit_vector(os, *doc.initial_state);
  }
  if (doc.input) {
    const InputSignal& u = *doc.input;
    os << ",\n  \"input\": ";
    if (u.is_sampled()) {
      os << "{\"type\": \"samples\", \"times\": [";
      const auto& ts = u.sample_times();
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) os << ',';
        os << fmt_double(ts[i]);
      }
      os << "], \"values\": [";
      const auto& vs = u.sample_values();
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) os << ',';
        emit_vector(os, vs[i]);
      }
      os << "]}";
    } else {
      os << "{\"type\": \"polynomial\", \"coefficients\": [";
      const auto& cs = u.poly_coefficients();
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) os << ',';
        emit_vector(os, cs[i]);
      }
      os << "]}";
    }
  }
  os << "\n}\n";
  return os.str();
}

void save_system_document(const SystemDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ShapeError("cannot write system document '" + path + "'");
  out << write_system_document(doc);
}

std::string write_report_document(const ReportDocument& rep) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": 1,\n";
  os << "  \"provenance\": {\"tool\": \"" << rep.tool << "\", \"version\": \""
     << rep.version << "\", \"tolerances\": {\"tol\": " << fmt_double(rep.tol)
     << ", \"grid_points\": " << rep.grid_points << "}}";
  if (rep.structure) {
    const StructureReport& st = *rep.structure;
    os << ",\n  \"structure\": {"
       << "\"skew_symmetry_residual\": " << fmt_double(st.skew_symmetry_residual)
       << ", \"derivative_identity_residual\": "
       << fmt_double(st.derivative_identity_residual)
       << ", \"min_eig_QTE\": " << fmt_double(st.min_eig_QTE)
       << ", \"min_eig_W\": " << fmt_double(st.min_eig_W)
       << ", \"symmetry_ok\": " << (st.symmetry_ok ? "true" : "false")
       << ", \"derivative_identity_ok\": " << (st.derivative_identity_ok ? "true" : "false")
       << ", \"qte_psd_ok\": " << (st.qte_psd_ok ? "true" : "false")
       << ", \"w_psd_ok\": " << (st.w_psd_ok ? "true" : "false")
       << ", \"passed\": " << (st.passed ? "true" : "false") << "}";
  }
  const auto emit_index = [&](const char* key, const IndexData& ix) {
    os << ",\n  \"" << key << "\": {"
       << "\"hypothesis_satisfied\": " << (ix.hypothesis_satisfied ? "true" : "false")
       << ", \"mu\": " << ix.mu << ", \"r\": " << ix.r << ", \"a\": " << ix.a
       << ", \"d\": " << ix.d << ", \"nu\": " << ix.nu
       << ", \"hidden_constraints\": " << ix.A3.rows()
       << ", \"input_coupled_constraints\": " << ix.A2.rows()
       << ", \"uode_rank_full\": " << (ix.uode_rank_full ? "true" : "false")
       << ", \"uode_rank_dyn_full\": " << (ix.uode_rank_dyn_full ? "true" : "false")
       << "}";
  };
  if (rep.index) emit_index("index", *rep.index);
  if (rep.index_zero_input) emit_index("index_zero_input", *rep.index_zero_input);
  if (rep.reduction) {
    const auto& rd = *rep.reduction;
    os << ",\n  \"reduction\": {"
       << "\"n1\": " << rd.n1 << ", \"n2\": " << rd.n2 << ", \"pinned\": " << rd.pinned
       << ", \"structural_zero_residual\": " << fmt_double(rd.structural_zero_residual)
       << ", \"q_offdiag_residual\": " << fmt_double(rd.q_offdiag_residual)
       << ", \"cond_U\": " << fmt_double(rd.cond_U)
       << ", \"cond_V\": " << fmt_double(rd.cond_V);
    if (rd.x2_from_x1.size() > 0 || rd.x2_from_x1.rows() > 0) {
      os << ", \"x2_from_x1\": ";
      emit_matrix(os, rd.x2_from_x1);
      os << ", \"x2_from_u\": ";
      emit_matrix(os, rd.x2_from_u);
    }
    if (rd.consistency_residual_t0 >= 0.0) {
      os << ", \"consistency_residual_t0\": " << fmt_double(rd.consistency_residual_t0);
    }
    os << "}";
  }
  if (rep.energy) {
    const EnergyReport& en = *rep.energy;
    os << ",\n  \"energy\": {"
       << "\"max_balance_residual\": " << fmt_double(en.max_balance_residual)
       << ", \"cumulative_balance_residual\": "
       << fmt_double(en.cumulative_balance_residual)
       << ", \"cumulative_supply\": " << fmt_double(en.cumulative_supply)
       << ", \"dissipation_margin\": " << fmt_double(en.dissipation_margin)
       << ", \"violated\": " << (en.violated ? "true" : "false") << "}";
  }
  os << "\n}\n";
  return os.str();
}

void save_report_document(const ReportDocument& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ShapeError("cannot write report document '" + path + "'");
  out << write_report_document(rep);
}

std::string write_trajectory_csv(const Trajectory& traj, Index n, Index m) {
  std::ostringstream os;
  os << "t";
  for (Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Index i = 1; i <= m; ++i) os << ",y" << i;
  for (Index i = 1; i <= m; ++i) os << ",u" << i;
  os << ",H\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << fmt_double(traj.times[k]);
    for (Index i = 0; i < n; ++i) os << ',' << fmt_double(traj.states[k](i));
    for (Index i = 0; i < m; ++i) os << ',' << fmt_double(traj.outputs[k](i));
    for (Index i = 0; i < m; ++i) os << ',' << fmt_double(traj.inputs[k](i));
    os << ',' << fmt_double(traj.hamiltonian[k]) << '\n';
  }
  return os.str();
}

void save_trajectory_csv(const Trajectory& traj, Index n, Index m,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ShapeError("cannot write trajectory CSV '" + path + "'");
  out << write_trajectory_csv(traj, n, m);
}

std::string tool_version() { return "0.1.0"; }

}  // namespace phdae
