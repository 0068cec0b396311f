#pragma once

// Command implementations for the qest executable.  Exit codes:
//   0 success, 1 validation failure, 2 parse error, 3 domain/range error, 4 I/O error.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qest/io.hpp"
#include "qest/qest.hpp"

namespace qest::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kValidation = 1, kParse = 2, kDomain = 3, kIo = 4 };

class IoError : public Error {
public:
  using Error::Error;
};

/// Default tolerance for residual checks; QEST_TOL overrides it.
inline double default_tolerance() {
  if (const char* env = std::getenv("QEST_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) throw io::ParseError("QEST_TOL: expected a positive number");
    return v;
  }
  return 1e-9;
}

/// 17 significant digits, '.' separator, independent of the C locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline io::BuiltChannel load(const std::string& path) { return io::build(io::parse_channel_spec(read_file(path))); }

inline const LowNoiseChannel& require_low_noise(const io::BuiltChannel& ch, const char* what) {
  if (const auto* ln = std::get_if<LowNoiseChannel>(&ch)) return *ln;
  throw DegenerateError(std::string(what) + " is defined for low-noise channels only");
}

inline const LowNoiseChannel& require_qubit_low_noise(const io::BuiltChannel& ch, const char* what) {
  const auto& ln = require_low_noise(ch, what);
  if (ln.dim != 2) throw RangeError(std::string(what) + ": unsupported dimension " + std::to_string(ln.dim) + " (qubit channels only)");
  return ln;
}

inline std::vector<double> sample_points(const Interval& dom) {
  const double top = std::isfinite(dom.hi) ? (dom.hi_open ? dom.hi * (1.0 - 1e-6) : dom.hi) : 1.0;
  return {0.0, 0.25 * top, 0.5 * top, 0.75 * top, top};
}

inline Method parse_method(const std::string& m) {
  if (m == "closed") return Method::ClosedForm;
  if (m == "direct") return Method::Direct;
  if (m == "both") return Method::Both;
  throw io::ParseError("--method: expected closed, direct or both");
}

// Sweep row: Fisher information at the optimal pure and extended inputs.
struct SweepRow {
  double epsilon, qfi_s, qfi_sa;
};

inline SweepRow sweep_row(const LowNoiseChannel& ln, const OptimalInputs& inputs, double eps) {
  const auto fam = as_family(ln);
  const double s = channel_qfi(fam, inputs.pure.density(), eps).qfi;
  const double sa = channel_qfi(extend_with_ancilla(fam, 2), inputs.extended.density(), eps).qfi;
  return {eps, s, sa};
}

// "bell" or "x,y,z".
inline DensityOperator parse_input(const std::string& text, bool ancilla, Eigen::Index dim) {
  if (text == "bell") {
    if (dim != 2) throw RangeError("--input bell needs a qubit channel");
    ComplexVector psi = ComplexVector::Zero(4);
    psi(0) = psi(3) = 1.0 / std::numbers::sqrt2;
    return PureState(psi).density();
  }
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw io::ParseError("--input: expected 'bell' or 'x,y,z'");
    }
  }
  if (xs.size() != 3) throw io::ParseError("--input: expected 'bell' or 'x,y,z'");
  if (dim != 2) throw RangeError("--input x,y,z needs a qubit channel");
  const BlochVector x(Vec3(xs[0], xs[1], xs[2]));
  const auto rho = bloch_to_density(x);
  return ancilla ? purify(rho).density() : rho;
}

inline json spectrum(const ComplexMatrix& m) {
  const auto e = hermitian_eig(m);
  json out = json::array();
  for (Eigen::Index i = 0; i < e.values.size(); ++i) out.push_back(e.values(i));
  return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline int cmd_validate(const std::string& path, std::ostream& out) {
  const double tol = default_tolerance();
  const auto ch = detail::load(path);
  json doc;
  bool ok = true;
  if (const auto* ln = std::get_if<LowNoiseChannel>(&ch)) {
    json tp = json::array();
    for (double eps : detail::sample_points(ln->validity)) {
      const auto r = validate_trace_preserving(instantiate(*ln, eps), tol);
      ok = ok && r.ok;
      tp.push_back({{"epsilon", eps}, {"residual", r.residual}});
    }
    const double fo = validate_first_order(*ln);
    const double kn = kappa_norm_residual(*ln);
    ok = ok && fo <= tol && kn <= tol;
    doc = {{"kind", "low_noise"}, {"trace_preserving", tp}, {"first_order_residual", fo}, {"kappa_norm_residual", kn}};
  } else {
    const auto& fam = std::get<UnitaryFamily>(ch);
    json un = json::array();
    for (double theta : {0.0, 0.5, 1.0, 2.0, std::numbers::pi}) {
      const auto u = fam(theta);
      const double r = max_abs(u.adjoint() * u - identity(u.rows()));
      ok = ok && r <= tol;
      un.push_back({{"theta", theta}, {"residual", r}});
    }
    doc = {{"kind", "unitary"}, {"unitarity", un}};
  }
  doc["tolerance"] = tol;
  doc["ok"] = ok;
  out << doc.dump() << '\n';
  return ok ? kOk : kValidation;
}

inline int cmd_eta(const std::string& path, const std::string& method, std::optional<std::size_t> grid, std::ostream& out) {
  const auto ch = detail::load(path);
  const auto& ln = detail::require_qubit_low_noise(ch, "eta");
  const auto report = enhancement_factor(ln.ms, detail::parse_method(method));
  json doc = io::to_json(report);
  if (grid) doc["eta_bruteforce"] = eta_bruteforce(ln.ms, *grid);
  out << doc.dump() << '\n';
  return kOk;
}

inline int cmd_qfi(const std::string& path, double eps, const std::string& input, bool ancilla, std::ostream& out) {
  const auto ch = detail::load(path);
  if (input == "bell") ancilla = true;
  ChannelFamily fam = std::holds_alternative<LowNoiseChannel>(ch) ? as_family(std::get<LowNoiseChannel>(ch))
                                                                  : as_channel_family(std::get<UnitaryFamily>(ch));
  const Eigen::Index dim = fam(fam.domain().contains(eps) ? eps : std::max(0.0, fam.domain().lo)).dim();
  if (ancilla) fam = extend_with_ancilla(fam, dim);
  const auto rho = detail::parse_input(input, ancilla, dim);
  const auto res = channel_qfi(fam, rho, eps);
  json doc = {{"epsilon", eps}, {"input", input}, {"ancilla", ancilla}, {"qfi", res.qfi},
              {"sld_eigenvalues", detail::spectrum(res.sld)}};
  if (res.qfi > 1e-12) {
    const ComplexMatrix a = optimal_estimator(res) - eps * identity(res.rho.dim());
    doc["estimator_variance"] = (res.rho.matrix() * a * a).trace().real();
    doc["inverse_qfi"] = 1.0 / res.qfi;
  } else {
    doc["estimator_variance"] = nullptr;
    doc["inverse_qfi"] = nullptr;
  }
  out << doc.dump() << '\n';
  return kOk;
}

inline int cmd_sweep(const std::string& path, double eps_start, double eps_end, int steps, const std::string& out_path,
                     std::ostream& out) {
  const auto ch = detail::load(path);
  const auto& ln = detail::require_qubit_low_noise(ch, "sweep");
  if (steps < 1) throw RangeError("--steps must be >= 1");
  if (!(eps_start > 0.0) || !(eps_end >= eps_start) || (steps > 1 && !(eps_end > eps_start)))
    throw RangeError("sweep needs 0 < eps-start < eps-end");
  if (!ln.validity.contains(eps_end)) throw RangeError("eps-end lies outside the validity interval " + ln.validity.describe());

  const auto inputs = optimal_input_states(enhancement_factor(ln.ms, Method::Direct));
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i) {
    if (i == 0 || i == steps - 1)
      grid.push_back(i == 0 ? eps_start : eps_end);
    else
      grid.push_back(eps_start * std::pow(eps_end / eps_start, static_cast<double>(i) / (steps - 1)));
  }

  std::vector<std::future<detail::SweepRow>> pending;
  for (double eps : grid) pending.push_back(std::async(std::launch::async, detail::sweep_row, std::cref(ln), std::cref(inputs), eps));
  std::vector<detail::SweepRow> rows;
  for (auto& f : pending) rows.push_back(f.get());

  std::ostringstream csv;
  csv << "epsilon,qfi_S,qfi_SA,eps_qfi_S,eps_qfi_SA\n";
  for (const auto& r : rows)
    csv << format_number(r.epsilon) << ',' << format_number(r.qfi_s) << ',' << format_number(r.qfi_sa) << ','
        << format_number(r.epsilon * r.qfi_s) << ',' << format_number(r.epsilon * r.qfi_sa) << '\n';

  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + out_path);
  file << csv.str();
  file.close();
  if (!file) throw IoError("failed writing " + out_path);
  out << json{{"out", out_path}, {"rows", rows.size()}}.dump() << '\n';
  return kOk;
}

inline int cmd_demo(const std::string& name, std::ostream& out) {
  json doc = {{"name", name}};
  if (name == "depolarizing" || name == "gad") {
    const auto ln = name == "gad" ? catalog::gad(1.0) : catalog::depolarizing();
    const auto report = enhancement_factor(ln.ms, name == "gad" ? Method::Direct : Method::Both);
    const auto inputs = optimal_input_states(report);
    const auto fam = as_family(ln);
    doc["eta"] = io::to_json(report);
    doc["epsilon"] = 0.1;
    doc["qfi_S"] = channel_qfi(fam, inputs.pure.density(), 0.1).qfi;
    doc["qfi_SA"] = channel_qfi(extend_with_ancilla(fam, 2), inputs.extended.density(), 0.1).qfi;
  } else if (name == "rotation") {
    const auto fam = catalog::rotation_unitary(Vec3::UnitZ());
    const auto h = log_hamiltonian(fam, 1.0);
    const auto check = no_enhancement_check(fam, 1.0, 2);
    doc["max_qfi"] = unitary_qfi_max(h).qfi;
    doc["extended_max_qfi"] = check.extended_max;
    doc["ratio"] = check.ratio;
  } else {
    throw io::ParseError("demo: unknown name '" + name + "' (depolarizing, gad, rotation)");
  }
  out << doc.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Fisher information and ancilla-assisted enhancement for low-noise channels", "qest"};
  app.require_subcommand(1);

  std::string file, method = "direct", input, out_path, demo_name;
  std::optional<std::size_t> grid;
  double eps = 0.0, eps_start = 0.0, eps_end = 0.0;
  int steps = 0;
  bool ancilla = false;

  auto* validate = app.add_subcommand("validate", "Check trace preservation and first-order consistency");
  validate->add_option("file", file, "Channel JSON file")->required();

  auto* eta = app.add_subcommand("eta", "Ancilla-assisted enhancement factor of a qubit low-noise channel");
  eta->add_option("file", file, "Channel JSON file")->required();
  eta->add_option("--method", method, "closed | direct | both")->capture_default_str();
  eta->add_option("--grid", grid, "Also run the brute-force oracle with this grid size (>= 1000)");

  auto* qfi_cmd = app.add_subcommand("qfi", "Fisher information for a given input");
  qfi_cmd->add_option("file", file, "Channel JSON file")->required();
  qfi_cmd->add_option("--epsilon", eps, "Channel parameter")->required();
  qfi_cmd->add_option("--input", input, "'bell' or Bloch vector 'x,y,z'")->required();
  qfi_cmd->add_flag("--ancilla", ancilla, "Probe Gamma (x) id with a purified input");

  auto* sweep = app.add_subcommand("sweep", "Logarithmic epsilon sweep written as CSV");
  sweep->add_option("file", file, "Channel JSON file")->required();
  sweep->add_option("--eps-start", eps_start)->required();
  sweep->add_option("--eps-end", eps_end)->required();
  sweep->add_option("--steps", steps)->required();
  sweep->add_option("--out", out_path)->required();

  auto* demo = app.add_subcommand("demo", "Built-in examples: depolarizing, gad, rotation");
  demo->add_option("name", demo_name)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }

  try {
    if (*validate) return cmd_validate(file, out);
    if (*eta) return cmd_eta(file, method, grid, out);
    if (*qfi_cmd) return cmd_qfi(file, eps, input, ancilla, out);
    if (*sweep) return cmd_sweep(file, eps_start, eps_end, steps, out_path, out);
    if (*demo) return cmd_demo(demo_name, out);
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const RangeError& e) {
    err << "range error: " << e.what();
    if (*qfi_cmd) err << " (the Fisher information diverges as epsilon -> 0; see `qest eta` for its 1/epsilon coefficient)";
    err << '\n';
    return kDomain;
  } catch (const Error& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  }
  return kParse;
}

} // namespace qest::cli
