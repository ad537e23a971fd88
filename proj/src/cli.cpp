#include "lgle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "lgle/acceptance.hpp"
#include "lgle/gibbs.hpp"
#include "lgle/kpz.hpp"
#include "lgle/polymer.hpp"
#include "lgle/rsk.hpp"
#include "lgle/verify.hpp"

#ifndef LGLE_VERSION
#define LGLE_VERSION "unknown"
#endif

namespace lgle::cli {

namespace fs = std::filesystem;
using verify::StatReport;

// ---------------------------------------------------------------------------
// config

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("config: bad value for " + key + ": '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> parse_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (v.empty()) return out;
  std::stringstream ss(v);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(parse_num<int>(key, trim(tok)));
  return out;
}

// One table drives text, JSON and parsing so the three stay in sync.
struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<nlohmann::ordered_json(const RunConfig&)> to_j;
  std::function<void(RunConfig&, const nlohmann::json&)> from_j;
};

template <class T>
Field num_field(const char* key, T RunConfig::*m) {
  return {key,
          [m](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt_double(c.*m);
            else return std::to_string(c.*m);
          },
          [m, key](RunConfig& c, const std::string& v) { c.*m = parse_num<T>(key, v); },
          [m](const RunConfig& c) { return nlohmann::ordered_json(c.*m); },
          [m](RunConfig& c, const nlohmann::json& j) { c.*m = j.get<T>(); }};
}

Field bool_field(const char* key, bool RunConfig::*m) {
  return {key, [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); },
          [m, key](RunConfig& c, const std::string& v) { c.*m = parse_bool(key, v); },
          [m](const RunConfig& c) { return nlohmann::ordered_json(c.*m); },
          [m](RunConfig& c, const nlohmann::json& j) { c.*m = j.get<bool>(); }};
}

Field str_field(const char* key, std::string RunConfig::*m) {
  return {key, [m](const RunConfig& c) { return c.*m; },
          [m](RunConfig& c, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return nlohmann::ordered_json(c.*m); },
          [m](RunConfig& c, const nlohmann::json& j) { c.*m = j.get<std::string>(); }};
}

Field list_field(const char* key, std::vector<int> RunConfig::*m) {
  return {key, [m](const RunConfig& c) { return join(c.*m); },
          [m, key](RunConfig& c, const std::string& v) { c.*m = parse_list(key, v); },
          [m](const RunConfig& c) { return nlohmann::ordered_json(c.*m); },
          [m](RunConfig& c, const nlohmann::json& j) { c.*m = j.get<std::vector<int>>(); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      num_field("theta", &RunConfig::theta),
      num_field("r", &RunConfig::r),
      num_field("seed", &RunConfig::seed),
      num_field("replicas", &RunConfig::replicas),
      list_field("N_list", &RunConfig::N_list),
      num_field("N", &RunConfig::N),
      num_field("T", &RunConfig::T),
      num_field("M", &RunConfig::M),
      num_field("steps", &RunConfig::steps),
      num_field("K", &RunConfig::K),
      num_field("trials", &RunConfig::trials),
      num_field("window_a", &RunConfig::window_a),
      num_field("window_b", &RunConfig::window_b),
      num_field("threshold", &RunConfig::threshold),
      num_field("samples", &RunConfig::samples),
      num_field("jobs", &RunConfig::jobs),
      str_field("pairs", &RunConfig::pairs),
      bool_field("control", &RunConfig::control),
      str_field("boundary", &RunConfig::boundary),
      str_field("output_dir", &RunConfig::output_dir),
      str_field("format", &RunConfig::format),
      bool_field("svg", &RunConfig::svg),
      bool_field("quick", &RunConfig::quick),
      list_field("only", &RunConfig::only),
  };
  return f;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid configuration: " + what);
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.theta > 0 && c.theta <= 1000, "theta must lie in (0, 1000]");
  require(c.r > 0 && c.r <= 1000, "r must lie in (0, 1000]");
  require(c.replicas >= 1 && c.replicas <= 100000000, "replicas must lie in [1, 1e8]");
  require(!c.N_list.empty(), "N_list must be nonempty");
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    require(c.N_list[i] >= 1 && c.N_list[i] <= 100000, "N_list entries must lie in [1, 1e5]");
    require(i == 0 || c.N_list[i] > c.N_list[i - 1], "N_list must be strictly ascending");
  }
  require(c.N >= 1 && c.N <= 100000, "N must lie in [1, 1e5]");
  require(c.T >= 2 && c.T <= 1000000, "T must lie in [2, 1e6]");
  require(c.M > 0 && c.M <= 1e6, "M must lie in (0, 1e6]");
  require(c.steps >= 0 && c.steps <= 1000000, "steps must lie in [0, 1e6]");
  require(c.K >= 1, "K must be >= 1");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.window_a >= 1 && c.window_b > c.window_a, "window must satisfy 1 <= window_a < window_b");
  require(c.threshold > 0, "threshold must be positive");
  require(c.samples >= 1, "samples must be >= 1");
  require(c.jobs >= 1 && c.jobs <= 256, "jobs must lie in [1, 256]");
  require(c.pairs == "random" || c.pairs == "shift" || c.pairs == "equal",
          "pairs must be random, shift or equal");
  require(c.format == "csv" || c.format == "json" || c.format == "both", "format must be csv, json or both");
  for (int id : c.only) require(id >= 1 && id <= 12, "only: criterion ids are 1..12");
}

std::string to_text(const RunConfig& c) {
  std::string s;
  for (const auto& f : fields()) s += std::string(f.key) + " = " + f.get(c) + "\n";
  return s;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::stringstream ss(text);
  int lineno = 0;
  for (std::string line; std::getline(ss, line);) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
    const auto& fs_ = fields();
    const auto it = std::find_if(fs_.begin(), fs_.end(), [&](const Field& f) { return key == f.key; });
    if (it == fs_.end()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->set(base, val);
  }
  return base;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : fields()) j[f.key] = f.to_j(c);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& f : fields()) {
    if (j.contains(f.key)) {
      try {
        f.from_j(base, j.at(f.key));
      } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("config: bad JSON value for ") + f.key);
      }
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

std::string f2(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

std::string g4(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label, bool log_x,
                       bool log_y) {
  if (series.empty()) throw std::invalid_argument("render_svg: no series");
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: x and y sizes differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("render_svg: non-finite point");
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("render_svg: no points");
  if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const double W = 640, H = 400, L = 70, R = 170, Tm = 40, B = 50;
  auto px = [&](double a) { return L + (a - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double b) { return H - B - (b - y0) / (y1 - y0) * (H - Tm - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  o << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  o << "<text x=\"" << f2(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << xml_escape(title) << "</text>\n";
  o << "<rect x=\"" << f2(L) << "\" y=\"" << f2(Tm) << "\" width=\"" << f2(W - L - R) << "\" height=\""
    << f2(H - Tm - B) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double a = x0 + (x1 - x0) * k / 4.0, b = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << f2(px(a)) << "\" y=\"" << f2(H - B + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << g4(log_x ? std::pow(10.0, a) : a) << "</text>\n";
    o << "<text x=\"" << f2(L - 6) << "\" y=\"" << f2(py(b) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << g4(log_y ? std::pow(10.0, b) : b) << "</text>\n";
  }
  o << "<text x=\"" << f2(L + (W - L - R) / 2) << "\" y=\"" << f2(H - 12)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(x_label)
    << (log_x ? " (log)" : "") << "</text>\n";
  o << "<text x=\"16\" y=\"" << f2(Tm + (H - Tm - B) / 2) << "\" transform=\"rotate(-90 16 "
    << f2(Tm + (H - Tm - B) / 2) << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(y_label) << (log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 6];
    if (s.x.size() >= 2) {
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        o << (i ? " " : "") << f2(px(tx(s.x[i]))) << "," << f2(py(ty(s.y[i])));
      }
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      o << "<circle cx=\"" << f2(px(tx(s.x[i]))) << "\" cy=\"" << f2(py(ty(s.y[i]))) << "\" r=\"3\" fill=\""
        << col << "\"/>\n";
    }
    const double ly = Tm + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << f2(W - R + 12) << "\" y1=\"" << f2(ly - 4) << "\" x2=\"" << f2(W - R + 32)
      << "\" y2=\"" << f2(ly - 4) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << f2(W - R + 38) << "\" y=\"" << f2(ly)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_plot(const std::vector<Series>& series, const std::string& path, const std::string& title,
               const std::string& x_label, const std::string& y_label, bool log_x, bool log_y) {
  const std::string svg = render_svg(series, title, x_label, y_label, log_x, log_y);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_plot: cannot open " + path);
  f << svg;
  if (!f) throw std::runtime_error("emit_plot: write failed for " + path);
}

// ---------------------------------------------------------------------------
// run

namespace {

struct Session {
  RunConfig cfg;
  std::string subcommand;
  std::vector<std::string> argv;
  fs::path dir;
  std::vector<StatReport> reports;
  std::vector<std::string> outputs;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    outputs.push_back(p.string());
    return f;
  }
  void report(StatReport r) {
    *out << verify::to_json_line(r) << "\n";
    reports.push_back(std::move(r));
  }
  bool wants_csv() const { return cfg.format != "json"; }
  bool wants_json() const { return cfg.format != "csv"; }
};

std::string g17(double v) { return fmt_double(v); }

void write_manifest(Session& s, int code) {
  nlohmann::ordered_json j;
  j["tool"] = "lgle";
  j["version"] = LGLE_VERSION;
  j["subcommand"] = s.subcommand;
  j["argv"] = s.argv;
  j["config"] = to_json(s.cfg);
  j["seed"] = s.cfg.seed;
  j["output_dir"] = s.dir.string();
  j["exit_code"] = code;
  auto reps = nlohmann::ordered_json::array();
  for (const auto& r : s.reports) reps.push_back(nlohmann::ordered_json::parse(verify::to_json_line(r)));
  j["reports"] = reps;
  j["outputs"] = s.outputs;
  fs::create_directories(s.dir);
  std::ofstream f(s.dir / (s.subcommand + "_manifest.json"), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write manifest in " + s.dir.string());
  f << j.dump(2) << "\n";
}

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

gibbs::BoundaryData load_boundary(const std::string& path) {
  if (path.empty()) {
    gibbs::BoundaryData b;
    b.T = 6;
    b.x = 0.0;
    b.y = -1.0;
    b.z = {0.3, 0.2, -0.4, 0.1, -1.5, 0.0};
    return b;
  }
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read boundary file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
    gibbs::BoundaryData b;
    b.T = j.at("T").get<int>();
    b.x = j.at("x").get<double>();
    b.y = j.at("y").get<double>();
    for (const auto& e : j.at("z")) {
      if (e.is_null() || (e.is_string() && e.get<std::string>() == "-inf")) {
        b.z.push_back(gibbs::kMinusInf);
      } else {
        b.z.push_back(e.get<double>());
      }
    }
    b.validate();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("boundary file " + path + ": " + e.what());
  }
}

// --- subcommands -----------------------------------------------------------

int cmd_kpz(Session& s) {
  const auto k = kpz::kpz_report(s.cfg.theta, s.cfg.r);
  const std::string js = kpz::to_json(k);
  *s.out << js << "\n";
  s.open("kpz_constants.json") << js << "\n";
  auto rep = verify::make_report("kpz_identity_residual", k.max_residual(), 1e-9, 1);
  rep.metadata["theta"] = s.cfg.theta;
  rep.metadata["r"] = s.cfg.r;
  s.reports.push_back(rep);
  return rep.pass ? 0 : 1;
}

int cmd_sample_polymer(Session& s) {
  const auto& c = s.cfg;
  const auto rows = verify::simulate_polymer_rows(c.theta, c.r, c.N, c.replicas, c.seed, 1.0, c.jobs);
  auto f = s.open("polymer.csv");
  f << "seed,theta,N,n,logZ,F\n";
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    const double lz = rows.log_z(i);
    f << c.seed << "," << g17(c.theta) << "," << c.N << "," << rows.n << "," << g17(lz) << ","
      << g17(polymer::rescaled_free_energy(lz, rows.n, c.N, c.theta)) << "\n";
  }
  *s.err << "wrote " << rows.rows.size() << " replicas to " << s.outputs.back() << "\n";
  return 0;
}

int cmd_sample_chain(Session& s) {
  const auto& c = s.cfg;
  RngStream rng(c.seed, 0);
  const auto tr = rsk::run_chain(c.N, c.theta, c.M, c.steps, rng);
  if (s.wants_json()) {
    nlohmann::ordered_json j;
    j["N"] = c.N;
    j["theta"] = c.theta;
    j["M"] = c.M;
    j["steps"] = c.steps;
    j["seed"] = c.seed;
    auto states = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < tr.states.size(); ++n) {
      states.push_back({{"step", n}, {"log_z", tr.states[n].log_rows}});
    }
    j["states"] = states;
    s.open("chain.json") << j.dump() << "\n";
  }
  if (s.wants_csv()) {
    const int K = std::min(c.K, c.N);
    auto f = s.open("chain_top_curves.csv");
    f << "step,curve,log_z\n";
    for (std::size_t n = 0; n < tr.states.size(); ++n) {
      for (int i = 1; i <= K; ++i) f << n << "," << i << "," << g17(tr.states[n].log_z(c.N, i)) << "\n";
    }
  }
  return 0;
}

int cmd_gibbs_resample(Session& s) {
  const auto& c = s.cfg;
  const auto b = load_boundary(c.boundary);
  const gibbs::GibbsSampler gs(b, c.theta);
  std::vector<std::vector<double>> draws(static_cast<std::size_t>(c.samples));
  verify::parallel_for(draws.size(), c.jobs, [&](std::size_t i) {
    RngStream rng(c.seed, i);
    draws[i] = gs.sample(rng);
  });
  if (s.wants_csv()) {
    auto f = s.open("gibbs_resample.csv");
    f << "sample,site,value\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
      for (int m = 1; m <= b.T; ++m) f << i << "," << m << "," << g17(draws[i][m - 1]) << "\n";
    }
  }
  if (s.wants_json()) {
    nlohmann::ordered_json j, bj;
    bj["T"] = b.T;
    bj["x"] = b.x;
    bj["y"] = b.y;
    auto z = nlohmann::ordered_json::array();
    for (double v : b.z) z.push_back(finite_or_null(v));
    bj["z"] = z;
    j["theta"] = c.theta;
    j["seed"] = c.seed;
    j["boundary"] = bj;
    j["samples"] = draws;
    s.open("gibbs_resample.json") << j.dump() << "\n";
  }
  return 0;
}

verify::StatReport control_report(const verify::StatReport& ctl, double threshold) {
  auto rep = verify::make_report(ctl.name, ctl.statistic, threshold, ctl.n_samples, verify::Direction::AtLeast);
  rep.metadata = ctl.metadata;
  return rep;
}

int cmd_verify_monotone(Session& s) {
  const auto& c = s.cfg;
  const auto mode = c.pairs == "shift" ? verify::PairMode::Shift
                    : c.pairs == "equal" ? verify::PairMode::Equal
                                         : verify::PairMode::Random;
  auto rep = verify::monotone_check(c.theta, c.T, c.trials, c.seed, mode, c.control, c.jobs);
  // for the control, success means violations were found
  if (c.control) rep = control_report(rep, 1.0);
  s.report(rep);
  return rep.pass ? 0 : 1;
}

int cmd_verify_gibbs(Session& s) {
  const auto& c = s.cfg;
  auto rep = verify::gibbs_invariance_check(c.N, c.theta, c.window_a, c.window_b, c.replicas, c.seed, c.M,
                                            c.control, c.threshold, c.jobs);
  if (c.control) rep = control_report(rep, c.threshold);
  s.report(rep);
  return rep.pass ? 0 : 1;
}

int cmd_tw_scan(Session& s) {
  const auto& c = s.cfg;
  const auto rows = verify::tw_convergence_scan(c.theta, c.r, c.N_list, c.replicas, c.seed, c.jobs);
  {
    auto f = s.open("tw_scan.csv");
    f << "N,ks,mean,var,replicas,seed\n";
    for (const auto& r : rows) {
      f << r.N << "," << g17(r.ks) << "," << g17(r.mean) << "," << g17(r.var) << "," << r.replicas << ","
        << r.seed << "\n";
    }
  }
  auto inv = verify::make_report("ks_inversions", verify::ks_inversions(rows), 1.0, c.replicas);
  inv.metadata["theta"] = c.theta;
  inv.metadata["r"] = c.r;
  inv.metadata["N_list"] = c.N_list;
  s.report(inv);
  const auto& last = rows.back();
  if (last.N >= 512) {
    auto k = verify::make_report("ks_largest_N", last.ks, 0.12, last.replicas);
    k.metadata["N"] = last.N;
    s.report(k);
    auto m = verify::make_report("mean_error_largest_N", std::abs(last.mean + 1.771), 0.25, last.replicas);
    m.metadata["N"] = last.N;
    m.metadata["mean"] = last.mean;
    s.report(m);
  }
  if (c.svg) {
    Series ks{"KS vs F_GUE", {}, {}}, var{"var(F)", {}, {}};
    for (const auto& r : rows) {
      ks.x.push_back(r.N);
      ks.y.push_back(r.ks);
      var.x.push_back(r.N);
      var.y.push_back(r.var);
    }
    const auto p = (s.dir / "tw_scan.svg").string();
    emit_plot({ks, var}, p, "Rescaled free energy vs Tracy-Widom GUE", "N", "value", true, false);
    s.outputs.push_back(p);
  }
  return std::all_of(s.reports.begin(), s.reports.end(), [](const auto& r) { return r.pass; }) ? 0 : 1;
}

int cmd_exponent_scan(Session& s) {
  const auto& c = s.cfg;
  std::vector<std::pair<double, double>> pts;
  auto f = s.open("exponent_scan.csv");
  f << "N,var_log_z,replicas,seed\n";
  for (int N : c.N_list) {
    const auto rows = verify::simulate_polymer_rows(c.theta, c.r, N, c.replicas, c.seed, 1.0, c.jobs);
    double m = 0, v = 0;
    const auto n = static_cast<double>(rows.rows.size());
    for (std::size_t i = 0; i < rows.rows.size(); ++i) m += rows.log_z(i);
    m /= n;
    for (std::size_t i = 0; i < rows.rows.size(); ++i) v += (rows.log_z(i) - m) * (rows.log_z(i) - m);
    v /= n - 1;
    pts.emplace_back(N, v);
    f << N << "," << g17(v) << "," << c.replicas << "," << c.seed << "\n";
  }
  f.close();
  const auto fit = verify::exponent_fit(pts);
  auto rep = verify::make_report("slope_error", std::abs(fit.slope - 2.0 / 3.0), 0.08,
                                 static_cast<std::int64_t>(pts.size()));
  rep.metadata["slope"] = fit.slope;
  rep.metadata["intercept"] = fit.intercept;
  rep.metadata["r_squared"] = fit.r_squared;
  rep.metadata["slope_se"] = fit.slope_se;
  s.report(rep);
  if (c.svg) {
    Series data{"Var log Z", {}, {}}, line{"fit", {}, {}};
    for (const auto& [N, v] : pts) {
      data.x.push_back(N);
      data.y.push_back(v);
      line.x.push_back(N);
      line.y.push_back(std::exp(fit.intercept + fit.slope * std::log(N)));
    }
    const auto p = (s.dir / "exponent_scan.svg").string();
    emit_plot({data, line}, p, "Fluctuation exponent", "N", "variance", true, true);
    s.outputs.push_back(p);
  }
  return rep.pass ? 0 : 1;
}

int cmd_bridge_check(Session& s) {
  const auto& c = s.cfg;
  const auto rep = verify::bridge_midpoint_check(c.theta, c.r, c.T, c.samples, c.seed, c.threshold, c.jobs);
  s.report(rep);
  return rep.pass ? 0 : 1;
}

int cmd_verify_all(Session& s) {
  const auto& c = s.cfg;
  acceptance::Options opt;
  opt.quick = c.quick;
  opt.jobs = c.jobs;
  opt.seed = c.seed;
  opt.only.insert(c.only.begin(), c.only.end());
  int failed = 0;
  auto f = s.open("verify_all_reports.jsonl");
  acceptance::run(opt, [&](const acceptance::CriterionResult& r) {
    failed += !r.pass;
    *s.out << acceptance::summary_line(r) << "\n";
    s.out->flush();
    for (const auto& rep : r.reports) {
      f << verify::to_json_line(rep) << "\n";
      s.reports.push_back(rep);
    }
    f.flush();
  });
  *s.out << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}

struct Command {
  const char* name;
  const char* help;
  int (*fn)(Session&);
  std::function<void(RunConfig&)> defaults;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> c{
      {"kpz-constants", "Scaling constants and identity residuals as JSON", cmd_kpz, [](RunConfig&) {}},
      {"sample-polymer", "Sample log Z(floor(rN), N) replicas to CSV", cmd_sample_polymer,
       [](RunConfig& r) { r.N = 64; }},
      {"sample-chain", "Run the geometric RSK chain and export the trace", cmd_sample_chain,
       [](RunConfig& r) { r.N = 4; }},
      {"gibbs-resample", "Draw from a single-curve Gibbs measure (grand coupling)", cmd_gibbs_resample,
       [](RunConfig&) {}},
      {"verify-monotone", "Monotone coupling check", cmd_verify_monotone, [](RunConfig&) {}},
      {"verify-gibbs", "Gibbs invariance of the top two curves", cmd_verify_gibbs,
       [](RunConfig& r) {
         r.N = 4;
         r.replicas = 10000;
       }},
      {"tw-scan", "Tracy-Widom convergence scan", cmd_tw_scan, [](RunConfig&) {}},
      {"exponent-scan", "Variance exponent of log Z", cmd_exponent_scan,
       [](RunConfig& r) { r.N_list = {64, 128, 256, 512, 1024}; }},
      {"bridge-check", "Midpoint of a long bridge vs its Gaussian limit", cmd_bridge_check,
       [](RunConfig& r) {
         r.T = 512;
         r.samples = 10000;
         r.threshold = 0.03;
       }},
      {"verify-all", "Run the acceptance suite", cmd_verify_all, [](RunConfig&) {}},
  };
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void add_options(CLI::App* sub, const std::string& name, RunConfig& c, std::string& config_path,
                 std::string& manifest_path) {
  sub->add_option("--config", config_path, "key = value config file (flags override it)");
  sub->add_option("--from-manifest", manifest_path, "rerun with the config stored in a manifest");
  sub->add_option("--out", c.output_dir, "output directory (default $LGLE_OUTPUT_DIR or ./lgle-output)");
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--jobs", c.jobs, "worker threads");
  sub->add_option("--theta", c.theta, "inverse-gamma parameter");
  const bool scan = name == "tw-scan" || name == "exponent-scan";
  if (name != "gibbs-resample" && name != "verify-monotone" && name != "verify-all") {
    sub->add_option("--r", c.r, "slope n/N");
  }
  if (scan) {
    sub->add_option("--N", c.N_list, "ascending list, comma separated")->delimiter(',');
    sub->add_option("--replicas", c.replicas, "replicas per N");
    sub->add_flag("--svg,!--no-svg", c.svg, "write an SVG plot");
  }
  if (name == "sample-polymer") {
    sub->add_option("--N", c.N, "number of rows");
    sub->add_option("--replicas", c.replicas, "replicas");
  }
  if (name == "sample-chain") {
    sub->add_option("--N", c.N, "levels");
    sub->add_option("--M", c.M, "initial-condition spread");
    sub->add_option("--steps", c.steps, "chain steps");
    sub->add_option("--K", c.K, "top curves in the CSV export");
    sub->add_option("--format", c.format, "csv, json or both");
  }
  if (name == "gibbs-resample") {
    sub->add_option("--boundary", c.boundary, "boundary JSON {T, x, y, z}");
    sub->add_option("--samples", c.samples, "number of draws");
    sub->add_option("--format", c.format, "csv, json or both");
  }
  if (name == "verify-monotone") {
    sub->add_option("--T", c.T, "largest curve length (<= 10)");
    sub->add_option("--trials", c.trials, "boundary pairs");
    sub->add_option("--pairs", c.pairs, "random, shift or equal");
    sub->add_flag("--control", c.control, "independent uniforms (negative control)");
  }
  if (name == "verify-gibbs") {
    sub->add_option("--N", c.N, "chain levels");
    sub->add_option("--a", c.window_a, "window start");
    sub->add_option("--b", c.window_b, "window end");
    sub->add_option("--replicas", c.replicas, "replicas");
    sub->add_option("--M", c.M, "initial-condition spread");
    sub->add_option("--threshold", c.threshold, "KS threshold");
    sub->add_flag("--control", c.control, "drop the interaction (negative control)");
  }
  if (name == "bridge-check") {
    sub->add_option("--T", c.T, "bridge length in steps (even)");
    sub->add_option("--samples", c.samples, "draws");
    sub->add_option("--threshold", c.threshold, "KS threshold");
  }
  if (name == "verify-all") {
    sub->add_flag("--quick", c.quick, "reduced sample sizes");
    sub->add_option("--only", c.only, "criterion ids, comma separated")->delimiter(',');
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // Config and manifest files are applied before the flags, so the command
  // line is parsed twice: once to find them, once over the loaded values.
  const std::string sub_name = args.size() > 1 ? args[1] : "";
  const auto& cmds = commands();
  const auto cmd = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return sub_name == c.name; });

  auto build = [&](RunConfig& cfg, std::string& cpath, std::string& mpath, CLI::App& app) {
    app.require_subcommand(1);
    app.set_version_flag("--version", LGLE_VERSION);
    for (const auto& c : cmds) {
      auto* sub = app.add_subcommand(c.name, c.help);
      if (cmd != cmds.end() && c.name == std::string(cmd->name)) add_options(sub, c.name, cfg, cpath, mpath);
      else sub->allow_extras();
    }
  };
  std::vector<const char*> cargv;
  for (const auto& a : args) cargv.push_back(a.c_str());
  const int argc = static_cast<int>(cargv.size());

  auto help_text = [&] {
    CLI::App h{"Log-gamma polymer line-ensemble toolkit", "lgle"};
    RunConfig d;
    std::string a, b;
    build(d, a, b, h);
    return cmd != cmds.end() ? h.get_subcommand(cmd->name)->help() : h.help();
  };

  RunConfig cfg;
  std::string config_path, manifest_path;
  CLI::App app{"Log-gamma polymer line-ensemble toolkit", "lgle"};
  try {
    // pass 1
    {
      RunConfig scratch;
      std::string cp, mp;
      CLI::App probe{"", "lgle"};
      build(scratch, cp, mp, probe);
      probe.parse(argc, cargv.data());
      config_path = cp;
      manifest_path = mp;
    }
    if (cmd != cmds.end()) cmd->defaults(cfg);
    if (!manifest_path.empty()) {
      const auto j = nlohmann::json::parse(read_file(manifest_path));
      if (j.value("subcommand", std::string()) != cmd->name) {
        throw std::invalid_argument("manifest belongs to subcommand '" + j.value("subcommand", std::string()) + "'");
      }
      cfg = config_from_json(j.at("config"), cfg);
    }
    if (!config_path.empty()) cfg = parse_config_text(read_file(config_path), cfg);
    // pass 2
    std::string cp, mp;
    build(cfg, cp, mp, app);
    app.parse(argc, cargv.data());
    validate(cfg);
  } catch (const CLI::CallForHelp&) {
    out << help_text();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << LGLE_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (cmd == cmds.end() && !sub_name.empty() && sub_name[0] != '-') {
      err << "error: unknown subcommand '" << sub_name << "'\n\n";
    } else {
      err << "error: " << e.what() << "\n\n";
    }
    err << help_text();
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Session s;
  s.cfg = cfg;
  s.subcommand = cmd->name;
  s.argv = args;
  s.out = &out;
  s.err = &err;
  const char* env = std::getenv("LGLE_OUTPUT_DIR");
  s.dir = !cfg.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(env && *env ? env : "lgle-output");
  int code = 1;
  try {
    code = cmd->fn(s);
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }
  try {
    write_manifest(s, code);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (code != 2 && !s.reports.empty()) {
    const int failed = static_cast<int>(std::count_if(s.reports.begin(), s.reports.end(), [](const auto& r) { return !r.pass; }));
    err << s.subcommand << ": " << (code == 0 ? "PASS" : "FAIL") << " (" << s.reports.size() - failed << "/"
        << s.reports.size() << " reports pass)\n";
  }
  return code;
}

}  // namespace lgle::cli
