#include "sbt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>

#include "sbt/analysis.hpp"
#include "sbt/controllers.hpp"
#include "sbt/io.hpp"
#include "sbt/sim.hpp"
#include "sbt/transforms.hpp"
#include "sbt/tuning.hpp"

namespace sbt::cli {

namespace {

using io::format_double;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Constants of the studied QR controller and of the inverter's PI+QR.
constexpr double kDefaultKr = 59.1;
constexpr double kDefaultWc = 17.907;
constexpr double kDefaultWn = 5969.0;
constexpr double kDefaultFs = 20000.0;
constexpr double kInverterKr = 44.325;
constexpr double kInverterKp = 2.955;
constexpr double kInverterTauI = 8.594e-4;
constexpr double kInverterFs = 40000.0;

// Flags override the JSON config file, which overrides built-in defaults.
class Settings {
 public:
  void bind(CLI::App* app, const std::string& name, const std::string& help) {
    auto slot = std::make_shared<std::string>();
    CLI::Option* opt = app->add_option("--" + name, *slot, help);
    slots_[name] = {opt, slot};
  }

  void bind_flag(CLI::App* app, const std::string& name, const std::string& help) {
    auto slot = std::make_shared<std::string>();
    CLI::Option* opt = app->add_flag("--" + name, help);
    slots_[name] = {opt, slot};
  }

  void load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParamError("cannot read config file '" + path + "'");
    try {
      config_ = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw ParamError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!config_.is_object()) throw ParamError("config file must hold a JSON object");
  }

  bool given(const std::string& name) const {
    auto it = slots_.find(name);
    return (it != slots_.end() && it->second.opt->count() > 0) || config_.contains(name);
  }

  double number(const std::string& name, double fallback) const {
    if (auto s = cli_value(name)) return parse_number(name, *s);
    if (config_.contains(name)) {
      const auto& v = config_.at(name);
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_number(name, v.get<std::string>());
      throw ParamError("config key '" + name + "' must be a number");
    }
    return fallback;
  }

  int integer(const std::string& name, int fallback) const {
    const double v = number(name, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParamError("--" + name + " must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& name, const std::string& fallback) const {
    if (auto s = cli_value(name)) return *s;
    if (config_.contains(name)) {
      const auto& v = config_.at(name);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) {
          if (!joined.empty()) joined += ',';
          joined += e.is_string() ? e.get<std::string>() : e.dump();
        }
        return joined;
      }
      return v.dump();
    }
    return fallback;
  }

  bool flag(const std::string& name) const {
    auto it = slots_.find(name);
    if (it != slots_.end() && it->second.opt->count() > 0) return true;
    return config_.contains(name) && config_.at(name).is_boolean() && config_.at(name).get<bool>();
  }

 private:
  struct Slot {
    CLI::Option* opt;
    std::shared_ptr<std::string> value;
  };

  std::optional<std::string> cli_value(const std::string& name) const {
    auto it = slots_.find(name);
    if (it == slots_.end() || it->second.opt->count() == 0) return std::nullopt;
    return *it->second.value;
  }

  static double parse_number(const std::string& name, const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
      throw ParamError("--" + name + " expects a number, got '" + s + "'");
    return v;
  }

  std::map<std::string, Slot> slots_;
  nlohmann::json config_ = nlohmann::json::object();
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Minimal JSON emitter so every number carries 17 significant digits.
class JsonObject {
 public:
  JsonObject& num(const std::string& key, double v) { return raw(key, json_number(v)); }
  JsonObject& str(const std::string& key, const std::string& v) { return raw(key, json_string(v)); }
  JsonObject& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonObject& raw(const std::string& key, const std::string& v) {
    if (!body_.empty()) body_ += ',';
    body_ += json_string(key) + ':' + v;
    return *this;
  }
  std::string dump() const { return '{' + body_ + '}'; }

  static std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

 private:
  std::string body_;
};

std::string json_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out + ']';
}

struct Common {
  QrParams qr;
  double fs;
  double t;
};

void bind_controller(Settings& s, CLI::App* app) {
  s.bind(app, "kr", "QR resonant gain Kr");
  s.bind(app, "wc", "QR cutoff bandwidth, rad/s");
  s.bind(app, "wn", "QR resonant frequency, rad/s");
  s.bind(app, "fn", "QR resonant frequency in Hz (alternative to --wn)");
  s.bind(app, "fs", "sampling frequency, Hz");
  s.bind(app, "T", "sample time, s (alternative to --fs)");
}

Common resolve_common(const Settings& s, double default_kr, double default_fs) {
  Common c{};
  c.qr.kr = s.number("kr", default_kr);
  c.qr.omega_c = s.number("wc", kDefaultWc);
  c.qr.omega_n = s.given("fn") ? kTwoPi * s.number("fn", 0.0) : s.number("wn", kDefaultWn);
  if (s.given("T")) {
    c.t = s.number("T", 0.0);
    if (!(c.t > 0.0)) throw ParamError("--T must be > 0");
    c.fs = 1.0 / c.t;
  } else {
    c.fs = s.number("fs", default_fs);
    if (!(c.fs > 0.0)) throw ParamError("--fs must be > 0");
    c.t = 1.0 / c.fs;
  }
  c.qr.validate();
  return c;
}

void bind_sbt(Settings& s, CLI::App* app) {
  s.bind(app, "alpha", "SBT shape factor (default 0.5)");
  s.bind(app, "beta", "SBT time factor (default K_pw)");
}

// Named methods: euler, tustin, sota (pre-warped Tustin), sbt.
Method resolve_method(const std::string& name, const Settings& s, const Common& c, std::ostream& err) {
  if (name == "euler") return method::Euler{};
  if (name == "tustin") return method::Tustin{};
  if (name == "sota" || name == "prewarp" || name == "tustin-prewarp") return method::TustinPrewarp{c.qr.omega_n};
  if (name == "sbt") {
    const double alpha = s.number("alpha", 0.5);
    const double beta = s.given("beta") ? s.number("beta", 1.0) : prewarp_factor(c.qr.omega_n, c.t);
    const SbtParams p(alpha, beta);
    if (!p.in_stable_range())
      err << "warning: alpha = " << format_double(alpha) << " is outside [0.5, 1]; the mapping may be unstable\n";
    return method::Sbt{p};
  }
  throw ParamError("unknown method '" + name + "'");
}

struct Output {
  std::string path;
  std::ostream& out;

  void emit(const std::string& content) const {
    if (path.empty())
      out << content;
    else
      io::write_file_atomic(path, content);
  }
};

std::string resolve_format(const Settings& s, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = s.text("format", fallback);
  for (const char* a : allowed)
    if (f == a) return f;
  throw ParamError("unsupported --format '" + f + "'");
}

FrequencyGrid resolve_grid(const Settings& s, const std::string& fallback = "default") {
  const std::string g = s.text("grid", fallback);
  if (g == "default") {
    if (const char* env = std::getenv("SBT_DEFAULT_GRID"); env != nullptr && *env != '\0')
      return io::read_grid_file(env);
    return default_grid();
  }
  if (g == "wide") return wide_grid();
  return io::read_grid_file(g);
}

// ---------------------------------------------------------------- discretize

int cmd_discretize(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const bool diffeq = s.flag("diffeq");
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  std::vector<std::string> names = split_list(s.text("method", s.text("methods", "euler,tustin,sota,sbt")));

  std::string csv = "# coefficients in descending powers of z: (a2 z^2 + a1 z + a0) / (b2 z^2 + b1 z + b0)\n";
  csv += "method,alpha,beta,a2,a1,a0,b2,b1,b0";
  if (diffeq) csv += ",kin0,kin1,kin2,kout1,kout2";
  csv += '\n';
  std::vector<std::string> rows;

  for (const auto& name : names) {
    const Method m = resolve_method(name, s, c, err);
    const SbtParams sp = to_sbt_params(m, c.t);
    const BiquadCoeffs b = qr_discretize(c.qr, m, c.t);
    const std::vector<double> vals{sp.alpha(), sp.beta(), b.a2, b.a1, b.a0, b.b2, b.b1, b.b0};
    csv += name;
    for (double v : vals) csv += ',' + format_double(v);
    JsonObject row;
    row.str("method", name).num("alpha", sp.alpha()).num("beta", sp.beta());
    row.num("a2", b.a2).num("a1", b.a1).num("a0", b.a0).num("b2", b.b2).num("b1", b.b1).num("b0", b.b0);
    if (diffeq) {
      const DiffEqCoeffs d = diff_eq_coeffs(b);
      for (double v : {d.kin0, d.kin1, d.kin2, d.kout1, d.kout2}) csv += ',' + format_double(v);
      row.num("kin0", d.kin0).num("kin1", d.kin1).num("kin2", d.kin2).num("kout1", d.kout1).num("kout2", d.kout2);
    }
    csv += '\n';
    rows.push_back(row.dump());
  }

  if (format == "json") {
    JsonObject doc;
    doc.str("convention", "descending powers of z: (a2 z^2 + a1 z + a0) / (b2 z^2 + b1 z + b0)");
    doc.num("sample_time", c.t).num("kr", c.qr.kr).num("wc", c.qr.omega_c).num("wn", c.qr.omega_n);
    doc.raw("rows", json_array(rows));
    o.emit(doc.dump() + '\n');
  } else {
    o.emit(csv);
  }
  return kSuccess;
}

// ---------------------------------------------------------------- bode / error / rmse

RationalTransferd system_for(const std::string& name, const Settings& s, const Common& c, std::ostream& err) {
  if (name == "analog") return qr_continuous(c.qr);
  return qr_discretize(c.qr, resolve_method(name, s, c, err), c.t).to_transfer(c.t);
}

int cmd_bode(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  const std::string name = s.text("method", "analog");
  const FrequencyGrid grid = resolve_grid(s, "wide");
  const auto resp = freq_response(system_for(name, s, c, err), grid);

  if (format == "json") {
    std::vector<std::string> pts;
    for (const auto& p : resp) pts.push_back(JsonObject().num("f_hz", p.f_hz).num("mag_db", p.mag_db).num("phase_deg", p.phase_deg).dump());
    o.emit(JsonObject().str("method", name).raw("points", json_array(pts)).dump() + '\n');
  } else {
    std::string csv = "f_hz,mag_db,phase_deg\n";
    for (const auto& p : resp) csv += format_double(p.f_hz) + ',' + format_double(p.mag_db) + ',' + format_double(p.phase_deg) + '\n';
    o.emit(csv);
  }
  return kSuccess;
}

int cmd_error(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  const std::string name = s.text("method", "sbt");
  const FrequencyGrid grid = resolve_grid(s, "wide");
  const auto curve = magnitude_difference(qr_continuous(c.qr), system_for(name, s, c, err), grid);

  if (format == "json") {
    std::vector<std::string> pts;
    for (const auto& p : curve) pts.push_back(JsonObject().num("f_hz", p.f_hz).num("err_db", p.err_db).dump());
    o.emit(JsonObject().str("method", name).raw("points", json_array(pts)).dump() + '\n');
  } else {
    std::string csv = "f_hz,err_db\n";
    for (const auto& p : curve) csv += format_double(p.f_hz) + ',' + format_double(p.err_db) + '\n';
    o.emit(csv);
  }
  return kSuccess;
}

int cmd_rmse(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  const FrequencyGrid grid = resolve_grid(s);
  const std::string scale_name = s.text("scale", "db");
  if (scale_name != "db" && scale_name != "linear") throw ParamError("--scale must be db or linear");
  const ErrorScale scale = scale_name == "db" ? ErrorScale::db : ErrorScale::linear;
  const auto names = split_list(s.text("methods", "euler,tustin,sota,sbt"));
  const RationalTransferd analog = qr_continuous(c.qr);

  std::map<std::string, double> scores;
  std::string csv = "method,rmse\n";
  std::vector<std::string> rows;
  for (const auto& name : names) {
    const Method m = resolve_method(name, s, c, err);
    const double r = magnitude_rmse(analog, qr_discretize(c.qr, m, c.t).to_transfer(c.t), grid, scale);
    scores[name] = r;
    csv += name + ',' + format_double(r) + '\n';
    rows.push_back(JsonObject().str("method", name).num("rmse", r).dump());
  }
  JsonObject doc;
  doc.str("scale", scale_name).raw("rows", json_array(rows));
  if (scores.count("sbt") && scores.count("sota")) {
    const double ratio = scores["sbt"] / scores["sota"];
    csv += "ratio_sbt_sota," + format_double(ratio) + '\n';
    doc.num("ratio_sbt_sota", ratio);
  }
  o.emit(format == "json" ? doc.dump() + '\n' : csv);
  return kSuccess;
}

// ---------------------------------------------------------------- pole-map

int cmd_pole_map(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "table", {"table", "csv", "json"});
  std::vector<Method> methods;
  for (const auto& name : split_list(s.text("methods", "euler,tustin,sota,sbt")))
    if (name != "exact") methods.push_back(resolve_method(name, s, c, err));
  const auto rows = pole_map_table(c.qr, c.t, methods);

  if (format == "table") {
    std::ostringstream os;
    auto pad = [](std::string v, std::size_t w) {
      if (v.size() < w) v.insert(0, w - v.size(), ' ');
      return v;
    };
    os << "method   " << pad("z_re", 9) << pad("z_im", 9) << pad("sigma", 12) << pad("omega", 8) << '\n';
    for (const auto& r : rows) {
      std::string label = r.label();
      label.resize(9, ' ');
      os << label << pad(io::format_fixed(r.mapped_z.real(), 5), 9) << pad(io::format_fixed(r.mapped_z.imag(), 5), 9)
         << pad(io::format_fixed(r.equivalent_s.real(), 3), 12) << pad(io::format_fixed(r.equivalent_s.imag(), 0), 8)
         << '\n';
    }
    o.emit(os.str());
  } else if (format == "csv") {
    std::string csv = "method,z_re,z_im,s_re,s_im\n";
    for (const auto& r : rows)
      csv += r.label() + ',' + format_double(r.mapped_z.real()) + ',' + format_double(r.mapped_z.imag()) + ',' +
             format_double(r.equivalent_s.real()) + ',' + format_double(r.equivalent_s.imag()) + '\n';
    o.emit(csv);
  } else {
    std::vector<std::string> items;
    for (const auto& r : rows)
      items.push_back(JsonObject()
                          .str("method", r.label())
                          .num("z_re", r.mapped_z.real())
                          .num("z_im", r.mapped_z.imag())
                          .num("s_re", r.equivalent_s.real())
                          .num("s_im", r.equivalent_s.imag())
                          .dump());
    o.emit(JsonObject().num("sample_time", c.t).raw("rows", json_array(items)).dump() + '\n');
  }
  return kSuccess;
}

// ---------------------------------------------------------------- simulate

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string());
  return out.string();
}

int simulate_board(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  const double f = s.number("f", 950.0);
  const double amp = s.number("amp", 1.0);
  const auto names = split_list(s.text("methods", "euler,tustin,sota,sbt"));
  const int measure = s.integer("measure-cycles", 50);

  std::vector<DiffEqCoeffs> coeffs;
  std::vector<RationalTransferd> tfs;
  for (const auto& name : names) {
    const BiquadCoeffs b = qr_discretize(c.qr, resolve_method(name, s, c, err), c.t);
    coeffs.push_back(diff_eq_coeffs(b));
    tfs.push_back(b.to_transfer(c.t));
  }
  int settle = 300;
  for (const auto& d : coeffs) settle = std::max(settle, recommended_settle_cycles(std::span(&d, 1), f, c.fs));
  settle = s.integer("settle-cycles", settle);

  std::string csv = "method,amplitude,predicted,phase_deg,residual\n";
  std::vector<std::string> rows;
  std::vector<std::vector<double>> outputs;
  const std::size_t n = static_cast<std::size_t>(std::llround((settle + measure) * c.fs / f));
  const std::vector<double> input = sine_wave(f, c.fs, amp, n);
  for (std::size_t i = 0; i < names.size(); ++i) {
    SineTestResult r{};
    try {
      r = sine_steady_state(coeffs[i], f, c.fs, amp, settle, measure);
      outputs.push_back(run_difference_equation(coeffs[i], input));
    } catch (const NumericOverflow& e) {
      throw NumericOverflow("method '" + names[i] + "': " + e.what());
    }
    const double predicted = amp * std::abs(response_at(tfs[i], f));
    csv += names[i] + ',' + format_double(r.amplitude) + ',' + format_double(predicted) + ',' +
           format_double(r.phase_deg) + ',' + format_double(r.residual) + '\n';
    rows.push_back(JsonObject()
                       .str("method", names[i])
                       .num("amplitude", r.amplitude)
                       .num("predicted", predicted)
                       .num("phase_deg", r.phase_deg)
                       .num("residual", r.residual)
                       .dump());
  }

  if (const std::string trace = s.text("trace", ""); !trace.empty()) {
    std::string t = "t,v_in";
    for (const auto& name : names) t += ",v_out_" + name;
    t += '\n';
    for (std::size_t k = 0; k < n; ++k) {
      t += format_double(static_cast<double>(k) * c.t) + ',' + format_double(input[k]);
      for (const auto& y : outputs) t += ',' + format_double(y[k]);
      t += '\n';
    }
    io::write_file_atomic(trace, t);
  }

  JsonObject doc;
  doc.str("scenario", "board").num("f_hz", f).num("fs_hz", c.fs).num("amp", amp).raw("rows", json_array(rows));
  o.emit(format == "json" ? doc.dump() + '\n' : csv);
  return kSuccess;
}

int simulate_inverter(const Settings& s, const Output& o, std::ostream& err) {
  const Common c = resolve_common(s, kInverterKr, kInverterFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  const PiParams pi{s.number("kp", kInverterKp), s.number("tau-i", kInverterTauI)};
  InverterConfig cfg;
  cfg.fs_ctrl = c.fs;
  cfg.inductance = s.number("inductance", cfg.inductance);
  cfg.capacitance = s.number("capacitance", cfg.capacitance);
  cfg.filter_capacitor = s.flag("filter-cap");
  cfg.v_grid_rms = s.number("v-grid", cfg.v_grid_rms);
  cfg.f_grid = s.number("f-grid", cfg.f_grid);
  cfg.harmonic_f = s.number("harmonic-f", cfg.harmonic_f);
  cfg.harmonic_amplitude = s.number("harmonic-amp", cfg.harmonic_amplitude);
  cfg.i_ref_amplitude = s.number("i-ref", cfg.i_ref_amplitude);
  cfg.delay_samples = s.integer("delay", cfg.delay_samples);
  cfg.duration = s.number("duration", cfg.duration);
  cfg.validate();
  const auto names = split_list(s.text("methods", "pi,euler,tustin,sota,sbt"));

  std::string csv = "method,thd_percent,fundamental_a\n";
  std::vector<std::string> rows;
  const std::string trace_path = s.text("trace", "");
  const std::size_t per = static_cast<std::size_t>(std::llround(cfg.fs_ctrl / cfg.f_grid));
  for (const auto& name : names) {
    const PirController ctl = name == "pi" ? make_pir_controller(pi, std::nullopt, std::nullopt, c.t)
                                           : make_pir_controller(pi, c.qr, resolve_method(name, s, c, err), c.t);
    SimTrace tr;
    try {
      tr = inverter_closed_loop(cfg, ctl);
    } catch (const NumericOverflow& e) {
      throw NumericOverflow("method '" + name + "': " + e.what());
    }
    const double thd_pct = trace_thd(tr, cfg);
    const std::size_t len = per * 10;
    const auto fund = project_sinusoid(std::span(tr.i_grid).last(len), cfg.f_grid, cfg.fs_ctrl, tr.i_grid.size() - len);
    csv += name + ',' + format_double(thd_pct) + ',' + format_double(fund.amplitude) + '\n';
    rows.push_back(JsonObject().str("method", name).num("thd_percent", thd_pct).num("fundamental_a", fund.amplitude).dump());
    if (!trace_path.empty())
      io::write_file_atomic(names.size() == 1 ? trace_path : with_suffix(trace_path, name), io::trace_to_csv(tr));
  }
  JsonObject doc;
  doc.str("scenario", "inverter").num("fs_hz", cfg.fs_ctrl).num("harmonic_amp", cfg.harmonic_amplitude);
  doc.num("harmonic_f", cfg.harmonic_f).raw("rows", json_array(rows));
  o.emit(format == "json" ? doc.dump() + '\n' : csv);
  return kSuccess;
}

// ---------------------------------------------------------------- optimize

int cmd_optimize(const Settings& s, const Output& o, std::ostream&) {
  const Common c = resolve_common(s, kDefaultKr, kDefaultFs);
  const std::string format = resolve_format(s, "csv", {"csv", "json"});
  LossConfig loss;
  loss.kind = parse_loss_kind(s.text("loss", "mag-rmse-db"));
  loss.grid = resolve_grid(s);
  SearchConfig search;
  search.alpha_min = s.number("alpha-min", search.alpha_min);
  search.alpha_max = s.number("alpha-max", search.alpha_max);
  search.beta_min = s.number("beta-min", search.beta_min);
  search.beta_max = s.number("beta-max", search.beta_max);
  search.coarse_grid = s.integer("coarse", search.coarse_grid);
  search.refine_iters = s.integer("iters", search.refine_iters);

  const OptimizeResult r = optimize_alpha_beta(c.qr, c.t, loss, search);
  const SbtParams sf = sbt_params_straightforward(c.qr, c.t);

  if (const std::string trace = s.text("trace", ""); !trace.empty()) {
    std::string t = "phase,alpha,beta,loss,best_loss\n";
    for (const auto& e : r.trace) {
      const char* phase = e.phase == TraceEntry::Phase::coarse ? "coarse" : e.phase == TraceEntry::Phase::seed ? "seed" : "refine";
      t += std::string(phase) + ',' + format_double(e.alpha) + ',' + format_double(e.beta) + ',' +
           format_double(e.loss) + ',' + format_double(e.best_loss) + '\n';
    }
    io::write_file_atomic(trace, t);
  }

  if (format == "json") {
    JsonObject doc;
    doc.str("loss_kind", loss_kind_name(loss.kind)).num("alpha", r.alpha).num("beta", r.beta).num("loss", r.loss_value);
    doc.num("straightforward_alpha", sf.alpha()).num("straightforward_beta", sf.beta());
    doc.num("straightforward_loss", r.straightforward_loss).boolean("straightforward_kept", r.straightforward_kept);
    doc.num("evaluations", static_cast<double>(r.trace.size()));
    o.emit(doc.dump() + '\n');
  } else {
    std::string csv = "loss_kind,alpha,beta,loss,straightforward_alpha,straightforward_beta,straightforward_loss,straightforward_kept\n";
    csv += loss_kind_name(loss.kind) + ',' + format_double(r.alpha) + ',' + format_double(r.beta) + ',' +
           format_double(r.loss_value) + ',' + format_double(sf.alpha()) + ',' + format_double(sf.beta()) + ',' +
           format_double(r.straightforward_loss) + ',' + (r.straightforward_kept ? "true" : "false") + '\n';
    o.emit(csv);
  }
  return kSuccess;
}

// ---------------------------------------------------------------- grid

int cmd_grid(const Settings& s, const Output& o, const std::string& kind) {
  if (kind == "default") return o.emit(io::grid_to_text(default_grid())), kSuccess;
  if (kind == "wide") return o.emit(io::grid_to_text(wide_grid())), kSuccess;
  if (kind == "resonance") {
    const FrequencyGrid g =
        resonance_grid(s.number("center", 950.0), s.number("half-width", 50.0), s.integer("points", 201));
    o.emit(io::grid_to_text(g));
    return kSuccess;
  }
  throw ParamError("unknown grid kind '" + kind + "' (default, wide, resonance)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-to-discrete transformation toolkit for resonant controllers", "sbt"};
  app.require_subcommand(1);
  std::map<CLI::App*, std::unique_ptr<Settings>> settings;
  std::string out_path, config_path, scenario, grid_kind;

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto s = std::make_unique<Settings>();
    sub->add_option("--out", out_path, "write output here instead of stdout");
    sub->add_option("--config", config_path, "JSON file with default flag values");
    s->bind(sub, "format", "output format");
    settings[sub] = std::move(s);
    return std::pair{sub, settings[sub].get()};
  };

  {
    auto [sub, s] = add("discretize", "discrete QR coefficients per method");
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    s->bind(sub, "method", "method(s): euler, tustin, sota, sbt (comma separated)");
    s->bind(sub, "methods", "alias of --method");
    s->bind_flag(sub, "diffeq", "also print difference-equation coefficients");
  }
  {
    auto [sub, s] = add("bode", "frequency response (f_hz, mag_db, phase_deg)");
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    s->bind(sub, "method", "analog, euler, tustin, sota or sbt");
    s->bind(sub, "grid", "default, wide (default here) or a grid file");
  }
  {
    auto [sub, s] = add("error", "magnitude error analog - discrete (f_hz, err_db)");
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    s->bind(sub, "method", "euler, tustin, sota, sbt or analog (self-comparison)");
    s->bind(sub, "grid", "default, wide (default here) or a grid file");
  }
  {
    auto [sub, s] = add("rmse", "magnitude-error RMSE per method and the SBT/SOTA ratio");
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    s->bind(sub, "methods", "comma separated methods");
    s->bind(sub, "grid", "default (near resonance), wide, or a grid file");
    s->bind(sub, "scale", "db (default) or linear");
  }
  {
    auto [sub, s] = add("pole-map", "mapped z poles and equivalent s poles");
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    s->bind(sub, "methods", "comma separated methods; the exact row is always included");
  }
  {
    auto [sub, s] = add("simulate", "time-domain scenarios: board or inverter");
    sub->add_option("scenario", scenario, "board or inverter")->required();
    bind_controller(*s, sub);
    bind_sbt(*s, sub);
    const std::pair<const char*, const char*> opts[] = {
        {"methods", "comma separated; inverter also accepts pi (PI alone)"},
        {"f", "board: test frequency, Hz (950)"},
        {"amp", "board: input amplitude (1)"},
        {"settle-cycles", "board: cycles discarded before measuring (auto)"},
        {"measure-cycles", "board: cycles measured (50)"},
        {"trace", "CSV path for the time series"},
        {"kp", "inverter: PI gain (2.955)"},
        {"tau-i", "inverter: PI integral time, s (8.594e-4)"},
        {"inductance", "inverter: filter inductance, H (245e-6)"},
        {"capacitance", "inverter: filter capacitance, F (22e-6)"},
        {"v-grid", "inverter: grid RMS voltage (220)"},
        {"f-grid", "inverter: grid frequency, Hz (50)"},
        {"harmonic-f", "inverter: injected harmonic frequency, Hz (950)"},
        {"harmonic-amp", "inverter: injected harmonic peak voltage (100)"},
        {"i-ref", "inverter: reference current peak, A (30)"},
        {"delay", "inverter: actuation delay, samples (1)"},
        {"duration", "inverter: simulated time, s (2)"},
    };
    for (const auto& [name, help] : opts) s->bind(sub, name, help);
    s->bind_flag(sub, "filter-cap", "include the filter capacitor branch");
  }
  {
    auto [sub, s] = add("optimize", "optimal (alpha, beta) search");
    bind_controller(*s, sub);
    const std::pair<const char*, const char*> opts[] = {
        {"loss", "mag-rmse-db (default), mag-rmse-linear or pole-distance"},
        {"grid", "loss grid: default, wide or a grid file"},
        {"alpha-min", "lower alpha bound (0.5)"},
        {"alpha-max", "upper alpha bound (1)"},
        {"beta-min", "lower beta bound (0.9)"},
        {"beta-max", "upper beta bound (1.1)"},
        {"coarse", "coarse grid points per axis (41)"},
        {"iters", "golden-section iterations per line search (40)"},
        {"trace", "CSV path for every evaluated point"},
    };
    for (const auto& [name, help] : opts) s->bind(sub, name, help);
  }
  {
    auto [sub, s] = add("grid", "print a frequency grid, one Hz value per line");
    sub->add_option("kind", grid_kind, "default, wide or resonance")->required();
    s->bind(sub, "center", "resonance: center frequency, Hz (950)");
    s->bind(sub, "half-width", "resonance: half width, Hz (50)");
    s->bind(sub, "points", "resonance: number of points (201)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kArgumentError;
  }

  CLI::App* sub = app.get_subcommands().front();
  Settings& s = *settings.at(sub);
  const Output o{out_path, out};
  try {
    if (!config_path.empty()) s.load_config(config_path);
    const std::string name = sub->get_name();
    if (name == "discretize") return cmd_discretize(s, o, err);
    if (name == "bode") return cmd_bode(s, o, err);
    if (name == "error") return cmd_error(s, o, err);
    if (name == "rmse") return cmd_rmse(s, o, err);
    if (name == "pole-map") return cmd_pole_map(s, o, err);
    if (name == "simulate") {
      if (scenario == "board") return simulate_board(s, o, err);
      if (scenario == "inverter") return simulate_inverter(s, o, err);
      throw ParamError("unknown scenario '" + scenario + "' (board or inverter)");
    }
    if (name == "optimize") return cmd_optimize(s, o, err);
    if (name == "grid") return cmd_grid(s, o, grid_kind);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.error_class()) {
      case ErrorClass::argument:
        return kArgumentError;
      case ErrorClass::domain:
        return kDomainError;
      case ErrorClass::divergence:
        return kDivergence;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kUnexpected;
}

}  // namespace sbt::cli
