#include "modeshift/io/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "modeshift/error.hpp"
#include "toml.hpp"

namespace modeshift::io {

using sim::EventKind;
using sim::InverterConfig;
using sim::ModePoint;
using sim::Scenario;
using sim::Setpoint;

namespace {

[[noreturn]] void parse_fail(const toml::node& n, const std::string& what) {
  const auto& src = n.source();
  std::string where = src.path ? *src.path : std::string("<string>");
  if (src.begin.line > 0) where += ":" + std::to_string(src.begin.line);
  throw Error(ErrorCode::Parse, where + ": " + what);
}

// A TOML table whose keys must all be consumed.
class Obj {
 public:
  Obj(const toml::table& t, std::string path) : t_(t), path_(std::move(path)) {}

  std::string key_path(std::string_view k) const {
    return path_.empty() ? std::string(k) : path_ + "." + std::string(k);
  }

  const toml::node* get(std::string_view k) {
    const toml::node* n = t_.get(k);
    if (n) seen_.insert(std::string(k));
    return n;
  }

  std::optional<double> opt_num(std::string_view k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
    parse_fail(*n, "'" + key_path(k) + "' must be a number");
  }

  double num(std::string_view k, double def) { return opt_num(k).value_or(def); }

  // rad/s value, or `<k>_hz` in Hz.
  double rad(std::string_view k, double def) {
    const std::string hz = std::string(k) + "_hz";
    auto r = opt_num(k);
    auto h = opt_num(hz);
    if (r && h) parse_fail(*t_.get(hz), "give either '" + key_path(k) + "' or '" + key_path(hz) + "'");
    if (h) return 2.0 * M_PI * *h;
    return r.value_or(def);
  }

  int integer(std::string_view k, int def) {
    const toml::node* n = get(k);
    if (!n) return def;
    if (!n->is_integer()) parse_fail(*n, "'" + key_path(k) + "' must be an integer");
    return static_cast<int>(*n->value<int64_t>());
  }

  bool boolean(std::string_view k, bool def) {
    const toml::node* n = get(k);
    if (!n) return def;
    if (!n->is_boolean()) parse_fail(*n, "'" + key_path(k) + "' must be true or false");
    return *n->value<bool>();
  }

  std::optional<std::string> opt_str(std::string_view k) {
    const toml::node* n = get(k);
    if (!n) return std::nullopt;
    if (!n->is_string()) parse_fail(*n, "'" + key_path(k) + "' must be a string");
    return *n->value<std::string>();
  }

  std::string str(std::string_view k, std::string def) { return opt_str(k).value_or(std::move(def)); }

  const toml::table* table(std::string_view k) {
    const toml::node* n = get(k);
    if (!n) return nullptr;
    if (!n->is_table()) parse_fail(*n, "'" + key_path(k) + "' must be a table");
    return n->as_table();
  }

  const toml::array* array(std::string_view k) {
    const toml::node* n = get(k);
    if (!n) return nullptr;
    if (!n->is_array()) parse_fail(*n, "'" + key_path(k) + "' must be an array");
    return n->as_array();
  }

  void finish() const {
    for (const auto& [k, v] : t_)
      if (!seen_.count(std::string(k.str()))) parse_fail(v, "unknown key '" + key_path(k.str()) + "'");
  }

  const toml::table& node() const { return t_; }

 private:
  const toml::table& t_;
  std::string path_;
  std::set<std::string> seen_;
};

const toml::table& as_table(const toml::node& n, const std::string& what) {
  if (!n.is_table()) parse_fail(n, what + " entries must be tables");
  return *n.as_table();
}

// `kappa = [kv, ktheta]` or `mode = "GFM"`.
std::optional<ModePoint> read_kappa(Obj& o) {
  const toml::array* a = o.array("kappa");
  const auto mode = o.opt_str("mode");
  if (a && mode) parse_fail(o.node(), "give either 'kappa' or 'mode' in '" + o.key_path("") + "'");
  if (mode) {
    try {
      return synth::preset(*mode);
    } catch (const Error& e) {
      parse_fail(*o.node().get("mode"), e.what());
    }
  }
  if (!a) return std::nullopt;
  if (a->size() != 2 || !(*a)[0].is_number() || !(*a)[1].is_number())
    parse_fail(*a, "'" + o.key_path("kappa") + "' must be [kv, ktheta]");
  return ModePoint{*(*a)[0].value<double>(), *(*a)[1].value<double>()};
}

// { i_d, i_q } in A or { P, Q } in W/var.
Setpoint read_setpoint(const toml::table& t, const std::string& path) {
  Obj o(t, path);
  Setpoint sp;
  const auto id = o.opt_num("i_d"), iq = o.opt_num("i_q");
  const auto P = o.opt_num("P"), Q = o.opt_num("Q");
  if ((id || iq) && (P || Q)) parse_fail(t, "'" + path + "' mixes current and power setpoints");
  if (P || Q) {
    sp.kind = Setpoint::Kind::Power;
    sp.a = P.value_or(0.0);
    sp.b = Q.value_or(0.0);
  } else {
    sp.a = id.value_or(0.0);
    sp.b = iq.value_or(0.0);
  }
  o.finish();
  return sp;
}

plant::LineParams read_line(const toml::table& t, const std::string& path) {
  Obj o(t, path);
  plant::LineParams l;
  l.R = o.num("R", l.R);
  l.L = o.num("L", l.L);
  l.omega0 = o.rad("omega0", l.omega0);
  o.finish();
  return l;
}

plant::InverterParams read_filter(const toml::table& t, const std::string& path) {
  Obj o(t, path);
  plant::InverterParams p;
  p.Li = o.num("Li", p.Li);
  p.Ri = o.num("Ri", p.Ri);
  p.Ci = o.num("Ci", p.Ci);
  p.vdc = o.num("vdc", p.vdc);
  p.v0 = o.num("v0", p.v0);
  p.omega_c = o.rad("omega_c", p.omega_c);
  p.rating = o.num("rating", p.rating);
  p.ig_ff_inverse = o.boolean("ig_ff_inverse", p.ig_ff_inverse);
  o.finish();
  return p;
}

synth::SynthParams read_control(const toml::table& t, const std::string& path, const plant::LineParams& line) {
  Obj o(t, path);
  synth::SynthParams p;
  p.wm = o.rad("wm", p.wm);
  p.wd = o.rad("wd", p.wd);
  p.wq = o.rad("wq", p.wq);
  p.w1 = o.rad("w1", p.w1);
  p.w2 = o.rad("w2", p.w2);
  p.wtheta = o.num("wtheta", p.wtheta);
  p.wf = o.rad("wf", p.wf);
  p.a_d = o.num("a_d", p.a_d);
  p.a_q = o.num("a_q", p.a_q);
  p.alpha_v = o.num("alpha_v", p.alpha_v);
  p.alpha_theta = o.num("alpha_theta", p.alpha_theta);
  p.k_w0 = o.num("k_w0", p.k_w0);
  p.k_h2 = o.num("k_h2", p.k_h2);
  p.dw_max = o.rad("dw_max", p.dw_max);
  p.omega_J = o.rad("omega_J", p.omega_J);
  const std::string shaper = o.str("shaper", "diagonal");
  if (shaper == "diagonal") {
    p.shaper = synth::Shaper::Diagonal;
  } else if (shaper == "triangular") {
    p.shaper = synth::Shaper::Triangular;
  } else {
    parse_fail(*t.get("shaper"), "'" + o.key_path("shaper") + "' must be \"diagonal\" or \"triangular\"");
  }
  p.line = line;
  if (const toml::table* dl = o.table("design_line")) p.line = read_line(*dl, o.key_path("design_line"));
  o.finish();
  return p;
}

InverterConfig read_inverter(const toml::table& t, const std::string& path) {
  Obj o(t, path);
  const auto id = o.opt_str("id");
  if (!id) parse_fail(t, "'" + path + "' needs an id");
  InverterConfig c = sim::default_inverter(*id, synth::preset("GFM"));
  if (auto k = read_kappa(o)) c.kappa0 = *k;
  if (const toml::table* f = o.table("filter")) c.inv = read_filter(*f, o.key_path("filter"));
  if (const toml::table* l = o.table("line")) c.line = read_line(*l, o.key_path("line"));
  static const toml::table empty;
  const toml::table* ctl = o.table("control");
  c.synth = read_control(ctl ? *ctl : empty, o.key_path("control"), c.line);
  c.synth.v0 = c.inv.v0;
  const synth::SynthParams eff = synth::apply_mode_point(c.synth, c.kappa0);
  c.synth.beta_v = eff.beta_v;
  c.synth.beta_theta = eff.beta_theta;
  if (const toml::table* sp = o.table("setpoint")) c.setpoint = read_setpoint(*sp, o.key_path("setpoint"));
  if (const toml::array* a = o.array("schedule")) {
    for (size_t i = 0; i < a->size(); ++i) {
      const std::string p = o.key_path("schedule") + "[" + std::to_string(i) + "]";
      Obj s(as_table((*a)[i], p), p);
      sim::ModeStep m;
      m.t_start = s.num("t", 0.0);
      m.ramp = s.num("ramp", 0.0);
      const auto k = read_kappa(s);
      if (!k) parse_fail((*a)[i], "'" + p + "' needs 'kappa' or 'mode'");
      m.target = *k;
      s.finish();
      c.mode_schedule.push_back(m);
    }
  }
  o.finish();
  return c;
}

sim::ScenarioEvent read_event(const toml::table& t, const std::string& path) {
  Obj o(t, path);
  sim::ScenarioEvent e;
  const auto kind = o.opt_str("kind");
  if (!kind) parse_fail(t, "'" + path + "' needs a kind");
  const auto k = sim::event_kind_from(*kind);
  if (!k) parse_fail(*t.get("kind"), "unknown event kind '" + *kind + "'");
  e.kind = *k;
  e.t = o.num("t", 0.0);
  e.value = o.num("value", 0.0);
  e.duration = o.num("duration", 0.0);
  e.inverter = o.str("inverter", "");
  if (const toml::table* sp = o.table("setpoint")) e.setpoint = read_setpoint(*sp, o.key_path("setpoint"));
  e.kappa = read_kappa(o);
  o.finish();
  return e;
}

Scenario decode(const toml::table& root) {
  Obj o(root, "");
  Scenario sc;
  sc.name = o.str("name", "scenario");
  sc.description = o.str("description", "");

  if (const toml::table* s = o.table("solver")) {
    Obj so(*s, "solver");
    sc.solver.physics_dt = so.num("physics_dt", sc.solver.physics_dt);
    sc.solver.control_Ts = so.num("control_Ts", sc.solver.control_Ts);
    sc.solver.duration = so.num("duration", sc.solver.duration);
    sc.solver.decimation = so.integer("decimation", sc.solver.decimation);
    const int seed = so.integer("seed", 0);
    if (seed < 0) parse_fail(*s->get("seed"), "'solver.seed' must be >= 0");
    sc.solver.seed = static_cast<unsigned>(seed);
    so.finish();
  }

  if (const toml::table* n = o.table("network")) {
    Obj no(*n, "network");
    sc.network.breaker_closed = no.boolean("breaker_closed", true);
    if (const toml::table* g = no.table("grid")) {
      Obj go(*g, "network.grid");
      sc.network.grid.v_mag = go.num("v_mag", sc.network.grid.v_mag);
      sc.network.grid.f_hz = go.num("f_hz", sc.network.grid.f_hz);
      go.finish();
    }
    if (const toml::table* l = no.table("load")) {
      Obj lo(*l, "network.load");
      sc.network.load.R = lo.opt_num("R");
      sc.network.load.L = lo.opt_num("L");
      lo.finish();
    }
    no.finish();
  }

  if (const toml::array* a = o.array("inverters")) {
    for (size_t i = 0; i < a->size(); ++i) {
      const std::string p = "inverters[" + std::to_string(i) + "]";
      sc.inverters.push_back(read_inverter(as_table((*a)[i], p), p));
    }
  }
  if (const toml::array* a = o.array("events")) {
    for (size_t i = 0; i < a->size(); ++i) {
      const std::string p = "events[" + std::to_string(i) + "]";
      sc.events.push_back(read_event(as_table((*a)[i], p), p));
    }
  }
  if (const toml::array* a = o.array("outputs")) {
    for (size_t i = 0; i < a->size(); ++i) {
      const std::string p = "outputs[" + std::to_string(i) + "]";
      Obj q(as_table((*a)[i], p), p);
      sim::SpectralRequest r;
      const auto sig = q.opt_str("signal");
      if (!sig) parse_fail((*a)[i], "'" + p + "' needs a signal");
      r.signal = *sig;
      r.inverter = q.str("inverter", "");
      r.f_hz = q.num("f_hz", r.f_hz);
      r.window = q.num("window", r.window);
      q.finish();
      sc.outputs.push_back(r);
    }
  }
  o.finish();
  return sc;
}

// ---- writer -----------------------------------------------------------------

toml::array kappa_array(ModePoint k) { return toml::array{k.kv, k.ktheta}; }

toml::table line_table(const plant::LineParams& l) {
  return toml::table{{"R", l.R}, {"L", l.L}, {"omega0", l.omega0}};
}

toml::table setpoint_table(const Setpoint& s) {
  if (s.kind == Setpoint::Kind::Power) return toml::table{{"P", s.a}, {"Q", s.b}};
  return toml::table{{"i_d", s.a}, {"i_q", s.b}};
}

toml::table encode(const Scenario& sc) {
  toml::table root;
  root.insert("name", sc.name);
  root.insert("description", sc.description);
  const auto& s = sc.solver;
  root.insert("solver", toml::table{{"physics_dt", s.physics_dt},
                                    {"control_Ts", s.control_Ts},
                                    {"duration", s.duration},
                                    {"decimation", s.decimation},
                                    {"seed", static_cast<int64_t>(s.seed)}});
  toml::table net{{"breaker_closed", sc.network.breaker_closed},
                  {"grid", toml::table{{"v_mag", sc.network.grid.v_mag}, {"f_hz", sc.network.grid.f_hz}}}};
  toml::table load;
  if (sc.network.load.R) load.insert("R", *sc.network.load.R);
  if (sc.network.load.L) load.insert("L", *sc.network.load.L);
  net.insert("load", std::move(load));
  root.insert("network", std::move(net));

  toml::array invs;
  for (const auto& c : sc.inverters) {
    const auto& f = c.inv;
    const auto& p = c.synth;
    toml::table ctl{{"wm", p.wm},       {"wd", p.wd},
                    {"wq", p.wq},       {"w1", p.w1},
                    {"w2", p.w2},       {"wtheta", p.wtheta},
                    {"wf", p.wf},       {"a_d", p.a_d},
                    {"a_q", p.a_q},     {"alpha_v", p.alpha_v},
                    {"alpha_theta", p.alpha_theta},
                    {"k_w0", p.k_w0},   {"k_h2", p.k_h2},
                    {"dw_max", p.dw_max},
                    {"omega_J", p.omega_J},
                    {"shaper", p.shaper == synth::Shaper::Diagonal ? "diagonal" : "triangular"}};
    if (!(p.line == c.line)) ctl.insert("design_line", line_table(p.line));
    toml::table inv{{"id", c.id},
                    {"kappa", kappa_array(c.kappa0)},
                    {"filter", toml::table{{"Li", f.Li},
                                           {"Ri", f.Ri},
                                           {"Ci", f.Ci},
                                           {"vdc", f.vdc},
                                           {"v0", f.v0},
                                           {"omega_c", f.omega_c},
                                           {"rating", f.rating},
                                           {"ig_ff_inverse", f.ig_ff_inverse}}},
                    {"line", line_table(c.line)},
                    {"control", std::move(ctl)},
                    {"setpoint", setpoint_table(c.setpoint)}};
    if (!c.mode_schedule.empty()) {
      toml::array sched;
      for (const auto& m : c.mode_schedule)
        sched.push_back(toml::table{{"t", m.t_start}, {"kappa", kappa_array(m.target)}, {"ramp", m.ramp}});
      inv.insert("schedule", std::move(sched));
    }
    invs.push_back(std::move(inv));
  }
  root.insert("inverters", std::move(invs));

  if (!sc.events.empty()) {
    toml::array evs;
    for (const auto& e : sc.events) {
      toml::table t{{"t", e.t}, {"kind", sim::to_string(e.kind)}, {"value", e.value}, {"duration", e.duration}};
      if (!e.inverter.empty()) t.insert("inverter", e.inverter);
      if (e.setpoint) t.insert("setpoint", setpoint_table(*e.setpoint));
      if (e.kappa) t.insert("kappa", kappa_array(*e.kappa));
      evs.push_back(std::move(t));
    }
    root.insert("events", std::move(evs));
  }
  if (!sc.outputs.empty()) {
    toml::array outs;
    for (const auto& r : sc.outputs) {
      toml::table t{{"signal", r.signal}, {"f_hz", r.f_hz}, {"window", r.window}};
      if (!r.inverter.empty()) t.insert("inverter", r.inverter);
      outs.push_back(std::move(t));
    }
    root.insert("outputs", std::move(outs));
  }
  return root;
}

toml::table parse_toml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::string where(source);
    if (e.source().begin.line > 0) where += ":" + std::to_string(e.source().begin.line);
    throw Error(ErrorCode::Parse, where + ": " + std::string(e.description()));
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Scenario sc = decode(parse_toml(text, source));
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << encode(sc) << "\n";
  return out.str();
}

Scenario with_param(const Scenario& sc, std::string_view path, double value) {
  toml::table root = encode(sc);
  const std::string full(path);
  auto unresolved = [&](const std::string& why) -> Error {
    return Error(ErrorCode::UnresolvablePath, "parameter path '" + full + "': " + why);
  };

  std::vector<std::string> parts;
  for (size_t b = 0; b <= path.size();) {
    size_t e = path.find('.', b);
    if (e == std::string_view::npos) e = path.size();
    parts.emplace_back(path.substr(b, e - b));
    b = e + 1;
  }
  if (parts.empty() || parts.back().empty()) throw unresolved("empty segment");

  // Editing the physical line keeps the controller designed for the old one.
  if (parts.size() == 4 && parts[0] == "inverters" && parts[2] == "line") {
    if (auto* invs = root.get_as<toml::array>("inverters")) {
      size_t idx = 0;
      const char* end = parts[1].data() + parts[1].size();
      for (size_t i = 0; i < invs->size(); ++i) {
        auto* t = invs->get(i)->as_table();
        const bool hit = (std::from_chars(parts[1].data(), end, idx).ec == std::errc() && idx == i) ||
                         (t && t->get("id") && t->get("id")->value<std::string>() == parts[1]);
        if (!hit || !t || !t->get_as<toml::table>("line")) continue;
        if (!t->get("control")) t->insert("control", toml::table{});
        if (auto* ctl = t->get_as<toml::table>("control"); ctl && !ctl->get("design_line"))
          ctl->insert("design_line", *t->get_as<toml::table>("line"));
      }
    }
  }

  toml::node* cur = &root;
  toml::table* parent = nullptr;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& seg = parts[i];
    if (auto* t = cur->as_table()) {
      cur = t->get(seg);
      // The writer omits the design line when it equals the inverter's line.
      if (!cur && seg == "design_line" && parent) {
        const toml::node* line = parent->get("line");
        if (!line) throw unresolved("no line to copy");
        t->insert(seg, *line->as_table());
        cur = t->get(seg);
      }
    } else if (auto* a = cur->as_array()) {
      toml::node* hit = nullptr;
      size_t idx = 0;
      const char* end = seg.data() + seg.size();
      if (auto [p, ec] = std::from_chars(seg.data(), end, idx); ec == std::errc() && p == end) {
        hit = idx < a->size() ? a->get(idx) : nullptr;
      } else {
        for (auto& el : *a)
          if (auto* et = el.as_table(); et && et->get("id") && et->get("id")->value<std::string>() == seg) hit = &el;
      }
      cur = hit;
    } else {
      cur = nullptr;
    }
    if (!cur) throw unresolved("no element '" + seg + "'");
    if (seg != "control") parent = cur->as_table();
  }
  auto* t = cur->as_table();
  if (!t) throw unresolved("parent is not a table");
  toml::node* leaf = t->get(parts.back());
  if (leaf && !(leaf->is_floating_point() || leaf->is_integer())) throw unresolved("field is not numeric");
  if (leaf && leaf->is_integer()) {
    if (value != std::round(value)) throw unresolved("field is an integer");
    t->insert_or_assign(parts.back(), static_cast<int64_t>(value));
  } else {
    t->insert_or_assign(parts.back(), value);
  }
  try {
    Scenario out = decode(root);
    out.validate();
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw unresolved(e.what());
    throw;
  }
}

std::uint64_t scenario_hash(const Scenario& sc) {
  Scenario c = sc;
  c.name.clear();
  c.description.clear();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_scenario(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace modeshift::io
