#include "io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace md {

using Json = nlohmann::ordered_json;

namespace {

Json rat_json(const Rat& r) { return rat_str(r); }

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat((long long)j.get<long long>());
  if (j.is_string()) return rat_parse(j.get<std::string>());
  throw Error("expected a rational ('p/q' string or integer)");
}

Json cost_json(const CostBreakdown& c) {
  Json j;
  j["buy"] = rat_json(c.buy);
  j["connect"] = rat_json(c.connect);
  j["delay"] = rat_json(c.delay);
  j["total"] = rat_json(c.total());
  return j;
}

CostBreakdown cost_from_json(const Json& j) {
  CostBreakdown c;
  c.buy = rat_from_json(j.at("buy"));
  c.connect = rat_from_json(j.at("connect"));
  c.delay = rat_from_json(j.at("delay"));
  return c;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  Json j;
  j["format"] = "mdelay-instance-v1";
  j["name"] = inst.name;
  j["problem"] = problem_name(inst.problem);
  Json metric;
  if (inst.has_tree()) {
    const Tree& t = *inst.tree;
    metric["kind"] = "tree";
    metric["root"] = t.root();
    Json parents = Json::array(), weights = Json::array();
    for (int u = 0; u < t.size(); ++u) {
      parents.push_back(t.parent(u));
      weights.push_back(t.is_root(u) ? rat_json(Rat(0)) : rat_json(t.weight(u)));
    }
    metric["parents"] = parents;
    metric["weights"] = weights;
  } else if (inst.metric) {
    metric["kind"] = "matrix";
    Json rows = Json::array();
    for (const auto& row : inst.metric->dist) {
      Json r = Json::array();
      for (const auto& d : row) r.push_back(rat_json(d));
      rows.push_back(r);
    }
    metric["dist"] = rows;
  } else if (inst.points) {
    metric["kind"] = "points";
    Json pts = Json::array();
    for (const auto& [x, y] : *inst.points)
      pts.push_back(Json::array({rat_json(x), rat_json(y)}));
    metric["points"] = pts;
  } else {
    throw Error("instance has no metric data");
  }
  j["metric"] = metric;
  if (inst.f) j["f"] = rat_json(*inst.f);
  if (inst.server_start) j["server_start"] = *inst.server_start;
  Json reqs = Json::array();
  for (const auto& q : inst.requests) {
    Json r;
    r["id"] = q.id;
    r["leaf"] = q.leaf;
    r["release"] = rat_json(q.release);
    if (q.has_deadline()) {
      r["deadline"] = rat_json(q.deadline());
    } else {
      Json d;
      Json bps = Json::array();
      for (const auto& [t, v] : q.curve().breakpoints)
        bps.push_back(Json::array({rat_json(t), rat_json(v)}));
      d["breakpoints"] = bps;
      d["final_slope"] = rat_json(q.curve().final_slope);
      r["delay"] = d;
    }
    reqs.push_back(r);
  }
  j["requests"] = reqs;
  return j.dump(1);
}

Instance instance_from_json(const std::string& text) {
  Json j = Json::parse(text);
  if (j.value("format", "") != "mdelay-instance-v1")
    throw Error("not an mdelay instance file");
  Instance inst;
  inst.name = j.value("name", "");
  inst.problem = problem_from_name(j.at("problem").get<std::string>());
  const Json& metric = j.at("metric");
  std::string kind = metric.at("kind").get<std::string>();
  if (kind == "tree") {
    auto parents = metric.at("parents").get<std::vector<int>>();
    std::vector<Rat> weights;
    for (const auto& w : metric.at("weights")) weights.push_back(rat_from_json(w));
    inst.tree = Tree((int)parents.size(), metric.at("root").get<int>(), parents,
                     weights);
  } else if (kind == "matrix") {
    MetricSpace m;
    for (const auto& row : metric.at("dist")) {
      std::vector<Rat> r;
      for (const auto& d : row) r.push_back(rat_from_json(d));
      m.dist.push_back(std::move(r));
    }
    inst.metric = std::move(m);
  } else if (kind == "points" || kind == "euclidean") {
    std::vector<std::pair<Rat, Rat>> pts;
    for (const auto& p : metric.at("points"))
      pts.emplace_back(rat_from_json(p.at(0)), rat_from_json(p.at(1)));
    inst.points = std::move(pts);
  } else {
    throw Error("unknown metric kind: " + kind);
  }
  if (j.contains("f")) inst.f = rat_from_json(j.at("f"));
  if (j.contains("server_start")) inst.server_start = j.at("server_start").get<int>();
  for (const auto& r : j.at("requests")) {
    Request q;
    q.id = r.at("id").get<int>();
    q.leaf = r.at("leaf").get<int>();
    q.release = rat_from_json(r.at("release"));
    if (r.contains("deadline")) {
      q.delay = Deadline{rat_from_json(r.at("deadline"))};
    } else {
      PiecewiseDelay d;
      for (const auto& bp : r.at("delay").at("breakpoints"))
        d.breakpoints.emplace_back(rat_from_json(bp.at(0)), rat_from_json(bp.at(1)));
      d.final_slope = rat_from_json(r.at("delay").at("final_slope"));
      q.delay = std::move(d);
    }
    inst.requests.push_back(std::move(q));
  }
  validate_instance(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_text(path));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string instance_digest(const Instance& inst) {
  return hex64(fnv1a(instance_to_json(inst)));
}

std::string trace_to_json(const Trace& tr) {
  Json j;
  j["format"] = "mdelay-trace-v1";
  j["problem"] = problem_name(tr.problem);
  j["instance_digest"] = tr.instance_digest;
  j["k"] = tr.k;
  j["f"] = rat_json(tr.f);
  j["depth"] = tr.depth;
  Json explores = Json::array();
  for (const auto& x : tr.explores) {
    Json e;
    e["id"] = x.id;
    e["elem"] = x.elem;
    e["t_enter"] = rat_json(x.t_enter);
    e["t_return"] = rat_json(x.t_return);
    if (x.lambda) e["lambda"] = rat_json(*x.lambda);
    e["parent"] = x.parent;
    e["service"] = x.service;
    explores.push_back(e);
  }
  j["explores"] = explores;
  Json raises = Json::array();
  for (const auto& r : tr.raises)
    raises.push_back(Json{{"explore", r.explore},
                          {"target", r.target},
                          {"amount", rat_json(r.amount)},
                          {"phase", r.target_phase},
                          {"t", rat_json(r.t)}});
  j["raises"] = raises;
  Json opens = Json::array();
  for (const auto& o : tr.opens)
    opens.push_back(
        Json{{"node", o.node}, {"t", rat_json(o.t)}, {"explore", o.explore}});
  j["opens"] = opens;
  Json connects = Json::array();
  for (const auto& c : tr.connects)
    connects.push_back(Json{{"request", c.request},
                            {"node", c.node},
                            {"cost", rat_json(c.cost)},
                            {"t", rat_json(c.t)},
                            {"explore", c.explore}});
  j["connects"] = connects;
  Json serves = Json::array();
  for (const auto& s : tr.serves)
    serves.push_back(Json{{"request", s.request},
                          {"t", rat_json(s.t)},
                          {"delay", rat_json(s.delay_paid)},
                          {"service", s.service}});
  j["serves"] = serves;
  Json adds = Json::array();
  for (const auto& a : tr.adds)
    adds.push_back(Json{{"edge", a.edge}, {"t", rat_json(a.t)}, {"service", a.service}});
  j["adds"] = adds;
  Json txs = Json::array();
  for (const auto& tx : tr.transmissions) {
    Json t;
    t["edges"] = tx.edges;
    t["weight"] = rat_json(tx.weight);
    t["t"] = rat_json(tx.t);
    t["service"] = tx.service;
    t["served"] = tx.served_count;
    if (!tx.concrete_edges.empty()) {
      t["concrete_edges"] = tx.concrete_edges;
      t["concrete_weight"] = rat_json(tx.concrete_weight);
    }
    txs.push_back(t);
  }
  j["transmissions"] = txs;
  Json moves = Json::array();
  for (const auto& m : tr.moves)
    moves.push_back(Json{{"from", m.from},
                         {"to", m.to},
                         {"cost", rat_json(m.cost)},
                         {"t", rat_json(m.t)},
                         {"kind", m.kind},
                         {"service", m.service}});
  j["moves"] = moves;
  Json services = Json::array();
  for (const auto& s : tr.osd_services) {
    Json x;
    x["index"] = s.index;
    x["t_trigger"] = rat_json(s.t_trigger);
    x["t_end"] = rat_json(s.t_end);
    x["major_edge"] = s.major_edge;
    x["relative_side"] = s.relative_side;
    x["approach"] = rat_json(s.approach_cost);
    x["traverse"] = rat_json(s.traverse_cost);
    x["cross"] = rat_json(s.cross_cost);
    x["explored_weight"] = rat_json(s.explored_weight);
    x["in_te_before"] = s.server_in_te_before;
    x["in_te_after"] = s.server_in_te_after;
    x["edges"] = s.edges;
    x["phase"] = s.phase;
    services.push_back(x);
  }
  j["osd_services"] = services;
  Json entries = Json::array();
  for (const auto& p : tr.pending_entries)
    entries.push_back(Json{{"request", p.request}, {"t", rat_json(p.t)}});
  j["pending_entries"] = entries;
  Json cum;
  for (const auto& [u, c] : tr.cumulative) cum[std::to_string(u)] = rat_json(c);
  j["cumulative"] = cum;
  j["cumulative_root"] = rat_json(tr.cumulative_root);
  j["cost"] = cost_json(tr.reported_cost);
  return j.dump(1);
}

Trace trace_from_json(const std::string& text) {
  Json j = Json::parse(text);
  if (j.value("format", "") != "mdelay-trace-v1")
    throw Error("not an mdelay trace file");
  Trace tr;
  tr.problem = problem_from_name(j.at("problem").get<std::string>());
  tr.instance_digest = j.value("instance_digest", "");
  tr.k = j.at("k").get<int>();
  tr.f = rat_from_json(j.at("f"));
  tr.depth = j.at("depth").get<int>();
  for (const auto& e : j.at("explores")) {
    Trace::Explore x;
    x.id = e.at("id").get<int>();
    x.elem = e.at("elem").get<int>();
    x.t_enter = rat_from_json(e.at("t_enter"));
    x.t_return = rat_from_json(e.at("t_return"));
    if (e.contains("lambda")) x.lambda = rat_from_json(e.at("lambda"));
    x.parent = e.at("parent").get<int>();
    x.service = e.at("service").get<int>();
    tr.explores.push_back(x);
  }
  for (const auto& r : j.at("raises")) {
    Trace::Raise x;
    x.explore = r.at("explore").get<int>();
    x.target = r.at("target").get<int>();
    x.amount = rat_from_json(r.at("amount"));
    x.target_phase = r.at("phase").get<long>();
    x.t = rat_from_json(r.at("t"));
    tr.raises.push_back(x);
  }
  for (const auto& o : j.at("opens"))
    tr.opens.push_back({o.at("node").get<int>(), rat_from_json(o.at("t")),
                        o.at("explore").get<int>(), 0});
  for (const auto& c : j.at("connects"))
    tr.connects.push_back({c.at("request").get<int>(), c.at("node").get<int>(),
                           rat_from_json(c.at("cost")), rat_from_json(c.at("t")),
                           c.at("explore").get<int>(), 0});
  for (const auto& s : j.at("serves"))
    tr.serves.push_back({s.at("request").get<int>(), rat_from_json(s.at("t")),
                         rat_from_json(s.at("delay")), s.at("service").get<int>(),
                         0});
  for (const auto& a : j.at("adds"))
    tr.adds.push_back({a.at("edge").get<int>(), rat_from_json(a.at("t")),
                       a.at("service").get<int>(), 0});
  for (const auto& t : j.at("transmissions")) {
    Trace::Transmit tx;
    tx.edges = t.at("edges").get<std::vector<int>>();
    tx.weight = rat_from_json(t.at("weight"));
    tx.t = rat_from_json(t.at("t"));
    tx.service = t.at("service").get<int>();
    tx.served_count = t.at("served").get<int>();
    if (t.contains("concrete_edges")) {
      tx.concrete_edges = t.at("concrete_edges").get<std::vector<int>>();
      tx.concrete_weight = rat_from_json(t.at("concrete_weight"));
    } else {
      tx.concrete_weight = tx.weight;
    }
    tr.transmissions.push_back(std::move(tx));
  }
  for (const auto& m : j.at("moves"))
    tr.moves.push_back({m.at("from").get<int>(), m.at("to").get<int>(),
                        rat_from_json(m.at("cost")), rat_from_json(m.at("t")),
                        m.at("kind").get<int>(), m.at("service").get<int>(), 0});
  for (const auto& s : j.at("osd_services")) {
    Trace::OsdService x;
    x.index = s.at("index").get<int>();
    x.t_trigger = rat_from_json(s.at("t_trigger"));
    x.t_end = rat_from_json(s.at("t_end"));
    x.major_edge = s.at("major_edge").get<int>();
    x.relative_side = s.at("relative_side").get<bool>();
    x.approach_cost = rat_from_json(s.at("approach"));
    x.traverse_cost = rat_from_json(s.at("traverse"));
    x.cross_cost = rat_from_json(s.at("cross"));
    x.explored_weight = rat_from_json(s.at("explored_weight"));
    x.server_in_te_before = s.at("in_te_before").get<bool>();
    x.server_in_te_after = s.at("in_te_after").get<bool>();
    x.edges = s.at("edges").get<std::vector<int>>();
    x.phase = s.at("phase").get<int>();
    tr.osd_services.push_back(std::move(x));
  }
  for (const auto& p : j.at("pending_entries"))
    tr.pending_entries.push_back(
        {p.at("request").get<int>(), rat_from_json(p.at("t")), 0});
  for (const auto& [key, val] : j.at("cumulative").items())
    tr.cumulative[std::stoi(key)] = rat_from_json(val);
  tr.cumulative_root = rat_from_json(j.at("cumulative_root"));
  tr.reported_cost = cost_from_json(j.at("cost"));
  return tr;
}

std::string solution_to_json(const OfflineSolution& sol,
                             const std::string& digest) {
  Json j;
  j["format"] = "mdelay-solution-v1";
  j["problem"] = problem_name(sol.problem);
  j["instance_digest"] = digest;
  Json openings = Json::array();
  for (const auto& o : sol.openings)
    openings.push_back(Json{{"t", rat_json(o.t)}, {"node", o.node}});
  j["openings"] = openings;
  Json assignments;
  for (const auto& [qid, a] : sol.assignments)
    assignments[std::to_string(qid)] =
        Json{{"t", rat_json(a.t)}, {"node", a.node}};
  j["assignments"] = assignments;
  Json txs = Json::array();
  for (const auto& tx : sol.transmissions)
    txs.push_back(Json{{"t", rat_json(tx.t)}, {"edges", tx.edges}});
  j["transmissions"] = txs;
  Json moves = Json::array();
  for (const auto& m : sol.moves)
    moves.push_back(Json{{"t", rat_json(m.t)}, {"to", m.to}});
  j["moves"] = moves;
  Json serve;
  for (const auto& [qid, t] : sol.serve_time)
    serve[std::to_string(qid)] = rat_json(t);
  j["serve_times"] = serve;
  if (sol.server_start >= 0) j["server_start"] = sol.server_start;
  j["cost"] = cost_json(sol.cost);
  return j.dump(1);
}

OfflineSolution solution_from_json(const std::string& text,
                                   std::string* digest_out) {
  Json j = Json::parse(text);
  if (j.value("format", "") != "mdelay-solution-v1")
    throw Error("not an mdelay solution file");
  OfflineSolution sol;
  sol.problem = problem_from_name(j.at("problem").get<std::string>());
  if (digest_out) *digest_out = j.value("instance_digest", "");
  for (const auto& o : j.at("openings"))
    sol.openings.push_back({rat_from_json(o.at("t")), o.at("node").get<int>()});
  for (const auto& [key, a] : j.at("assignments").items())
    sol.assignments[std::stoi(key)] = {rat_from_json(a.at("t")),
                                       a.at("node").get<int>()};
  for (const auto& tx : j.at("transmissions"))
    sol.transmissions.push_back(
        {rat_from_json(tx.at("t")), tx.at("edges").get<std::vector<int>>()});
  for (const auto& m : j.at("moves"))
    sol.moves.push_back({rat_from_json(m.at("t")), m.at("to").get<int>()});
  for (const auto& [key, t] : j.at("serve_times").items())
    sol.serve_time[std::stoi(key)] = rat_from_json(t);
  if (j.contains("server_start")) sol.server_start = j.at("server_start").get<int>();
  sol.cost = cost_from_json(j.at("cost"));
  return sol;
}

std::string report_to_json(const RunReport& r) {
  Json j;
  j["format"] = "mdelay-report-v1";
  j["instance"] = r.instance;
  j["seed"] = r.seed;
  j["algo"] = r.algo;
  j["n"] = r.n;
  j["depth"] = r.depth;
  j["k"] = r.k;
  j["cost"] = cost_json(r.cost);
  if (r.feas_total) {
    j["feas_total"] = rat_json(*r.feas_total);
    if (*r.feas_total > 0)
      j["ratio"] = rat_decimal(r.cost.total() / *r.feas_total, 6);
  }
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name},
                          {"lhs", rat_json(c.lhs)},
                          {"rhs", rat_json(c.rhs)},
                          {"ok", c.ok}});
  j["checks"] = checks;
  j["all_ok"] = r.all_ok();
  return j.dump(1);
}

std::string report_csv_header(const RunReport& r) {
  std::string h =
      "instance,seed,algo,n,D,k,alg_buy,alg_buy_pq,alg_connect,alg_connect_pq,"
      "alg_delay,alg_delay_pq,alg_total,alg_total_pq,feas_total,feas_total_pq,"
      "ratio";
  for (const auto& c : r.checks)
    h += "," + c.name + "_lhs_pq," + c.name + "_rhs_pq," + c.name + "_ok";
  return h + ",all_ok";
}

std::string report_csv_row(const RunReport& r) {
  std::ostringstream s;
  s << r.instance << ',' << r.seed << ',' << r.algo << ',' << r.n << ','
    << r.depth << ',' << r.k << ',' << rat_decimal(r.cost.buy) << ','
    << rat_str(r.cost.buy) << ',' << rat_decimal(r.cost.connect) << ','
    << rat_str(r.cost.connect) << ',' << rat_decimal(r.cost.delay) << ','
    << rat_str(r.cost.delay) << ',' << rat_decimal(r.cost.total()) << ','
    << rat_str(r.cost.total()) << ',';
  if (r.feas_total) {
    s << rat_decimal(*r.feas_total) << ',' << rat_str(*r.feas_total) << ',';
    if (*r.feas_total > 0)
      s << rat_decimal(r.cost.total() / *r.feas_total, 6);
  } else {
    s << ",,";
  }
  for (const auto& c : r.checks)
    s << ',' << rat_str(c.lhs) << ',' << rat_str(c.rhs) << ',' << (c.ok ? 1 : 0);
  s << ',' << (r.all_ok() ? 1 : 0);
  return s.str();
}

}  // namespace md
