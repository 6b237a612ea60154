#include "reprtrace/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "reprtrace/errors.hpp"

namespace reprtrace {

sim::RunSpec Scenario::run_spec(StrategyKind kind, std::uint64_t run_seed) const {
    sim::RunSpec spec;
    spec.model = model;
    spec.workload = workload;
    spec.sampler = sampler;
    spec.strategy = kind;
    spec.seed = run_seed;
    return spec;
}

void Scenario::validate(const std::string& source) const {
    try {
        model.validate();
        workload.validate();
        sampler.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(source, 0, e.what());
    }
    if (strategies.empty()) throw ConfigError(source, 0, "strategies must not be empty");
    if (seeds.empty()) throw ConfigError(source, 0, "seeds must not be empty");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    auto parse_one = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        std::uint64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw ParameterError("invalid seed '" + std::string(s) + "'");
        }
        return v;
    };
    std::vector<std::uint64_t> out;
    if (auto dots = text.find(".."); dots != std::string::npos) {
        auto lo = parse_one(std::string_view(text).substr(0, dots));
        auto hi = parse_one(std::string_view(text).substr(dots + 2));
        if (hi < lo) throw ParameterError("seed range '" + text + "' is empty");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::string_view rest(text);
    while (true) {
        auto comma = rest.find(',');
        out.push_back(parse_one(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<StrategyKind> parse_strategy_list(const std::string& text) {
    std::vector<StrategyKind> out;
    std::string_view rest(text);
    while (true) {
        auto comma = rest.find(',');
        std::string_view name = rest.substr(0, comma);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        auto kind = parse_strategy_kind(name);
        if (!kind) throw ParameterError("unknown strategy '" + std::string(name) + "' (expected ADP, INV, UNI, FUM or NOM)");
        out.push_back(*kind);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        throw ConfigError(source_, line_of(node), message);
    }

    static std::size_t line_of(const YAML::Node& node) {
        auto mark = node.Mark();
        return mark.line < 0 ? 0 : static_cast<std::size_t>(mark.line) + 1;
    }

    void expect_map(const YAML::Node& node, const std::string& what) const {
        if (!node.IsMap()) fail(node, what + " must be a mapping");
    }

    // Calls handler(key, value) for every entry; unknown keys are errors.
    void each_entry(const YAML::Node& map, const std::string& what,
                    const std::vector<std::string>& allowed,
                    const std::function<void(const std::string&, const YAML::Node&)>& handler) const {
        expect_map(map, what);
        for (auto it = map.begin(); it != map.end(); ++it) {
            auto key = it->first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(it->first, "unknown key '" + key + "' in " + what);
            }
            handler(key, it->second);
        }
    }

    double real(const YAML::Node& node, const std::string& name) const {
        if (!node.IsScalar()) fail(node, name + " must be a number");
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail(node, name + " must be a number, got '" + node.Scalar() + "'");
        }
    }

    long long integer(const YAML::Node& node, const std::string& name) const {
        if (!node.IsScalar()) fail(node, name + " must be an integer");
        try {
            return node.as<long long>();
        } catch (const YAML::Exception&) {
            fail(node, name + " must be an integer, got '" + node.Scalar() + "'");
        }
    }

    bool boolean(const YAML::Node& node, const std::string& name) const {
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail(node, name + " must be true or false");
        }
    }

    std::string text(const YAML::Node& node, const std::string& name) const {
        if (!node.IsScalar()) fail(node, name + " must be a string");
        return node.Scalar();
    }

    void require(bool ok, const YAML::Node& node, const std::string& message) const {
        if (!ok) fail(node, message);
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

void read_sampler(const Reader& rd, const YAML::Node& node, SamplerConfig& cfg) {
    rd.each_entry(node, "sampler",
                  {"max_rate", "min_rate", "epsilon", "baseline_duration_s", "adaptation_frequency_s",
                   "max_cycle_length_s", "history_capacity", "variability_p", "margin_e"},
                  [&](const std::string& key, const YAML::Node& v) {
                      const std::string name = "sampler." + key;
                      if (key == "max_rate") {
                          cfg.max_rate = rd.real(v, name);
                          rd.require(cfg.max_rate > 0.0 && cfg.max_rate <= 1.0, v, name + " must lie in (0, 1]");
                      } else if (key == "min_rate") {
                          cfg.min_rate = rd.real(v, name);
                          rd.require(cfg.min_rate > 0.0 && cfg.min_rate <= 1.0, v, name + " must lie in (0, 1]");
                      } else if (key == "epsilon") {
                          cfg.epsilon = rd.real(v, name);
                          rd.require(cfg.epsilon >= 0.0, v, name + " must be >= 0");
                      } else if (key == "baseline_duration_s") {
                          cfg.baseline_duration = rd.real(v, name);
                          rd.require(cfg.baseline_duration > 0.0, v, name + " must be > 0");
                      } else if (key == "adaptation_frequency_s") {
                          cfg.adaptation_frequency = rd.real(v, name);
                          rd.require(cfg.adaptation_frequency >= 1.0, v, name + " must be >= 1");
                      } else if (key == "max_cycle_length_s") {
                          cfg.max_cycle_length = rd.real(v, name);
                          rd.require(cfg.max_cycle_length > 0.0, v, name + " must be > 0");
                      } else if (key == "history_capacity") {
                          auto c = rd.integer(v, name);
                          rd.require(c >= 1, v, name + " must be >= 1");
                          cfg.history_capacity = static_cast<std::size_t>(c);
                      } else if (key == "variability_p") {
                          cfg.variability_p = rd.real(v, name);
                          rd.require(cfg.variability_p > 0.0 && cfg.variability_p < 1.0, v, name + " must lie in (0, 1)");
                      } else if (key == "margin_e") {
                          cfg.margin_e = rd.real(v, name);
                          rd.require(cfg.margin_e > 0.0 && cfg.margin_e < 1.0, v, name + " must lie in (0, 1)");
                      }
                  });
    rd.require(cfg.min_rate <= cfg.max_rate, node, "sampler.min_rate must not exceed sampler.max_rate");
}

sim::RequestTypeSpec read_type(const Reader& rd, const YAML::Node& node, std::size_t index) {
    sim::RequestTypeSpec t;
    const std::string where = "model.types[" + std::to_string(index) + "]";
    bool has_id = false;
    rd.each_entry(node, where,
                  {"id", "weight", "base_rt_ms", "rt_dispersion", "base_mem_kb", "mem_dispersion"},
                  [&](const std::string& key, const YAML::Node& v) {
                      const std::string name = where + "." + key;
                      if (key == "id") {
                          t.type_id = rd.text(v, name);
                          rd.require(!t.type_id.empty(), v, name + " must be non-empty");
                          rd.require(t.type_id.find_first_of("\t\n") == std::string::npos, v,
                                     name + " must not contain tabs or newlines");
                          has_id = true;
                      } else if (key == "weight") {
                          t.weight = rd.real(v, name);
                          rd.require(t.weight > 0.0, v, name + " must be > 0");
                      } else if (key == "base_rt_ms") {
                          t.base_rt = rd.real(v, name);
                          rd.require(t.base_rt > 0.0, v, name + " must be > 0");
                      } else if (key == "rt_dispersion") {
                          t.rt_dispersion = rd.real(v, name);
                          rd.require(t.rt_dispersion >= 0.0, v, name + " must be >= 0");
                      } else if (key == "base_mem_kb") {
                          t.base_mem = rd.real(v, name);
                          rd.require(t.base_mem > 0.0, v, name + " must be > 0");
                      } else if (key == "mem_dispersion") {
                          t.mem_dispersion = rd.real(v, name);
                          rd.require(t.mem_dispersion >= 0.0, v, name + " must be >= 0");
                      }
                  });
    rd.require(has_id, node, where + " needs an id");
    return t;
}

void read_model(const Reader& rd, const YAML::Node& node, sim::AppModel& m) {
    bool has_types = false;
    rd.each_entry(node, "model",
                  {"capacity_users", "contention_gamma", "trace_cost_ms", "monitor_load",
                   "mem_concurrency_gain", "gc_negative_prob", "types"},
                  [&](const std::string& key, const YAML::Node& v) {
                      const std::string name = "model." + key;
                      if (key == "capacity_users") {
                          auto c = rd.integer(v, name);
                          rd.require(c >= 1, v, name + " must be >= 1");
                          m.capacity_users = static_cast<int>(c);
                      } else if (key == "contention_gamma") {
                          m.contention_gamma = rd.real(v, name);
                          rd.require(m.contention_gamma >= 0.0, v, name + " must be >= 0");
                      } else if (key == "trace_cost_ms") {
                          m.trace_cost = rd.real(v, name);
                          rd.require(m.trace_cost >= 0.0, v, name + " must be >= 0");
                      } else if (key == "monitor_load") {
                          m.monitor_load = rd.real(v, name);
                          rd.require(m.monitor_load >= 0.0, v, name + " must be >= 0");
                      } else if (key == "mem_concurrency_gain") {
                          m.mem_concurrency_gain = rd.real(v, name);
                          rd.require(m.mem_concurrency_gain >= 0.0, v, name + " must be >= 0");
                      } else if (key == "gc_negative_prob") {
                          m.gc_negative_prob = rd.real(v, name);
                          rd.require(m.gc_negative_prob >= 0.0 && m.gc_negative_prob < 1.0, v,
                                     name + " must lie in [0, 1)");
                      } else if (key == "types") {
                          rd.require(v.IsSequence() && v.size() > 0, v, "model.types must be a non-empty list");
                          m.types.clear();
                          for (std::size_t i = 0; i < v.size(); ++i) {
                              auto t = read_type(rd, v[i], i);
                              for (const auto& other : m.types) {
                                  rd.require(other.type_id != t.type_id, v[i],
                                             "duplicate request type '" + t.type_id + "'");
                              }
                              m.types.push_back(std::move(t));
                          }
                          has_types = true;
                      }
                  });
    rd.require(has_types, node, "model.types is required");
}

WorkloadSegment read_segment(const Reader& rd, const YAML::Node& node, std::size_t index) {
    const std::string where = "workload[" + std::to_string(index) + "]";
    rd.require(node.IsMap() && node.size() == 1, node,
               where + " must be a single-key mapping: stationary, seasonal or burst");
    auto it = node.begin();
    const auto kind = it->first.as<std::string>();
    const YAML::Node body = it->second;
    auto positive = [&](const YAML::Node& v, const std::string& name) {
        double d = rd.real(v, name);
        rd.require(d > 0.0, v, name + " must be > 0");
        return d;
    };
    auto users = [&](const YAML::Node& v, const std::string& name) {
        auto u = rd.integer(v, name);
        rd.require(u >= 1, v, name + " must be >= 1");
        return static_cast<int>(u);
    };

    std::vector<std::string> seen;
    auto track = [&](const std::string& key) { seen.push_back(key); };
    auto need = [&](const std::vector<std::string>& keys) {
        for (const auto& k : keys) {
            if (std::find(seen.begin(), seen.end(), k) == seen.end())
                rd.fail(body, where + "." + kind + " is missing '" + k + "'");
        }
    };

    if (kind == "stationary") {
        StationarySegment s;
        rd.each_entry(body, where + ".stationary", {"users", "duration_s"},
                      [&](const std::string& key, const YAML::Node& v) {
                          track(key);
                          const std::string name = where + ".stationary." + key;
                          if (key == "users") s.users = users(v, name);
                          else s.duration = positive(v, name);
                      });
        need({"users", "duration_s"});
        return s;
    }
    if (kind == "seasonal") {
        SeasonalSegment s;
        rd.each_entry(body, where + ".seasonal", {"base_users", "amplitude", "period_s", "duration_s"},
                      [&](const std::string& key, const YAML::Node& v) {
                          track(key);
                          const std::string name = where + ".seasonal." + key;
                          if (key == "base_users") s.base_users = users(v, name);
                          else if (key == "amplitude") {
                              auto a = rd.integer(v, name);
                              rd.require(a >= 0, v, name + " must be >= 0");
                              s.amplitude = static_cast<int>(a);
                          } else if (key == "period_s") s.period = positive(v, name);
                          else s.duration = positive(v, name);
                      });
        need({"base_users", "amplitude", "period_s", "duration_s"});
        return s;
    }
    if (kind == "burst") {
        BurstSegment s;
        rd.each_entry(body, where + ".burst", {"base_users", "peak_users", "at_s", "width_s", "duration_s"},
                      [&](const std::string& key, const YAML::Node& v) {
                          track(key);
                          const std::string name = where + ".burst." + key;
                          if (key == "base_users") s.base_users = users(v, name);
                          else if (key == "peak_users") s.peak_users = users(v, name);
                          else if (key == "at_s") {
                              s.at = rd.real(v, name);
                              rd.require(s.at >= 0.0, v, name + " must be >= 0");
                          } else if (key == "width_s") s.width = positive(v, name);
                          else s.duration = positive(v, name);
                      });
        need({"base_users", "peak_users", "at_s", "width_s", "duration_s"});
        rd.require(s.at < s.duration, body, where + ".burst.at_s must fall inside the segment");
        return s;
    }
    rd.fail(it->first, "unknown workload segment kind '" + kind + "' (expected stationary, seasonal or burst)");
}

}  // namespace

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
    Reader rd(source_name);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source_name, e.mark.line < 0 ? 0 : static_cast<std::size_t>(e.mark.line) + 1, e.msg);
    }
    if (!root.IsMap()) {
        throw ConfigError(source_name, Reader::line_of(root), "scenario must be a YAML mapping");
    }

    Scenario sc;
    bool has_model = false;
    bool has_workload = false;
    rd.each_entry(root, "scenario",
                  {"strategy", "seed", "strategies", "seeds", "out", "strict", "sampler", "model", "workload"},
                  [&](const std::string& key, const YAML::Node& v) {
                      if (key == "strategy") {
                          auto k = parse_strategy_kind(rd.text(v, key));
                          rd.require(k.has_value(), v, "unknown strategy '" + v.Scalar() + "'");
                          sc.strategy = *k;
                      } else if (key == "seed") {
                          auto s = rd.integer(v, key);
                          rd.require(s >= 0, v, "seed must be >= 0");
                          sc.seed = static_cast<std::uint64_t>(s);
                      } else if (key == "strategies") {
                          rd.require(v.IsSequence() && v.size() > 0, v, "strategies must be a non-empty list");
                          sc.strategies.clear();
                          for (const auto& item : v) {
                              auto k = parse_strategy_kind(rd.text(item, "strategies"));
                              rd.require(k.has_value(), item, "unknown strategy '" + item.Scalar() + "'");
                              sc.strategies.push_back(*k);
                          }
                      } else if (key == "seeds") {
                          if (v.IsSequence()) {
                              rd.require(v.size() > 0, v, "seeds must not be empty");
                              sc.seeds.clear();
                              for (const auto& item : v) {
                                  auto s = rd.integer(item, "seeds");
                                  rd.require(s >= 0, item, "seeds must be >= 0");
                                  sc.seeds.push_back(static_cast<std::uint64_t>(s));
                              }
                          } else {
                              try {
                                  sc.seeds = parse_seed_list(rd.text(v, key));
                              } catch (const ParameterError& e) {
                                  rd.fail(v, e.what());
                              }
                          }
                      } else if (key == "out") {
                          sc.out = rd.text(v, key);
                      } else if (key == "strict") {
                          sc.strict = rd.boolean(v, key);
                      } else if (key == "sampler") {
                          read_sampler(rd, v, sc.sampler);
                      } else if (key == "model") {
                          read_model(rd, v, sc.model);
                          has_model = true;
                      } else if (key == "workload") {
                          rd.require(v.IsSequence() && v.size() > 0, v, "workload must be a non-empty list of segments");
                          sc.workload.segments.clear();
                          for (std::size_t i = 0; i < v.size(); ++i) {
                              sc.workload.segments.push_back(read_segment(rd, v[i], i));
                          }
                          has_workload = true;
                      }
                  });
    if (!has_model) throw ConfigError(source_name, Reader::line_of(root), "missing 'model' section");
    if (!has_workload) throw ConfigError(source_name, Reader::line_of(root), "missing 'workload' section");
    sc.validate(source_name);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), 0, "cannot open scenario file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

std::string dump_scenario(const Scenario& sc) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "strategy" << YAML::Value << std::string(to_string(sc.strategy));
    e << YAML::Key << "seed" << YAML::Value << sc.seed;
    e << YAML::Key << "strategies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto k : sc.strategies) e << std::string(to_string(k));
    e << YAML::EndSeq;
    e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto s : sc.seeds) e << s;
    e << YAML::EndSeq;
    e << YAML::Key << "out" << YAML::Value << sc.out;
    e << YAML::Key << "strict" << YAML::Value << sc.strict;

    const auto& c = sc.sampler;
    e << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "max_rate" << YAML::Value << num(c.max_rate);
    e << YAML::Key << "min_rate" << YAML::Value << num(c.min_rate);
    e << YAML::Key << "epsilon" << YAML::Value << num(c.epsilon);
    e << YAML::Key << "baseline_duration_s" << YAML::Value << num(c.baseline_duration);
    e << YAML::Key << "adaptation_frequency_s" << YAML::Value << num(c.adaptation_frequency);
    e << YAML::Key << "max_cycle_length_s" << YAML::Value << num(c.max_cycle_length);
    e << YAML::Key << "history_capacity" << YAML::Value << c.history_capacity;
    e << YAML::Key << "variability_p" << YAML::Value << num(c.variability_p);
    e << YAML::Key << "margin_e" << YAML::Value << num(c.margin_e);
    e << YAML::EndMap;

    const auto& m = sc.model;
    e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "capacity_users" << YAML::Value << m.capacity_users;
    e << YAML::Key << "contention_gamma" << YAML::Value << num(m.contention_gamma);
    e << YAML::Key << "trace_cost_ms" << YAML::Value << num(m.trace_cost);
    e << YAML::Key << "monitor_load" << YAML::Value << num(m.monitor_load);
    e << YAML::Key << "mem_concurrency_gain" << YAML::Value << num(m.mem_concurrency_gain);
    e << YAML::Key << "gc_negative_prob" << YAML::Value << num(m.gc_negative_prob);
    e << YAML::Key << "types" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : m.types) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << t.type_id;
        e << YAML::Key << "weight" << YAML::Value << num(t.weight);
        e << YAML::Key << "base_rt_ms" << YAML::Value << num(t.base_rt);
        e << YAML::Key << "rt_dispersion" << YAML::Value << num(t.rt_dispersion);
        e << YAML::Key << "base_mem_kb" << YAML::Value << num(t.base_mem);
        e << YAML::Key << "mem_dispersion" << YAML::Value << num(t.mem_dispersion);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::EndMap;

    e << YAML::Key << "workload" << YAML::Value << YAML::BeginSeq;
    for (const auto& seg : sc.workload.segments) {
        e << YAML::BeginMap;
        if (const auto* s = std::get_if<StationarySegment>(&seg)) {
            e << YAML::Key << "stationary" << YAML::Value << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "users" << YAML::Value << s->users;
            e << YAML::Key << "duration_s" << YAML::Value << num(s->duration);
        } else if (const auto* s = std::get_if<SeasonalSegment>(&seg)) {
            e << YAML::Key << "seasonal" << YAML::Value << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "base_users" << YAML::Value << s->base_users;
            e << YAML::Key << "amplitude" << YAML::Value << s->amplitude;
            e << YAML::Key << "period_s" << YAML::Value << num(s->period);
            e << YAML::Key << "duration_s" << YAML::Value << num(s->duration);
        } else if (const auto* s = std::get_if<BurstSegment>(&seg)) {
            e << YAML::Key << "burst" << YAML::Value << YAML::Flow << YAML::BeginMap;
            e << YAML::Key << "base_users" << YAML::Value << s->base_users;
            e << YAML::Key << "peak_users" << YAML::Value << s->peak_users;
            e << YAML::Key << "at_s" << YAML::Value << num(s->at);
            e << YAML::Key << "width_s" << YAML::Value << num(s->width);
            e << YAML::Key << "duration_s" << YAML::Value << num(s->duration);
        }
        e << YAML::EndMap;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace reprtrace

namespace reprtrace {

Scenario default_scenario() {
    Scenario sc;
    auto& m = sc.model;
    m.capacity_users = 24;
    m.contention_gamma = 3.12;
    m.trace_cost = 4.477;
    m.monitor_load = 0.75;
    m.mem_concurrency_gain = 0.086;
    m.gc_negative_prob = 0.02;
    m.types = {
        {"/home", 3.0, 8.0, 0.3, 40.0, 0.4},
        {"/vets", 1.5, 25.0, 0.35, 220.0, 0.4},
        {"/pets", 1.0, 18.0, 0.3, 150.0, 0.4},
        {"/owners", 2.0, 30.0, 0.35, 300.0, 0.4},
        {"/owners/find", 2.0, 12.0, 0.3, 90.0, 0.4},
        {"/owners/new", 0.6, 35.0, 0.4, 260.0, 0.4},
        {"/pets/new", 0.5, 40.0, 0.4, 280.0, 0.4},
        {"/visits/new", 0.4, 45.0, 0.4, 320.0, 0.4},
    };
    sc.workload.segments = {
        StationarySegment{8, 150.0},
        SeasonalSegment{8, 12, 60.0, 300.0},
        BurstSegment{8, 14, 25.0, 30.0, 120.0},
        StationarySegment{8, 30.0},
    };
    return sc;
}

}  // namespace reprtrace
