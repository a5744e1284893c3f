#include "resist/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace resist {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

class KeyReader {
public:
    KeyReader(const std::map<std::string, std::string>& kv, std::string scope)
        : kv_(kv), scope_(std::move(scope)) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    double num(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(scope_ + ": key '" + key + "' is not a number: " + it->second);
        }
    }

    int integer(const std::string& key, int fallback) const {
        double v = num(key, static_cast<double>(fallback));
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::invalid_argument(scope_ + ": key '" + key + "' must be an integer");
        return i;
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument(scope_ + ": key '" + key + "' must be true or false");
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> out;
        for (const std::string& part : split(str(key, ""), ',')) {
            try {
                out.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw std::invalid_argument(scope_ + ": key '" + key + "' has a bad number: " + part);
            }
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) const {
        std::vector<int> out;
        for (double v : numbers(key)) out.push_back(static_cast<int>(v));
        return out;
    }

private:
    const std::map<std::string, std::string>& kv_;
    std::string scope_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

RawConfig parse_config(const std::string& text) {
    RawConfig config;
    std::map<std::string, std::string>* current = &config.globals;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": unterminated section");
            std::string inner = trim(line.substr(1, line.size() - 2));
            if (inner.rfind("run", 0) != 0)
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": only [run NAME] sections are allowed");
            std::string name = trim(inner.substr(3));
            if (name.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": run section needs a name");
            config.runs.emplace_back(name, std::map<std::string, std::string>{});
            current = &config.runs.back().second;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        (*current)[key] = value;
    }
    return config;
}

RawConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RawConfig& config) {
    std::ostringstream out;
    for (const auto& [k, v] : config.globals) out << k << " = " << v << "\n";
    for (const auto& [name, kv] : config.runs) {
        out << "\n[run " << name << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    }
    return out.str();
}

SuiteSpec validate_config(const RawConfig& raw) {
    SuiteSpec suite;
    KeyReader g(raw.globals, "suite");
    suite.name = g.str("suite", "suite");
    if (g.has("seeds")) {
        suite.seeds.clear();
        for (int s : g.integers("seeds")) suite.seeds.push_back(static_cast<std::uint64_t>(s));
        if (suite.seeds.empty()) throw std::invalid_argument("suite: empty seeds list");
    }

    for (const auto& [name, kv] : raw.runs) {
        KeyReader r(kv, "run " + name);
        RunSpec spec;
        spec.name = name;

        spec.graph_kind = r.str("graph", "erdos_renyi");
        if (spec.graph_kind != "erdos_renyi" && spec.graph_kind != "complete" && spec.graph_kind != "file")
            throw std::invalid_argument("run " + name + ": unknown graph kind " + spec.graph_kind);
        spec.node_count = r.integer("M", 0);
        if (spec.graph_kind != "file" && spec.node_count < 2)
            throw std::invalid_argument("run " + name + ": M must be >= 2");
        spec.rho = r.num("rho", 0.5);
        if (spec.rho < 0.0 || spec.rho > 1.0)
            throw std::invalid_argument("run " + name + ": rho must lie in [0, 1]");
        spec.graph_file = r.str("graph_file", "");
        if (spec.graph_kind == "file" && spec.graph_file.empty())
            throw std::invalid_argument("run " + name + ": graph = file needs graph_file");

        spec.b = r.integer("b", 0);
        if (spec.b < 0) throw std::invalid_argument("run " + name + ": b must be >= 0");
        spec.attack_kind = r.str("attack", "none");
        if (spec.attack_kind != "none" && spec.attack_kind != "dynamic_random" &&
            spec.attack_kind != "static" && spec.attack_kind != "byzantine")
            throw std::invalid_argument("run " + name + ": unknown attack kind " + spec.attack_kind);
        spec.links_per_round = r.integer("B", 0);
        if (spec.links_per_round < 0)
            throw std::invalid_argument("run " + name + ": B must be >= 0");
        if (r.has("static_links")) {
            for (const std::string& part : split(r.str("static_links", ""), ';')) {
                std::size_t gt = part.find('>');
                if (gt == std::string::npos)
                    throw std::invalid_argument("run " + name + ": static_links entries look like i>j");
                spec.static_links.emplace_back(std::stoi(trim(part.substr(0, gt))),
                                               std::stoi(trim(part.substr(gt + 1))));
            }
        }
        spec.byzantine_nodes = r.integers("byzantine");
        spec.strategy_kind = r.str("strategy", spec.attack_kind == "none" ? "none" : "random_value");
        if (spec.strategy_kind != "none" && spec.strategy_kind != "random_value" &&
            spec.strategy_kind != "sign_flip" && spec.strategy_kind != "constant")
            throw std::invalid_argument("run " + name + ": unknown strategy " + spec.strategy_kind);
        spec.attack_range = r.num("attack_range", -1.0);
        spec.constant_value = r.numbers("constant_value");
        if (spec.strategy_kind == "constant" && spec.constant_value.empty())
            throw std::invalid_argument("run " + name + ": constant strategy needs constant_value");

        spec.screening = r.str("screening", "cwtm");
        if (spec.screening != "cwtm" && spec.screening != "median" && spec.screening != "krum" &&
            spec.screening != "bulyan" && spec.screening != "dgd")
            throw std::invalid_argument("run " + name + ": unknown screening " + spec.screening);

        spec.j_param = r.integer("J", 2);
        if (spec.j_param <= 1) throw std::invalid_argument("run " + name + ": J must be > 1");
        spec.step_kind = r.str("step", "constant");
        spec.h = r.num("h", 0.1);
        spec.p = r.num("p", 0.0);
        spec.omega = r.num("omega", 0.0);
        spec.horizon = r.integer("S", 0);
        if (spec.step_kind == "constant" && spec.h <= 0.0)
            throw std::invalid_argument("run " + name + ": h must be > 0");
        if (spec.step_kind == "diminishing" && (spec.p <= 0.0 || spec.omega <= 0.0))
            throw std::invalid_argument("run " + name + ": diminishing step needs p, omega > 0");
        if (spec.step_kind == "fixed_horizon" && spec.horizon < 1)
            throw std::invalid_argument("run " + name + ": fixed_horizon needs S >= 1");
        if (spec.step_kind != "constant" && spec.step_kind != "diminishing" &&
            spec.step_kind != "fixed_horizon")
            throw std::invalid_argument("run " + name + ": unknown step kind " + spec.step_kind);
        spec.t_max = r.integer("T_max", 0);
        if (spec.t_max < spec.j_param)
            throw std::invalid_argument("run " + name + ": T_max must be >= J");
        spec.init_radius = r.num("init_radius", 1.0);
        if (spec.init_radius <= 0.0)
            throw std::invalid_argument("run " + name + ": init_radius must be > 0");
        spec.record_mixing = r.boolean("record_mixing", spec.screening == "cwtm" || spec.screening == "dgd");
        spec.snapshot_stride = r.integer("snapshot_stride", 0);
        if (spec.record_mixing && spec.screening != "cwtm" && spec.screening != "dgd")
            throw std::invalid_argument("run " + name + ": record_mixing needs cwtm or dgd screening");

        spec.objective = r.str("objective", "quadratic");
        spec.dim = r.integer("d", 1);
        spec.targets = r.str("targets", "identical");
        spec.target_value = r.numbers("target_value");
        spec.target_spread = r.num("target_spread", 1.0);
        spec.l2 = r.num("l2", 0.0);
        spec.classes = r.integer("classes", 2);
        spec.feature_dim = r.integer("dim", 2);
        spec.n_per_node = r.integer("n_per_node", 50);
        spec.blob_separation = r.num("blob_separation", 2.0);
        spec.blob_spread = r.num("blob_spread", 0.5);
        spec.partition = r.str("partition", "iid");
        spec.mnist_images = r.str("mnist_images", "");
        spec.mnist_labels = r.str("mnist_labels", "");
        spec.label_flip_nodes = r.integers("label_flip_nodes");
        if (spec.objective != "quadratic" && spec.objective != "logistic_blobs" &&
            spec.objective != "pl_sine" && spec.objective != "pl_sum" && spec.objective != "mnist")
            throw std::invalid_argument("run " + name + ": unknown objective " + spec.objective);
        if (spec.objective == "quadratic" && spec.dim < 1)
            throw std::invalid_argument("run " + name + ": d must be >= 1");
        if (spec.objective == "mnist" && (spec.mnist_images.empty() || spec.mnist_labels.empty()))
            throw std::invalid_argument("run " + name + ": mnist objective needs mnist_images and mnist_labels");
        if (spec.partition != "iid" && spec.partition != "moderate" && spec.partition != "extreme")
            throw std::invalid_argument("run " + name + ": unknown partition " + spec.partition);

        suite.runs.push_back(std::move(spec));
    }
    return suite;
}

RawConfig to_raw(const SuiteSpec& suite) {
    RawConfig raw;
    raw.globals["suite"] = suite.name;
    {
        std::string s;
        for (std::size_t i = 0; i < suite.seeds.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(suite.seeds[i]);
        }
        raw.globals["seeds"] = s;
    }
    for (const RunSpec& spec : suite.runs) {
        std::map<std::string, std::string> kv;
        kv["graph"] = spec.graph_kind;
        kv["M"] = std::to_string(spec.node_count);
        kv["rho"] = fmt(spec.rho);
        if (!spec.graph_file.empty()) kv["graph_file"] = spec.graph_file;
        kv["b"] = std::to_string(spec.b);
        kv["attack"] = spec.attack_kind;
        kv["B"] = std::to_string(spec.links_per_round);
        if (!spec.static_links.empty()) {
            std::string s;
            for (std::size_t i = 0; i < spec.static_links.size(); ++i) {
                if (i) s += ";";
                s += std::to_string(spec.static_links[i].first) + ">" +
                     std::to_string(spec.static_links[i].second);
            }
            kv["static_links"] = s;
        }
        if (!spec.byzantine_nodes.empty()) kv["byzantine"] = join_ints(spec.byzantine_nodes);
        kv["strategy"] = spec.strategy_kind;
        if (spec.attack_range >= 0.0) kv["attack_range"] = fmt(spec.attack_range);
        if (!spec.constant_value.empty()) kv["constant_value"] = join_doubles(spec.constant_value);
        kv["screening"] = spec.screening;
        kv["J"] = std::to_string(spec.j_param);
        kv["step"] = spec.step_kind;
        kv["h"] = fmt(spec.h);
        if (spec.p > 0.0) kv["p"] = fmt(spec.p);
        if (spec.omega > 0.0) kv["omega"] = fmt(spec.omega);
        if (spec.horizon > 0) kv["S"] = std::to_string(spec.horizon);
        kv["T_max"] = std::to_string(spec.t_max);
        kv["init_radius"] = fmt(spec.init_radius);
        kv["record_mixing"] = spec.record_mixing ? "true" : "false";
        if (spec.snapshot_stride > 0) kv["snapshot_stride"] = std::to_string(spec.snapshot_stride);
        kv["objective"] = spec.objective;
        kv["d"] = std::to_string(spec.dim);
        kv["targets"] = spec.targets;
        if (!spec.target_value.empty()) kv["target_value"] = join_doubles(spec.target_value);
        kv["target_spread"] = fmt(spec.target_spread);
        kv["l2"] = fmt(spec.l2);
        kv["classes"] = std::to_string(spec.classes);
        kv["dim"] = std::to_string(spec.feature_dim);
        kv["n_per_node"] = std::to_string(spec.n_per_node);
        kv["blob_separation"] = fmt(spec.blob_separation);
        kv["blob_spread"] = fmt(spec.blob_spread);
        kv["partition"] = spec.partition;
        if (!spec.mnist_images.empty()) kv["mnist_images"] = spec.mnist_images;
        if (!spec.mnist_labels.empty()) kv["mnist_labels"] = spec.mnist_labels;
        if (!spec.label_flip_nodes.empty()) kv["label_flip_nodes"] = join_ints(spec.label_flip_nodes);
        raw.runs.emplace_back(spec.name, std::move(kv));
    }
    return raw;
}

}  // namespace resist
