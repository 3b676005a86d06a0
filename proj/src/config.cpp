#include "ngc/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace ngc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

/// Tracks which keys of one JSON object were consumed so leftovers can be
/// reported as typos, with full field paths in every message.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(&obj), path_(std::move(path)) {
        if (!obj.is_object()) fail(path_.empty() ? "document must be an object"
                                                 : path_ + " must be an object");
    }

    bool has(const std::string& key) const { return obj_->contains(key); }

    const json& require(const std::string& key) {
        if (!has(key)) fail("missing field '" + full(key) + "'");
        seen_.insert(key);
        return (*obj_)[key];
    }

    const json* optional(const std::string& key) {
        if (!has(key)) return nullptr;
        seen_.insert(key);
        return &(*obj_)[key];
    }

    double number(const std::string& key, double fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_number()) fail("field '" + full(key) + "' must be a number");
        return v->get<double>();
    }

    int integer(const std::string& key, int fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail("field '" + full(key) + "' must be an integer");
        return v->get<int>();
    }

    int require_integer(const std::string& key) {
        const json& v = require(key);
        if (!v.is_number_integer()) fail("field '" + full(key) + "' must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail("field '" + full(key) + "' must be a boolean");
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_string()) fail("field '" + full(key) + "' must be a string");
        return v->get<std::string>();
    }

    std::string require_text(const std::string& key) {
        const json& v = require(key);
        if (!v.is_string()) fail("field '" + full(key) + "' must be a string");
        return v.get<std::string>();
    }

    std::string full(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void done() const {
        for (auto it = obj_->begin(); it != obj_->end(); ++it)
            if (!seen_.count(it.key())) fail("unknown field '" + full(it.key()) + "'");
    }

private:
    const json* obj_;
    std::string path_;
    std::set<std::string> seen_;
};

Symmetrization parse_symmetrization(const std::string& mode, const std::string& field) {
    if (mode == "max") return Symmetrization::Max;
    if (mode == "mean") return Symmetrization::Mean;
    fail("field '" + field + "' must be \"max\" or \"mean\"");
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc, const std::string& out_dir_override) {
    RunConfig cfg;
    ObjectReader top(doc, "");

    cfg.seed = static_cast<std::uint64_t>(top.number("seed", 0));
    cfg.num_classes = top.require_integer("num_classes");
    if (cfg.num_classes < 2) fail("field 'num_classes' must be >= 2");
    cfg.out_dir = top.require_text("out_dir");
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    if (cfg.out_dir.empty()) fail("field 'out_dir' must not be empty");
    cfg.train_csv = top.text("train_csv", cfg.out_dir + "/train.csv");
    cfg.test_csv = top.text("test_csv", cfg.out_dir + "/test.csv");

    if (const json* node = top.optional("synthetic")) {
        ObjectReader r(*node, "synthetic");
        SyntheticConfig s;
        s.num_classes = cfg.num_classes;
        s.rng_seed = cfg.seed;
        s.dim = r.require_integer("dim");
        s.samples_per_class = r.require_integer("samples_per_class");
        s.class_center_separation = r.number("class_center_separation", 4.0);
        s.cluster_stddev = r.number("cluster_stddev", 1.0);
        s.num_ood = r.integer("num_ood", 0);
        s.ood_center_offset = r.number("ood_center_offset", 6.0);
        s.sym_noise_level = r.number("sym_noise_level", 0.0);
        s.asym_noise_level = r.number("asym_noise_level", 0.0);
        if (const json* mapping = r.optional("asym_mapping")) {
            if (!mapping->is_array()) fail("field 'synthetic.asym_mapping' must be an array");
            for (const json& v : *mapping) {
                if (!v.is_number_integer())
                    fail("field 'synthetic.asym_mapping' must hold integers");
                s.asym_mapping.push_back(v.get<int>());
            }
        }
        cfg.test_split.samples_per_class = r.integer("test_samples_per_class", 0);
        cfg.test_split.num_ood = r.integer("test_num_ood", 0);
        r.done();
        try {
            s.validate();
        } catch (const std::invalid_argument& err) {
            fail(err.what());
        }
        cfg.synthetic = std::move(s);
    }

    TrainerConfig& t = cfg.trainer;
    t.seed = cfg.seed;
    if (const json* node = top.optional("graph")) {
        ObjectReader r(*node, "graph");
        t.graph.k = r.integer("k", t.graph.k);
        t.graph.gamma = r.number("gamma", t.graph.gamma);
        t.graph.symmetrization = parse_symmetrization(
            r.text("symmetrization", "max"), "graph.symmetrization");
        r.done();
    }
    if (const json* node = top.optional("propagation")) {
        ObjectReader r(*node, "propagation");
        t.propagation.alpha = r.number("alpha", t.propagation.alpha);
        t.propagation.cg_tolerance = r.number("cg_tolerance", t.propagation.cg_tolerance);
        t.propagation.cg_max_iters = r.integer("cg_max_iters", t.propagation.cg_max_iters);
        t.row_normalize = r.boolean("row_normalize", t.row_normalize);
        r.done();
    }
    if (const json* node = top.optional("selection")) {
        ObjectReader r(*node, "selection");
        t.eta = r.number("eta", t.eta);
        r.done();
    }
    if (const json* node = top.optional("model")) {
        ObjectReader r(*node, "model");
        t.hidden_dim = r.integer("hidden_dim", t.hidden_dim);
        t.proj_dim = r.integer("proj_dim", t.proj_dim);
        r.done();
    }
    if (const json* node = top.optional("train")) {
        ObjectReader r(*node, "train");
        t.loss.tau1 = r.number("tau1", t.loss.tau1);
        t.loss.tau2 = r.number("tau2", t.loss.tau2);
        t.loss.lambda1 = r.number("lambda1", t.loss.lambda1);
        t.loss.lambda2 = r.number("lambda2", t.loss.lambda2);
        t.loss.jitter_sigma = r.number("jitter_sigma", t.loss.jitter_sigma);
        t.ema_momentum = r.number("ema_momentum", t.ema_momentum);
        t.warmup_epochs = r.integer("warmup_epochs", t.warmup_epochs);
        t.epochs = r.integer("epochs", t.epochs);
        t.batch_size = r.integer("batch_size", t.batch_size);
        t.learning_rate = r.number("learning_rate", t.learning_rate);
        r.done();
    }
    if (const json* node = top.optional("detect")) {
        ObjectReader r(*node, "detect");
        cfg.zeta = r.number("zeta", cfg.zeta);
        r.done();
    }
    top.done();

    if (cfg.zeta < -1.0 || cfg.zeta > 1.0) fail("field 'detect.zeta' must be in [-1,1]");
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path, const std::string& out_dir_override) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        fail(path + ": " + err.what());
    }
    return from_json(doc, out_dir_override);
}

}  // namespace ngc
