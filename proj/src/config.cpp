#include "lcrl/config.hpp"

#include <fstream>
#include <set>

namespace lcrl {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: " + path + " must be an object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw std::invalid_argument("config: unknown key '" + path + "." + item.key() + "'");
    }
}

void require_key(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument("config: missing key '" + path + "." + key + "'");
}

MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("config: " + path + " must be a 2-D array");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    MatrixXd m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw std::invalid_argument("config: " + path + " rows must have equal length");
        for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw std::invalid_argument("config: " + path + " must be an array");
    VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json matrix_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

CostSpec parse_cost(const json& j, int d, int p) {
    require_key(j, "model.cost", "variant");
    const std::string variant = j["variant"].get<std::string>();
    if (variant == "smooth_quadratic") {
        reject_unknown_keys(j, "model.cost", {"variant", "Q", "R", "Gterm"});
        require_key(j, "model.cost", "Q");
        require_key(j, "model.cost", "R");
        require_key(j, "model.cost", "Gterm");
        return SmoothQuadraticCost(parse_matrix(j["Q"], "model.cost.Q"),
                                   parse_matrix(j["R"], "model.cost.R"),
                                   parse_matrix(j["Gterm"], "model.cost.Gterm"));
    }
    if (variant == "entropy_regularized") {
        reject_unknown_keys(j, "model.cost", {"variant", "fbar0", "g"});
        EntropyRegularizedCost cost;
        cost.fbar0.c = VectorXd::Zero(p);
        cost.fbar0.W = MatrixXd::Zero(p, d);
        if (j.contains("fbar0")) {
            const json& f = j["fbar0"];
            reject_unknown_keys(f, "model.cost.fbar0", {"kind", "c", "W"});
            require_key(f, "model.cost.fbar0", "kind");
            const std::string kind = f["kind"].get<std::string>();
            if (kind != "constant" && kind != "affine")
                throw std::invalid_argument("config: fbar0.kind must be constant or affine");
            if (f.contains("c")) cost.fbar0.c = parse_vector(f["c"], "model.cost.fbar0.c");
            if (kind == "affine") {
                require_key(f, "model.cost.fbar0", "W");
                cost.fbar0.W = parse_matrix(f["W"], "model.cost.fbar0.W");
            }
        }
        if (j.contains("g")) {
            const json& g = j["g"];
            reject_unknown_keys(g, "model.cost.g", {"kind", "coeff"});
            require_key(g, "model.cost.g", "kind");
            const std::string kind = g["kind"].get<std::string>();
            if (kind == "zero") {
                cost.g.kind = TerminalCost::Kind::Zero;
            } else if (kind == "quadratic") {
                cost.g.kind = TerminalCost::Kind::Quadratic;
                require_key(g, "model.cost.g", "coeff");
                cost.g.coeff = g["coeff"].get<double>();
            } else {
                throw std::invalid_argument("config: g.kind must be zero or quadratic");
            }
        }
        if (cost.fbar0.c.size() != p || cost.fbar0.W.rows() != p || cost.fbar0.W.cols() != d)
            throw std::invalid_argument("config: fbar0 must map R^d to R^p");
        return cost;
    }
    throw std::invalid_argument("config: unknown cost variant '" + variant + "'");
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
    std::vector<std::uint64_t> seeds;
    if (j.is_array()) {
        for (const auto& s : j) seeds.push_back(s.get<std::uint64_t>());
    } else if (j.is_object()) {
        reject_unknown_keys(j, "seeds", {"base", "count"});
        require_key(j, "seeds", "base");
        require_key(j, "seeds", "count");
        const std::uint64_t base = j["base"].get<std::uint64_t>();
        const int count = j["count"].get<int>();
        for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    } else {
        throw std::invalid_argument("config: seeds must be a list or {base, count}");
    }
    if (seeds.empty()) throw std::invalid_argument("config: seed list is empty");
    return seeds;
}

}  // namespace

std::string config_hash_hex(const nlohmann::json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    static const std::set<std::string> kExperiments = {
        "pege-run",   "regret-scan", "gap-scan",      "concentration",
        "incomplete-demo", "orlicz",  "riccati-check", "hjb-check"};

    reject_unknown_keys(doc, "", {"experiment", "model", "prior", "truncation", "exploration",
                                  "schedule", "n_episodes", "optional_update", "greedy_only", "seed",
                                  "seeds", "delta", "hjb", "eval_n_mc", "decompose",
                                  "dump_trajectories", "gap", "regret", "concentration", "orlicz"});
    require_key(doc, "", "experiment");

    ExperimentConfig cfg;
    cfg.experiment = doc["experiment"].get<std::string>();
    if (!kExperiments.count(cfg.experiment))
        throw std::invalid_argument("config: unknown experiment '" + cfg.experiment + "'");

    require_key(doc, "", "model");
    const json& model = doc["model"];
    reject_unknown_keys(model, "model",
                        {"A", "B", "box_lower", "box_upper", "x0", "T", "n_steps", "cost"});
    require_key(model, "model", "A");
    require_key(model, "model", "B");
    require_key(model, "model", "cost");
    cfg.theta = ParamTheta(parse_matrix(model["A"], "model.A"), parse_matrix(model["B"], "model.B"));
    const int d = cfg.theta.d();
    const int p = cfg.theta.p();

    MatrixXd box_lower = model.contains("box_lower")
                             ? parse_matrix(model["box_lower"], "model.box_lower")
                             : MatrixXd::Constant(d, d + p, -5.0);
    MatrixXd box_upper = model.contains("box_upper")
                             ? parse_matrix(model["box_upper"], "model.box_upper")
                             : MatrixXd::Constant(d, d + p, 5.0);
    cfg.theta_box = ParamBox(box_lower, box_upper);

    cfg.x0 = model.contains("x0") ? parse_vector(model["x0"], "model.x0") : VectorXd::Zero(d);
    const double T = model.contains("T") ? model["T"].get<double>() : 1.0;
    const int n_steps = model.contains("n_steps") ? model["n_steps"].get<int>()
                                                  : 1000;  // default dt = 1e-3 T
    cfg.grid = TimeGrid(T, n_steps);
    cfg.cost = parse_cost(model["cost"], d, p);

    cfg.theta0_hat = MatrixXd::Zero(d, d + p);
    cfg.V0 = MatrixXd::Identity(d + p, d + p);
    if (doc.contains("prior")) {
        const json& prior = doc["prior"];
        reject_unknown_keys(prior, "prior", {"theta0_hat", "V0"});
        if (prior.contains("theta0_hat"))
            cfg.theta0_hat = parse_matrix(prior["theta0_hat"], "prior.theta0_hat");
        if (prior.contains("V0")) cfg.V0 = parse_matrix(prior["V0"], "prior.V0");
    }

    double margin = 0.5;
    std::string trunc_mode = "clamp";
    MatrixXd fallback = MatrixXd::Zero(d, d + p);
    if (doc.contains("truncation")) {
        const json& tr = doc["truncation"];
        reject_unknown_keys(tr, "truncation", {"mode", "margin", "fallback_theta0"});
        if (tr.contains("mode")) trunc_mode = tr["mode"].get<std::string>();
        if (tr.contains("margin")) margin = tr["margin"].get<double>();
        if (tr.contains("fallback_theta0"))
            fallback = parse_matrix(tr["fallback_theta0"], "truncation.fallback_theta0");
    }
    if (trunc_mode == "clamp")
        cfg.truncation = TruncationSpec::clamp_around(cfg.theta_box, margin);
    else if (trunc_mode == "fallback")
        cfg.truncation = TruncationSpec::fallback_around(cfg.theta_box, margin, fallback);
    else
        throw std::invalid_argument("config: truncation.mode must be clamp or fallback");

    if (doc.contains("exploration")) {
        const json& ex = doc["exploration"];
        reject_unknown_keys(ex, "exploration", {"actions", "partition"});
        require_key(ex, "exploration", "actions");
        require_key(ex, "exploration", "partition");
        std::vector<VectorXd> actions;
        for (const auto& a : ex["actions"]) actions.push_back(parse_vector(a, "exploration.actions"));
        std::vector<double> partition;
        for (const auto& t : ex["partition"]) partition.push_back(t.get<double>());
        cfg.exploration = ExplorationSpec(std::move(actions), std::move(partition));
    }

    if (doc.contains("schedule")) {
        const json& sch = doc["schedule"];
        reject_unknown_keys(sch, "schedule", {"kind", "r"});
        require_key(sch, "schedule", "kind");
        const std::string kind = sch["kind"].get<std::string>();
        if (kind == "power_floor")
            cfg.schedule = PegeSchedule::power_floor(sch.contains("r") ? sch["r"].get<double>() : 1.0);
        else if (kind == "doubling")
            cfg.schedule = PegeSchedule::doubling();
        else
            throw std::invalid_argument("config: schedule.kind must be power_floor or doubling");
    }

    if (doc.contains("n_episodes")) cfg.n_episodes = doc["n_episodes"].get<int>();
    if (doc.contains("optional_update")) cfg.optional_update = doc["optional_update"].get<bool>();
    if (doc.contains("greedy_only")) cfg.greedy_only = doc["greedy_only"].get<bool>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.seeds = doc.contains("seeds") ? parse_seeds(doc["seeds"])
                                      : std::vector<std::uint64_t>{cfg.seed};
    if (doc.contains("delta")) cfg.delta = doc["delta"].get<double>();
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0, 1)");
    if (doc.contains("hjb")) {
        const json& h = doc["hjb"];
        reject_unknown_keys(h, "hjb", {"L", "n_x"});
        if (h.contains("L")) cfg.hjb_domain.L = h["L"].get<double>();
        if (h.contains("n_x")) cfg.hjb_domain.n_x = h["n_x"].get<int>();
    }
    if (doc.contains("eval_n_mc")) cfg.eval_n_mc = doc["eval_n_mc"].get<int>();
    if (doc.contains("decompose")) cfg.decompose = doc["decompose"].get<bool>();
    if (doc.contains("dump_trajectories")) cfg.dump_trajectories = doc["dump_trajectories"].get<bool>();

    if (doc.contains("gap")) {
        const json& g = doc["gap"];
        reject_unknown_keys(g, "gap", {"radii", "n_directions", "n_mc", "direction_seed", "expected_r"});
        require_key(g, "gap", "radii");
        for (const auto& r : g["radii"]) cfg.gap.radii.push_back(r.get<double>());
        if (g.contains("n_directions")) cfg.gap.n_directions = g["n_directions"].get<int>();
        if (g.contains("n_mc")) cfg.gap.n_mc = g["n_mc"].get<int>();
        if (g.contains("direction_seed")) cfg.gap.direction_seed = g["direction_seed"].get<std::uint64_t>();
        if (g.contains("expected_r")) cfg.gap.expected_r = g["expected_r"].get<double>();
    }
    if (doc.contains("regret")) {
        const json& r = doc["regret"];
        reject_unknown_keys(r, "regret", {"n_grid"});
        require_key(r, "regret", "n_grid");
        for (const auto& n : r["n_grid"]) cfg.regret.n_grid.push_back(n.get<int>());
    }
    if (doc.contains("concentration")) {
        const json& c = doc["concentration"];
        reject_unknown_keys(c, "concentration", {"m_grid", "info_n_mc"});
        require_key(c, "concentration", "m_grid");
        for (const auto& m : c["m_grid"]) cfg.concentration.m_grid.push_back(m.get<int>());
        if (c.contains("info_n_mc")) cfg.concentration.info_n_mc = c["info_n_mc"].get<int>();
    }
    if (doc.contains("orlicz")) {
        const json& o = doc["orlicz"];
        reject_unknown_keys(o, "orlicz", {"n_samples", "seed"});
        if (o.contains("n_samples")) cfg.orlicz.n_samples = o["n_samples"].get<int>();
        if (o.contains("seed")) cfg.orlicz.seed = o["seed"].get<std::uint64_t>();
    }

    // Resolved echo: original document plus filled defaults.
    json resolved = doc;
    resolved["model"]["x0"] = vector_json(cfg.x0);
    resolved["model"]["T"] = cfg.grid.T;
    resolved["model"]["n_steps"] = cfg.grid.n_steps;
    resolved["model"]["box_lower"] = matrix_json(cfg.theta_box.lower);
    resolved["model"]["box_upper"] = matrix_json(cfg.theta_box.upper);
    resolved["prior"]["theta0_hat"] = matrix_json(cfg.theta0_hat);
    resolved["prior"]["V0"] = matrix_json(cfg.V0);
    resolved["truncation"]["mode"] = trunc_mode;
    resolved["truncation"]["margin"] = margin;
    resolved["schedule"] =
        cfg.schedule.kind == PegeSchedule::Kind::Doubling
            ? json{{"kind", "doubling"}}
            : json{{"kind", "power_floor"}, {"r", cfg.schedule.r}};
    resolved["n_episodes"] = cfg.n_episodes;
    resolved["optional_update"] = cfg.optional_update;
    resolved["greedy_only"] = cfg.greedy_only;
    resolved["seed"] = cfg.seed;
    resolved["delta"] = cfg.delta;
    resolved["eval_n_mc"] = cfg.eval_n_mc;
    resolved["decompose"] = cfg.decompose;
    resolved["dump_trajectories"] = cfg.dump_trajectories;
    resolved["hjb"] = {{"L", cfg.hjb_domain.L}, {"n_x", cfg.hjb_domain.n_x}};
    {
        json s = json::array();
        for (auto v : cfg.seeds) s.push_back(v);
        resolved["seeds"] = s;
    }
    cfg.resolved = resolved;
    cfg.hash = config_hash_hex(resolved);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json doc;
    in >> doc;
    return parse_experiment_config(doc);
}

PegeConfig ExperimentConfig::to_pege_config() const {
    PegeConfig pc;
    pc.theta = theta;
    pc.theta_box = theta_box;
    pc.cost = cost;
    pc.grid = grid;
    pc.x0 = x0;
    pc.theta0_hat = theta0_hat;
    pc.V0 = V0;
    pc.truncation = truncation;
    if (exploration) pc.exploration = *exploration;
    pc.schedule = schedule;
    pc.n_episodes = n_episodes;
    pc.optional_update = optional_update;
    pc.greedy_only = greedy_only;
    pc.base_seed = seed;
    pc.hjb_domain = hjb_domain;
    pc.eval_n_mc = eval_n_mc;
    return pc;
}

}  // namespace lcrl
