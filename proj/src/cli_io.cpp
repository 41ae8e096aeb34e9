#include "rbergomi/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace rbergomi::cli {

using nlohmann::json;

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace {

enum class KeyType { Number, Integer, Boolean, String, NumberArray, StringArray };

struct KeySpec {
    const char* name;
    KeyType type;
    json default_value;
};

const std::vector<KeySpec> kUniversalKeys = {
    {"seed", KeyType::Integer, 42},
    {"threads", KeyType::Integer, 0},
    {"out", KeyType::String, ""},
    {"xi0", KeyType::Number, 0.235 * 0.235},
    {"xi0_times", KeyType::NumberArray, json::array()},
    {"xi0_values", KeyType::NumberArray, json::array()},
    {"eta", KeyType::Number, 1.9},
    {"rho", KeyType::Number, -0.9},
    {"alpha", KeyType::Number, -0.43},
    {"n_steps", KeyType::Integer, 312},
    {"maturity", KeyType::Number, 0.25},
};

const std::vector<double> kDefaultMaturities = {1.0 / 365, 1.0 / 52, 2.0 / 52, 1.0 / 12,
                                                2.0 / 12, 0.25, 0.5, 1.0};

json default_smile_deltas() {
    json a = json::array();
    for (int i = 1; i <= 19; ++i) a.push_back(0.05 * i);
    return a;
}

json default_extract_deltas() {
    // wing-extended so the constant-extrapolated tails carry little mass
    json a = json::array();
    for (double d : {0.002, 0.005, 0.01, 0.02, 0.03}) a.push_back(d);
    for (int i = 1; i <= 19; ++i) a.push_back(0.05 * i);
    for (double d : {0.97, 0.98, 0.99, 0.995, 0.998}) a.push_back(d);
    return a;
}

std::vector<KeySpec> command_keys(const std::string& command) {
    std::vector<KeySpec> keys = kUniversalKeys;
    auto add = [&](KeySpec k) { keys.push_back(std::move(k)); };
    if (command == "volterra-check") {
        add({"n_paths", KeyType::Integer, 100000});
        add({"antithetic", KeyType::Boolean, true});
    } else if (command == "smile") {
        add({"n_paths", KeyType::Integer, 400000});
        add({"estimator", KeyType::String, "mixed"});
        add({"maturities", KeyType::NumberArray, json(kDefaultMaturities)});
        add({"deltas", KeyType::NumberArray, default_smile_deltas()});
    } else if (command == "benchmark") {
        add({"n_paths", KeyType::Integer, 1000});
        add({"n_reps", KeyType::Integer, 1000});
        add({"estimators", KeyType::StringArray,
             json::array({"base", "antithetic", "conditional", "controlled", "mixed"})});
        add({"labels", KeyType::StringArray, json::array()});
        add({"strikes", KeyType::NumberArray, json::array()});
        add({"targets", KeyType::NumberArray, json::array()});
    } else if (command == "calibrate") {
        add({"n_paths", KeyType::Integer, 1000});
        add({"estimator", KeyType::String, "mixed"});
        add({"restarts", KeyType::Integer, 20});
        add({"budget_ms", KeyType::Number, 700.0});
        add({"max_evals", KeyType::Integer, 80});
        add({"rho_min", KeyType::Number, -0.99});
        add({"rho_max", KeyType::Number, 0.99});
        add({"eta_min", KeyType::Number, 1.00});
        add({"eta_max", KeyType::Number, 3.00});
        add({"rho_init", KeyType::Number, 0.0});
        add({"eta_init", KeyType::Number, 0.0});
        add({"target_ks", KeyType::NumberArray, json::array()});
        add({"target_vols", KeyType::NumberArray, json::array()});
        add({"target_n_paths", KeyType::Integer, 200000});
    } else if (command == "extract-xi") {
        add({"n_paths", KeyType::Integer, 200000});
        add({"estimator", KeyType::String, "mixed"});
        add({"deltas", KeyType::NumberArray, default_extract_deltas()});
    } else {
        throw ConfigError("unknown command: " + command);
    }
    return keys;
}

void check_type(const std::string& name, KeyType type, const json& v) {
    auto fail = [&](const char* want) {
        throw ConfigError("config key '" + name + "' must be " + want);
    };
    switch (type) {
        case KeyType::Number:
            if (!v.is_number()) fail("a number");
            break;
        case KeyType::Integer:
            if (!v.is_number_integer() && !v.is_number_unsigned()) fail("an integer");
            break;
        case KeyType::Boolean:
            if (!v.is_boolean()) fail("a boolean");
            break;
        case KeyType::String:
            if (!v.is_string()) fail("a string");
            break;
        case KeyType::NumberArray:
            if (!v.is_array()) fail("an array of numbers");
            for (const auto& e : v)
                if (!e.is_number()) fail("an array of numbers");
            break;
        case KeyType::StringArray:
            if (!v.is_array()) fail("an array of strings");
            for (const auto& e : v)
                if (!e.is_string()) fail("an array of strings");
            break;
    }
}

std::vector<double> to_doubles(const json& v) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
}

std::vector<std::string> to_strings(const json& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.get<std::string>());
    return out;
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("config key '" + field + "': " + why);
}

}  // namespace

ModelParams RunConfig::model() const {
    ForwardVarianceCurve curve = xi0_values.empty()
                                     ? ForwardVarianceCurve(xi0)
                                     : ForwardVarianceCurve(xi0_times, xi0_values);
    return ModelParams(std::move(curve), eta, rho, alpha);
}

RunConfig parse_config(const std::vector<std::string>& args) {
    if (args.empty()) throw ConfigError("missing command (volterra-check|smile|benchmark|calibrate|extract-xi)");
    RunConfig cfg;
    cfg.command = args[0];
    const auto keys = command_keys(cfg.command);

    // defaults, then config file, then flag overrides
    std::map<std::string, const KeySpec*> spec_by_name;
    json resolved = json::object();
    for (const auto& k : keys) {
        spec_by_name[k.name] = &k;
        resolved[k.name] = k.default_value;
    }

    std::string config_path;
    std::vector<std::pair<std::string, json>> overrides;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto take_value = [&](const std::string& key_name) -> std::string {
            if (i + 1 >= args.size()) throw ConfigError("flag --" + key_name + " needs a value");
            return args[++i];
        };
        if (a == "--config") {
            config_path = take_value("config");
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        } else if (a == "--out") {
            overrides.emplace_back("out", take_value("out"));
        } else if (a.rfind("--", 0) == 0) {
            const auto eq = a.find('=');
            if (eq == std::string::npos)
                throw ConfigError("flags must be --key=value (got '" + a + "')");
            const std::string name = a.substr(2, eq - 2);
            const std::string raw = a.substr(eq + 1);
            json v;
            try {
                v = json::parse(raw);
            } catch (const json::exception&) {
                v = raw;  // bare string
            }
            if (v.is_object())
                throw ConfigError("config key '" + name + "' must be a flat value");
            overrides.emplace_back(name, v);
        } else {
            throw ConfigError("unexpected argument '" + a + "'");
        }
    }

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file: " + config_path);
        json file;
        try {
            file = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed JSON config: ") + e.what());
        }
        if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
        for (const auto& [name, value] : file.items()) {
            auto it = spec_by_name.find(name);
            if (it == spec_by_name.end()) throw ConfigError("unknown config key '" + name + "'");
            check_type(name, it->second->type, value);
            resolved[name] = value;
        }
    }
    for (const auto& [name, value] : overrides) {
        auto it = spec_by_name.find(name);
        if (it == spec_by_name.end()) throw ConfigError("unknown config key '" + name + "'");
        json v = value;
        // accept numeric strings for numeric keys so --eta=2.0 works either way
        if (v.is_string() && (it->second->type == KeyType::Number ||
                              it->second->type == KeyType::Integer)) {
            try {
                v = json::parse(v.get<std::string>());
            } catch (const json::exception&) {
            }
        }
        check_type(name, it->second->type, v);
        resolved[name] = v;
    }

    // extract typed fields
    cfg.seed = resolved["seed"].get<std::uint64_t>();
    cfg.threads = resolved["threads"].get<int>();
    cfg.out = resolved["out"].get<std::string>();
    cfg.xi0 = resolved["xi0"].get<double>();
    cfg.xi0_times = to_doubles(resolved["xi0_times"]);
    cfg.xi0_values = to_doubles(resolved["xi0_values"]);
    cfg.eta = resolved["eta"].get<double>();
    cfg.rho = resolved["rho"].get<double>();
    cfg.alpha = resolved["alpha"].get<double>();
    cfg.n_steps = resolved["n_steps"].get<std::size_t>();
    cfg.maturity = resolved["maturity"].get<double>();

    require(!cfg.out.empty(), "out", "output path is required (--out PATH)");
    require(cfg.xi0 > 0.0, "xi0", "must be > 0");
    require(cfg.eta > 0.0, "eta", "must be > 0");
    require(cfg.rho >= -1.0 && cfg.rho <= 1.0, "rho", "must be in [-1, 1]");
    require(cfg.alpha > -0.5 && cfg.alpha <= 0.0, "alpha", "must be in (-0.5, 0]");
    require(cfg.n_steps >= 1, "n_steps", "must be >= 1");
    require(cfg.maturity > 0.0, "maturity", "must be > 0");
    require(cfg.threads >= 0, "threads", "must be >= 0");
    if (!cfg.xi0_times.empty() || !cfg.xi0_values.empty()) {
        require(cfg.xi0_times.size() + 1 == cfg.xi0_values.size(), "xi0_values",
                "needs one more value than xi0_times");
        for (double v : cfg.xi0_values) require(v > 0.0, "xi0_values", "must be > 0");
        for (std::size_t i = 0; i < cfg.xi0_times.size(); ++i) {
            require(cfg.xi0_times[i] > 0.0, "xi0_times", "must be > 0");
            if (i > 0)
                require(cfg.xi0_times[i] > cfg.xi0_times[i - 1], "xi0_times", "must increase");
        }
    }

    if (resolved.contains("n_paths")) cfg.n_paths = resolved["n_paths"].get<std::size_t>();
    if (resolved.contains("antithetic")) cfg.antithetic = resolved["antithetic"].get<bool>();
    if (resolved.contains("estimator")) {
        cfg.estimator = resolved["estimator"].get<std::string>();
        try {
            estimator_from_string(cfg.estimator);
        } catch (const std::exception&) {
            throw ConfigError("config key 'estimator': unknown estimator '" + cfg.estimator + "'");
        }
    }
    if (resolved.contains("estimators")) {
        cfg.estimators = to_strings(resolved["estimators"]);
        require(!cfg.estimators.empty(), "estimators", "must not be empty");
        for (const auto& e : cfg.estimators) {
            try {
                estimator_from_string(e);
            } catch (const std::exception&) {
                throw ConfigError("config key 'estimators': unknown estimator '" + e + "'");
            }
        }
    }
    if (resolved.contains("maturities")) {
        cfg.maturities = to_doubles(resolved["maturities"]);
        require(!cfg.maturities.empty(), "maturities", "must not be empty");
        for (double t : cfg.maturities) require(t > 0.0, "maturities", "must be > 0");
    }
    if (resolved.contains("deltas")) {
        cfg.deltas = to_doubles(resolved["deltas"]);
        require(cfg.deltas.size() >= 1, "deltas", "must not be empty");
        for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
            require(cfg.deltas[i] > 0.0 && cfg.deltas[i] < 1.0, "deltas", "must be in (0, 1)");
            if (i > 0) require(cfg.deltas[i] > cfg.deltas[i - 1], "deltas", "must increase");
        }
    }
    if (resolved.contains("n_reps")) {
        cfg.n_reps = resolved["n_reps"].get<std::size_t>();
        require(cfg.n_reps >= 2, "n_reps", "must be >= 2");
    }
    if (resolved.contains("labels")) cfg.labels = to_strings(resolved["labels"]);
    if (resolved.contains("strikes")) cfg.strikes = to_doubles(resolved["strikes"]);
    if (resolved.contains("targets")) cfg.targets = to_doubles(resolved["targets"]);
    if (resolved.contains("restarts")) {
        cfg.restarts = resolved["restarts"].get<std::size_t>();
        require(cfg.restarts >= 1, "restarts", "must be >= 1");
    }
    if (resolved.contains("budget_ms")) {
        cfg.budget_ms = resolved["budget_ms"].get<double>();
        require(cfg.budget_ms >= 0.0, "budget_ms", "must be >= 0");
    }
    if (resolved.contains("max_evals")) cfg.max_evals = resolved["max_evals"].get<int>();
    if (resolved.contains("rho_min")) cfg.rho_min = resolved["rho_min"].get<double>();
    if (resolved.contains("rho_max")) cfg.rho_max = resolved["rho_max"].get<double>();
    if (resolved.contains("eta_min")) cfg.eta_min = resolved["eta_min"].get<double>();
    if (resolved.contains("eta_max")) cfg.eta_max = resolved["eta_max"].get<double>();
    if (resolved.contains("rho_init")) cfg.rho_init = resolved["rho_init"].get<double>();
    if (resolved.contains("eta_init")) cfg.eta_init = resolved["eta_init"].get<double>();
    if (resolved.contains("target_ks")) cfg.target_ks = to_doubles(resolved["target_ks"]);
    if (resolved.contains("target_vols")) cfg.target_vols = to_doubles(resolved["target_vols"]);
    if (resolved.contains("target_n_paths"))
        cfg.target_n_paths = resolved["target_n_paths"].get<std::size_t>();

    if (cfg.command == "calibrate") {
        require(cfg.max_evals >= 0, "max_evals", "must be >= 0");
        require(cfg.rho_min < cfg.rho_max && cfg.rho_min >= -1.0 && cfg.rho_max <= 1.0, "rho_min",
                "bounds must satisfy -1 <= rho_min < rho_max <= 1");
        require(cfg.eta_min < cfg.eta_max && cfg.eta_min > 0.0, "eta_min",
                "bounds must satisfy 0 < eta_min < eta_max");
        require(cfg.target_ks.size() == cfg.target_vols.size(), "target_vols",
                "must match target_ks in length");
        require(cfg.target_n_paths >= 2 && cfg.target_n_paths % 2 == 0, "target_n_paths",
                "must be an even count >= 2");
    }
    if (cfg.command == "benchmark") {
        require(cfg.strikes.size() == cfg.targets.size(), "targets",
                "must match strikes in length");
        require(cfg.labels.empty() || cfg.labels.size() == cfg.strikes.size(), "labels",
                "must match strikes in length");
    }
    if (resolved.contains("n_paths")) {
        require(cfg.n_paths >= 2, "n_paths", "must be >= 2");
        bool needs_even = cfg.command == "volterra-check" ? cfg.antithetic : true;
        if (cfg.command == "benchmark") {
            needs_even = false;
            for (const auto& e : cfg.estimators)
                needs_even = needs_even || uses_antithetic(estimator_from_string(e));
        }
        if (cfg.command == "smile" || cfg.command == "extract-xi" || cfg.command == "calibrate")
            needs_even = uses_antithetic(estimator_from_string(cfg.estimator));
        if (needs_even)
            require(cfg.n_paths % 2 == 0, "n_paths", "must be even for antithetic pairing");
    }

    // canonical provenance order = key table order
    for (const auto& k : keys)
        cfg.resolved.emplace_back(k.name, resolved[k.name].dump());
    return cfg;
}

namespace {

class CsvWriter {
public:
    CsvWriter(const std::string& path, const RunConfig& cfg, const std::string& header) {
        out_.open(path, std::ios::binary);
        if (!out_) throw std::ios_base::failure("cannot open output file: " + path);
        out_ << "# rbergomi_mc " << cfg.command << "\n";
        for (const auto& [k, v] : cfg.resolved) out_ << "# " << k << "=" << v << "\n";
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    void close() {
        out_.close();
        if (!out_) throw std::ios_base::failure("write failure on output file");
    }

private:
    std::ofstream out_;
};

int cmd_volterra_check(const RunConfig& cfg) {
    const TimeGrid grid(cfg.n_steps, cfg.maturity);
    SimulateOptions opts;
    opts.antithetic = cfg.antithetic;
    opts.threads = cfg.threads;
    const VolterraPaths paths =
        simulate_volterra(RoughnessParams(cfg.alpha), grid, cfg.n_paths, cfg.seed, opts);

    CsvWriter csv(cfg.out, cfg, "time,sample_mean,sample_var,target_var");
    const double n = static_cast<double>(paths.walpha.rows());
    for (std::size_t j = 0; j <= cfg.n_steps; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < paths.walpha.rows(); ++i) mean += paths.walpha(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < paths.walpha.rows(); ++i) {
            const double d = paths.walpha(i, j) - mean;
            var += d * d;
        }
        var = j == 0 ? 0.0 : var / (n - 1.0);
        const double t = grid.time(j);
        const double target = j == 0 ? 0.0 : std::pow(t, 2.0 * cfg.alpha + 1.0);
        csv.row({format_float(t), format_float(mean), format_float(var), format_float(target)});
    }
    csv.close();
    return kOk;
}

int cmd_smile(const RunConfig& cfg) {
    SmileConfig scfg;
    scfg.maturities = cfg.maturities;
    scfg.deltas = cfg.deltas;
    scfg.n_paths = cfg.n_paths;
    scfg.n_steps = cfg.n_steps;
    scfg.kind = estimator_from_string(cfg.estimator);
    scfg.seed = cfg.seed;
    scfg.threads = cfg.threads;
    const SmileSurface surface = generate_smile(cfg.model(), scfg);

    CsvWriter csv(cfg.out, cfg, "maturity,delta_put,log_strike,implied_vol,std_err");
    std::size_t flagged = 0, total = 0;
    for (const auto& smile : surface.maturities) {
        for (const auto& pt : smile.points) {
            ++total;
            if (pt.flagged) ++flagged;
            csv.row({format_float(smile.maturity), format_float(pt.delta_put),
                     pt.flagged ? "nan" : format_float(pt.k),
                     pt.flagged ? "nan" : format_float(pt.sigma),
                     pt.flagged ? "nan" : format_float(pt.std_err)});
        }
    }
    csv.close();
    return flagged == total ? kNumericalError : kOk;
}

int cmd_benchmark(const RunConfig& cfg) {
    std::vector<StrikeSpec> strikes;
    if (cfg.strikes.empty()) {
        strikes = default_benchmark_strikes(cfg.rho);
        if (strikes.empty())
            throw ConfigError(
                "config key 'strikes': required (built-in reference strikes exist only for "
                "rho = -0.9 and rho = 0)");
    } else {
        for (std::size_t i = 0; i < cfg.strikes.size(); ++i) {
            const std::string label =
                cfg.labels.empty() ? "k" + std::to_string(i) : cfg.labels[i];
            strikes.push_back({label, cfg.strikes[i], cfg.targets[i]});
        }
    }

    RepeatedConfig rcfg{cfg.model(), cfg.maturity, cfg.n_steps, cfg.n_paths,
                        cfg.n_reps,  strikes,      cfg.seed,    cfg.threads};

    CsvWriter csv(cfg.out, cfg,
                  "estimator,rho,label,log_strike,target_vol,bias,std,tau_ms,phi2,psi2");
    std::size_t all = 0, flagged = 0;
    for (const auto& name : cfg.estimators) {
        const EstimatorKind kind = estimator_from_string(name);
        const RepeatedResult res = repeated_estimation(kind, rcfg);
        for (const auto& st : res.per_strike) {
            all += cfg.n_reps;
            flagged += st.n_flagged;
            csv.row({name, format_float(cfg.rho), st.spec.label, format_float(st.spec.k),
                     format_float(st.spec.target_vol), format_float(st.bias),
                     format_float(st.stddev), format_float(res.tau_ms), format_float(res.phi2),
                     format_float(res.psi2)});
        }
    }
    csv.close();
    return flagged == all ? kNumericalError : kOk;
}

int cmd_calibrate(const RunConfig& cfg) {
    const ModelParams model = cfg.model();
    CalibrationTargets targets;
    targets.maturity = cfg.maturity;
    if (!cfg.target_ks.empty()) {
        targets.ks = cfg.target_ks;
        targets.vols = cfg.target_vols;
    } else {
        // one fixed target smile generated at the known parameter values
        SmileConfig scfg;
        scfg.maturities = {cfg.maturity};
        scfg.n_paths = cfg.target_n_paths;
        scfg.n_steps = cfg.n_steps;
        scfg.kind = EstimatorKind::Mixed;
        scfg.seed = rng::derive_stream(cfg.seed, 0x7a46e7ULL);
        scfg.threads = cfg.threads;
        const SmileSurface target_surface = generate_smile(model, scfg);
        for (const auto& pt : target_surface.maturities[0].points) {
            if (pt.flagged) continue;
            targets.ks.push_back(pt.k);
            targets.vols.push_back(pt.sigma);
        }
        if (targets.ks.size() < 3) return kNumericalError;
    }

    CalibrationOptions opts;
    opts.rho_min = cfg.rho_min;
    opts.rho_max = cfg.rho_max;
    opts.eta_min = cfg.eta_min;
    opts.eta_max = cfg.eta_max;
    opts.rho_init = cfg.rho_init != 0.0 ? cfg.rho_init : cfg.rho;
    opts.eta_init = cfg.eta_init != 0.0 ? cfg.eta_init : cfg.eta;
    opts.n_paths = cfg.n_paths;
    opts.n_steps = cfg.n_steps;
    opts.kind = estimator_from_string(cfg.estimator);
    opts.seed = cfg.seed;
    opts.budget_ms = cfg.budget_ms;
    opts.max_evals = cfg.max_evals;
    opts.threads = cfg.threads;

    const auto results = run_calibration_restarts(targets, model, opts, cfg.restarts);

    CsvWriter csv(cfg.out, cfg, "run,rho_hat,eta_hat,rmse,converged");
    std::size_t failed = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (!std::isfinite(results[r].rmse)) ++failed;
        csv.row({std::to_string(r), format_float(results[r].rho_hat),
                 format_float(results[r].eta_hat), format_float(results[r].rmse),
                 results[r].converged ? "1" : "0"});
    }
    csv.close();
    return failed == results.size() ? kNumericalError : kOk;
}

int cmd_extract_xi(const RunConfig& cfg) {
    const ModelParams model = cfg.model();
    SmileConfig scfg;
    scfg.maturities = {cfg.maturity};
    scfg.deltas = cfg.deltas;
    scfg.n_paths = cfg.n_paths;
    scfg.n_steps = cfg.n_steps;
    scfg.kind = estimator_from_string(cfg.estimator);
    scfg.seed = cfg.seed;
    scfg.threads = cfg.threads;
    const SmileSurface surface = generate_smile(model, scfg);
    const DeltaSmile delta_smile = to_delta_space(surface.maturities[0]);

    CsvWriter csv(cfg.out, cfg, "maturity,xi0_integral,model_integral");
    if (delta_smile.points.size() < 5) {
        csv.row({format_float(cfg.maturity), "nan",
                 format_float(model.xi0.integral(cfg.maturity))});
        csv.close();
        return kNumericalError;
    }
    const double estimate = extract_forward_variance(delta_smile);
    csv.row({format_float(cfg.maturity), format_float(estimate),
             format_float(model.xi0.integral(cfg.maturity))});
    csv.close();
    return kOk;
}

}  // namespace

int run_command(const RunConfig& cfg) {
    if (cfg.command == "volterra-check") return cmd_volterra_check(cfg);
    if (cfg.command == "smile") return cmd_smile(cfg);
    if (cfg.command == "benchmark") return cmd_benchmark(cfg);
    if (cfg.command == "calibrate") return cmd_calibrate(cfg);
    if (cfg.command == "extract-xi") return cmd_extract_xi(cfg);
    throw ConfigError("unknown command: " + cfg.command);
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    try {
        return run_command(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    }
}

}  // namespace rbergomi::cli
