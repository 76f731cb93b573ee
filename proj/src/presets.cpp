#include "adoptnet/presets.hpp"

#include "adoptnet/errors.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace adoptnet {

namespace {

using nlohmann::json;

RunConfig make_baseline() {
    RunConfig config;
    config.preset_name = "baseline";
    config.model.nu_s = 0.5;
    config.model.nu_n = 0.8;
    config.model.lambda_x = 0.3;
    config.model.kappa = 0.15;
    config.model.dt = 0.05;
    config.model.t_end = 30.0;
    config.jumps.lambda0 = 0.0;
    config.jumps.lambda1 = 0.06;
    config.jumps.tau_star = 0.35;
    config.jumps.absorb_level = 0.95;
    config.net_kind = NetworkKind::random;
    config.n = 30;
    config.gen.edge_prob = 0.2;
    config.edge_weight_scale = 0.004;
    config.kernel_kind = "knn";
    config.kernel_k = 4;
    config.kernel_scale = 0.004;
    config.shock.intensity = 0.33;
    config.shock.duration = 6.0;
    config.shock.node_count = 15;
    config.shock.start_time = 0.0;
    config.durations = {1.0, 2.0, 4.0, 7.0};
    config.intensities = {0.1, 0.2, 0.3, 0.4};
    config.fk_paths = 4000;
    config.fk_time = 10.0;
    config.seed = 1;
    return config;
}

RunConfig make_fig1() {
    RunConfig config = make_baseline();
    config.preset_name = "fig1";
    config.model.nu_s = 0.8;
    config.model.nu_n = 1.2;
    config.model.lambda_x = 0.4;
    config.model.kappa = 0.1;
    config.jumps.lambda1 = 0.07;
    config.edge_weight_scale = 5e-4;
    config.kernel_scale = 5e-4;
    config.shock.intensity = 0.3;
    config.shock.duration = 6.0;
    config.shock.node_count = 18;
    return config;
}

RunConfig make_fig2() {
    RunConfig config = make_baseline();
    config.preset_name = "fig2";
    return config;
}

RunConfig make_fig3() {
    RunConfig config;
    config.preset_name = "fig3";
    config.model.nu_s = 0.8;
    config.model.nu_n = 1.2;
    config.model.lambda_x = 0.4;
    config.model.kappa = 0.1;
    config.model.dt = 0.02;
    config.model.t_end = 500.0;
    config.jumps.lambda0 = 0.0;
    config.jumps.lambda1 = 0.0;
    config.net_kind = NetworkKind::random;
    config.n = 40;
    config.gen.edge_prob = 0.2;
    config.edge_weight_scale = 1.0;
    config.kernel_kind = "knn";
    config.kernel_k = 4;
    config.kernel_scale = 1.0;
    config.shock.node_count = 3;
    config.fk_paths = 4000;
    config.fk_time = 10.0;
    config.seed = 1;
    return config;
}

RunConfig make_table2() {
    RunConfig config = make_fig3();
    config.preset_name = "table2";
    config.net_kind = NetworkKind::scale_free;
    config.gen.attach_count = 2;
    config.model.dt = 0.015;
    return config;
}

json to_json_object(const RunConfig& c) {
    json j;
    j["preset"] = c.preset_name;
    j["nu_s"] = c.model.nu_s;
    j["nu_n"] = c.model.nu_n;
    j["lambda_x"] = c.model.lambda_x;
    j["kappa"] = c.model.kappa;
    j["dt"] = c.model.dt;
    j["t_end"] = c.model.t_end;
    j["lambda0"] = c.jumps.lambda0;
    j["lambda1"] = c.jumps.lambda1;
    j["tau_star"] = c.jumps.tau_star;
    j["jump_target"] = to_string(c.jumps.target);
    j["absorb_level"] = c.jumps.absorb_level;
    j["absorbing"] = c.jumps.absorbing;
    j["net_kind"] = to_string(c.net_kind);
    j["n"] = c.n;
    j["edge_prob"] = c.gen.edge_prob;
    j["attach_count"] = c.gen.attach_count;
    j["neighbor_count"] = c.gen.neighbor_count;
    j["edge_weight_scale"] = c.edge_weight_scale;
    j["kernel"] = c.kernel_kind;
    j["kernel_k"] = c.kernel_k;
    j["kernel_bandwidth"] = c.kernel_bandwidth;
    j["kernel_scale"] = c.kernel_scale;
    j["shock_intensity"] = c.shock.intensity;
    j["shock_duration"] = c.shock.duration;
    j["shock_nodes"] = c.shock.node_count;
    j["shock_start"] = c.shock.start_time;
    j["durations"] = c.durations;
    j["intensities"] = c.intensities;
    j["fk_paths"] = c.fk_paths;
    j["fk_time"] = c.fk_time;
    j["seed"] = c.seed;
    return j;
}

double as_number(const json& value, const std::string& key) {
    if (!value.is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return value.get<double>();
}

int as_int(const json& value, const std::string& key) {
    if (!value.is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return value.get<int>();
}

std::vector<double> as_number_list(const json& value, const std::string& key) {
    if (!value.is_array())
        throw ConfigError("config key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : value) out.push_back(as_number(item, key));
    return out;
}

std::string as_text(const json& value, const std::string& key) {
    if (!value.is_string())
        throw ConfigError("config key '" + key + "' must be a string");
    return value.get<std::string>();
}

void apply_key(RunConfig& c, const std::string& key, const json& value) {
    if (key == "preset") c.preset_name = as_text(value, key);
    else if (key == "nu_s") c.model.nu_s = as_number(value, key);
    else if (key == "nu_n") c.model.nu_n = as_number(value, key);
    else if (key == "lambda_x") c.model.lambda_x = as_number(value, key);
    else if (key == "kappa") c.model.kappa = as_number(value, key);
    else if (key == "dt") c.model.dt = as_number(value, key);
    else if (key == "t_end") c.model.t_end = as_number(value, key);
    else if (key == "lambda0") c.jumps.lambda0 = as_number(value, key);
    else if (key == "lambda1") c.jumps.lambda1 = as_number(value, key);
    else if (key == "tau_star") c.jumps.tau_star = as_number(value, key);
    else if (key == "jump_target") c.jumps.target = parse_jump_target(as_text(value, key));
    else if (key == "absorb_level") c.jumps.absorb_level = as_number(value, key);
    else if (key == "absorbing") {
        if (!value.is_boolean()) throw ConfigError("config key 'absorbing' must be a boolean");
        c.jumps.absorbing = value.get<bool>();
    } else if (key == "net_kind") c.net_kind = parse_network_kind(as_text(value, key));
    else if (key == "n") c.n = as_int(value, key);
    else if (key == "edge_prob") c.gen.edge_prob = as_number(value, key);
    else if (key == "attach_count") c.gen.attach_count = as_int(value, key);
    else if (key == "neighbor_count") c.gen.neighbor_count = as_int(value, key);
    else if (key == "edge_weight_scale") c.edge_weight_scale = as_number(value, key);
    else if (key == "kernel") c.kernel_kind = as_text(value, key);
    else if (key == "kernel_k") c.kernel_k = as_int(value, key);
    else if (key == "kernel_bandwidth") c.kernel_bandwidth = as_number(value, key);
    else if (key == "kernel_scale") c.kernel_scale = as_number(value, key);
    else if (key == "shock_intensity") c.shock.intensity = as_number(value, key);
    else if (key == "shock_duration") c.shock.duration = as_number(value, key);
    else if (key == "shock_nodes") c.shock.node_count = as_int(value, key);
    else if (key == "shock_start") c.shock.start_time = as_number(value, key);
    else if (key == "durations") c.durations = as_number_list(value, key);
    else if (key == "intensities") c.intensities = as_number_list(value, key);
    else if (key == "fk_paths") c.fk_paths = as_int(value, key);
    else if (key == "fk_time") c.fk_time = as_number(value, key);
    else if (key == "seed") {
        if (!value.is_number_integer())
            throw ConfigError("config key 'seed' must be an integer");
        c.seed = value.get<std::uint64_t>();
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

} // namespace

SpatialKernel RunConfig::kernel() const {
    if (kernel_kind == "knn") return SpatialKernel::knn(kernel_k, kernel_scale);
    if (kernel_kind == "gaussian") return SpatialKernel::gaussian(kernel_bandwidth, kernel_scale);
    throw ConfigError("unknown spatial kernel '" + kernel_kind +
                      "' (expected knn or gaussian)");
}

void RunConfig::validate() const {
    model.validate();
    jumps.validate();
    shock.validate();
    if (n < 2) throw ConfigError("network size must be >= 2, got " + std::to_string(n));
    if (shock.node_count > n)
        throw ConfigError("shock targets " + std::to_string(shock.node_count) +
                          " nodes but the network only has " + std::to_string(n));
    if (edge_weight_scale <= 0.0)
        throw ConfigError("edge_weight_scale must be > 0, got " +
                          std::to_string(edge_weight_scale));
    kernel(); // validates the kind; scale is checked when operators are built
    if (kernel_scale <= 0.0)
        throw ConfigError("kernel_scale must be > 0, got " + std::to_string(kernel_scale));
    if (fk_paths < 1)
        throw ConfigError("fk_paths must be >= 1, got " + std::to_string(fk_paths));
    if (fk_time <= 0.0)
        throw ConfigError("fk_time must be > 0, got " + std::to_string(fk_time));
    if (durations.empty()) throw ConfigError("durations list must not be empty");
    if (intensities.empty()) throw ConfigError("intensities list must not be empty");
    for (double d : durations)
        if (d < 0.0) throw ConfigError("durations must be >= 0");
    for (double c : intensities)
        if (c < 0.0) throw ConfigError("intensities must be >= 0");
}

RunConfig preset(const std::string& name) {
    if (name == "baseline") return make_baseline();
    if (name == "fig1") return make_fig1();
    if (name == "fig2") return make_fig2();
    if (name == "fig3") return make_fig3();
    if (name == "table2") return make_table2();
    throw ConfigError("unknown preset '" + name +
                      "' (expected baseline, fig1, fig2, fig3, or table2)");
}

std::string config_to_json(const RunConfig& config) {
    return to_json_object(config).dump(2);
}

RunConfig config_from_json(const std::string& text, RunConfig base) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!parsed.is_object()) throw ConfigError("config JSON must be an object");
    for (const auto& [key, value] : parsed.items()) apply_key(base, key, value);
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str(), std::move(base));
}

std::string config_hash(const RunConfig& config) {
    const std::string canonical = to_json_object(config).dump();
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char byte : canonical) {
        hash ^= byte;
        hash *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(out);
}

SpatialNetwork build_network(const RunConfig& config) {
    config.validate();
    SpatialNetwork net = generate_network(config.net_kind, config.n, config.gen, config.seed);
    net.adjacency *= config.edge_weight_scale;
    return net;
}

} // namespace adoptnet
