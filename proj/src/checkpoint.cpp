#include "mssd/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace mssd {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "mssd-checkpoint";
constexpr int kVersion = 1;

json config_to_json(const MssdConfig& config) {
    json j;
    j["samples_per_hour"] = config.samples_per_hour;
    j["input_len"] = config.input_len;
    j["horizon"] = config.horizon;
    j["seed"] = config.seed;
    json s;
    s["num_heads"] = config.sdnet.num_heads;
    s["kernel_scales"] = config.sdnet.kernel_scales;
    s["tcn_layers"] = config.sdnet.tcn_layers;
    s["tcn_kernel"] = config.sdnet.tcn_kernel;
    s["channels"] = config.sdnet.channels;
    s["grid_rows"] = config.sdnet.grid_rows;
    s["dropout"] = config.sdnet.dropout;
    s["causal_tcn"] = config.sdnet.causal_tcn;
    s["global_block"] = config.sdnet.global_block;
    j["sdnet"] = s;
    return j;
}

MssdConfig config_from_json(const json& j) {
    MssdConfig config;
    config.samples_per_hour = j.at("samples_per_hour").get<int>();
    config.input_len = j.at("input_len").get<std::size_t>();
    config.horizon = j.at("horizon").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();
    const json& s = j.at("sdnet");
    config.sdnet.num_heads = s.at("num_heads").get<int>();
    config.sdnet.kernel_scales = s.at("kernel_scales").get<std::vector<int>>();
    config.sdnet.tcn_layers = s.at("tcn_layers").get<int>();
    config.sdnet.tcn_kernel = s.at("tcn_kernel").get<int>();
    config.sdnet.channels = s.at("channels").get<int>();
    config.sdnet.grid_rows = s.at("grid_rows").get<int>();
    config.sdnet.dropout = s.at("dropout").get<double>();
    config.sdnet.causal_tcn = s.at("causal_tcn").get<bool>();
    config.sdnet.global_block = s.at("global_block").get<bool>();
    return config;
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    if (checkpoint.models.empty()) throw ContractError("checkpoint: no models to save");
    json root;
    root["format"] = kFormat;
    root["version"] = kVersion;
    root["variables"] = checkpoint.variable_names;
    json models = json::array();
    for (const auto& model : checkpoint.models) {
        json m;
        m["config"] = config_to_json(model.config());
        m["norm"] = {{"mean", model.norm.mean},
                     {"stddev", model.norm.stddev},
                     {"fitted", model.norm.fitted}};
        json params = json::array();
        for (const auto& p : const_cast<MssdModel&>(model).parameters()) {
            json entry;
            entry["name"] = p.name;
            entry["shape"] = p.value->shape();
            entry["data"] = p.value->to_vector();
            params.push_back(std::move(entry));
        }
        m["params"] = std::move(params);
        models.push_back(std::move(m));
    }
    root["models"] = std::move(models);

    std::ofstream out(path);
    if (!out) throw DataError("cannot open checkpoint file for writing: " + path);
    out << root.dump();
    if (!out) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint file: " + path);
    json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw DataError("malformed checkpoint " + path + ": " + e.what());
    }
    if (root.value("format", "") != kFormat)
        throw DataError("not a checkpoint file: " + path);
    if (root.value("version", 0) != kVersion)
        throw DataError("unsupported checkpoint version in " + path);

    Checkpoint checkpoint;
    checkpoint.variable_names = root.at("variables").get<std::vector<std::string>>();
    for (const json& m : root.at("models")) {
        MssdModel model(config_from_json(m.at("config")));
        const json& norm = m.at("norm");
        model.norm.mean = norm.at("mean").get<double>();
        model.norm.stddev = norm.at("stddev").get<double>();
        model.norm.fitted = norm.at("fitted").get<bool>();

        auto params = model.parameters();
        const json& stored = m.at("params");
        if (stored.size() != params.size())
            throw DataError("checkpoint parameter list" " does not match model structure");
        for (std::size_t i = 0; i < params.size(); ++i) {
            const json& entry = stored[i];
            if (entry.at("name").get<std::string>() != params[i].name)
                throw DataError("checkpoint parameter order mismatch at " + params[i].name);
            Shape shape = entry.at("shape").get<Shape>();
            std::vector<double> data = entry.at("data").get<std::vector<double>>();
            *params[i].value = Tensor::from(std::move(shape), std::move(data));
        }
        checkpoint.models.push_back(std::move(model));
    }
    return checkpoint;
}

} // namespace mssd
