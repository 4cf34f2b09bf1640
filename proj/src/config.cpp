#include "mssd/config.hpp"

#include <fstream>
#include <sstream>

namespace mssd {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string join_ints(const std::vector<int>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ",";
        os << values[i];
    }
    return os.str();
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

} // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "# mssd run configuration\n";
    os << "# dataset\n";
    os << "data = " << c.data << "\n";
    os << "out_dir = " << c.out_dir << "\n";
    os << "samples_per_hour = " << c.samples_per_hour << "\n";
    os << "offset = " << c.offset << "\n";
    os << "var = " << c.var << "\n";
    os << "multivariate = " << (c.multivariate ? "true" : "false") << "\n";
    os << "jobs = " << c.jobs << "\n";
    os << "fill_policy = " << c.fill_policy << "\n";
    os << "# model\n";
    os << "input_len = " << c.input_len << "\n";
    os << "horizon = " << c.horizon << "\n";
    os << "kernel_scales = " << join_ints(c.kernel_scales) << "\n";
    os << "tcn_layers = " << c.tcn_layers << "\n";
    os << "tcn_kernel = " << c.tcn_kernel << "\n";
    os << "channels = " << c.channels << "\n";
    os << "grid_rows = " << c.grid_rows << "\n";
    os << "dropout = " << c.dropout << "\n";
    os << "# training\n";
    os << "epochs = " << c.epochs << "\n";
    os << "batch_size = " << c.batch_size << "\n";
    os << "lr = " << c.lr << "\n";
    os << "patience = " << c.patience << "\n";
    os << "seed = " << c.seed << "\n";
    os << "train_frac = " << c.train_frac << "\n";
    os << "val_frac = " << c.val_frac << "\n";
    os << "test_frac = " << c.test_frac << "\n";
    return os.str();
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "data") c.data = value;
            else if (key == "out_dir") c.out_dir = value;
            else if (key == "samples_per_hour") c.samples_per_hour = std::stoi(value);
            else if (key == "offset") c.offset = std::stoi(value);
            else if (key == "var") c.var = std::stoi(value);
            else if (key == "multivariate") c.multivariate = (value == "true" || value == "1");
            else if (key == "jobs") c.jobs = std::stoi(value);
            else if (key == "fill_policy") c.fill_policy = value;
            else if (key == "input_len") c.input_len = std::stoul(value);
            else if (key == "horizon") c.horizon = std::stoul(value);
            else if (key == "kernel_scales") c.kernel_scales = parse_int_list(value);
            else if (key == "tcn_layers") c.tcn_layers = std::stoi(value);
            else if (key == "tcn_kernel") c.tcn_kernel = std::stoi(value);
            else if (key == "channels") c.channels = std::stoi(value);
            else if (key == "grid_rows") c.grid_rows = std::stoi(value);
            else if (key == "dropout") c.dropout = std::stod(value);
            else if (key == "epochs") c.epochs = std::stoul(value);
            else if (key == "batch_size") c.batch_size = std::stoul(value);
            else if (key == "lr") c.lr = std::stod(value);
            else if (key == "patience") c.patience = std::stoul(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "train_frac") c.train_frac = std::stod(value);
            else if (key == "val_frac") c.val_frac = std::stod(value);
            else if (key == "test_frac") c.test_frac = std::stod(value);
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(line_no) + ": bad value for '" +
                              key + "'");
        }
    }
    return c;
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << serialize_config(config);
    if (!out) throw DataError("failed writing " + path);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace mssd
