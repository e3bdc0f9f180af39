#include "fcit/config.hpp"

#include <fstream>

#include "fcit/errors.hpp"

namespace fcit {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

float parse_float(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        float v = std::stof(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError(key + ": '" + value + "' is not a number");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError(key + ": '" + value + "' is not an integer");
    }
}

}  // namespace

std::set<std::string> parse_taps(const std::string& csv) {
    std::set<std::string> taps;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        std::string tap = trim(comma == std::string::npos ? csv.substr(start)
                                                          : csv.substr(start, comma - start));
        if (!tap.empty()) taps.insert(tap);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (taps.empty()) throw UsageError("taps must be non-empty");
    return taps;
}

void apply_config_entry(TaskConfig& config, const std::string& key, const std::string& value) {
    if (key == "taps") {
        config.taps = parse_taps(value);
    } else if (key == "learning_rate") {
        config.learning_rate = parse_float(key, value);
        if (!(config.learning_rate > 0.0f)) {
            throw UsageError("learning_rate must be > 0, got " + value);
        }
    } else if (key == "batch") {
        config.batch = static_cast<int>(parse_int(key, value));
        if (config.batch < 1) throw UsageError("batch must be >= 1, got " + value);
    } else if (key == "epochs") {
        config.epochs = static_cast<int>(parse_int(key, value));
        if (config.epochs < 0) throw UsageError("epochs must be >= 0, got " + value);
    } else if (key == "size") {
        config.train_size = static_cast<int>(parse_int(key, value));
        if (config.train_size < 8) throw UsageError("size must be >= 8, got " + value);
    } else if (key == "alpha") {
        config.alpha = parse_float(key, value);
        if (!(config.alpha > 0.0f)) {
            throw UsageError("alpha must be > 0, got " + value);
        }
    } else if (key == "gamma") {
        config.gamma = parse_float(key, value);
        if (!(config.gamma > 0.2f && config.gamma <= 1.0f)) {
            throw UsageError("gamma must be in (0.2, 1], got " + value);
        }
    } else if (key == "eps_log") {
        config.eps_log = parse_float(key, value);
        if (!(config.eps_log > 0.0f)) throw UsageError("eps_log must be > 0, got " + value);
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "hidden") {
        config.hidden = static_cast<int>(parse_int(key, value));
        if (config.hidden < 1) throw UsageError("hidden must be >= 1, got " + value);
    } else if (key == "depth") {
        config.depth = static_cast<int>(parse_int(key, value));
        if (config.depth < 1) throw UsageError("depth must be >= 1, got " + value);
    } else if (key == "threads") {
        config.threads = static_cast<int>(parse_int(key, value));
        if (config.threads < 0) throw UsageError("threads must be >= 0, got " + value);
    } else if (key == "corpus") {
        config.corpus_dir = value;
    } else if (key == "out") {
        config.out_path = value;
    } else if (key == "lossnet") {
        config.lossnet_path = value;
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

void load_config_file(TaskConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        try {
            apply_config_entry(config, key, value);
        } catch (const UsageError& e) {
            throw UsageError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace fcit
