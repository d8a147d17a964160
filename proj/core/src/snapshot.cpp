#include "gms/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gms {

using nlohmann::json;

namespace {

json config_to_json(const SketchConfig& config) {
    json j;
    j["model"] = json::parse(config.model.to_json());
    j["bins"] = config.bins;
    j["depth"] = config.depth;
    j["seed"] = config.seed;
    return j;
}

SketchConfig config_from_json(const json& j) {
    return SketchConfig{TreeModel::from_json(j.at("model").dump()), j.at("bins").get<uint64_t>(),
                        j.at("depth").get<uint32_t>(), j.at("seed").get<uint64_t>()};
}

json gm_tables_to_json(const GmHash& s) {
    const uint32_t k_count = s.config().model.variable_count();
    json values = json::array(), pairs = json::array();
    for (uint32_t k = 1; k <= k_count; ++k) {
        values.push_back(std::vector<uint64_t>(s.value_table(k).begin(), s.value_table(k).end()));
        pairs.push_back(k == 1 ? std::vector<uint64_t>{}
                               : std::vector<uint64_t>(s.pair_table(k).begin(),
                                                       s.pair_table(k).end()));
    }
    return json{{"values", std::move(values)}, {"pairs", std::move(pairs)}};
}

struct SnapshotVisitor {
    json& j;

    void operator()(const CountMinSketch& s) const {
        j["type"] = "cm";
        std::vector<uint64_t> flat;
        for (uint32_t i = 0; i < s.config().depth; ++i)
            flat.insert(flat.end(), s.row(i).begin(), s.row(i).end());
        j["counters"] = std::move(flat);
    }
    void operator()(const GmHash& s) const {
        j["type"] = "gmhash";
        j["tables"] = gm_tables_to_json(s);
    }
    void operator()(const GmSketch& s) const {
        j["type"] = "gmsketch";
        json replicas = json::array();
        for (uint32_t i = 0; i < s.config().depth; ++i)
            replicas.push_back(gm_tables_to_json(s.replica(i)));
        j["replicas"] = std::move(replicas);
    }
    void operator()(const GmFactorSketch& s) const {
        j["type"] = "gmfactor";
        const uint32_t k_count = s.config().model.variable_count();
        json values = json::array(), pairs = json::array();
        for (uint32_t k = 1; k <= k_count; ++k) {
            values.push_back(
                std::vector<uint64_t>(s.value_table(k).begin(), s.value_table(k).end()));
            pairs.push_back(k == 1 ? std::vector<uint64_t>{}
                                   : std::vector<uint64_t>(s.pair_table(k).begin(),
                                                           s.pair_table(k).end()));
        }
        j["tables"] = json{{"values", std::move(values)}, {"pairs", std::move(pairs)}};
    }
};

std::pair<std::vector<std::vector<uint64_t>>, std::vector<std::vector<uint64_t>>>
gm_tables_from_json(const json& tables) {
    return {tables.at("values").get<std::vector<std::vector<uint64_t>>>(),
            tables.at("pairs").get<std::vector<std::vector<uint64_t>>>()};
}

}  // namespace

std::string snapshot_to_json(const AnySketch& sketch) {
    json j;
    j["format"] = "gms-snapshot";
    j["version"] = 1;
    j["config"] = config_to_json(config_any(sketch));
    j["n"] = std::visit([](const auto& s) { return s.count(); }, sketch);
    std::visit(SnapshotVisitor{j}, sketch);
    return j.dump();
}

AnySketch snapshot_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != std::string("gms-snapshot"))
        throw std::runtime_error("snapshot: unrecognized container format");
    SketchConfig config = config_from_json(j.at("config"));
    const auto n = j.at("n").get<uint64_t>();
    const std::string type = j.at("type").get<std::string>();
    if (type == "cm")
        return CountMinSketch::restore(std::move(config), n,
                                       j.at("counters").get<std::vector<uint64_t>>());
    if (type == "gmhash") {
        auto [values, pairs] = gm_tables_from_json(j.at("tables"));
        return GmHash::restore(std::move(config), 1, n, std::move(values), std::move(pairs));
    }
    if (type == "gmsketch") {
        const json& replicas = j.at("replicas");
        std::vector<GmHash> parts;
        for (size_t i = 0; i < replicas.size(); ++i) {
            auto [values, pairs] = gm_tables_from_json(replicas[i]);
            parts.push_back(GmHash::restore(config, static_cast<uint32_t>(i + 1), n,
                                            std::move(values), std::move(pairs)));
        }
        return GmSketch::restore(std::move(config), n, std::move(parts));
    }
    if (type == "gmfactor") {
        auto [values, pairs] = gm_tables_from_json(j.at("tables"));
        return GmFactorSketch::restore(std::move(config), n, std::move(values),
                                       std::move(pairs));
    }
    throw std::runtime_error("snapshot: unknown sketch type '" + type + "'");
}

void save_snapshot(const std::filesystem::path& path, const AnySketch& sketch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << snapshot_to_json(sketch) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

AnySketch load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return snapshot_from_json(buf.str());
}

double query_any(const AnySketch& sketch, std::span<const Value> x) {
    return std::visit([&](const auto& s) { return s.query(x); }, sketch);
}

const SketchConfig& config_any(const AnySketch& sketch) {
    return std::visit([](const auto& s) -> const SketchConfig& { return s.config(); }, sketch);
}

}  // namespace gms
