#include "gms/model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gms {

using nlohmann::json;

TreeModel::TreeModel(std::vector<std::pair<uint32_t, uint32_t>> edges,
                     std::vector<Value> cardinalities)
    : cards_(std::move(cardinalities)) {
    const size_t k_count = cards_.size();
    if (k_count == 0) throw std::invalid_argument("TreeModel: needs at least one variable");
    for (size_t k = 0; k < k_count; ++k)
        if (cards_[k] == 0)
            throw std::invalid_argument("TreeModel: cardinality of variable " +
                                        std::to_string(k + 1) + " must be positive");
    if (edges.size() != k_count - 1)
        throw std::invalid_argument("TreeModel: a tree over " + std::to_string(k_count) +
                                    " variables needs " + std::to_string(k_count - 1) +
                                    " edges, got " + std::to_string(edges.size()));

    parent_.assign(k_count, 0);
    for (const auto& [child, parent] : edges) {
        if (child == 0 || child > k_count || parent == 0 || parent > k_count)
            throw std::invalid_argument("TreeModel: edge (" + std::to_string(child) + ", " +
                                        std::to_string(parent) + ") references unknown variable");
        if (child == 1)
            throw std::invalid_argument("TreeModel: root given a parent");
        if (parent_[child - 1] != 0)
            throw std::invalid_argument("TreeModel: variable " + std::to_string(child) +
                                        " has more than one parent");
        parent_[child - 1] = parent;
    }
    for (uint32_t k = 2; k <= k_count; ++k)
        if (parent_[k - 1] == 0)
            throw std::invalid_argument("TreeModel: orphan component at variable " +
                                        std::to_string(k));

    // Every walk up the parent chain must reach the root in < K steps.
    for (uint32_t k = 2; k <= k_count; ++k) {
        uint32_t cur = k;
        for (size_t steps = 0; cur != 1; ++steps) {
            if (steps >= k_count)
                throw std::invalid_argument("TreeModel: cycle detected through variable " +
                                            std::to_string(k));
            cur = parent_[cur - 1];
        }
    }
}

uint32_t TreeModel::parent(uint32_t var) const {
    if (var < 2 || var > variable_count())
        throw std::invalid_argument("TreeModel: variable " + std::to_string(var) +
                                    " has no parent");
    return parent_[var - 1];
}

Value TreeModel::cardinality(uint32_t var) const {
    if (var == 0 || var > variable_count())
        throw std::invalid_argument("TreeModel: no variable " + std::to_string(var));
    return cards_[var - 1];
}

void TreeModel::check_observation(std::span<const Value> x) const {
    if (x.size() != cards_.size())
        throw std::invalid_argument("observation has " + std::to_string(x.size()) +
                                    " coordinates, model has " + std::to_string(cards_.size()));
    for (size_t k = 0; k < x.size(); ++k)
        if (x[k] == 0 || x[k] > cards_[k])
            throw std::invalid_argument("observation value " + std::to_string(x[k]) +
                                        " for variable " + std::to_string(k + 1) +
                                        " outside [1, " + std::to_string(cards_[k]) + "]");
}

std::vector<std::pair<uint32_t, uint32_t>> TreeModel::edges() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    out.reserve(parent_.size() - 1);
    for (uint32_t k = 2; k <= variable_count(); ++k)
        out.emplace_back(k, parent_[k - 1]);
    return out;
}

TreeModel TreeModel::from_json(const std::string& text) {
    json j = json::parse(text);
    const auto k_count = j.at("K").get<uint32_t>();
    auto cards = j.at("cardinalities").get<std::vector<Value>>();
    if (cards.size() != k_count)
        throw std::invalid_argument("model file: K (" + std::to_string(k_count) +
                                    ") does not match cardinalities length (" +
                                    std::to_string(cards.size()) + ")");
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (const auto& e : j.at("parents")) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("model file: parents entries must be [child, parent]");
        edges.emplace_back(e[0].get<uint32_t>(), e[1].get<uint32_t>());
    }
    return TreeModel(std::move(edges), std::move(cards));
}

TreeModel TreeModel::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string TreeModel::to_json() const {
    json j;
    j["K"] = variable_count();
    j["parents"] = json::array();
    for (const auto& [child, parent] : edges()) j["parents"].push_back({child, parent});
    j["cardinalities"] = cards_;
    return j.dump();
}

}  // namespace gms
