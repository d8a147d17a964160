#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gms {

// Variable values are 1-indexed naturals, value of variable k in [1, M_k].
using Value = uint32_t;
using Observation = std::vector<Value>;

// Directed tree over K categorical variables; variable 1 is the root and
// every other variable has exactly one parent. Variable indices are
// 1-indexed throughout the public surface, matching the file formats.
class TreeModel {
public:
    // edges are (child, parent) pairs, 1-indexed, in any order;
    // cardinalities[k-1] is the value count of variable k.
    // Throws std::invalid_argument when the edges do not form a tree rooted
    // at variable 1 (cycle, orphan, duplicate parent, root with a parent)
    // or a cardinality is zero.
    TreeModel(std::vector<std::pair<uint32_t, uint32_t>> edges, std::vector<Value> cardinalities);

    uint32_t variable_count() const noexcept { return static_cast<uint32_t>(cards_.size()); }
    bool is_root(uint32_t var) const noexcept { return var == 1; }

    // Parent of a non-root variable, 1-indexed.
    uint32_t parent(uint32_t var) const;
    Value cardinality(uint32_t var) const;

    // Throws std::invalid_argument when x has the wrong length or a
    // coordinate outside [1, M_k].
    void check_observation(std::span<const Value> x) const;

    std::vector<std::pair<uint32_t, uint32_t>> edges() const;

    // {"K": 3, "parents": [[2,1],[3,2]], "cardinalities": [4,4,4]}
    static TreeModel from_json(const std::string& text);
    static TreeModel from_json_file(const std::filesystem::path& path);
    std::string to_json() const;

    friend bool operator==(const TreeModel&, const TreeModel&) = default;

private:
    std::vector<uint32_t> parent_;  // parent_[k-1], 1-indexed parents; 0 at the root slot
    std::vector<Value> cards_;
};

}  // namespace gms
