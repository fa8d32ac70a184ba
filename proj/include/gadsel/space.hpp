#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gadsel {

// One searchable dimension: a name and its discretized value list.
struct Dimension {
    enum class Kind { real, integer };

    std::string name;
    Kind kind = Kind::real;
    std::vector<double> values;  // sorted, duplicate-free, non-empty
};

// A point in the space: one value per dimension, index-aligned with the
// space's dimension order.
struct Configuration {
    std::vector<double> values;

    friend bool operator==(const Configuration&,
                           const Configuration&) = default;
    // Lexicographic order over the dimension-aligned values; used for
    // deterministic tie-breaking.
    friend bool operator<(const Configuration& a, const Configuration& b) {
        return a.values < b.values;
    }
};

// Cartesian grid over discretized dimensions. Configurations are enumerable
// by index in lexicographic order (first dimension most significant).
class HyperparameterSpace {
public:
    HyperparameterSpace() = default;
    explicit HyperparameterSpace(std::vector<Dimension> dims);

    std::size_t dim_count() const { return dims_.size(); }
    const Dimension& dim(std::size_t i) const { return dims_[i]; }
    const std::vector<Dimension>& dims() const { return dims_; }

    // M = product of the value-list cardinalities.
    std::size_t size() const;

    Configuration at(std::size_t index) const;
    bool contains(const Configuration& c) const;

    // Index of a named dimension; throws ValidationError if missing.
    std::size_t index_of(const std::string& name) const;
    double value_of(const Configuration& c, const std::string& name) const;

    // "alpha=0.5;K=3" (integer dimensions print without a decimal point).
    std::string config_string(const Configuration& c) const;

private:
    std::vector<Dimension> dims_;
};

}  // namespace gadsel
