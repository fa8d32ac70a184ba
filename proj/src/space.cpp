#include "gadsel/space.hpp"

#include <algorithm>
#include <cmath>

#include "gadsel/errors.hpp"
#include "gadsel/util.hpp"

namespace gadsel {

HyperparameterSpace::HyperparameterSpace(std::vector<Dimension> dims)
    : dims_(std::move(dims)) {
    for (const auto& d : dims_) {
        if (d.values.empty())
            throw ValidationError("dimension '" + d.name +
                                  "' has an empty value list");
        if (!std::is_sorted(d.values.begin(), d.values.end()))
            throw ValidationError("dimension '" + d.name +
                                  "' values must be sorted");
        if (std::adjacent_find(d.values.begin(), d.values.end()) !=
            d.values.end())
            throw ValidationError("dimension '" + d.name +
                                  "' values must be duplicate-free");
        if (d.kind == Dimension::Kind::integer)
            for (double v : d.values)
                if (v != std::floor(v))
                    throw ValidationError("dimension '" + d.name +
                                          "' holds a non-integer value");
    }
}

std::size_t HyperparameterSpace::size() const {
    std::size_t m = 1;
    for (const auto& d : dims_) m *= d.values.size();
    return m;
}

Configuration HyperparameterSpace::at(std::size_t index) const {
    if (index >= size()) throw ValidationError("configuration index out of range");
    Configuration c;
    c.values.resize(dims_.size());
    for (std::size_t l = dims_.size(); l-- > 0;) {
        std::size_t card = dims_[l].values.size();
        c.values[l] = dims_[l].values[index % card];
        index /= card;
    }
    return c;
}

bool HyperparameterSpace::contains(const Configuration& c) const {
    if (c.values.size() != dims_.size()) return false;
    for (std::size_t l = 0; l < dims_.size(); ++l)
        if (!std::binary_search(dims_[l].values.begin(),
                                dims_[l].values.end(), c.values[l]))
            return false;
    return true;
}

std::size_t HyperparameterSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < dims_.size(); ++i)
        if (dims_[i].name == name) return i;
    throw ValidationError("no dimension named '" + name + "'");
}

double HyperparameterSpace::value_of(const Configuration& c,
                                     const std::string& name) const {
    return c.values[index_of(name)];
}

std::string HyperparameterSpace::config_string(const Configuration& c) const {
    std::string out;
    for (std::size_t l = 0; l < dims_.size(); ++l) {
        if (l) out += ";";
        out += dims_[l].name + "=";
        if (dims_[l].kind == Dimension::Kind::integer)
            out += std::to_string(static_cast<long long>(c.values[l]));
        else
            out += format_double(c.values[l]);
    }
    return out;
}

}  // namespace gadsel
