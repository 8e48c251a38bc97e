#pragma once

#include <span>
#include <string>
#include <vector>

#include "cupid/errors.hpp"
#include "cupid/tensor.hpp"

namespace cupid {

// Describes how one named tensor maps into a flat parameter buffer.
struct LayoutEntry {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t count = 0;
};

class ParamLayout {
public:
    void add(std::string name, std::vector<int> shape) {
        LayoutEntry e;
        e.name = std::move(name);
        e.shape = std::move(shape);
        e.offset = total_;
        e.count = shape_numel(e.shape);
        total_ += e.count;
        entries_.push_back(std::move(e));
    }

    const std::vector<LayoutEntry>& entries() const { return entries_; }
    std::size_t total() const { return total_; }

    const LayoutEntry& find(const std::string& name) const {
        for (const auto& e : entries_) {
            if (e.name == name) {
                return e;
            }
        }
        throw ConfigError("no parameter named '" + name + "' in layout");
    }

    bool operator==(const ParamLayout& other) const {
        if (entries_.size() != other.entries_.size() || total_ != other.total_) {
            return false;
        }
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].name != other.entries_[i].name ||
                entries_[i].shape != other.entries_[i].shape) {
                return false;
            }
        }
        return true;
    }

private:
    std::vector<LayoutEntry> entries_;
    std::size_t total_ = 0;
};

// Flat parameter buffer for a network, ordered by declaration so gradient
// vectors across samples stay index-aligned.
struct ParameterVector {
    ParamLayout layout;
    std::vector<double> values;

    void validate() const {
        if (values.size() != layout.total()) {
            throw DimensionError("parameter buffer length does not match layout");
        }
    }

    std::span<const double> view(const std::string& name) const {
        const auto& e = layout.find(name);
        return std::span<const double>(values.data() + e.offset, e.count);
    }

    std::span<double> view(const std::string& name) {
        const auto& e = layout.find(name);
        return std::span<double>(values.data() + e.offset, e.count);
    }

    std::size_t size() const { return values.size(); }
};

// Gradient aligned with a ParameterVector layout.
struct GradientVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }
};

}  // namespace cupid
