// Strict JSON field access with path-qualified diagnostics.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qcae/error.hpp"

namespace qcae {

using json = nlohmann::json;

namespace jsonutil {

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError("field '" + path + "': expected object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("field '" + join(path, key) + "': missing");
    return *it;
}

template <class T>
T as(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("field '" + path + "': expected boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("field '" + path + "': expected integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("field '" + path + "': expected number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("field '" + path + "': expected string");
    }
    return v.get<T>();
}

template <class T>
T get(const json& j, const std::string& key, const std::string& path) {
    return as<T>(require(j, key, path), join(path, key));
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.is_object()) throw ConfigError("field '" + path + "': expected object");
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    return as<T>(*it, join(path, key));
}

template <class T>
std::vector<T> get_list(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    const std::string p = join(path, key);
    if (!v.is_array()) throw ConfigError("field '" + p + "': expected array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as<T>(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T>
std::vector<T> get_list_or(const json& j, const std::string& key, const std::string& path, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    return get_list<T>(j, key, path);
}

}  // namespace jsonutil
}  // namespace qcae
