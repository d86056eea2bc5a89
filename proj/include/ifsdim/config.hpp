#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "ifsdim/system.hpp"

namespace ifsdim {

struct RenderSettings {
    std::size_t points = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t burn_in = 200;
    int resolution = 1024;
};

struct SystemConfig {
    std::string name;
    std::string example;  // section/example tag used by --examples
    std::string description;
    IfsSystem system;
    RenderSettings render;
    nlohmann::ordered_json raw;
    std::string hash;  // FNV-1a 64 of the canonical dump, hex
};

// Throws Error(Config) with line/column or field-path diagnostics.
SystemConfig parse_config(const std::string& text, const std::string& source = "<input>");
SystemConfig load_config(const std::string& path);

// Accepts a JSON number or a rational string such as "-1/3".
double parse_real(const nlohmann::ordered_json& v, const std::string& where);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace ifsdim
