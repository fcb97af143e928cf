#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

namespace vithsd::service {

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string data_dir;  // empty: in-memory only
    std::optional<std::string> model_path;

    std::size_t annotators_per_comment = 3;
    double kappa_threshold = 0.4;

    std::uint32_t partitions = 4;
    unsigned workers = 2;

    /// Throws InvalidConfig.
    void validate() const;

    static ServiceConfig from_json(const nlohmann::json& j);
    /// Reads a JSON config file; IoError when unreadable, InvalidConfig when malformed.
    static ServiceConfig load(const std::string& path);
    nlohmann::json to_json() const;
};

}  // namespace vithsd::service
