#include "vithsd/service/config.hpp"

#include <fstream>

#include "vithsd/core/errors.hpp"

namespace vithsd::service {

void ServiceConfig::validate() const {
    auto bad = [](const std::string& m) { raise(ErrorCode::InvalidConfig, m); };
    if (bind.empty()) bad("bind address is empty");
    if (port < 0 || port > 65535) bad("port must be in 0..65535");
    if (!(kappa_threshold > 0.0 && kappa_threshold < 1.0)) bad("kappa_threshold must lie in (0, 1)");
    if (annotators_per_comment < 1) bad("annotators_per_comment must be at least 1");
    if (partitions < 1) bad("partitions must be at least 1");
    if (workers < 1) bad("workers must be at least 1");
}

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
    ServiceConfig c;
    if (!j.is_object()) raise(ErrorCode::InvalidConfig, "service config must be a JSON object");
    try {
        c.bind = j.value("bind", c.bind);
        c.port = j.value("port", c.port);
        c.data_dir = j.value("data_dir", c.data_dir);
        if (j.contains("model_path") && !j["model_path"].is_null()) c.model_path = j["model_path"].get<std::string>();
        if (j.contains("rounds")) {
            const auto& r = j["rounds"];
            c.annotators_per_comment = r.value("annotators_per_comment", c.annotators_per_comment);
            c.kappa_threshold = r.value("kappa_threshold", c.kappa_threshold);
        }
        if (j.contains("streaming")) {
            const auto& s = j["streaming"];
            c.partitions = s.value("partitions", c.partitions);
            c.workers = s.value("workers", c.workers);
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, std::string("service config: ") + e.what());
    }
    c.validate();
    return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot read config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, "config '" + path + "' is not JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json ServiceConfig::to_json() const {
    return {{"bind", bind},
            {"port", port},
            {"data_dir", data_dir},
            {"model_path", model_path ? nlohmann::json(*model_path) : nlohmann::json(nullptr)},
            {"rounds", {{"annotators_per_comment", annotators_per_comment}, {"kappa_threshold", kappa_threshold}}},
            {"streaming", {{"partitions", partitions}, {"workers", workers}}}};
}

}  // namespace vithsd::service
