#include "vithsd/streaming/sink.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>

#include "vithsd/core/errors.hpp"

namespace vithsd::streaming {

bool MemorySink::put(const PredictionRecord& record) {
    std::lock_guard lock(mu_);
    if (!ids_.insert(record.id).second) return false;
    records_.push_back(record);
    return true;
}

std::size_t MemorySink::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::vector<PredictionRecord> MemorySink::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

namespace {

// Returns the complete lines of a sink file and the byte length they cover.
std::pair<std::vector<std::string>, std::uintmax_t> complete_lines(const std::string& path) {
    std::pair<std::vector<std::string>, std::uintmax_t> out{{}, 0};
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0;
    while (true) {
        const auto nl = content.find('\n', start);
        if (nl == std::string::npos) break;
        out.first.push_back(content.substr(start, nl - start));
        start = nl + 1;
    }
    out.second = start;
    return out;
}

}  // namespace

NdjsonFileSink::NdjsonFileSink(std::string path, bool fsync) : path_(std::move(path)), fsync_(fsync) {
    std::error_code ec;
    if (std::filesystem::exists(path_, ec)) {
        const auto [lines, good] = complete_lines(path_);
        for (const auto& line : lines) {
            if (line.empty()) continue;
            try {
                ids_.insert(nlohmann::json::parse(line).at("id").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                raise(ErrorCode::ParseError, "sink file '" + path_ + "' has a malformed line: " + e.what());
            }
        }
        if (std::filesystem::file_size(path_, ec) != good) std::filesystem::resize_file(path_, good, ec);
        if (ec) raise(ErrorCode::IoError, "cannot repair sink file '" + path_ + "': " + ec.message());
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) raise(ErrorCode::IoError, "cannot open sink file '" + path_ + "': " + std::strerror(errno));
}

NdjsonFileSink::~NdjsonFileSink() {
    if (fd_ >= 0) ::close(fd_);
}

bool NdjsonFileSink::put(const PredictionRecord& record) {
    std::lock_guard lock(mu_);
    if (ids_.count(record.id)) return false;
    const std::string line = to_json(record).dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            raise(ErrorCode::SinkFailure, "write to '" + path_ + "' failed: " + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    if (fsync_ && ::fsync(fd_) != 0) {
        raise(ErrorCode::SinkFailure, "fsync of '" + path_ + "' failed: " + std::strerror(errno));
    }
    ids_.insert(record.id);
    return true;
}

std::size_t NdjsonFileSink::size() const {
    std::lock_guard lock(mu_);
    return ids_.size();
}

std::vector<PredictionRecord> read_sink_file(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) raise(ErrorCode::IoError, "no sink file '" + path + "'");
    std::vector<PredictionRecord> out;
    for (const auto& line : complete_lines(path).first) {
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorCode::ParseError, "sink file '" + path + "': " + e.what());
        }
    }
    return out;
}

bool InMemoryDocumentStore::put(const std::string& id, const nlohmann::json& doc) {
    std::lock_guard lock(mu_);
    return docs_.emplace(id, doc).second;
}

std::optional<nlohmann::json> InMemoryDocumentStore::get(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = docs_.find(id);
    if (it == docs_.end()) return std::nullopt;
    return it->second;
}

std::size_t InMemoryDocumentStore::size() const {
    std::lock_guard lock(mu_);
    return docs_.size();
}

DeadLetterFile::DeadLetterFile(const std::string& path) : out_(path, std::ios::app | std::ios::binary) {
    if (!out_) raise(ErrorCode::IoError, "cannot open dead-letter file '" + path + "'");
}

void DeadLetterFile::write(const std::string& id, const std::string& error, std::int64_t processed_ts) {
    std::lock_guard lock(mu_);
    out_ << nlohmann::json{{"id", id},
                           {"terms", nlohmann::json::array()},
                           {"model", ""},
                           {"latency_ms", 0.0},
                           {"processed_ts", processed_ts},
                           {"error", error}}
                .dump()
         << '\n';
    out_.flush();
    ++count_;
}

std::size_t DeadLetterFile::count() const {
    std::lock_guard lock(mu_);
    return count_;
}

FaultInjectingSink::FaultInjectingSink(RecordSink& inner, double failure_rate, std::uint64_t seed)
    : inner_(inner), rate_(failure_rate), rng_(seed) {
    if (rate_ < 0.0 || rate_ >= 1.0) raise(ErrorCode::InvalidConfig, "sink failure rate must be in [0, 1)");
}

bool FaultInjectingSink::put(const PredictionRecord& record) {
    bool fail = false;
    bool after = false;
    {
        std::lock_guard lock(mu_);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        fail = u(rng_) < rate_;
        after = u(rng_) < 0.5;
        if (fail) ++failures_;
    }
    if (fail && !after) raise(ErrorCode::SinkFailure, "injected failure before writing " + record.id);
    const bool stored = inner_.put(record);
    if (fail) raise(ErrorCode::SinkFailure, "injected failure after writing " + record.id);
    return stored;
}

std::size_t FaultInjectingSink::failures() const {
    std::lock_guard lock(mu_);
    return failures_;
}

}  // namespace vithsd::streaming
