#include "vithsd/classifier/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "vithsd/core/errors.hpp"

namespace vithsd::classifier {

static_assert(std::endian::native == std::endian::little, "model files are written little-endian");

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'T', 'H', 'S', 'D', 'L', 'M', '\0'};
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 28;

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
        raise(ErrorCode::SchemaError, std::string("model file truncated while reading ") + what);
    }
    return value;
}

void get_doubles(std::istream& in, std::vector<double>& dst, const char* what) {
    if (dst.empty()) return;
    if (!in.read(reinterpret_cast<char*>(dst.data()), static_cast<std::streamsize>(dst.size() * sizeof(double)))) {
        raise(ErrorCode::SchemaError, std::string("model file truncated while reading ") + what);
    }
}

}  // namespace

void save_model(const MultiHeadLinearModel& model, std::ostream& out) {
    const auto& p = model.params;
    const auto& m = model.metadata;
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kModelFormatVersion);
    put<std::uint64_t>(out, p.dim);
    put<std::uint64_t>(out, m.seed);
    put<std::uint32_t>(out, kHeads);
    put<std::uint32_t>(out, kHeadRows);
    put<std::uint64_t>(out, m.epochs);
    put<std::uint64_t>(out, m.batch_size);
    put<double>(out, m.learning_rate);
    put<double>(out, m.momentum);
    put<double>(out, m.l2);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.model_id.size()));
    out.write(model.model_id.data(), static_cast<std::streamsize>(model.model_id.size()));
    put<std::uint64_t>(out, m.loss_curve.size());
    out.write(reinterpret_cast<const char*>(m.loss_curve.data()),
              static_cast<std::streamsize>(m.loss_curve.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.bias.data()), static_cast<std::streamsize>(p.bias.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.weights.data()),
              static_cast<std::streamsize>(p.weights.size() * sizeof(double)));
    if (!out) raise(ErrorCode::IoError, "writing model failed");
}

void save_model(const MultiHeadLinearModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    save_model(model, out);
}

MultiHeadLinearModel load_model(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        raise(ErrorCode::SchemaError, "not a model file (bad magic)");
    }
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kModelFormatVersion) {
        raise(ErrorCode::SchemaError, "unsupported model format version " + std::to_string(version));
    }
    const auto dim = get<std::uint64_t>(in, "dimension");
    if (dim == 0 || dim > kMaxDim) raise(ErrorCode::SchemaError, "invalid feature dimension " + std::to_string(dim));

    MultiHeadLinearModel model(static_cast<std::size_t>(dim));
    auto& m = model.metadata;
    m.seed = get<std::uint64_t>(in, "seed");
    const auto heads = get<std::uint32_t>(in, "head count");
    const auto rows = get<std::uint32_t>(in, "head rows");
    if (heads != kHeads || rows != kHeadRows) {
        raise(ErrorCode::SchemaError, "model has " + std::to_string(heads) + " heads of " + std::to_string(rows) +
                                          " rows; expected " + std::to_string(kHeads) + " x " +
                                          std::to_string(kHeadRows));
    }
    m.epochs = get<std::uint64_t>(in, "epochs");
    m.batch_size = get<std::uint64_t>(in, "batch size");
    m.learning_rate = get<double>(in, "learning rate");
    m.momentum = get<double>(in, "momentum");
    m.l2 = get<double>(in, "l2");
    const auto id_len = get<std::uint32_t>(in, "model id length");
    if (id_len > 4096) raise(ErrorCode::SchemaError, "model id too long");
    model.model_id.resize(id_len);
    if (id_len > 0 && !in.read(model.model_id.data(), id_len)) raise(ErrorCode::SchemaError, "truncated model id");
    const auto curve_len = get<std::uint64_t>(in, "loss curve length");
    if (curve_len > 1'000'000) raise(ErrorCode::SchemaError, "loss curve too long");
    m.loss_curve.resize(static_cast<std::size_t>(curve_len));
    get_doubles(in, m.loss_curve, "loss curve");
    get_doubles(in, model.params.bias, "biases");
    get_doubles(in, model.params.weights, "weights");
    return model;
}

MultiHeadLinearModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open model '" + path.string() + "'");
    return load_model(in);
}

}  // namespace vithsd::classifier
