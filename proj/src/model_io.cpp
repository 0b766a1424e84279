#include "ccmtl/model_io.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ccmtl/errors.hpp"
#include "ccmtl/io_util.hpp"

namespace ccmtl {

namespace {
constexpr const char* kFormatTag = "ccmtl-model";
constexpr int kFormatVersion = 1;
} // namespace

void Model::validate() const {
    if (feature_dim == 0) throw ValidationError("model: feature_dim must be >= 1");
    if (task_ids.empty()) throw ValidationError("model: no tasks");
    if (weights.rows() != task_ids.size() || weights.cols() != feature_dim)
        throw ValidationError("model: weight matrix shape does not match task_ids/feature_dim");
    if (!weights.all_finite()) throw ValidationError("model: non-finite weights");
    std::unordered_set<std::string> seen;
    for (const auto& id : task_ids)
        if (!seen.insert(id).second) throw ValidationError("model: duplicate task_id '" + id + "'");
}

void save_model(const Model& model, const std::string& path) {
    model.validate();
    AtomicFile file(path);
    auto& os = file.stream();
    // Weights are written at 17 significant digits so loading reproduces
    // the trained doubles bit-for-bit.
    os << "{\n";
    os << "  \"format\": \"" << kFormatTag << "\",\n";
    os << "  \"version\": " << kFormatVersion << ",\n";
    os << "  \"feature_dim\": " << model.feature_dim << ",\n";
    os << "  \"bias_added\": " << (model.bias_added ? "true" : "false") << ",\n";
    os << "  \"lambda\": " << format_double(model.lambda, 17) << ",\n";
    os << "  \"k\": " << model.k << ",\n";
    os << "  \"task_ids\": [";
    for (std::size_t t = 0; t < model.task_ids.size(); ++t) {
        if (t) os << ", ";
        os << nlohmann::json(model.task_ids[t]).dump();
    }
    os << "],\n";
    os << "  \"weights\": [\n";
    for (std::size_t t = 0; t < model.weights.rows(); ++t) {
        os << "    [";
        const auto row = model.weights.row(t);
        for (std::size_t p = 0; p < row.size(); ++p) {
            if (p) os << ", ";
            os << format_double(row[p], 17);
        }
        os << (t + 1 < model.weights.rows() ? "],\n" : "]\n");
    }
    os << "  ]\n";
    os << "}\n";
    file.commit();
}

Model load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open model file '" + path + "'");
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file '" + path + "': " + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kFormatTag)
            throw FormatError("model file '" + path + "': unrecognized format tag");
        if (doc.at("version").get<int>() != kFormatVersion)
            throw FormatError("model file '" + path + "': unsupported version");
        Model model;
        model.feature_dim = doc.at("feature_dim").get<std::size_t>();
        model.bias_added = doc.at("bias_added").get<bool>();
        model.lambda = doc.at("lambda").get<double>();
        model.k = doc.at("k").get<std::size_t>();
        model.task_ids = doc.at("task_ids").get<std::vector<std::string>>();
        const auto& rows = doc.at("weights");
        if (!rows.is_array())
            throw FormatError("model file '" + path + "': weights must be an array");
        model.weights = WeightMatrix(rows.size(), model.feature_dim);
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const auto row = rows[t].get<std::vector<double>>();
            if (row.size() != model.feature_dim)
                throw FormatError("model file '" + path + "': weight row " + std::to_string(t) +
                                  " has " + std::to_string(row.size()) + " entries, expected " +
                                  std::to_string(model.feature_dim));
            std::copy(row.begin(), row.end(), model.weights.row(t).begin());
        }
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file '" + path + "': " + e.what());
    }
}

} // namespace ccmtl
