#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "rfikit/features.hpp"
#include "rfikit/gbdt.hpp"
#include "rfikit/logistic.hpp"
#include "rfikit/range_baseline.hpp"

namespace rfikit {

class ModelIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { Range, Linear, Gbdt };

std::string model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(const std::string& name);

// Versioned, checksummed text container for any of the three detectors.
// linear/gbdt carry the standardizer fitted on their training set; gbdt also
// carries its binning table inside the payload.
struct ModelFile {
    ModelKind kind = ModelKind::Range;
    std::optional<Standardizer> standardizer;
    std::optional<RangeModel> range;
    std::optional<LinearModel> linear;
    std::optional<BoostedModel> gbdt;
};

// Current on-disk format version; loading a newer major version fails cleanly.
inline constexpr int kModelFormatVersion = 1;

void save_model(const ModelFile& model, const std::filesystem::path& path);

/// Verifies the content checksum and format version before parsing.
ModelFile load_model(const std::filesystem::path& path);

}  // namespace rfikit
