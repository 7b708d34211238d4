#include "rfikit/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfikit {

namespace {

constexpr char kMagic[] = "rfikit-model";

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class LineReader {
public:
    LineReader(std::istringstream& in, std::string path) : in_(in), path_(std::move(path)) {}

    std::string next() {
        std::string line;
        if (!std::getline(in_, line)) {
            throw ModelIoError(path_ + ": truncated model file");
        }
        ++line_no_;
        return line;
    }

    // Reads a line of the form "<key> <payload>" and returns the payload.
    std::string expect(const std::string& key) {
        const std::string line = next();
        if (line.rfind(key + " ", 0) != 0) {
            throw ModelIoError(path_ + ":" + std::to_string(line_no_) + ": expected \"" + key + "\"");
        }
        return line.substr(key.size() + 1);
    }

private:
    std::istringstream& in_;
    std::string path_;
    std::size_t line_no_ = 0;
};

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ModelIoError("bad numeric field in " + context + ": \"" + s + "\"");
    }
}

void write_standardizer(std::ostringstream& out, const Standardizer& s) {
    out << "standardizer " << s.dim() << '\n';
    for (std::size_t j = 0; j < s.dim(); ++j) {
        out << fmt_double(s.mean[j]) << ' ' << fmt_double(s.scale[j]) << ' '
            << static_cast<int>(s.constant[j]) << '\n';
    }
}

Standardizer read_standardizer(LineReader& reader) {
    const std::size_t dim = std::stoull(reader.expect("standardizer"));
    Standardizer s;
    s.mean.reserve(dim);
    s.scale.reserve(dim);
    s.constant.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::istringstream line(reader.next());
        std::string mu, sc;
        int flag = 0;
        if (!(line >> mu >> sc >> flag)) {
            throw ModelIoError("malformed standardizer row " + std::to_string(j));
        }
        s.mean.push_back(parse_double(mu, "standardizer"));
        s.scale.push_back(parse_double(sc, "standardizer"));
        s.constant.push_back(static_cast<std::uint8_t>(flag));
    }
    return s;
}

void write_range(std::ostringstream& out, const RangeModel& m) {
    out << "normal_only " << (m.normal_only ? 1 : 0) << '\n';
    out << "envelopes " << kChannelCount << '\n';
    for (const auto& env : m.envelopes) {
        if (env.known) {
            out << "1 " << fmt_double(env.min) << ' ' << fmt_double(env.max) << '\n';
        } else {
            out << "0\n";
        }
    }
}

RangeModel read_range(LineReader& reader) {
    RangeModel m;
    m.normal_only = reader.expect("normal_only") == "1";
    const std::size_t count = std::stoull(reader.expect("envelopes"));
    if (count != kChannelCount) {
        throw ModelIoError("range model has wrong channel count");
    }
    for (auto& env : m.envelopes) {
        std::istringstream line(reader.next());
        int known = 0;
        line >> known;
        if (known == 1) {
            std::string lo, hi;
            if (!(line >> lo >> hi)) {
                throw ModelIoError("malformed envelope row");
            }
            env.known = true;
            env.min = parse_double(lo, "envelope");
            env.max = parse_double(hi, "envelope");
        }
    }
    return m;
}

void write_linear(std::ostringstream& out, const LinearModel& m) {
    out << "weights " << m.weights.size() << '\n';
    for (double w : m.weights) {
        out << fmt_double(w) << '\n';
    }
    out << "bias " << fmt_double(m.bias) << '\n';
    out << "threshold " << fmt_double(m.threshold) << '\n';
    out << "iterations " << m.iterations << '\n';
    out << "final_grad_norm " << fmt_double(m.final_grad_norm) << '\n';
    out << "degenerate " << (m.degenerate ? 1 : 0) << '\n';
}

LinearModel read_linear(LineReader& reader) {
    LinearModel m;
    const std::size_t dim = std::stoull(reader.expect("weights"));
    m.weights.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        m.weights.push_back(parse_double(reader.next(), "weights"));
    }
    m.bias = parse_double(reader.expect("bias"), "bias");
    m.threshold = parse_double(reader.expect("threshold"), "threshold");
    m.iterations = std::stoull(reader.expect("iterations"));
    m.final_grad_norm = parse_double(reader.expect("final_grad_norm"), "final_grad_norm");
    m.degenerate = reader.expect("degenerate") == "1";
    return m;
}

void write_gbdt(std::ostringstream& out, const BoostedModel& m) {
    out << "base_score " << fmt_double(m.base_score) << '\n';
    out << "hyper " << m.hyper.n_trees << ' ' << fmt_double(m.hyper.learning_rate) << ' '
        << m.hyper.max_leaves << ' ' << m.hyper.min_samples_leaf << ' '
        << fmt_double(m.hyper.l2_leaf) << ' ' << m.hyper.max_bins << '\n';
    out << "bins " << m.bins.n_features() << '\n';
    for (const auto& edges : m.bins.edges) {
        out << edges.size();
        for (double e : edges) {
            out << ' ' << fmt_double(e);
        }
        out << '\n';
    }
    out << "trees " << m.trees.size() << '\n';
    for (const auto& tree : m.trees) {
        out << "tree " << tree.nodes.size() << '\n';
        for (const auto& n : tree.nodes) {
            if (n.is_leaf) {
                out << "leaf " << fmt_double(n.leaf_value) << '\n';
            } else {
                out << "split " << n.feature << ' ' << fmt_double(n.threshold) << ' '
                    << (n.default_left ? 1 : 0) << ' ' << n.left << ' ' << n.right << '\n';
            }
        }
    }
}

BoostedModel read_gbdt(LineReader& reader) {
    BoostedModel m;
    m.base_score = parse_double(reader.expect("base_score"), "base_score");
    {
        std::istringstream line(reader.expect("hyper"));
        std::string lr, l2;
        if (!(line >> m.hyper.n_trees >> lr >> m.hyper.max_leaves >> m.hyper.min_samples_leaf >>
              l2 >> m.hyper.max_bins)) {
            throw ModelIoError("malformed hyper line");
        }
        m.hyper.learning_rate = parse_double(lr, "hyper");
        m.hyper.l2_leaf = parse_double(l2, "hyper");
    }
    const std::size_t n_features = std::stoull(reader.expect("bins"));
    m.bins.edges.resize(n_features);
    for (auto& edges : m.bins.edges) {
        std::istringstream line(reader.next());
        std::size_t count = 0;
        line >> count;
        edges.reserve(count);
        std::string tok;
        for (std::size_t b = 0; b < count; ++b) {
            if (!(line >> tok)) {
                throw ModelIoError("malformed bin edges");
            }
            edges.push_back(parse_double(tok, "bin edges"));
        }
    }
    const std::size_t n_trees = std::stoull(reader.expect("trees"));
    m.trees.resize(n_trees);
    for (auto& tree : m.trees) {
        const std::size_t n_nodes = std::stoull(reader.expect("tree"));
        tree.nodes.resize(n_nodes);
        for (auto& node : tree.nodes) {
            std::istringstream line(reader.next());
            std::string tag;
            line >> tag;
            if (tag == "leaf") {
                std::string v;
                if (!(line >> v)) {
                    throw ModelIoError("malformed leaf node");
                }
                node.is_leaf = true;
                node.leaf_value = parse_double(v, "leaf");
            } else if (tag == "split") {
                std::string th;
                int dl = 0;
                if (!(line >> node.feature >> th >> dl >> node.left >> node.right)) {
                    throw ModelIoError("malformed split node");
                }
                node.is_leaf = false;
                node.threshold = parse_double(th, "split");
                node.default_left = dl == 1;
            } else {
                throw ModelIoError("unknown node tag \"" + tag + "\"");
            }
        }
    }
    return m;
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Range: return "range";
        case ModelKind::Linear: return "linear";
        case ModelKind::Gbdt: return "gbdt";
    }
    throw ModelIoError("unknown model kind");
}

std::optional<ModelKind> parse_model_kind(const std::string& name) {
    if (name == "range") return ModelKind::Range;
    if (name == "linear") return ModelKind::Linear;
    if (name == "gbdt") return ModelKind::Gbdt;
    return std::nullopt;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    std::ostringstream body;
    body << kMagic << " " << kModelFormatVersion << " " << model_kind_name(model.kind) << '\n';
    switch (model.kind) {
        case ModelKind::Range:
            if (!model.range) {
                throw ModelIoError("range model payload missing");
            }
            write_range(body, *model.range);
            break;
        case ModelKind::Linear:
            if (!model.linear || !model.standardizer) {
                throw ModelIoError("linear model payload or standardizer missing");
            }
            write_standardizer(body, *model.standardizer);
            write_linear(body, *model.linear);
            break;
        case ModelKind::Gbdt:
            if (!model.gbdt || !model.standardizer) {
                throw ModelIoError("gbdt model payload or standardizer missing");
            }
            write_standardizer(body, *model.standardizer);
            write_gbdt(body, *model.gbdt);
            break;
    }
    const std::string content = body.str();
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "checksum %016" PRIx64 "\n", fnv1a(content));

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ModelIoError("cannot open for writing: " + path.string());
    }
    out << content << checksum;
    if (!out) {
        throw ModelIoError("write failed: " + path.string());
    }
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelIoError("cannot open model: " + path.string());
    }
    std::ostringstream whole;
    whole << in.rdbuf();
    std::string data = whole.str();

    const std::size_t tail = data.rfind("checksum ");
    if (tail == std::string::npos || data.size() < tail + 26) {
        throw ModelIoError(path.string() + ": missing checksum line");
    }
    const std::string content = data.substr(0, tail);
    const std::string stored_hex = data.substr(tail + 9, 16);
    char expect_hex[17];
    std::snprintf(expect_hex, sizeof(expect_hex), "%016" PRIx64, fnv1a(content));
    if (stored_hex != expect_hex) {
        throw ModelIoError(path.string() + ": checksum mismatch, file corrupt or tampered");
    }

    std::istringstream body(content);
    LineReader reader(body, path.string());
    std::istringstream header(reader.next());
    std::string magic, kind_name;
    int version = 0;
    if (!(header >> magic >> version >> kind_name) || magic != kMagic) {
        throw ModelIoError(path.string() + ": not a model file");
    }
    if (version > kModelFormatVersion) {
        throw ModelIoError(path.string() + ": format version " + std::to_string(version) +
                           " is newer than supported version " +
                           std::to_string(kModelFormatVersion));
    }
    const auto kind = parse_model_kind(kind_name);
    if (!kind) {
        throw ModelIoError(path.string() + ": unknown model kind \"" + kind_name + "\"");
    }

    ModelFile model;
    model.kind = *kind;
    switch (*kind) {
        case ModelKind::Range:
            model.range = read_range(reader);
            break;
        case ModelKind::Linear:
            model.standardizer = read_standardizer(reader);
            model.linear = read_linear(reader);
            break;
        case ModelKind::Gbdt:
            model.standardizer = read_standardizer(reader);
            model.gbdt = read_gbdt(reader);
            break;
    }
    return model;
}

}  // namespace rfikit
