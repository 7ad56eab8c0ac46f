#include "hab/trees/model_io.hpp"

#include <bit>
#include <cstring>

#include "hab/io/container.hpp"

namespace hab::trees {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model I/O assumes a little-endian host");

constexpr std::uint16_t kModelVersion = 1;
constexpr std::uint8_t kKindForest = 0;
constexpr std::uint8_t kKindGbdt = 1;

class Writer {
public:
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void i32(std::int32_t v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    Reader(const std::vector<std::uint8_t>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    std::uint8_t u8() { return get<std::uint8_t>(); }
    std::uint16_t u16() { return get<std::uint16_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    std::int32_t i32() { return get<std::int32_t>(); }
    double f64() { return get<double>(); }
    void raw(void* out, std::size_t n) {
        if (remaining() < n) throw ContainerError(name_ + ": truncated model file", pos_);
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }
    void fail(const std::string& message) const {
        throw ContainerError(name_ + ": " + message, pos_);
    }

private:
    template <typename T>
    T get() {
        T v;
        raw(&v, sizeof(T));
        return v;
    }

    const std::vector<std::uint8_t>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

void write_trees(Writer& w, const std::vector<Tree>& trees) {
    w.u32(static_cast<std::uint32_t>(trees.size()));
    for (const Tree& tree : trees) {
        w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const TreeNode& node : tree.nodes) {
            w.i32(node.feature);
            w.f64(node.threshold);
            w.i32(node.left);
            w.i32(node.right);
            w.f64(node.value);
        }
    }
}

std::vector<Tree> read_trees(Reader& r) {
    std::uint32_t n_trees = r.u32();
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    for (std::uint32_t t = 0; t < n_trees; ++t) {
        std::uint32_t n_nodes = r.u32();
        constexpr std::size_t kNodeBytes = 4 + 8 + 4 + 4 + 8;
        if (r.remaining() < static_cast<std::size_t>(n_nodes) * kNodeBytes)
            r.fail("node list longer than remaining bytes");
        Tree tree;
        tree.nodes.resize(n_nodes);
        for (std::uint32_t i = 0; i < n_nodes; ++i) {
            TreeNode& node = tree.nodes[i];
            node.feature = r.i32();
            node.threshold = r.f64();
            node.left = r.i32();
            node.right = r.i32();
            node.value = r.f64();
            if (node.left >= static_cast<std::int32_t>(n_nodes) ||
                node.right >= static_cast<std::int32_t>(n_nodes))
                r.fail("child index out of range in tree " + std::to_string(t));
        }
        if (n_nodes == 0) r.fail("empty tree " + std::to_string(t));
        trees.push_back(std::move(tree));
    }
    return trees;
}

void write_prelude(Writer& w, std::uint8_t kind, std::size_t n_features,
                   std::uint64_t seed) {
    w.raw("HABM", 4);
    w.u16(kModelVersion);
    w.u8(kind);
    w.u32(static_cast<std::uint32_t>(n_features));
    w.u64(seed);
}

}  // namespace

void save_model(const std::filesystem::path& path, const ForestModel& model) {
    Writer w;
    write_prelude(w, kKindForest, model.n_features, model.params.seed);
    w.u32(static_cast<std::uint32_t>(model.params.n_estimators));
    w.u32(static_cast<std::uint32_t>(model.params.min_samples_leaf));
    w.u32(static_cast<std::uint32_t>(model.params.features_per_node));
    w.u8(model.params.bootstrap ? 1 : 0);
    write_trees(w, model.trees);
    io::write_file_bytes(path, w.take());
}

void save_model(const std::filesystem::path& path, const GbdtModel& model) {
    Writer w;
    write_prelude(w, kKindGbdt, model.n_features, model.params.seed);
    w.u32(static_cast<std::uint32_t>(model.params.rounds));
    w.f64(model.params.learning_rate);
    w.u32(static_cast<std::uint32_t>(model.params.num_leaves));
    w.f64(model.params.bagging_fraction);
    w.u32(static_cast<std::uint32_t>(model.params.bagging_freq));
    w.u32(static_cast<std::uint32_t>(model.params.min_samples_leaf));
    w.f64(model.base_score);
    write_trees(w, model.trees);
    io::write_file_bytes(path, w.take());
}

AnyModel load_model(const std::filesystem::path& path) {
    auto bytes = io::read_file_bytes(path);
    Reader r(bytes, path.filename().string());
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, "HABM", 4) != 0)
        throw ContainerError(path.filename().string() + ": bad magic, expected HABM", 0);
    std::uint16_t version = r.u16();
    if (version != kModelVersion)
        throw ContainerError(
            path.filename().string() + ": unsupported model version " +
                std::to_string(version),
            4);
    std::uint8_t kind = r.u8();
    std::uint32_t n_features = r.u32();
    std::uint64_t seed = r.u64();

    AnyModel out;
    if (kind == kKindForest) {
        ForestModel model;
        model.n_features = n_features;
        model.params.seed = seed;
        model.params.n_estimators = r.u32();
        model.params.min_samples_leaf = r.u32();
        model.params.features_per_node = r.u32();
        model.params.bootstrap = r.u8() != 0;
        model.trees = read_trees(r);
        out = std::move(model);
    } else if (kind == kKindGbdt) {
        GbdtModel model;
        model.n_features = n_features;
        model.params.seed = seed;
        model.params.rounds = r.u32();
        model.params.learning_rate = r.f64();
        model.params.num_leaves = r.u32();
        model.params.bagging_fraction = r.f64();
        model.params.bagging_freq = r.u32();
        model.params.min_samples_leaf = r.u32();
        model.base_score = r.f64();
        model.trees = read_trees(r);
        out = std::move(model);
    } else {
        throw ContainerError(path.filename().string() + ": unknown model kind " +
                                 std::to_string(kind),
                             6);
    }
    if (r.remaining() != 0)
        throw ContainerError(path.filename().string() + ": trailing bytes after payload",
                             r.offset());
    return out;
}

std::vector<double> predict(const AnyModel& model, const Matrix& X) {
    return std::visit([&](const auto& m) { return predict(m, X); }, model);
}

}  // namespace hab::trees
