#include "threatkg/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace tkg {

namespace {

constexpr char kMagic[8] = {'T', 'K', 'G', 'C', 'K', 'P', 'T', '1'};
constexpr char kFooter[8] = {'T', 'K', 'G', 'E', 'N', 'D', '.', '.'};
constexpr std::uint32_t kVersion = 1;

// Fixed-size encodings keep the expected file size computable from the
// header, which is how truncation is detected before any state is built.
constexpr std::size_t kHeaderBytes = 8 + 4 + 1 + 4 * 8 + 8 + 8 + 7 * 8 + 4 * 8 + 1 + 1 + 8;
constexpr std::size_t kHistoryRecordBytes = 8 + 8 + 1 + 8 + 8 + 8;

class Writer {
public:
    explicit Writer(std::string& out) : out_(out) {}

    void bytes(const void* p, std::size_t n) {
        out_.append(static_cast<const char*>(p), n);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void doubles(const std::vector<double>& v) { bytes(v.data(), v.size() * 8); }

private:
    std::string& out_;
};

class Reader {
public:
    Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}

    void bytes(void* p, std::size_t n) {
        if (pos_ + n > buf_.size()) {
            throw IoError("corrupt checkpoint (truncated): " + path_);
        }
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
    void doubles(std::vector<double>& v) { bytes(v.data(), v.size() * 8); }
    std::size_t pos() const { return pos_; }

private:
    const std::string& buf_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::size_t tensor_bytes(ModelKind kind, std::size_t n_e, std::size_t n_r, std::size_t d_e,
                         std::size_t d_r) {
    if (kind == ModelKind::transh) {
        return 8 * (n_e * d_e + 2 * n_r * d_e);
    }
    // entity + relation + core + two batch-norm states (4 vectors + momentum
    // + epsilon each) + three dropout rates
    return 8 * (n_e * d_e + 2 * n_r * d_r + d_e * d_r * d_e + 2 * (4 * d_e + 2) + 3);
}

void write_bn(Writer& w, const BatchNormState& bn) {
    w.doubles(bn.gamma);
    w.doubles(bn.beta);
    w.doubles(bn.running_mean);
    w.doubles(bn.running_var);
    w.f64(bn.momentum);
    w.f64(bn.epsilon);
}

void read_bn(Reader& r, BatchNormState& bn, std::size_t dim) {
    bn.gamma.assign(dim, 0.0);
    bn.beta.assign(dim, 0.0);
    bn.running_mean.assign(dim, 0.0);
    bn.running_var.assign(dim, 0.0);
    r.doubles(bn.gamma);
    r.doubles(bn.beta);
    r.doubles(bn.running_mean);
    r.doubles(bn.running_var);
    bn.momentum = r.f64();
    bn.epsilon = r.f64();
}

}  // namespace

std::uint64_t vocab_hash(const TripleStore& store) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    const std::uint64_t n_e = store.n_entities();
    const std::uint64_t n_r = store.n_relations();
    mix(&n_e, 8);
    for (const auto& e : store.entities()) {
        mix(e.surface.data(), e.surface.size());
        mix("\n", 1);
    }
    mix(&n_r, 8);
    for (const auto& r : store.relations()) {
        mix(r.name.data(), r.name.size());
        mix("\n", 1);
    }
    return h;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    const ModelKind kind = params_kind(ckpt.params);
    std::size_t n_e, n_r, d_e, d_r;
    if (kind == ModelKind::transh) {
        const auto& p = std::get<TransHParams>(ckpt.params);
        n_e = p.n_entities();
        n_r = p.n_relations();
        d_e = p.dim();
        d_r = 0;
    } else {
        const auto& p = std::get<TuckerParams>(ckpt.params);
        n_e = p.n_entities();
        n_r = p.n_base_relations();
        d_e = p.d_e();
        d_r = p.d_r();
    }

    std::string buf;
    Writer w(buf);
    w.bytes(kMagic, 8);
    w.u32(kVersion);
    w.u8(kind == ModelKind::transh ? 0 : 1);
    w.u64(n_e);
    w.u64(n_r);
    w.u64(d_e);
    w.u64(d_r);
    w.u64(ckpt.vocab_hash);
    w.u64(ckpt.config.seed);
    w.f64(ckpt.config.learning_rate);
    w.f64(ckpt.config.margin);
    w.f64(ckpt.config.label_smoothing);
    w.f64(ckpt.config.dropout.input);
    w.f64(ckpt.config.dropout.hidden);
    w.f64(ckpt.config.dropout.output);
    w.f64(ckpt.config.bn_momentum);
    w.u64(ckpt.config.batch_size);
    w.u64(ckpt.config.iterations);
    w.u64(ckpt.config.negatives_per_positive);
    w.u64(ckpt.config.validation_every);
    w.u8(ckpt.config.deterministic ? 1 : 0);
    w.u8(ckpt.config.validation_mode == RankMode::filtered ? 1 : 0);
    w.u64(ckpt.history.records.size());

    for (const auto& rec : ckpt.history.records) {
        w.u64(rec.iteration);
        w.f64(rec.mean_loss);
        w.u8(rec.val_mrr.has_value() ? 1 : 0);
        w.f64(rec.val_mrr.value_or(0.0));
        w.f64(rec.val_hits10.value_or(0.0));
        w.f64(rec.wall_seconds);
    }

    if (kind == ModelKind::transh) {
        const auto& p = std::get<TransHParams>(ckpt.params);
        w.doubles(p.entity_emb.data());
        w.doubles(p.rel_translation.data());
        w.doubles(p.rel_normal.data());
    } else {
        const auto& p = std::get<TuckerParams>(ckpt.params);
        w.doubles(p.entity_emb.data());
        w.doubles(p.rel_emb.data());
        w.doubles(p.core.data());
        write_bn(w, p.bn0);
        write_bn(w, p.bn1);
        w.f64(p.dropout.input);
        w.f64(p.dropout.hidden);
        w.f64(p.dropout.output);
    }
    w.bytes(kFooter, 8);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out.good()) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r(buf, path);
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw IoError("not a threatkg checkpoint: " + path);
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw DomainError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint8_t kind_byte = r.u8();
    if (kind_byte > 1) throw IoError("corrupt checkpoint (bad model kind): " + path);
    const ModelKind kind = kind_byte == 0 ? ModelKind::transh : ModelKind::tucker;

    const std::uint64_t n_e = r.u64();
    const std::uint64_t n_r = r.u64();
    const std::uint64_t d_e = r.u64();
    const std::uint64_t d_r = r.u64();

    Checkpoint ckpt;
    ckpt.vocab_hash = r.u64();
    ckpt.config.model = kind;
    ckpt.config.d_e = d_e;
    ckpt.config.d_r = kind == ModelKind::tucker ? d_r : 30;
    ckpt.config.seed = r.u64();
    ckpt.config.learning_rate = r.f64();
    ckpt.config.margin = r.f64();
    ckpt.config.label_smoothing = r.f64();
    ckpt.config.dropout.input = r.f64();
    ckpt.config.dropout.hidden = r.f64();
    ckpt.config.dropout.output = r.f64();
    ckpt.config.bn_momentum = r.f64();
    ckpt.config.batch_size = r.u64();
    ckpt.config.iterations = r.u64();
    ckpt.config.negatives_per_positive = r.u64();
    ckpt.config.validation_every = r.u64();
    ckpt.config.deterministic = r.u8() != 0;
    ckpt.config.validation_mode = r.u8() != 0 ? RankMode::filtered : RankMode::raw;
    const std::uint64_t history_count = r.u64();

    // Sanity-bound the header before trusting the size arithmetic.
    constexpr std::uint64_t kDimCap = 1ull << 32;
    if (n_e == 0 || n_r == 0 || d_e == 0 || n_e > kDimCap || n_r > kDimCap || d_e > kDimCap ||
        d_r > kDimCap || (kind == ModelKind::tucker && d_r == 0)) {
        throw IoError("corrupt checkpoint (implausible dimensions): " + path);
    }

    const std::size_t expected = kHeaderBytes + history_count * kHistoryRecordBytes +
                                 tensor_bytes(kind, n_e, n_r, d_e, d_r) + 8;
    if (buf.size() != expected) {
        throw IoError("corrupt checkpoint (truncated or padded): " + path + " (" +
                      std::to_string(buf.size()) + " bytes, expected " +
                      std::to_string(expected) + ")");
    }

    for (std::uint64_t i = 0; i < history_count; ++i) {
        HistoryRecord rec;
        rec.iteration = r.u64();
        rec.mean_loss = r.f64();
        const bool has_val = r.u8() != 0;
        const double mrr = r.f64();
        const double hits10 = r.f64();
        if (has_val) {
            rec.val_mrr = mrr;
            rec.val_hits10 = hits10;
        }
        rec.wall_seconds = r.f64();
        ckpt.history.records.push_back(rec);
    }

    if (kind == ModelKind::transh) {
        TransHParams p;
        p.entity_emb = Matrix(n_e, d_e);
        p.rel_translation = Matrix(n_r, d_e);
        p.rel_normal = Matrix(n_r, d_e);
        r.doubles(p.entity_emb.data());
        r.doubles(p.rel_translation.data());
        r.doubles(p.rel_normal.data());
        ckpt.params = std::move(p);
    } else {
        TuckerParams p;
        p.entity_emb = Matrix(n_e, d_e);
        p.rel_emb = Matrix(2 * n_r, d_r);
        p.core = Tensor3(d_e, d_r, d_e);
        r.doubles(p.entity_emb.data());
        r.doubles(p.rel_emb.data());
        r.doubles(p.core.data());
        read_bn(r, p.bn0, d_e);
        read_bn(r, p.bn1, d_e);
        p.dropout.input = r.f64();
        p.dropout.hidden = r.f64();
        p.dropout.output = r.f64();
        ckpt.params = std::move(p);
    }

    char footer[8];
    r.bytes(footer, 8);
    if (std::memcmp(footer, kFooter, 8) != 0) {
        throw IoError("corrupt checkpoint (bad footer): " + path);
    }
    return ckpt;
}

void require_vocab_match(const Checkpoint& ckpt, const TripleStore& store) {
    const std::uint64_t h = vocab_hash(store);
    if (h != ckpt.vocab_hash) {
        throw DomainError(
            "checkpoint vocabulary hash does not match the store (the model was trained on a "
            "different knowledge graph)");
    }
}

}  // namespace tkg
