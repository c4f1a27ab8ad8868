#include "bcpnn/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "bcpnn/digest.hpp"
#include "bcpnn/errors.hpp"

namespace bcpnn {

namespace {

constexpr char kMagic[8] = {'B', 'C', 'P', 'N', 'S', 'N', 'A', 'P'};
constexpr uint32_t kVersion = 1;

class Writer {
public:
    void u8(uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int b = 0; b < 4; ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    }
    void u64(uint64_t v) {
        for (int b = 0; b < 8; ++b) out_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        out_.append(s);
    }
    void f64_array(const std::vector<double>& v) {
        u64(v.size());
        for (double d : v) f64(d);
    }
    void u8_array(const std::vector<uint8_t>& v) {
        u64(v.size());
        for (uint8_t b : v) u8(b);
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(bytes_[pos_++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_++])) << (8 * b);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[pos_++])) << (8 * b);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<double> f64_array() {
        const uint64_t n = u64();
        std::vector<double> v(n);
        for (uint64_t i = 0; i < n; ++i) v[i] = f64();
        return v;
    }
    std::vector<uint8_t> u8_array() {
        const uint64_t n = u64();
        std::vector<uint8_t> v(n);
        for (uint64_t i = 0; i < n; ++i) v[i] = u8();
        return v;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(size_t n) {
        if (pos_ + n > bytes_.size()) throw DataError("snapshot: truncated file");
    }
    const std::string& bytes_;
    size_t pos_ = 0;
};

void write_attributes(Writer& w, const std::vector<AttributeSpec>& attrs) {
    w.u32(static_cast<uint32_t>(attrs.size()));
    for (const auto& a : attrs) {
        w.str(a.name);
        w.u32(static_cast<uint32_t>(a.states.size()));
        for (const auto& s : a.states) w.str(s);
    }
}

std::vector<AttributeSpec> read_attributes(Reader& r) {
    std::vector<AttributeSpec> attrs(r.u32());
    for (auto& a : attrs) {
        a.name = r.str();
        a.states.resize(r.u32());
        for (auto& s : a.states) s = r.str();
    }
    return attrs;
}

}  // namespace

std::string serialize_snapshot(const Model& model) {
    const NetworkConfig& cfg = model.config;
    Writer w;
    for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
    w.u32(kVersion);

    write_attributes(w, cfg.input);
    write_attributes(w, cfg.hidden);
    w.u8_array(cfg.connectivity);
    w.f64(cfg.rho);
    w.f64(cfg.tau_p);
    w.u8(cfg.anneal ? 1 : 0);
    w.f64(cfg.epsilon_floor);
    w.i32(cfg.structural_period);
    w.u8(cfg.recurrence ? 1 : 0);
    w.i32(cfg.max_settle_steps);
    w.f64(cfg.settle_tolerance);
    w.u8(cfg.spiking ? 1 : 0);
    w.f64(cfg.dt_ms);
    w.f64(cfg.f_max_hz);
    w.f64(cfg.tau_zi_ms);
    w.f64(cfg.tau_zj_ms);
    w.f64(cfg.spike_tau_p);
    w.i32(cfg.label_hypercolumn);
    w.str(cfg.purpose);
    w.str(cfg.declared_at);

    const TraceState& t = model.traces;
    w.u64(t.update_count);
    w.f64_array(t.marginal_pre);
    w.f64_array(t.marginal_post);
    w.f64_array(t.ff_joint);
    w.f64_array(t.rec_joint);
    w.f64_array(t.inprc_joint);
    w.u8_array(t.mask);
    return w.take();
}

Model deserialize_snapshot(const std::string& bytes) {
    Reader r(bytes);
    for (char c : kMagic) {
        if (r.u8() != static_cast<uint8_t>(c)) throw DataError("snapshot: bad magic");
    }
    const uint32_t version = r.u32();
    if (version != kVersion)
        throw DataError("snapshot: unsupported format version " + std::to_string(version));

    NetworkConfig cfg;
    cfg.input = read_attributes(r);
    cfg.hidden = read_attributes(r);
    cfg.connectivity = r.u8_array();
    cfg.rho = r.f64();
    cfg.tau_p = r.f64();
    cfg.anneal = r.u8() != 0;
    cfg.epsilon_floor = r.f64();
    cfg.structural_period = r.i32();
    cfg.recurrence = r.u8() != 0;
    cfg.max_settle_steps = r.i32();
    cfg.settle_tolerance = r.f64();
    cfg.spiking = r.u8() != 0;
    cfg.dt_ms = r.f64();
    cfg.f_max_hz = r.f64();
    cfg.tau_zi_ms = r.f64();
    cfg.tau_zj_ms = r.f64();
    cfg.spike_tau_p = r.f64();
    cfg.label_hypercolumn = r.i32();
    cfg.purpose = r.str();
    cfg.declared_at = r.str();

    Model model(cfg);  // validates and sizes the trace arrays
    TraceState& t = model.traces;
    t.update_count = r.u64();

    auto take = [&](std::vector<double>& dst, const char* what) {
        std::vector<double> v = r.f64_array();
        if (v.size() != dst.size())
            throw DataError(std::string("snapshot: ") + what + " has wrong length");
        dst = std::move(v);
    };
    take(t.marginal_pre, "marginal_pre");
    take(t.marginal_post, "marginal_post");
    take(t.ff_joint, "ff_joint");
    take(t.rec_joint, "rec_joint");
    take(t.inprc_joint, "inprc_joint");
    std::vector<uint8_t> mask = r.u8_array();
    if (mask.size() != t.mask.size()) throw DataError("snapshot: mask has wrong length");
    t.mask = std::move(mask);
    if (!r.done()) throw DataError("snapshot: trailing bytes");
    return model;
}

void save_snapshot(const Model& model, const std::string& path) {
    const std::string bytes = serialize_snapshot(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("snapshot: cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("snapshot: write failed for '" + path + "'");
}

Model load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("snapshot: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_snapshot(buf.str());
}

uint64_t snapshot_file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("snapshot: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

}  // namespace bcpnn
