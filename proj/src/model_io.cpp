#include "asds/model_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace asds {

namespace {

constexpr uint16_t kModelVersion = 1;

// The format is pinned to little-endian scalars.
static_assert(sizeof(double) == 8, "model format requires 64-bit doubles");

class Writer {
public:
    void u16(uint16_t v) { bytes_le(&v, 2); }
    void u32(uint32_t v) { bytes_le(&v, 4); }
    void f64(double v) { bytes_le(&v, 8); }
    void raw(const void* p, size_t n) {
        const char* c = static_cast<const char*>(p);
        buf.insert(buf.end(), c, c + n);
    }
    std::vector<char> buf;

private:
    void bytes_le(const void* p, size_t n) {
        unsigned char tmp[8];
        std::memcpy(tmp, p, n);
        if (!host_is_little_endian())
            for (size_t i = 0; i < n / 2; ++i)
                std::swap(tmp[i], tmp[n - 1 - i]);
        raw(tmp, n);
    }
    static bool host_is_little_endian() {
        uint16_t probe = 1;
        unsigned char b;
        std::memcpy(&b, &probe, 1);
        return b == 1;
    }
};

class Reader {
public:
    explicit Reader(std::vector<char> data) : buf(std::move(data)) {}
    uint16_t u16() {
        uint16_t v = 0;
        bytes_le(&v, 2);
        return v;
    }
    uint32_t u32() {
        uint32_t v = 0;
        bytes_le(&v, 4);
        return v;
    }
    double f64() {
        double v = 0;
        bytes_le(&v, 8);
        return v;
    }
    void raw(void* p, size_t n) {
        if (pos + n > buf.size())
            throw std::runtime_error("model file truncated");
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    size_t position() const { return pos; }
    const std::vector<char> buf;

private:
    size_t pos = 0;
    void bytes_le(void* p, size_t n) {
        unsigned char tmp[8];
        raw(tmp, n);
        uint16_t probe = 1;
        unsigned char b;
        std::memcpy(&b, &probe, 1);
        if (b != 1)
            for (size_t i = 0; i < n / 2; ++i)
                std::swap(tmp[i], tmp[n - 1 - i]);
        std::memcpy(p, tmp, n);
    }
};

uint32_t crc_of(const char* data, size_t n) {
    return static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

} // namespace

void save_model(const LearnedModel& model, const std::string& path) {
    int n = model.patch_area();
    Writer w;
    w.raw("ASDS", 4);
    w.u16(kModelVersion);
    w.u16(static_cast<uint16_t>(model.patch_size));
    w.u32(static_cast<uint32_t>(model.cluster_count()));
    w.u32(static_cast<uint32_t>(model.projector.rows()));
    w.u32(static_cast<uint32_t>(model.projector.cols()));
    for (int r = 0; r < model.projector.rows(); ++r)
        for (int c = 0; c < model.projector.cols(); ++c)
            w.f64(model.projector(r, c));
    for (int k = 0; k < model.cluster_count(); ++k) {
        for (int j = 0; j < n; ++j)
            w.f64(model.centroids[k][j]);
        const SubDictionary& d = model.dictionaries[k];
        w.u32(static_cast<uint32_t>(d.rank));
        for (int a = 0; a < d.rank; ++a)
            for (int j = 0; j < n; ++j)
                w.f64(d.atoms(j, a));
        for (double c : model.ar_models[k].coeffs)
            w.f64(c);
    }
    w.u32(crc_of(w.buf.data(), w.buf.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

LearnedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 16)
        throw std::runtime_error("model file truncated: " + path);

    uint32_t stored_crc;
    {
        Reader tail(std::vector<char>(data.end() - 4, data.end()));
        stored_crc = tail.u32();
    }
    if (crc_of(data.data(), data.size() - 4) != stored_crc)
        throw std::runtime_error("model file CRC mismatch: " + path);

    Reader r(std::move(data));
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, "ASDS", 4) != 0)
        throw std::runtime_error("not a model file (bad magic): " + path);
    uint16_t version = r.u16();
    if (version != kModelVersion)
        throw std::runtime_error("unsupported model version " + std::to_string(version));

    LearnedModel model;
    model.patch_size = r.u16();
    if (model.patch_size < 1)
        throw std::runtime_error("model file corrupt (patch size): " + path);
    int n = model.patch_area();
    uint32_t K = r.u32();
    uint32_t proj_rows = r.u32();
    uint32_t proj_cols = r.u32();
    if (proj_cols != static_cast<uint32_t>(n))
        throw std::runtime_error("model file corrupt (projector dims): " + path);
    model.projector.resize(proj_rows, proj_cols);
    for (uint32_t i = 0; i < proj_rows; ++i)
        for (uint32_t j = 0; j < proj_cols; ++j)
            model.projector(i, j) = r.f64();
    for (uint32_t k = 0; k < K; ++k) {
        Eigen::VectorXd centroid(n);
        for (int j = 0; j < n; ++j)
            centroid[j] = r.f64();
        model.centroids.push_back(std::move(centroid));
        SubDictionary d;
        d.rank = static_cast<int>(r.u32());
        if (d.rank < 1 || d.rank > n)
            throw std::runtime_error("model file corrupt (rank): " + path);
        d.atoms.resize(n, d.rank);
        for (int a = 0; a < d.rank; ++a)
            for (int j = 0; j < n; ++j)
                d.atoms(j, a) = r.f64();
        model.dictionaries.push_back(std::move(d));
        ARModel ar;
        for (double& c : ar.coeffs)
            c = r.f64();
        model.ar_models.push_back(ar);
    }
    if (r.position() != r.buf.size() - 4)
        throw std::runtime_error("model file has trailing data: " + path);
    return model;
}

} // namespace asds
