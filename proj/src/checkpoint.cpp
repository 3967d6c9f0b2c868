#include "gcflite/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gcflite {
namespace {

constexpr char kMagic[4] = {'G', 'C', 'F', 'L'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "byte-level serialization below assumes a little-endian host");

struct Writer {
    std::string buf;

    void bytes(const void* p, std::size_t n) {
        buf.append(static_cast<const char*>(p), n);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    template <class T>
    void scalar(T v) { bytes(&v, sizeof v); }
};

struct Reader {
    const char* p;
    const char* end;

    void bytes(void* out, std::size_t n) {
        if (static_cast<std::size_t>(end - p) < n)
            throw std::runtime_error("corrupt checkpoint: unexpected end of file");
        std::memcpy(out, p, n);
        p += n;
    }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    template <class T>
    T scalar() { T v; bytes(&v, sizeof v); return v; }
};

template <class T>
void write_matrix_blob(Writer& w, const DenseMatrix<T>& m) {
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(m.rows));
    w.u32(static_cast<std::uint32_t>(m.cols));
    w.u8(static_cast<std::uint8_t>(sizeof(T) * 8));
    for (T v : m.data) w.scalar(v);
}

template <class T>
DenseMatrix<T> read_matrix_blob(Reader& r) {
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("corrupt checkpoint: bad magic");
    if (const auto version = r.u32(); version != kVersion)
        throw std::runtime_error("corrupt checkpoint: unsupported version " +
                                 std::to_string(version));
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    const std::uint8_t width = r.u8();
    if (width != sizeof(T) * 8)
        throw std::runtime_error("checkpoint holds " + std::to_string(int(width)) +
                                 "-bit scalars, expected " + std::to_string(sizeof(T) * 8));
    DenseMatrix<T> m(rows, cols);
    for (auto& v : m.data) v = r.scalar<T>();
    return m;
}

template <class T>
void write_assignment_blob(Writer& w, const SparseAssignment<T>& s) {
    w.u32(static_cast<std::uint32_t>(s.n_entities));
    w.u32(static_cast<std::uint32_t>(s.n_codes));
    w.u32(static_cast<std::uint32_t>(s.t));
    w.u64(s.nnz());
    for (std::size_t i = 0; i < s.n_entities; ++i)
        for (std::uint64_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
            w.u32(static_cast<std::uint32_t>(i));
            w.u32(s.col_idx[k]);
            w.f64(static_cast<double>(s.weights[k]));
        }
}

template <class T>
SparseAssignment<T> read_assignment_blob(Reader& r) {
    SparseAssignment<T> s;
    s.n_entities = r.u32();
    s.n_codes = r.u32();
    s.t = r.u32();
    const std::uint64_t nnz = r.u64();
    s.row_ptr.assign(s.n_entities + 1, 0);
    s.col_idx.reserve(nnz);
    s.weights.reserve(nnz);
    std::uint32_t prev_row = 0;
    for (std::uint64_t k = 0; k < nnz; ++k) {
        const std::uint32_t row = r.u32();
        const std::uint32_t col = r.u32();
        const double weight = r.f64();
        if (row < prev_row || row >= s.n_entities)
            throw std::runtime_error("corrupt checkpoint: assignment rows out of order");
        prev_row = row;
        s.col_idx.push_back(col);
        s.weights.push_back(static_cast<T>(weight));
        s.row_ptr[row + 1] = k + 1;
    }
    // rows without entries inherit the previous offset
    for (std::size_t i = 1; i <= s.n_entities; ++i)
        s.row_ptr[i] = std::max(s.row_ptr[i], s.row_ptr[i - 1]);
    s.refresh_anchors();
    s.validate();
    return s;
}

void atomic_write(const std::string& path, const std::string& data) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

} // namespace

template <class T>
void save_checkpoint(const std::string& path, const Checkpoint<T>& ck) {
    Writer w;
    write_matrix_blob(w, ck.codebook.rows);
    write_assignment_blob(w, ck.assignment);
    write_matrix_blob(w, ck.adam_m);
    write_matrix_blob(w, ck.adam_v);
    w.u64(ck.step);
    w.u32(ck.epoch);
    w.u8(static_cast<std::uint8_t>(ck.phase));
    w.u32(ck.layers);
    atomic_write(path, w.buf);
}

template <class T>
Checkpoint<T> load_checkpoint(const std::string& path) {
    const std::string data = read_file(path);
    Reader r{data.data(), data.data() + data.size()};
    Checkpoint<T> ck;
    ck.codebook.rows = read_matrix_blob<T>(r);
    ck.assignment = read_assignment_blob<T>(r);
    ck.adam_m = read_matrix_blob<T>(r);
    ck.adam_v = read_matrix_blob<T>(r);
    ck.step = r.u64();
    ck.epoch = r.u32();
    const std::uint8_t phase = r.u8();
    if (phase > 1) throw std::runtime_error("corrupt checkpoint: bad phase byte");
    ck.phase = static_cast<Phase>(phase);
    ck.layers = r.u32();
    if (r.p != r.end) throw std::runtime_error("corrupt checkpoint: trailing bytes");

    if (ck.assignment.n_codes != ck.codebook.size())
        throw std::runtime_error("corrupt checkpoint: assignment/codebook bucket mismatch");
    if (ck.adam_m.rows != ck.codebook.size() || ck.adam_m.cols != ck.codebook.dim() ||
        ck.adam_v.rows != ck.codebook.size() || ck.adam_v.cols != ck.codebook.dim())
        throw std::runtime_error("corrupt checkpoint: optimizer state shape mismatch");
    return ck;
}

int peek_scalar_width(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char header[17];   // magic, version, rows, cols, width
    in.read(header, sizeof header);
    if (!in || std::memcmp(header, kMagic, 4) != 0)
        throw std::runtime_error("corrupt checkpoint: bad magic");
    const int width = static_cast<unsigned char>(header[16]);
    if (width != 32 && width != 64)
        throw std::runtime_error("corrupt checkpoint: bad scalar width");
    return width;
}

template <class T>
void save_embedding_blob(const std::string& path, const DenseMatrix<T>& m) {
    Writer w;
    write_matrix_blob(w, m);
    atomic_write(path, w.buf);
}

template <class T>
DenseMatrix<T> load_embedding_blob(const std::string& path) {
    const std::string data = read_file(path);
    Reader r{data.data(), data.data() + data.size()};
    DenseMatrix<T> m = read_matrix_blob<T>(r);
    if (r.p != r.end) throw std::runtime_error("corrupt embedding file: trailing bytes");
    return m;
}

template void save_checkpoint(const std::string&, const Checkpoint<float>&);
template void save_checkpoint(const std::string&, const Checkpoint<double>&);
template Checkpoint<float> load_checkpoint(const std::string&);
template Checkpoint<double> load_checkpoint(const std::string&);
template void save_embedding_blob(const std::string&, const DenseMatrix<float>&);
template void save_embedding_blob(const std::string&, const DenseMatrix<double>&);
template DenseMatrix<float> load_embedding_blob(const std::string&);
template DenseMatrix<double> load_embedding_blob(const std::string&);

} // namespace gcflite
