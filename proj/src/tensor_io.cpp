#include <dscsim/error.hpp>
#include <dscsim/tensor_io.hpp>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace dscsim {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    const std::array<char, 4> bytes = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    os.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_dim(std::size_t v) {
    if (v > UINT32_MAX) {
        throw Error(ErrorCode::Overflow, "tensor dimension does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

void read_exact(std::istream& is, void* dst, std::size_t n, const char* what) {
    is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) {
        throw Error(ErrorCode::TruncatedStream, std::string("while reading ") + what);
    }
}

}  // namespace

void write_tensor(const QuantTensor& t, std::ostream& sink) {
    sink.write(kQtsrMagic, sizeof(kQtsrMagic));
    sink.put(static_cast<char>(kQtsrVersion));
    put_u32(sink, checked_dim(t.height()));
    put_u32(sink, checked_dim(t.width()));
    put_u32(sink, checked_dim(t.channels()));
    sink.put(static_cast<char>(t.zero_point()));
    put_u32(sink, std::bit_cast<std::uint32_t>(t.qparams().scale));
    const auto data = t.data();
    sink.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

QuantTensor read_tensor(std::istream& source) {
    std::array<unsigned char, kQtsrHeaderBytes> hdr{};
    read_exact(source, hdr.data(), 4, "magic");
    if (std::memcmp(hdr.data(), kQtsrMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "expected \"QTSR\"");
    }
    read_exact(source, hdr.data() + 4, 1, "version");
    if (hdr[4] != kQtsrVersion) {
        throw Error(ErrorCode::VersionMismatch, "version " + std::to_string(hdr[4]));
    }
    read_exact(source, hdr.data() + 5, kQtsrHeaderBytes - 5, "header");

    const std::uint32_t h = get_u32(&hdr[5]);
    const std::uint32_t w = get_u32(&hdr[9]);
    const std::uint32_t c = get_u32(&hdr[13]);
    QuantParams qp;
    qp.zero_point = static_cast<std::int8_t>(hdr[17]);
    qp.scale = std::bit_cast<float>(get_u32(&hdr[18]));

    const std::uint64_t n = std::uint64_t{h} * w * c;
    std::vector<std::int8_t> data;
    // Grow while reading so a lying header cannot force a huge allocation.
    constexpr std::size_t kChunk = 1 << 16;
    while (data.size() < n) {
        const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, n - data.size()));
        const std::size_t at = data.size();
        data.resize(at + take);
        read_exact(source, data.data() + at, take, "tensor data");
    }
    return QuantTensor(h, w, c, qp, std::move(data));
}

void save_tensor(const QuantTensor& t, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    write_tensor(t, os);
    os.flush();
    if (!os) {
        throw Error(ErrorCode::IoError, "write failed: " + path.string());
    }
}

QuantTensor load_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_tensor(is);
}

}  // namespace dscsim
