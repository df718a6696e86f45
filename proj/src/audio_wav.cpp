#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "qawa/audio.hpp"
#include "qawa/error.hpp"

namespace qawa {

namespace {

uint16_t rd_u16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t rd_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void wr_u16(std::string& s, uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void wr_u32(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

AudioBuffer decode_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open audio file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const size_t n = bytes.size();

    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw DataError(path + ": not a RIFF/WAVE file");

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    size_t data_size = 0;

    size_t off = 12;
    while (off + 8 <= n) {
        const char* tag = reinterpret_cast<const char*>(p + off);
        uint32_t chunk_size = rd_u32(p + off + 4);
        size_t body = off + 8;
        if (body + chunk_size > n)
            throw DataError(path + ": truncated chunk '" + std::string(tag, 4) + "'");
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw DataError(path + ": fmt chunk too short");
            format = rd_u16(p + body);
            channels = rd_u16(p + body + 2);
            sample_rate = rd_u32(p + body + 4);
            bits = rd_u16(p + body + 14);
            if (format == 0xfffe && chunk_size >= 40) {
                // WAVE_FORMAT_EXTENSIBLE: actual format is the first word of
                // the subformat GUID.
                format = rd_u16(p + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data = p + body;
            data_size = chunk_size;
        }
        off = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) throw DataError(path + ": missing fmt chunk");
    if (!data) throw DataError(path + ": missing data chunk");
    if (channels == 0 || sample_rate == 0) throw DataError(path + ": invalid fmt fields");

    AudioBuffer b;
    b.sample_rate = static_cast<int>(sample_rate);
    b.channels = channels;
    if (format == 1 && bits == 16) {
        const size_t count = data_size / 2;
        b.samples.resize(count);
        for (size_t i = 0; i < count; ++i) {
            int16_t v = static_cast<int16_t>(rd_u16(data + 2 * i));
            b.samples[i] = static_cast<float>(v / 32768.0);
        }
    } else if (format == 3 && bits == 32) {
        const size_t count = data_size / 4;
        b.samples.resize(count);
        for (size_t i = 0; i < count; ++i) {
            uint32_t u = rd_u32(data + 4 * i);
            float f;
            std::memcpy(&f, &u, 4);
            b.samples[i] = std::min(1.0f, std::max(-1.0f, f));
        }
    } else {
        throw DataError(path + ": unsupported codec (format " + std::to_string(format) + ", " +
                        std::to_string(bits) + "-bit); expected PCM 16-bit or float32");
    }
    // drop trailing partial frame, if any
    b.samples.resize(b.frames() * static_cast<size_t>(b.channels));
    return b;
}

void encode_wav(const AudioBuffer& b, const std::string& path) {
    if (b.channels < 1) throw ValidationError("encode_wav: buffer has no channels");
    std::string out;
    const uint32_t data_size = static_cast<uint32_t>(b.samples.size() * 2);
    out.reserve(44 + data_size);
    out += "RIFF";
    wr_u32(out, 36 + data_size);
    out += "WAVE";
    out += "fmt ";
    wr_u32(out, 16);
    wr_u16(out, 1);  // PCM
    wr_u16(out, static_cast<uint16_t>(b.channels));
    wr_u32(out, static_cast<uint32_t>(b.sample_rate));
    wr_u32(out, static_cast<uint32_t>(b.sample_rate * b.channels * 2));
    wr_u16(out, static_cast<uint16_t>(b.channels * 2));
    wr_u16(out, 16);
    out += "data";
    wr_u32(out, data_size);
    for (float x : b.samples) {
        long v = std::lrint(static_cast<double>(x) * 32768.0);
        if (v > 32767) v = 32767;
        if (v < -32768) v = -32768;
        wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    }

    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write audio file: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace qawa
