#include "csdr/checkpoint.hpp"

#include <cmath>

#include "csdr/util.hpp"

namespace csdr {

namespace {
constexpr char kMagic[4] = {'Q', 'D', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;
} // namespace

void save_checkpoint(const std::filesystem::path& path, int T, const Denoiser& net) {
    if (T < 1) throw std::invalid_argument("save_checkpoint: bad step count");
    std::string buf;
    buf.reserve(28 + net.params.size() * 4);
    buf.append(kMagic, 4);
    put_u32le(buf, kVersion);
    put_u32le(buf, std::uint32_t(T));
    put_u32le(buf, std::uint32_t(net.cfg.base_channels));
    put_u32le(buf, std::uint32_t(net.cfg.levels));
    put_u64le(buf, net.params.size());
    for (float v : net.params) {
        if (!std::isfinite(v)) throw std::invalid_argument("save_checkpoint: non-finite parameter");
        put_f32le(buf, v);
    }
    write_file_atomic(path, buf);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    ByteReader r(buf);
    if (r.bytes(4) != std::string(kMagic, 4)) throw IoError("bad magic in " + path.string());
    const std::uint32_t version = r.u32le();
    if (version != kVersion)
        throw IoError("unsupported checkpoint version " + std::to_string(version) + " in " +
                      path.string());
    Checkpoint ck;
    ck.T = int(r.u32le());
    UNetConfig cfg;
    cfg.base_channels = int(r.u32le());
    cfg.levels = int(r.u32le());
    if (ck.T < 1 || cfg.base_channels < 1 || cfg.base_channels > 4096 || cfg.levels < 1 ||
        cfg.levels > 10)
        throw IoError("implausible header in " + path.string());
    const std::uint64_t n = r.u64le();
    ck.net = Denoiser(cfg);
    if (n != ck.net.params.size())
        throw IoError("parameter count mismatch in " + path.string() + ": header says " +
                      std::to_string(n) + ", architecture needs " +
                      std::to_string(ck.net.params.size()));
    for (std::size_t k = 0; k < n; ++k) {
        ck.net.params[k] = r.f32le();
        if (!std::isfinite(ck.net.params[k]))
            throw IoError("non-finite parameter in " + path.string());
    }
    if (!r.done()) throw IoError("trailing bytes in " + path.string());
    return ck;
}

} // namespace csdr
