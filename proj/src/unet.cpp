#include "csdr/unet.hpp"

#include <stdexcept>

namespace csdr {

std::vector<LayerInfo> make_layout(const UNetConfig& cfg) {
    if (cfg.levels < 1) throw std::invalid_argument("make_layout: need at least one level");
    if (cfg.base_channels < 1 || cfg.in_channels < 4 || cfg.out_channels < 1)
        throw std::invalid_argument("make_layout: bad channel counts");
    if (cfg.in_channels != 3 + cfg.time_dim)
        throw std::invalid_argument("make_layout: in_channels must equal 3 + time_dim");

    std::vector<LayerInfo> lt;
    std::size_t off = 0;
    auto add = [&](const std::string& name, LayerInfo::Kind kind, int c_out, int c_in) {
        LayerInfo li;
        li.name = name;
        li.kind = kind;
        li.c_out = c_out;
        li.c_in = c_in;
        li.w_count = kind == LayerInfo::kConv ? std::size_t(c_out) * c_in * 9
                                              : std::size_t(c_out) * c_in;
        li.b_count = std::size_t(c_out);
        li.w_offset = off;
        off += li.w_count;
        li.b_offset = off;
        off += li.b_count;
        lt.push_back(std::move(li));
    };

    const int B = cfg.base_channels, D = cfg.time_dim;
    add("time_mlp.dense1", LayerInfo::kDense, D, D);
    add("time_mlp.dense2", LayerInfo::kDense, D, D);
    add("input_proj", LayerInfo::kConv, B, cfg.in_channels);
    for (int l = 0; l < cfg.levels; ++l) {
        add("enc" + std::to_string(l) + ".conv0", LayerInfo::kConv, B, B);
        add("enc" + std::to_string(l) + ".conv1", LayerInfo::kConv, B, B);
    }
    if (cfg.bottleneck) {
        add("bottleneck.conv0", LayerInfo::kConv, B, B);
        add("bottleneck.conv1", LayerInfo::kConv, B, B);
    }
    for (int l = 0; l < cfg.levels; ++l) {
        add("dec" + std::to_string(l) + ".conv0", LayerInfo::kConv, B, 2 * B);
        add("dec" + std::to_string(l) + ".conv1", LayerInfo::kConv, B, B);
    }
    add("output", LayerInfo::kConv, cfg.out_channels, B);
    return lt;
}

std::size_t param_count(const UNetConfig& cfg) {
    const auto lt = make_layout(cfg);
    const auto& last = lt.back();
    return last.b_offset + last.b_count;
}

} // namespace csdr
